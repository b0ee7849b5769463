import re
from pathlib import Path
from setuptools import setup, find_packages

THIS_DIR = Path(__file__).resolve().parent
long_description = THIS_DIR.joinpath('README.rst').read_text()

# avoid loading the package before requirements are installed:
version = re.search(
    r"^VERSION = '([^']+)'",
    THIS_DIR.joinpath('pbprnn', 'version.py').read_text(),
    re.MULTILINE).group(1)


setup(
    name='pbprnn',
    version=version,
    description=('Probabilistic backpropagation for recurrent networks and '
                 'an MC-dropout ensemble baseline in a collision-avoidance '
                 'benchmark.'),
    long_description=long_description,
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Environment :: Console',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Artificial Intelligence',
        'License :: OSI Approved :: Apache Software License',
        'Operating System :: POSIX :: Linux'
    ],
    license='Apache 2.0',
    packages=find_packages(exclude=['contrib', 'docs', 'tests', 'tests.*']),
    include_package_data=True,
    zip_safe=True,
    python_requires='>=3.8',
    install_requires=[
        'numpy>=1.20',
        'scipy>=1.6',
        'ujson>=1.35',
        'asyncio_extras>=1.3.0',
    ],
    extras_require={
        'test': ['pytest>=6.0'],
    },
    entry_points={
        'console_scripts': ['pbprnn = pbprnn.cli:main'],
    },
)
