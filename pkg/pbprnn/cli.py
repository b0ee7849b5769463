# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Command-line entry point.

Exit codes: 0 success, 1 usage or runtime error, 2 configuration error,
3 failed self-test.
"""

import argparse
import logging
import sys

from pbprnn.exceptions import ConfigError
from pbprnn.exceptions import Error
from pbprnn.experiments.config import MODEL_KINDS
from pbprnn.experiments.config import RunConfig
from pbprnn.experiments.config import parse_config
from pbprnn.experiments.runner import ExperimentRunner
from pbprnn.oracles import SUITES
from pbprnn.oracles import run_selftest
from pbprnn.seeding import check_seed
from pbprnn.version import VERSION


_LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_SELFTEST = 3

EXPERIMENT_COMMANDS = ('train', 'eval', 'sweep-noise', 'sweep-drop',
                       'bench-timing')


class UsageError(Exception):
    """Bad command-line arguments."""


class _Parser(argparse.ArgumentParser):

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError('must be at least 1, got %d' % value)
    return value


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument('--seed', type=int, default=None,
                        help='master seed (overrides the config file)')
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true')
    verbosity.add_argument('-q', '--quiet', action='store_true')

    experiment = _Parser(add_help=False)
    experiment.add_argument('--config', help='flat key = value file')
    experiment.add_argument('--model', choices=MODEL_KINDS, default=None)
    experiment.add_argument('--out', default='out',
                            help='output directory (default: %(default)s)')
    experiment.add_argument('--checkpoint',
                            help='model file written by train, read by the '
                                 'other commands')
    experiment.add_argument('--workers', type=_positive, default=None)
    experiment.add_argument('--episodes-override', type=_positive,
                            default=None,
                            help='replaces eval_episodes and sweep_episodes')
    experiment.add_argument('--trace', action='store_true',
                            help='export episode and cost traces')

    parser = _Parser(prog='pbprnn', description=(
        'Bayesian recurrent collision prediction experiments.'))
    parser.add_argument('--version', action='version',
                        version='%(prog)s ' + VERSION)
    commands = parser.add_subparsers(dest='command', metavar='command')
    commands.required = True
    for name in EXPERIMENT_COMMANDS:
        commands.add_parser(name, parents=[common, experiment])
    selftest = commands.add_parser('selftest', parents=[common])
    selftest.add_argument('--suite', action='append', choices=list(SUITES),
                          help='run only this oracle suite (repeatable)')
    return parser


def _configure_logging(args):
    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    logging.basicConfig(
        level=level,
        format='%(asctime)s %(levelname)s %(name)s: %(message)s')


def resolve_config(args):
    """The run configuration: file values, then command-line overrides.

    :raises: :class:`~pbprnn.exceptions.ConfigError`
    """
    config = RunConfig.default()
    if args.config:
        try:
            with open(args.config) as stream:
                text = stream.read()
        except OSError as exc:
            raise ConfigError('cannot read %s: %s' % (args.config,
                                                      exc.strerror))
        config = parse_config(text, config)
    changes = {}
    if args.seed is not None:
        changes['seed'] = args.seed
    if args.model is not None:
        changes['model_kind'] = args.model
    if args.workers is not None:
        changes['workers'] = args.workers
    if args.episodes_override is not None:
        changes['eval_episodes'] = args.episodes_override
        changes['sweep_episodes'] = args.episodes_override
    return config._replace(**changes)


def _selftest(args):
    results = run_selftest(0 if args.seed is None else args.seed,
                           args.suite)
    for result in results:
        print('%-20s %s  (%d cases) %s' % (
            result.name, 'ok' if result.passed else 'FAIL', result.cases,
            result.detail))
    return EXIT_OK if all(result.passed for result in results) else (
        EXIT_SELFTEST)


def main(argv=None):
    """Run the command line.

    :type argv: list of str
    :param argv: (Optional) arguments without the program name.

    :rtype: int
    :returns: the exit code.
    """
    try:
        args = build_parser().parse_args(argv)
        if args.seed is not None:
            check_seed(args.seed)
    except UsageError as exc:
        print('pbprnn: error: %s' % exc, file=sys.stderr)
        return EXIT_USAGE
    except Error as exc:
        print('pbprnn: error: %s' % exc, file=sys.stderr)
        return EXIT_USAGE
    _configure_logging(args)

    if args.command == 'selftest':
        return _selftest(args)
    try:
        config = resolve_config(args)
    except ConfigError as exc:
        print('pbprnn: config error: %s' % exc, file=sys.stderr)
        return EXIT_CONFIG
    runner = ExperimentRunner(config, args.out, checkpoint=args.checkpoint,
                              trace=args.trace)
    try:
        runner.run(args.command)
    except Error as exc:
        _LOGGER.debug('Command %s failed', args.command, exc_info=True)
        print('pbprnn: error: %s' % exc, file=sys.stderr)
        return EXIT_USAGE
    finally:
        runner.close()
    return EXIT_OK
