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

"""Run configuration and its flat ``key = value`` document format."""

import collections
import math

from pbprnn.agent.mpc import CostWeights
from pbprnn.exceptions import ConfigError
from pbprnn.seeding import MAX_SEED


PBP_RNN = 'pbp_rnn'
MDE = 'mde'
MODEL_KINDS = (PBP_RNN, MDE)

DEFAULT_EPOCHS = {
    PBP_RNN: (5, 2),
    MDE: (100, 10),
}


_RunConfigTuple = collections.namedtuple('RunConfig', [
    'seed', 'model_kind', 'seed_episodes', 'retrain_interval',
    'initial_epochs', 'subsequent_epochs', 'eval_episodes', 'repetitions',
    'noise_levels', 'drop_levels', 'weights', 'batch_size',
    'sequence_length', 'hidden_dim', 'ensemble_size', 'dropout_rate',
    'passes_per_member', 'learning_rate', 'sweep_episodes',
    'timing_queries', 'workers', 'max_steps', 'eval_noise', 'eval_dropped',
])


class RunConfig(_RunConfigTuple):
    """Every knob of a training and evaluation run.

    ``initial_epochs`` and ``subsequent_epochs`` may be ``None``, in which
    case the defaults of ``model_kind`` apply (see :attr:`epochs`).
    """
    __slots__ = ()

    @classmethod
    def default(cls):
        return cls(
            seed=0,
            model_kind=PBP_RNN,
            seed_episodes=100,
            retrain_interval=10,
            initial_epochs=None,
            subsequent_epochs=None,
            eval_episodes=20,
            repetitions=10,
            noise_levels=(0.0, 0.0025, 0.005, 0.0075, 0.01),
            drop_levels=tuple(range(9)),
            weights=CostWeights(),
            batch_size=500,
            sequence_length=8,
            hidden_dim=16,
            ensemble_size=5,
            dropout_rate=0.7,
            passes_per_member=20,
            learning_rate=0.001,
            sweep_episodes=10,
            timing_queries=1000,
            workers=1,
            max_steps=50,
            eval_noise=0.005,
            eval_dropped=5,
        )

    @property
    def epochs(self):
        """``(initial, subsequent)`` epoch counts for :attr:`model_kind`."""
        initial, subsequent = DEFAULT_EPOCHS[self.model_kind]
        if self.initial_epochs is not None:
            initial = self.initial_epochs
        if self.subsequent_epochs is not None:
            subsequent = self.subsequent_epochs
        return initial, subsequent

    def for_model(self, model_kind):
        return self._replace(model_kind=model_kind)

    def as_dict(self):
        """JSON-ready view, with the epochs resolved."""
        data = self._asdict()
        data['weights'] = dict(self.weights._asdict())
        data['noise_levels'] = list(self.noise_levels)
        data['drop_levels'] = list(self.drop_levels)
        data['initial_epochs'], data['subsequent_epochs'] = self.epochs
        return data


def _integer(text):
    if text.lstrip('+-').isdigit():
        return int(text)
    raise ValueError('not an integer: %r' % text)


def _real(text):
    value = float(text)
    if not math.isfinite(value):
        raise ValueError('not a finite number: %r' % text)
    return value


def _real_list(text):
    return tuple(_real(item.strip()) for item in text.split(',') if item.strip())


def _integer_list(text):
    return tuple(_integer(item.strip())
                 for item in text.split(',') if item.strip())


def _model_kind(text):
    if text not in MODEL_KINDS:
        raise ValueError('expected one of %s' % ', '.join(MODEL_KINDS))
    return text


def _at_least(minimum):
    def check(value):
        return value >= minimum
    return check


def _between(low, high):
    def check(value):
        return low <= value <= high
    return check


def _non_negative_items(values):
    return all(value >= 0 for value in values)


_KEYS = {
    'seed': (_integer, _between(0, MAX_SEED)),
    'model_kind': (_model_kind, None),
    'seed_episodes': (_integer, _at_least(1)),
    'retrain_interval': (_integer, _at_least(1)),
    'initial_epochs': (_integer, _at_least(1)),
    'subsequent_epochs': (_integer, _at_least(1)),
    'eval_episodes': (_integer, _at_least(1)),
    'repetitions': (_integer, _at_least(1)),
    'noise_levels': (_real_list, _non_negative_items),
    'drop_levels': (_integer_list, _non_negative_items),
    'batch_size': (_integer, _at_least(2)),
    'sequence_length': (_integer, _at_least(1)),
    'hidden_dim': (_integer, _at_least(1)),
    'ensemble_size': (_integer, _at_least(1)),
    'dropout_rate': (_real, lambda value: 0.0 <= value < 1.0),
    'passes_per_member': (_integer, _at_least(1)),
    'learning_rate': (_real, lambda value: value > 0.0),
    'sweep_episodes': (_integer, _at_least(1)),
    'timing_queries': (_integer, _at_least(10)),
    'workers': (_integer, _at_least(1)),
    'max_steps': (_integer, _at_least(1)),
    'eval_noise': (_real, _at_least(0.0)),
    'eval_dropped': (_integer, _at_least(0)),
    'lambda_c': (_real, _at_least(0.0)),
    'lambda_v': (_real, _at_least(0.0)),
    'lambda_d': (_real, _at_least(0.0)),
}

_WEIGHT_KEYS = {
    'lambda_c': 'lambda_c',
    'lambda_v': 'lambda_v_base',
    'lambda_d': 'lambda_d',
}


def parse_config(text, base=None):
    """Parse a flat configuration document.

    One ``key = value`` pair per line; ``#`` starts a comment; list values
    are comma separated. Keys that are absent keep the value from ``base``
    (the defaults when omitted).

    :type text: str
    :param text: the document.

    :type base: :class:`RunConfig`
    :param base: (Optional) the values to start from.

    :rtype: :class:`RunConfig`
    :returns: the parsed configuration.

    :raises: :class:`~pbprnn.exceptions.ConfigError` naming the line and key
             of a malformed line, an unknown or repeated key, or a value that
             does not parse or is out of range.
    """
    config = RunConfig.default() if base is None else base
    values = {}
    weights = dict(config.weights._asdict())
    seen = set()
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigError('expected "key = value"', line=number)
        key, value = (part.strip() for part in line.split('=', 1))
        if key not in _KEYS:
            raise ConfigError('unknown key', line=number, key=key)
        if key in seen:
            raise ConfigError('repeated key', line=number, key=key)
        seen.add(key)
        parse, check = _KEYS[key]
        try:
            parsed = parse(value)
        except ValueError:
            raise ConfigError('cannot parse %r' % value, line=number, key=key)
        if check is not None and not check(parsed):
            raise ConfigError('value %r out of range' % value, line=number,
                              key=key)
        if key in _WEIGHT_KEYS:
            weights[_WEIGHT_KEYS[key]] = parsed
        else:
            values[key] = parsed
    values['weights'] = CostWeights(**weights)
    config = config._replace(**values)
    if any(level > config.sequence_length for level in config.drop_levels):
        raise ConfigError('drop levels cannot exceed sequence_length %d' % (
            config.sequence_length,), key='drop_levels')
    if config.eval_dropped > config.sequence_length:
        raise ConfigError('eval_dropped cannot exceed sequence_length',
                          key='eval_dropped')
    return config
