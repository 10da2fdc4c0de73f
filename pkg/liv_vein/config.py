'''
(c) University of Liverpool 2020

Licensed under the MIT License.

To view a copy of this license, visit <http://opensource.org/licenses/MIT/>..

@author: neilswainston
'''
# pylint: disable=too-many-instance-attributes
from dataclasses import asdict, dataclass, fields, replace
import logging
import os


_LOGGER = logging.getLogger(__name__)

ENV_VAR = 'VEIN_CONFIG'

ALGORITHMS = ('optimized', 'kmeans', 'fcm', 'otsu')

_TRUE = ('1', 'true', 'yes', 'on')
_FALSE = ('0', 'false', 'no', 'off')


class ConfigError(ValueError):
    '''Invalid configuration value, naming the offending key.'''

    def __init__(self, key, message):
        ValueError.__init__(self, '%s: %s' % (key, message))
        self.key = key


@dataclass(frozen=True)
class PipelineConfig:
    '''Every tunable of the pipeline.'''
    # Preprocessing:
    norm_window: int = 15
    target_mean: float = 0.5
    target_var: float = 0.01
    wiener_window: int = 3
    auto_adjust: bool = True
    stretch_percent: float = 1.0
    l_in: float = 0.0
    h_in: float = 1.0
    l_out: float = 0.2
    h_out: float = 0.6
    step: float = 0.1

    # Clustering (k 0 takes the quantized level count):
    k: int = 0
    algo: str = 'optimized'
    max_iter: int = 100
    fcm_m: float = 2.0
    fcm_eps: float = 1e-4
    seed: int = 0

    # Orientation and frequency:
    block_size: int = 16
    freq_window: int = 32

    # Extraction (kernel_size 0 takes 2 * ceil(3 sigma) + 1):
    sigma: float = 2.5
    kernel_size: int = 0
    percentile: float = 85.0
    area_ratio: float = 0.1
    se_length: int = 5
    min_area: int = 30
    roi_margin: int = 8

    # Benchmark:
    reps: int = 5

    def to_dict(self):
        '''Plain dict of values.'''
        return asdict(self)


def load_config(path=None, overrides=None, environ=None):
    '''Builds a config: overrides > file > defaults.

    Without an explicit path, the file named by VEIN_CONFIG is read.'''
    environ = os.environ if environ is None else environ
    path = path or environ.get(ENV_VAR)
    values = {}

    if path:
        values.update(read_config_file(path))

    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value

    return make_config(values)


def read_config_file(path):
    '''Parses flat key = value lines; # starts a comment.'''
    values = {}

    with open(path, 'r') as fle:
        for num, raw in enumerate(fle, 1):
            text = raw.split('#', 1)[0].strip()

            if not text:
                continue

            if '=' not in text:
                raise ConfigError('line %d' % num,
                                  'expected key = value in %s' % path)

            key, value = [part.strip() for part in text.split('=', 1)]
            values[key] = value

    _LOGGER.debug('Read %d config value(s) from %s', len(values), path)
    return values


def make_config(values):
    '''Coerces and validates a mapping of config values.'''
    types = {fld.name: fld.type for fld in fields(PipelineConfig)}
    coerced = {}

    for key, value in values.items():
        if key not in types:
            raise ConfigError(key, 'unknown config key')

        coerced[key] = _coerce(key, value, types[key])

    config = replace(PipelineConfig(), **coerced)
    validate(config)
    return config


def validate(config):
    '''Raises ConfigError naming the first invalid value.'''
    for key in ['norm_window', 'wiener_window']:
        value = getattr(config, key)
        _check(key, value >= 3 and value % 2 == 1, 'must be odd and >= 3')

    _check('target_mean', 0 <= config.target_mean <= 1, 'must lie in [0, 1]')
    _check('target_var', config.target_var > 0, 'must be > 0')
    _check('stretch_percent', 0 <= config.stretch_percent < 50,
           'must lie in [0, 50)')

    for key in ['l_in', 'h_in', 'l_out', 'h_out']:
        _check(key, 0 <= getattr(config, key) <= 1, 'must lie in [0, 1]')

    _check('h_in', config.l_in < config.h_in, 'must exceed l_in')
    _check('h_out', config.l_out < config.h_out, 'must exceed l_out')
    _check('step', 0 < config.step <= config.h_out - config.l_out + 1e-12,
           'must lie in (0, h_out - l_out]')

    _check('k', config.k >= 0, 'must be >= 0')
    _check('algo', config.algo in ALGORITHMS,
           'must be one of %s' % ', '.join(ALGORITHMS))
    _check('max_iter', config.max_iter >= 1, 'must be >= 1')
    _check('fcm_m', config.fcm_m > 1, 'must be > 1')
    _check('fcm_eps', config.fcm_eps > 0, 'must be > 0')

    _check('block_size', config.block_size >= 4, 'must be >= 4')
    _check('freq_window', config.freq_window >= 2 * config.block_size,
           'must be >= 2 * block_size')

    _check('sigma', config.sigma > 0, 'must be > 0')
    _check('kernel_size', config.kernel_size == 0 or
           (config.kernel_size >= 3 and config.kernel_size % 2 == 1),
           'must be 0 or odd and >= 3')
    _check('percentile', 0 < config.percentile <= 100,
           'must lie in (0, 100]')
    _check('area_ratio', 0 < config.area_ratio <= 1, 'must lie in (0, 1]')
    _check('se_length', config.se_length >= 1, 'must be >= 1')
    _check('min_area', config.min_area >= 0, 'must be >= 0')
    _check('roi_margin', config.roi_margin >= 0, 'must be >= 0')
    _check('reps', config.reps >= 3, 'must be >= 3')


def _coerce(key, value, typ):
    '''Converts a raw value to a field type.'''
    typ = {'int': int, 'float': float, 'bool': bool, 'str': str}.get(typ, typ)

    if isinstance(value, typ) and not (typ is int and
                                       isinstance(value, bool)):
        return value

    text = str(value).strip()

    try:
        if typ is bool:
            if text.lower() in _TRUE:
                return True

            if text.lower() in _FALSE:
                return False

            raise ValueError(text)

        if typ is int:
            return int(text)

        if typ is float:
            return float(text)

        return text
    except ValueError:
        raise ConfigError(key, 'cannot read %r as %s'
                          % (value, typ.__name__)) from None


def _check(key, condition, message):
    '''Raises ConfigError unless condition holds.'''
    if not condition:
        raise ConfigError(key, message)
