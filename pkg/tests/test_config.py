'''
(c) University of Liverpool 2020

Licensed under the MIT License.

To view a copy of this license, visit <http://opensource.org/licenses/MIT/>..

@author: neilswainston
'''
# pylint: disable=missing-function-docstring
import pytest

from liv_vein import config


def _write(tmp_path, text):
    path = tmp_path / 'vein.cfg'
    path.write_text(text)
    return str(path)


def test_defaults():
    cfg = config.load_config(environ={})

    assert cfg == config.PipelineConfig()
    assert cfg.norm_window == 15
    assert cfg.sigma == 2.5
    assert cfg.algo == 'optimized'
    assert cfg.to_dict()['percentile'] == 85.0


def test_file_values(tmp_path):
    path = _write(tmp_path, '# comment\nsigma = 3.0\n\nalgo = otsu  # cheap\n'
                            'auto_adjust = no\n')
    cfg = config.load_config(path, environ={})

    assert cfg.sigma == 3.0
    assert cfg.algo == 'otsu'
    assert cfg.auto_adjust is False


def test_overrides_beat_file(tmp_path):
    path = _write(tmp_path, 'sigma = 3.0\nmin_area = 12\n')
    cfg = config.load_config(path, {'sigma': 1.5, 'min_area': None},
                             environ={})

    assert cfg.sigma == 1.5
    assert cfg.min_area == 12


def test_environment_names_file(tmp_path):
    path = _write(tmp_path, 'k = 4\n')
    cfg = config.load_config(environ={config.ENV_VAR: path})
    assert cfg.k == 4


def test_unknown_key(tmp_path):
    path = _write(tmp_path, 'gamma = 2\n')

    with pytest.raises(config.ConfigError) as err:
        config.load_config(path, environ={})

    assert err.value.key == 'gamma'


def test_malformed_line(tmp_path):
    path = _write(tmp_path, 'sigma 3\n')

    with pytest.raises(config.ConfigError) as err:
        config.load_config(path, environ={})

    assert err.value.key == 'line 1'


@pytest.mark.parametrize('key, value', [
    ('norm_window', 4),
    ('wiener_window', 1),
    ('target_var', 0),
    ('step', 0.5),
    ('algo', 'dbscan'),
    ('fcm_m', 1.0),
    ('freq_window', 16),
    ('kernel_size', 4),
    ('percentile', 0),
    ('reps', 2),
    ('sigma', 'wide'),
    ('auto_adjust', 'maybe'),
])
def test_invalid_value_names_key(key, value):
    with pytest.raises(config.ConfigError) as err:
        config.load_config(overrides={key: value}, environ={})

    assert err.value.key == key
    assert isinstance(err.value, ValueError)


@pytest.mark.parametrize('text, expected', [('1', True), ('Yes', True),
                                            ('on', True), ('false', False),
                                            ('0', False)])
def test_bool_spellings(text, expected):
    cfg = config.make_config({'auto_adjust': text})
    assert cfg.auto_adjust is expected


def test_string_numbers_coerced():
    cfg = config.make_config({'k': '6', 'area_ratio': '0.2'})
    assert cfg.k == 6
    assert cfg.area_ratio == 0.2
