import pytest

from config import Config
from seedtarget.errors import ConfigError
from seedtarget.forms import read_config_file, resolve_run_config


class QuietConfig(Config):
    WORKERS = 3
    MASTER_SEED = 17
    REPLICATIONS = 500


@pytest.fixture
def run_file(tmp_path):
    def write(text):
        path = tmp_path / 'run.cfg'
        path.write_text(text, encoding='utf-8')
        return str(path)
    return write


def test_defaults_come_from_the_config_class():
    run = resolve_run_config(config_class=QuietConfig)
    assert run.workers == 3
    assert run.seed == 17
    assert run.replications == 500
    assert run.model == 'complex'
    assert run.lambda_mean is None
    assert run.model_lambda == 2.0
    assert not run.deterministic


def test_file_then_flags(run_file):
    path = run_file('# run settings\nperiods = 6\nreplications = 100   # quick\nlambda-mean = 1.5\nmodel = simple\n')
    run = resolve_run_config(config_path=path, replications=40, seed=None)
    assert run.periods == 6
    assert run.replications == 40
    assert run.lambda_mean == 1.5
    assert run.model == 'simple'
    assert run.seed == Config.MASTER_SEED


def test_read_config_file_reports_every_bad_line(run_file):
    path = run_file('periods = 3\nbogus = 1\n\nthis line has no equals\n')
    with pytest.raises(ConfigError) as excinfo:
        read_config_file(path)
    message = str(excinfo.value)
    assert "Line 2: unknown key 'bogus'" in message
    assert 'Line 4:' in message


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        read_config_file(str(tmp_path / 'absent.cfg'))


@pytest.mark.parametrize('flags, label', [
    ({'periods': 0}, 'periods'),
    ({'threshold_sd': -0.1}, 'threshold-sd'),
    ({'lambda_mean': 0.0}, 'lambda-mean'),
    ({'model': 'viral'}, 'model'),
    ({'periods': 3, 'objective_period': 4}, 'objective-period'),
    ({'radius_miles': -1.0}, 'radius-miles'),
    ({'top_k': -2}, 'top-k'),
])
def test_invalid_values_name_their_setting(flags, label):
    with pytest.raises(ConfigError) as excinfo:
        resolve_run_config(**flags)
    assert f'{label}:' in str(excinfo.value)


def test_non_numeric_file_value(run_file):
    with pytest.raises(ConfigError) as excinfo:
        resolve_run_config(config_path=run_file('replications = many\n'))
    assert 'replications:' in str(excinfo.value)


@pytest.mark.parametrize('text, expected', [('deterministic = yes\n', True), ('deterministic = false\n', False)])
def test_deterministic_from_file(run_file, text, expected):
    assert resolve_run_config(config_path=run_file(text)).deterministic is expected


def test_deterministic_zeroes_the_spread():
    run = resolve_run_config(deterministic=True, threshold_sd=0.8)
    config = run.diffusion_config()
    assert config.threshold_sd == 0.0
    assert config.is_deterministic
    assert run.as_dict()['effective_threshold_sd'] == 0.0
    assert run.as_dict()['threshold_sd'] == 0.8


def test_report_config_leaves_out_workers():
    assert 'workers' not in resolve_run_config(workers=4).as_dict()


def test_diffusion_config_carries_the_run():
    run = resolve_run_config(periods=5, objective_period=2, seed=9, replications=30)
    config = run.diffusion_config(lambda_mean=1.0)
    assert (config.lambda_mean, config.periods, config.horizon, config.master_seed, config.replications) == (
        1.0, 5, 2, 9, 30)
    assert run.sample_design().sample_size == Config.SAMPLE_SIZE
