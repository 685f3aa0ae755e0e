import logging
from dataclasses import asdict, dataclass
from typing import Optional as Opt

from werkzeug.datastructures import MultiDict
from wtforms import BooleanField, FloatField, Form, IntegerField, StringField
from wtforms.validators import AnyOf, InputRequired, NumberRange, Optional, ValidationError

from config import Config
from seedtarget.errors import ConfigError
from seedtarget.models import DiffusionConfig, SampleDesign
from seedtarget.seeding import MODELS

logger = logging.getLogger(__name__)

CONFIG_KEYS = ('lambda_mean', 'threshold_sd', 'periods', 'replications', 'seed', 'workers', 'top_k',
               'sample_size', 'model', 'deterministic', 'radius_miles', 'objective_period')
FALSE_VALUES = ('false', 'False', 'FALSE', '0', 'no', 'off', '')


class RunConfigForm(Form):
    lambda_mean = FloatField('lambda-mean', validators=[Optional()])
    threshold_sd = FloatField('threshold-sd', validators=[
        InputRequired(), NumberRange(min=0, message="threshold-sd cannot be negative.")])
    periods = IntegerField('periods', validators=[
        InputRequired(), NumberRange(min=1, message="periods must be at least 1.")])
    replications = IntegerField('replications', validators=[
        InputRequired(), NumberRange(min=1, message="replications must be at least 1.")])
    seed = IntegerField('seed', validators=[
        InputRequired(), NumberRange(min=0, max=2 ** 64 - 1, message="seed must be a 64-bit unsigned integer.")])
    workers = IntegerField('workers', validators=[
        InputRequired(), NumberRange(min=1, message="workers must be at least 1.")])
    top_k = IntegerField('top-k', validators=[
        InputRequired(), NumberRange(min=0, message="top-k cannot be negative (0 keeps every pair).")])
    sample_size = IntegerField('sample-size', validators=[
        InputRequired(), NumberRange(min=1, message="sample-size must be at least 1.")])
    model = StringField('model', validators=[
        InputRequired(), AnyOf(MODELS, message=f"model must be one of {', '.join(MODELS)}.")])
    deterministic = BooleanField('deterministic', false_values=FALSE_VALUES)
    radius_miles = FloatField('radius-miles', validators=[InputRequired()])
    objective_period = IntegerField('objective-period', validators=[Optional()])

    def validate_lambda_mean(self, field):
        if field.data is not None and not field.data > 0:
            raise ValidationError("lambda-mean must be positive.")

    def validate_radius_miles(self, field):
        if field.data is not None and not field.data > 0:
            raise ValidationError("radius-miles must be positive.")

    def validate_objective_period(self, field):
        if field.data is None:
            return
        periods = self.periods.data
        if periods is not None and not 1 <= field.data <= periods:
            raise ValidationError(f"objective-period must lie between 1 and periods ({periods}).")


@dataclass(frozen=True)
class RunConfig:
    threshold_sd: float
    periods: int
    replications: int
    seed: int
    workers: int
    top_k: int
    sample_size: int
    model: str
    deterministic: bool
    radius_miles: float
    lambda_mean: Opt[float] = None
    objective_period: Opt[int] = None

    @property
    def model_lambda(self):
        return self.lambda_mean or Config.MODEL_LAMBDA[self.model]

    def diffusion_config(self, lambda_mean=None):
        return DiffusionConfig(lambda_mean=lambda_mean or self.model_lambda,
                               threshold_sd=0.0 if self.deterministic else self.threshold_sd,
                               periods=self.periods,
                               replications=self.replications,
                               master_seed=self.seed,
                               objective_period=self.objective_period)

    def sample_design(self):
        return SampleDesign(sample_size=self.sample_size)

    def as_dict(self):
        """Resolved values as embedded in reports; the worker count never changes a result."""
        values = asdict(self)
        values.pop('workers')
        values['effective_threshold_sd'] = 0.0 if self.deterministic else self.threshold_sd
        return values


def defaults(config_class=Config):
    return {
        'threshold_sd': config_class.THRESHOLD_SD,
        'periods': config_class.PERIODS,
        'replications': config_class.REPLICATIONS,
        'seed': config_class.MASTER_SEED,
        'workers': config_class.WORKERS,
        'top_k': config_class.TOP_K,
        'sample_size': config_class.SAMPLE_SIZE,
        'model': 'complex',
        'deterministic': False,
        'radius_miles': config_class.RADIUS_MILES,
    }


def read_config_file(path):
    """Parse a ``key = value`` run file into a dict keyed by field name."""
    try:
        with open(path, encoding='utf-8') as handle:
            lines = handle.read().splitlines()
    except OSError as e:
        raise ConfigError(f"Cannot read config file '{path}': {e.strerror}") from e

    values = {}
    errors = []
    for line_num, raw in enumerate(lines, start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            errors.append(f"Line {line_num}: expected 'key = value', got '{raw.strip()}'.")
            continue
        key, value = (part.strip() for part in line.split('=', 1))
        name = key.replace('-', '_').lower()
        if name not in CONFIG_KEYS:
            errors.append(f"Line {line_num}: unknown key '{key}'.")
            continue
        values[name] = value
    if errors:
        raise ConfigError(f"Config file '{path}' has {len(errors)} error(s). " + ' '.join(errors))
    return values


def _formdata(values):
    data = MultiDict()
    for name, value in values.items():
        if value is None:
            continue
        if isinstance(value, bool):
            value = 'true' if value else 'false'
        data.add(name, str(value))
    return data


def resolve_run_config(config_path=None, config_class=Config, **flags):
    """Merge environment defaults, the config file and flags (in that order) and validate."""
    values = defaults(config_class)
    if config_path:
        values.update(read_config_file(config_path))
    values.update({name: value for name, value in flags.items() if value is not None})

    unknown = sorted(set(values) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError(f"Unknown setting(s): {', '.join(unknown)}.")

    form = RunConfigForm(formdata=_formdata(values))
    if not form.validate():
        problems = [f"{form[name].label.text}: {'; '.join(errors)}" for name, errors in form.errors.items()]
        raise ConfigError("Invalid run configuration. " + ' '.join(problems))

    run = RunConfig(**{name: form[name].data for name in CONFIG_KEYS})
    logger.debug("resolved run config %s", run)
    return run
