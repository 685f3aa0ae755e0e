import os

from dotenv import load_dotenv

basedir = os.path.abspath(os.path.dirname(__file__))
load_dotenv(os.path.join(basedir, '.env'))


class Config:
    WORKERS = int(os.environ.get('SEEDTARGET_WORKERS') or 1)
    LOG_LEVEL = os.environ.get('SEEDTARGET_LOG_LEVEL') or 'WARNING'
    MASTER_SEED = int(os.environ.get('SEEDTARGET_MASTER_SEED') or 0)

    # Run defaults, overridable by a config file and then by flags
    THRESHOLD_SD = 0.5
    PERIODS = 4
    REPLICATIONS = 2000
    SAMPLE_SIZE = 30
    RADIUS_MILES = 0.05
    TOP_K = 20
    MODEL_LAMBDA = {'simple': 1.0, 'complex': 2.0, 'geo': 2.0}
