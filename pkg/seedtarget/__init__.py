import logging
import sys

from config import Config

__version__ = '1.0.0'

LOG_FORMAT = 'level=%(levelname)s logger=%(name)s msg="%(message)s"'


def configure_logging(level=None, config_class=Config):
    """Install one stderr handler on the package logger.

    Reports go to files and data goes to stdout, so logging is kept on
    stderr only. Calling this twice replaces the handler instead of
    stacking a second one.
    """
    logger = logging.getLogger('seedtarget')
    for handler in list(logger.handlers):
        logger.removeHandler(handler)

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger.addHandler(handler)
    logger.setLevel((level or config_class.LOG_LEVEL).upper())
    logger.propagate = False
    return logger
