import json
import logging
from functools import wraps

import click

from seedtarget.errors import SeedTargetError

logger = logging.getLogger(__name__)


def error_line(error):
    return json.dumps({'error': type(error).__name__, 'exit_code': error.exit_code, 'message': str(error)},
                      sort_keys=True)


def reports_errors(fn):
    """Turn package errors raised by a command into one JSON line on stderr and the mapped exit code."""
    @wraps(fn)
    def decorated_command(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except SeedTargetError as e:
            logger.debug("command failed", exc_info=True)
            click.echo(error_line(e), err=True)
            click.get_current_context().exit(e.exit_code)
    return decorated_command
