class SeedTargetError(Exception):
    exit_code = 1


class ConfigError(SeedTargetError):
    exit_code = 2


class DomainError(SeedTargetError, ValueError):
    """A learning parameter outside its mathematical domain."""
    exit_code = 2


class DataError(SeedTargetError):
    exit_code = 3


class ParseError(DataError):
    def __init__(self, message, line=None, errors=None):
        super().__init__(message)
        self.line = line
        self.errors = list(errors or [])


class ReferentialError(DataError):
    def __init__(self, message, missing_id=None):
        super().__init__(message)
        self.missing_id = missing_id


class InfeasibleError(SeedTargetError):
    exit_code = 4
