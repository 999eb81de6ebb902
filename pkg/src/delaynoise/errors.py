"""Exception types raised by the integrators, experiments and CLI."""


class DelayNoiseError(Exception):
    """Base class for all package errors."""


class NumericGuardError(DelayNoiseError):
    """A numerical precondition (step size, history window, grid) failed."""


class StepTooLarge(NumericGuardError):
    pass


class HistoryTooShort(NumericGuardError):
    pass


class BadGrid(NumericGuardError):
    pass


class PathTooShort(NumericGuardError):
    pass


class DimensionMismatch(DelayNoiseError, ValueError):
    pass


class ConfigError(DelayNoiseError):
    pass


class ParseError(ConfigError):
    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class ValidationError(ConfigError):
    pass
