"""Exception hierarchy.

Every error raised on purpose by the package derives from ``ThermoFootError``.
The CLI maps the three top-level categories to exit codes: configuration
problems (2), data problems (3) and everything else (4).
"""


class ThermoFootError(Exception):
    category = "runtime"


class ConfigError(ThermoFootError, ValueError):
    category = "config"


class DataError(ThermoFootError, ValueError):
    category = "data"


class LoadError(DataError):
    """A file referenced by a manifest is missing or unreadable."""

    def __init__(self, message, path=None):
        super().__init__(message)
        self.path = path


class GridParseError(DataError):
    def __init__(self, message, path=None, line=None):
        super().__init__(message)
        self.path = path
        self.line = line


class ValidationError(DataError):
    def __init__(self, message, cell=None):
        super().__init__(message)
        self.cell = cell


class SplitError(DataError):
    pass


class EmptyMapError(DataError):
    pass


class FeatureError(DataError):
    def __init__(self, message, slot=None):
        super().__init__(message)
        self.slot = slot


class InsufficientDataError(DataError):
    pass


class UnsupportedLabelError(DataError):
    pass


class DegenerateTableError(DataError):
    pass


class StratificationError(DataError):
    pass


class SmoteError(DataError):
    pass


class UndefinedAUCError(DataError):
    pass


class ShapeError(DataError):
    pass


class NotFittedError(ThermoFootError, AttributeError):
    pass


class UnsupportedOperationError(ThermoFootError, TypeError):
    pass
