"""Exception hierarchy shared by the library and the command line."""


class Ti64Error(Exception):
    """Base class for all errors raised by ti64phase."""


class DomainError(Ti64Error, ValueError):
    """An argument lies outside the domain of a model function."""


class ParseError(Ti64Error, ValueError):
    """A data or config file could not be parsed.

    ``line`` is the 1-based line number of the offending row, when known.
    """

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}"
        super().__init__(f"{where}: {message}" if where else message)


class ConfigError(Ti64Error, ValueError):
    """Invalid run configuration (unknown key, bad value)."""


class IntegrationError(Ti64Error, RuntimeError):
    """Time integration failed (e.g. Crank-Nicolson did not converge)."""


class DescriptorError(Ti64Error, ValueError):
    """A cooling-rate descriptor could not be evaluated for a path."""


class CalibrationError(Ti64Error, RuntimeError):
    """A calibration objective could not be evaluated."""
