"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, DataFormatError -> 3,
DivergenceError -> 4.
"""


class NeglearnError(Exception):
    """Base class for all package errors."""


class ShapeError(NeglearnError, ValueError):
    """Operands have incompatible or invalid dimensions."""


class NumericError(NeglearnError, ArithmeticError):
    """An operation produced non-finite values from finite inputs."""


class DivergenceError(NumericError):
    """Training parameters exceeded the stability bound.

    Carries the last model whose parameters were all finite and in
    bounds, plus the partial training log when raised from the trainer.
    """

    def __init__(self, message, model=None, log=None):
        super().__init__(message)
        self.model = model
        self.log = log


class DataFormatError(NeglearnError, ValueError):
    """A data file failed to parse; the message names the byte offset."""


class ConfigError(NeglearnError, ValueError):
    """A run configuration is invalid."""
