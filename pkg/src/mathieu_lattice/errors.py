class MathieuLatticeError(Exception):
    """Base class for all package errors."""


class ConfigurationError(MathieuLatticeError, ValueError):
    """Invalid or unsupported parameter set."""


class DomainError(MathieuLatticeError, ValueError):
    """Argument outside the domain of an operation (site index, empty grid, zero norm)."""


class LabelingError(MathieuLatticeError):
    """A mode cannot be given a Mathieu (ce/se) label."""


class ContaminatedModeError(MathieuLatticeError):
    """The mode's edge coefficients exceed the truncation tolerance."""


class NumericError(MathieuLatticeError, ArithmeticError):
    """A numerical kernel failed to converge."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index
