"""Exception hierarchy shared by every module of the package."""


class GarsiaError(Exception):
    """Base class for all package errors."""


class ParameterError(GarsiaError, ValueError):
    """A numeric parameter is outside its admissible range."""


class ShapeError(GarsiaError, ValueError):
    """Operands live on different grids or have mismatched lengths."""


class DomainError(GarsiaError, ValueError):
    """Input lies outside the mathematical domain of an operation."""


class LogIntegrabilityError(DomainError):
    """``log eta`` is not integrable on the sampled circle."""


class AccuracyError(GarsiaError, RuntimeError):
    """The requested evaluation method cannot deliver its stated accuracy."""


class NumericalConsistencyError(GarsiaError, ArithmeticError):
    """Two routes that must agree (or a quantity that must be nonnegative) do not."""


class DegenerateInputError(GarsiaError, ValueError):
    """Input is degenerate for the requested construction (e.g. identically zero)."""


class PreconditionError(GarsiaError, ValueError):
    """A documented precondition of an operation failed; the message names the check."""


class SpecError(GarsiaError, ValueError):
    """Malformed function specification; ``path`` locates the offending node."""

    def __init__(self, message, path="$"):
        super().__init__(f"{path}: {message}")
        self.path = path
