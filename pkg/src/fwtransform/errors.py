"""Exception and warning types shared across the package."""


class FWError(Exception):
    """Base class for every error raised by fwtransform."""


class InvalidBasis(FWError, ValueError):
    """Operators live on incompatible bases, or a matrix does not fit its basis."""


class SingularSqrt(FWError, ArithmeticError):
    """A principal square root (or its inverse) does not exist.

    Raised when an operand has an eigenvalue with non-positive real part,
    which for the FW machinery means the transform left its validity region
    (for instance a supercritical potential).
    """


class NotExactCase(FWError):
    """The commutation conditions required by the exact transform do not hold."""


class Unsupported(FWError):
    """The request is outside what the numeric engine handles."""


class GapClosure(FWError, ArithmeticError):
    """The Hamiltonian has an eigenvalue too close to zero for a sign function."""


class FieldConsistencyError(FWError, ValueError):
    """Potentials and strengths of a field configuration disagree.

    Attributes
    ----------
    max_deviation : float
        Largest absolute deviation found.
    location : tuple
        Position where it occurs.
    quantity : str
        Which relation failed (``"E=-grad(Phi)"`` or ``"H=curl(A)"``).
    """

    def __init__(self, message, max_deviation=float("nan"), location=(), quantity=""):
        super().__init__(message)
        self.max_deviation = max_deviation
        self.location = tuple(location)
        self.quantity = quantity


class FieldDomainError(FWError, ValueError):
    """A field could not be evaluated at the requested position."""


class StiffnessError(FWError, ArithmeticError):
    """The ODE integrator's step size underflowed."""


class ValidityError(FWError):
    """The semiclassical validity condition fails and no override was given."""


class ScenarioError(FWError, ValueError):
    """A scenario document is malformed."""


class ValidityWarning(UserWarning):
    """The semiclassical validity condition is not met (non-fatal)."""


class ScalingRangeWarning(UserWarning):
    """The hbar values handed to a scaling probe span less than a decade."""
