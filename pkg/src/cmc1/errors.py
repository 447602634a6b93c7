"""Exception hierarchy shared by every module.

Two families matter to callers: validation failures (bad input data, a
structural condition that does not hold) and numerical failures (an
integrator or quadrature that could not reach its tolerance).  The CLI maps
the first to exit code 2 and the second to exit code 3.
"""


class CMC1Error(Exception):
    """Base class for all package errors."""


class ValidationError(CMC1Error):
    """Input data violates a structural requirement."""


class NumericalError(CMC1Error):
    """A numerical procedure failed to reach its tolerance."""


class NonUnimodular(ValidationError):
    pass


class NonMeromorphic(ValidationError):
    """A coefficient is not single-valued where it has to be."""


class SingularInput(ValidationError):
    pass


class CompatibilityViolation(ValidationError):
    """Umbilic orders and Gauss-map branching disagree."""


class IncompatibleForms(ValidationError):
    pass


class SingularApproach(NumericalError):
    """An integration path came too close to a singular point."""


class StepUnderflow(NumericalError):
    pass


class DetDrift(NumericalError):
    pass


class NotUnitarizable(ValidationError):
    pass


class ResidueConditionFailed(ValidationError):
    pass


class QuadratureNotConverged(NumericalError):
    pass


class DomainError(ValidationError):
    pass


class PeriodsOpen(ValidationError):
    pass
