"""Exception and warning types shared across the package."""


class CuspCohoError(Exception):
    """Base class for all errors raised by this package."""


class InputStructureError(CuspCohoError):
    """Malformed input: bad scalar syntax, ragged or mis-sized matrices,
    inconsistent dimensions. Distinct from a validation failure, which is a
    well-formed input that does not satisfy the mathematical invariants."""


class PreconditionError(CuspCohoError):
    """An operation was called on input violating its stated precondition
    (e.g. taking the nilpotent logarithm of a non-unipotent matrix)."""


class SingularMatrixError(CuspCohoError):
    """Exact inversion was requested for a singular matrix."""


class InconsistencyError(CuspCohoError):
    """Two independent computations of the same quantity disagree, or a
    derived quantity is impossible (e.g. a negative cohomology dimension).
    Signals violated hypotheses on the input, or a bug."""


class CertificationError(CuspCohoError):
    """A structural certificate could not be produced (broken filtration
    inclusion, or a spectral-page survivor outside total degree zero)."""


class AdmissibilityWarning(UserWarning):
    """Emitted when the dbar solution operator is applied to weight
    parameters outside its guaranteed range; results are still produced
    (this is how the obstruction is demonstrated)."""
