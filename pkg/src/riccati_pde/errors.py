"""Exceptions raised by the solvers."""


class RiccatiError(Exception):
    """Base class for numerical failures in this package."""


class NearSingular(RiccatiError):
    """The Fredholm operator id + Q' is (numerically) not invertible.

    Raised when the regularized determinant gets too close to zero or the
    linear system is too badly conditioned; the solution has left the
    coordinate patch in which the Riccati relation can be solved.
    """

    def __init__(self, message, det2=None, cond=None):
        super().__init__(message)
        self.det2 = det2
        self.cond = cond


class PoleEncountered(RiccatiError):
    """A scalar denominator of a closed-form solution vanished."""


class BlowUp(RiccatiError):
    """A time stepper produced values above the blow-up threshold."""
