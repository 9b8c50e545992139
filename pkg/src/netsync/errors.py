"""Exception hierarchy.

ValidationError covers bad inputs and unsatisfiable construction requests;
NumericalError covers failures that occur while iterating (divergence,
convergence caps).  The CLI maps the former to exit code 1 and the latter
to exit code 2.
"""


class NetsyncError(Exception):
    pass


class ValidationError(NetsyncError):
    pass


class NumericalError(NetsyncError):
    pass


class NotSquareError(ValidationError):
    pass


class NotSymmetricError(ValidationError):
    pass


class SizeCapError(ValidationError):
    pass


class TooSmallError(ValidationError):
    pass


class DisconnectedError(ValidationError):
    pass


class DimensionMismatchError(ValidationError):
    pass


class InvalidParamsError(ValidationError):
    pass


class NotPositiveDefiniteError(ValidationError):
    pass


class SubcriticalAlphaError(ValidationError):
    pass


class WindowOutOfRangeError(ValidationError):
    pass


class NoRealRootError(ValidationError):
    pass


class NoConvergenceError(NumericalError):
    pass


class DivergedError(NumericalError):
    pass
