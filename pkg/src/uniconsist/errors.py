"""Exception types shared across the package.

All validation failures raise subclasses of :class:`UniconsistError`, which
also inherits ``ValueError`` so callers can catch either. The CLI maps
``UniconsistError`` to exit code 2.
"""


class UniconsistError(ValueError):
    """Base class for validation and contract violations."""


class ValidationError(UniconsistError):
    """A precondition or configuration constraint was violated."""


class AssumptionError(ValidationError):
    """A named structural assumption on a weight profile failed.

    Carries the assumption label (e.g. ``"A1"``) in ``assumption``.
    """

    def __init__(self, assumption: str, message: str):
        self.assumption = assumption
        super().__init__(f"{assumption}: {message}")


class DensityError(ValidationError):
    """A claimed density 1 + f is negative somewhere on (0, 1).

    ``points`` holds locations where the minimum was attained, ``minimum``
    the offending density value.
    """

    def __init__(self, message: str, points=None, minimum=None):
        self.points = [] if points is None else list(points)
        self.minimum = minimum
        super().__init__(message)


class ThresholdError(UniconsistError):
    """A suite ran to completion but failed its configured thresholds.

    The CLI maps this to exit code 3.
    """
