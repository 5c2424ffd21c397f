"""Exception types raised by the estimators, tests and I/O helpers."""


class TailError(ValueError):
    """Base class for all estimation failures in this package."""


class NoRoot(TailError):
    """The truncated-Pareto likelihood equation has no positive root.

    Raised when the Hill statistic reaches ``-log(R)/2``, which marks the
    light-truncation boundary. Callers that want the untruncated fallback
    may substitute ``1/H``.
    """


class NonConvergence(TailError):
    pass


class TiedExtremes(TailError):
    """The threshold order statistic equals the sample maximum."""


class ZeroHill(TailError):
    pass


class DegenerateMoments(TailError):
    pass


class DegenerateE(TailError):
    pass


class NonpositiveDelta(TailError):
    pass


class NoCandidate(TailError):
    pass


class ModelSpecError(ValueError):
    """A model specification string could not be parsed."""


class DatasetError(ValueError):
    """An observation file could not be read or validated."""
