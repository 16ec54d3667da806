"""Exception hierarchy."""


class KlabError(Exception):
    """Base class for all library errors."""


class InvalidParams(KlabError, ValueError):
    """System parameters violate monotonicity, ranges or the tail condition."""


class BlockMismatch(KlabError, ValueError):
    """Block lists, spaces or stages of composed objects disagree."""


class GridTooCoarse(KlabError):
    """The grid cannot resolve a winding map or a phase step."""


class StageOutOfRange(KlabError, IndexError):
    """A stage index lies outside the built system."""


class ZeroRankCorner(KlabError, ZeroDivisionError):
    """A corner formula needs a nonzero rank that is zero."""


class NotCircleSource(KlabError, ValueError):
    """A determinant of a generator image was requested from a non-circle block."""


class NonTorsionClass(KlabError, ValueError):
    """A quotient norm was requested for a class with nonzero winding."""


class NotUVD(KlabError):
    """The system fails the uniformly varied determinant property."""


class ParamMismatch(KlabError, ValueError):
    """Two systems were built from different parameters."""


class StageBudgetExceeded(KlabError):
    """No admissible stage exists within the built stage count."""
