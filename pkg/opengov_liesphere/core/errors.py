"""Exception hierarchy for Lie sphere computations.

Every error carries a stable ``code`` so the CLI and reports can name failures without
depending on class names.
"""

from typing import Any, Optional, Sequence


class LieSphereError(Exception):
    """Base class for all library errors."""

    code = "lie-sphere-error"

    def __init__(self, message: str, **context: Any) -> None:
        super().__init__(message)
        self.context = context

    def __str__(self) -> str:
        return f"{self.code}: {self.args[0]}"


class InvalidArgumentError(LieSphereError, ValueError):
    code = "invalid-argument"


class NotAContactLineError(LieSphereError):
    code = "not-a-contact-line"


class DegenerateLineError(LieSphereError):
    code = "degenerate-line"


class NotASphereError(LieSphereError):
    code = "not-a-sphere"


class NotANormalFieldError(LieSphereError):
    code = "not-a-normal-field"


class NotAnImmersionError(LieSphereError):
    code = "not-an-immersion"


class InvalidFrameError(LieSphereError):
    code = "invalid-frame"


class ProjectionSingularError(LieSphereError):
    """The projection frame meets the point at infinity (or the e1 slot vanishes) at ``b``."""

    code = "projection-singular"

    def __init__(self, message: str, b: Optional[Sequence[float]] = None) -> None:
        super().__init__(message, b=None if b is None else [float(x) for x in b])
        self.b = None if b is None else tuple(float(x) for x in b)


class OutOfDomainError(LieSphereError):
    code = "out-of-domain"


class UnsupportedProvenanceError(LieSphereError):
    code = "unsupported-provenance"


class NumericalFailureError(LieSphereError):
    code = "numerical-failure"


class UndefinedCrossRatioError(LieSphereError):
    code = "undefined-cross-ratio"


class PathTruncatedError(LieSphereError):
    code = "path-truncated"

    def __init__(self, message: str, reason: str) -> None:
        super().__init__(message, reason=reason)
        self.reason = reason


class TrackingLostError(LieSphereError):
    code = "tracking-lost"


class SelfIntersectingSpecError(LieSphereError):
    code = "self-intersecting-spec"


class InvalidConstructionError(LieSphereError):
    code = "invalid-construction"


class NotEquivalentError(LieSphereError):
    code = "not-equivalent"
