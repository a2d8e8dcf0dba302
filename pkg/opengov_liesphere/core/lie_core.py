"""Indefinite inner-product linear algebra on R^{n+3}_2 and the Lie sphere group."""

from typing import Optional, Sequence, Union

import numpy as np
from numpy.typing import ArrayLike
from scipy import linalg

from opengov_liesphere.config import settings
from opengov_liesphere.core.errors import (
    DegenerateLineError,
    InvalidArgumentError,
    NotAContactLineError,
)
from opengov_liesphere.core.models import (
    FloatArray,
    LieLine,
    LieTransform,
    LieVector,
    SpanSummary,
    metric,
)
from opengov_liesphere.utils.logger import get_logger

logger = get_logger(__name__)

__all__ = [
    "metric",
    "lie_inner",
    "lie_gram",
    "on_quadric",
    "line_through",
    "on_line",
    "is_lie_transform",
    "as_lie_transform",
    "apply",
    "apply_line",
    "random_lie_transform",
    "is_moebius",
    "span_summary",
    "parallel_transform",
    "projective_distance",
]


def _check_same_dim(x: LieVector, y: LieVector) -> None:
    if x.chart_dim != y.chart_dim:
        raise InvalidArgumentError(
            f"dimension mismatch: n={x.chart_dim} vs n={y.chart_dim}"
        )


def lie_inner(x: LieVector, y: LieVector) -> float:
    """Evaluate <x, y> = -x1 y1 + x2 y2 + ... + x_{n+2} y_{n+2} - x_{n+3} y_{n+3}."""
    _check_same_dim(x, y)
    a, b = x.coords, y.coords
    return float(a[1:-1] @ b[1:-1] - a[0] * b[0] - a[-1] * b[-1])


def lie_gram(vectors: ArrayLike) -> FloatArray:
    """Gram matrix of <,> for the rows of ``vectors``."""
    rows = np.atleast_2d(np.asarray(vectors, dtype=float))
    J = metric(rows.shape[1] - 3)
    return np.asarray(rows @ J @ rows.T)


def on_quadric(x: LieVector, tol: Optional[float] = None) -> bool:
    """True iff |<x, x>| <= tol * |x|^2."""
    tol = settings.quadric_tol if tol is None else tol
    norm2 = float(x.coords @ x.coords)
    if norm2 == 0.0:
        raise InvalidArgumentError("the zero vector is not a projective point")
    return abs(lie_inner(x, x)) <= tol * norm2


def line_through(x: LieVector, y: LieVector, tol: Optional[float] = None) -> LieLine:
    """Validate [x, y] as a line on the Lie quadric; representatives are kept as given."""
    tol = settings.quadric_tol if tol is None else tol
    _check_same_dim(x, y)
    nx, ny = x.norm(), y.norm()
    if nx == 0.0 or ny == 0.0:
        raise DegenerateLineError("a line endpoint is the zero vector")

    # Rank before residuals: a repeated point passes every residual check.
    stack = np.vstack([x.coords / nx, y.coords / ny])
    smallest = float(linalg.svdvals(stack)[-1])
    if smallest <= max(tol, 1e-12) * 10:
        raise DegenerateLineError(
            "line endpoints are linearly dependent", smallest_sv=smallest
        )

    residuals = (
        abs(lie_inner(x, x)) / nx**2,
        abs(lie_inner(y, y)) / ny**2,
        abs(lie_inner(x, y)) / (nx * ny),
    )
    if max(residuals) > tol:
        raise NotAContactLineError(
            "points are not mutually orthogonal quadric points",
            quadric=residuals[:2],
            orthogonality=residuals[2],
        )
    return LieLine(x, y)


def on_line(line: LieLine, x: LieVector) -> float:
    """Largest 3x3 minor of [y1; y2; x] after unit scaling (0 when x lies on the line)."""
    rows = np.vstack(
        [line.y1.coords / line.y1.norm(), line.y2.coords / line.y2.norm(), x.coords / x.norm()]
    )
    return float(linalg.svdvals(rows)[-1])


def is_lie_transform(G: Union[ArrayLike, LieTransform], tol: Optional[float] = None) -> bool:
    """True iff G^T J G = c J for some c > 0 within ``tol`` (relative to c)."""
    tol = settings.quadric_tol if tol is None else tol
    mat = np.asarray(G.matrix if isinstance(G, LieTransform) else G, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] < 5:
        return False
    J = metric(mat.shape[0] - 3)
    pulled = mat.T @ J @ mat
    c = float(np.trace(J @ pulled)) / mat.shape[0]
    if not np.isfinite(c) or c <= 0.0:
        return False
    return float(np.max(np.abs(pulled - c * J))) <= tol * c


def as_lie_transform(G: ArrayLike, tol: Optional[float] = None) -> LieTransform:
    """Validate G and rescale it so that G^T J G = J."""
    mat = np.asarray(G, dtype=float)
    if not is_lie_transform(mat, tol):
        raise InvalidArgumentError("matrix does not preserve the Lie quadric")
    J = metric(mat.shape[0] - 3)
    c = float(np.trace(J @ mat.T @ J @ mat)) / mat.shape[0]
    return LieTransform(mat / np.sqrt(c))


def apply(G: LieTransform, x: LieVector) -> LieVector:
    if G.n != x.chart_dim:
        raise InvalidArgumentError(f"transform acts on n={G.n}, vector has n={x.chart_dim}")
    return LieVector(G.matrix @ x.coords, x.chart_dim)


def apply_line(G: LieTransform, line: LieLine, tol: Optional[float] = None) -> LieLine:
    return line_through(apply(G, line.y1), apply(G, line.y2), tol)


def _expm(A: FloatArray) -> FloatArray:
    """Matrix exponential by scaling and squaring around a Taylor series.

    The series runs until adding a term no longer changes the partial sum.
    """
    size = A.shape[0]
    norm = float(np.linalg.norm(A, 1))
    squarings = int(np.ceil(np.log2(norm / 0.5))) if norm > 0.5 else 0
    B = A / (2.0**squarings)

    total = np.eye(size)
    term = np.eye(size)
    for k in range(1, 64):
        term = term @ B / k
        updated = total + term
        if np.array_equal(updated, total):
            break
        total = updated
    for _ in range(squarings):
        total = total @ total
    return total


def random_lie_transform(seed: int, n: int, scale: float = 0.3) -> LieTransform:
    """exp(J S) for a seeded random skew-symmetric S with entries in [-scale, scale]."""
    if scale < 0:
        raise InvalidArgumentError("scale must be non-negative")
    if n < 2:
        raise InvalidArgumentError("chart dimension must be >= 2")
    rng = np.random.default_rng(seed)
    raw = rng.uniform(-scale, scale, size=(n + 3, n + 3))
    skew = (raw - raw.T) / 2.0
    J = metric(n)
    # A = J S satisfies A^T J + J A = 0, so exp(A) preserves J.
    G = _expm(J @ skew)
    logger.debug("random_lie_transform", seed=seed, n=n, scale=scale)
    return LieTransform(G)


def is_moebius(G: LieTransform, tol: Optional[float] = None) -> bool:
    """True iff G e_{n+3} is proportional to e_{n+3}."""
    tol = settings.quadric_tol if tol is None else tol
    column = G.matrix[:, -1]
    return float(np.linalg.norm(column[:-1])) <= tol * float(np.linalg.norm(column))


def parallel_transform(t: float, n: int) -> LieTransform:
    """Rotation by ``t`` in the (e1, e_{n+3}) plane.

    Sends e1 + x to cos t e1 + x + sin t e_{n+3}, the oriented sphere of radius t about x,
    so it maps the lift of a spherical hypersurface to the lift of its parallel at distance t.
    """
    G = np.eye(n + 3)
    c, s = np.cos(t), np.sin(t)
    G[0, 0], G[0, -1] = c, -s
    G[-1, 0], G[-1, -1] = s, c
    return LieTransform(G)


def projective_distance(x: ArrayLike, y: ArrayLike) -> float:
    """min over sign of | x/|x| -+ y/|y| |."""
    a = np.asarray(x.coords if isinstance(x, LieVector) else x, dtype=float)
    b = np.asarray(y.coords if isinstance(y, LieVector) else y, dtype=float)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    return float(min(np.linalg.norm(a - b), np.linalg.norm(a + b)))


def span_summary(samples: Sequence[LieVector], tol: Optional[float] = None) -> SpanSummary:
    """Numerical span of quadric samples with the signature of <,> restricted to it."""
    tol = settings.rank_tol if tol is None else tol
    if len(samples) == 0:
        raise InvalidArgumentError("span_summary needs at least one sample")
    n = samples[0].chart_dim
    rows = []
    for sample in samples:
        if sample.chart_dim != n:
            raise InvalidArgumentError("samples live in different dimensions")
        norm = sample.norm()
        if norm == 0.0:
            raise InvalidArgumentError("zero sample in span_summary")
        rows.append(sample.coords / norm)

    _, sv, vt = linalg.svd(np.vstack(rows), full_matrices=False)
    relative = sv / sv[0]
    dim = int(np.sum(relative > tol))
    basis = vt[:dim]

    eigenvalues = linalg.eigvalsh(lie_gram(basis))
    zero_cut = max(tol, 1e-9)
    signature = (
        int(np.sum(eigenvalues > zero_cut)),
        int(np.sum(eigenvalues < -zero_cut)),
        int(np.sum(np.abs(eigenvalues) <= zero_cut)),
    )
    discarded = float(relative[dim]) if dim < relative.shape[0] else 0.0
    return SpanSummary(
        dim=dim,
        basis=[LieVector(row, n) for row in basis],
        signature=signature,
        residual=(float(relative[dim - 1]), discarded),
    )
