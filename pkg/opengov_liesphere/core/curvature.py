"""Shape operators, curvature spheres on Legendre lines, and Lie curvature."""

from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike
from scipy import linalg

from opengov_liesphere.config import settings
from opengov_liesphere.core.errors import (
    InvalidArgumentError,
    NotAnImmersionError,
    NumericalFailureError,
    UndefinedCrossRatioError,
    UnsupportedProvenanceError,
)
from opengov_liesphere.core.legendre import (
    ImmersionOracle,
    LegendreMap,
    contact_quotient,
    generic_point,
)
from opengov_liesphere.core.lie_core import on_line
from opengov_liesphere.core.models import (
    CurvatureAtPoint,
    CurvatureSphere,
    FloatArray,
    LieLine,
    LieVector,
    Provenance,
    ShapeData,
    metric,
)
from opengov_liesphere.utils import jets
from opengov_liesphere.utils.logger import get_logger

logger = get_logger(__name__)

# Below this unit-coefficient on y2 a curvature sphere is reported at r = inf.
INFINITE_CUTOFF = 1e-8


def _unit_field(oracle: ImmersionOracle) -> ImmersionOracle:
    def unit(b: FloatArray) -> FloatArray:
        value = oracle(b)
        return value / np.linalg.norm(value)

    return ImmersionOracle(unit, oracle.domain, oracle.fd_step, oracle.derivative)


def _first_form(f: ImmersionOracle, b: FloatArray) -> Tuple[FloatArray, FloatArray]:
    df = f.differential(b)
    sv = linalg.svdvals(df)
    if sv[0] == 0.0 or sv[-1] <= 1e-8 * sv[0]:
        raise NotAnImmersionError(f"df is rank deficient at {b.tolist()}", b=b.tolist())
    return df, df.T @ df


def shape_operator(f: ImmersionOracle, xi: ImmersionOracle, b: ArrayLike) -> ShapeData:
    """A = -I^{-1} (df^T dxi), from first derivatives of f and of the unit normal only."""
    b = np.asarray(b, dtype=float)
    df, first = _first_form(f, b)
    dxi = _unit_field(xi).differential(b)
    mixed = df.T @ dxi
    scale = max(float(np.max(np.abs(mixed))), np.finfo(float).tiny)
    asymmetry = float(np.max(np.abs(mixed - mixed.T))) / scale
    symmetric = (mixed + mixed.T) / 2.0
    shape = -linalg.solve(first, symmetric, assume_a="pos")
    return ShapeData(first_form=first, shape=shape, basis=df, asymmetry=asymmetry)


def shape_operator_hessian(
    f: ImmersionOracle, xi: ImmersionOracle, b: ArrayLike, step: Optional[float] = None
) -> ShapeData:
    """A = I^{-1} II with II_ij = xi · f_ij; a second-derivative cross-check."""
    b = np.asarray(b, dtype=float)
    df, first = _first_form(f, b)
    normal = xi(b)
    normal = normal / np.linalg.norm(normal)
    second = np.einsum("a,aij->ij", normal, jets.hessian(f, b, step or f.step))
    shape = linalg.solve(first, second, assume_a="pos")
    return ShapeData(first_form=first, shape=shape, basis=df)


def principal_curvatures(shape: ShapeData) -> FloatArray:
    """Ascending eigenvalues of the shape operator (I-self-adjoint)."""
    weighted = shape.first_form @ shape.shape
    weighted = (weighted + weighted.T) / 2.0
    return np.asarray(linalg.eigh(weighted, shape.first_form, eigvals_only=True))


def orthonormal_frame(first_form: FloatArray) -> FloatArray:
    """C = L^{-T} for the Cholesky factor I = L L^T, so C^T I C = identity."""
    chol = linalg.cholesky(first_form, lower=True)
    return np.asarray(linalg.solve_triangular(chol, np.eye(chol.shape[0]), lower=True).T)


def orthonormal_shape(shape: ShapeData) -> FloatArray:
    """The shape operator in the orthonormal frame built by :func:`orthonormal_frame`."""
    C = orthonormal_frame(shape.first_form)
    return np.asarray(C.T @ shape.first_form @ shape.shape @ C)


def lie_second_form(L: LegendreMap, b: ArrayLike) -> FloatArray:
    """h_ij = <dY_{n+3}(X_j), Y_i> in the tangent frame Y_i = dY1 C, which is J-orthonormal."""
    if L.provenance is not Provenance.EUCLIDEAN_LIFT:
        raise UnsupportedProvenanceError(
            f"lie_second_form needs a euclidean-lift map, got {L.provenance.value}"
        )
    b = np.asarray(b, dtype=float)
    L.line_at(b)
    J = metric(L.n)
    dY1, dY2 = L.differentials(b)
    try:
        C = orthonormal_frame(dY1.T @ J @ dY1)
    except linalg.LinAlgError as exc:
        raise NumericalFailureError(f"tangent frame is degenerate at {b.tolist()}") from exc
    h = C.T @ (dY1.T @ J @ dY2) @ C
    return np.asarray((h + h.T) / 2.0)


def _cluster(values: FloatArray, tol: float) -> List[List[int]]:
    """Chain sorted values whose neighbours differ by at most tol (1 + |value|)."""
    order = np.argsort(values)
    groups: List[List[int]] = [[int(order[0])]]
    for prev, idx in zip(order[:-1], order[1:]):
        a, b = values[prev], values[idx]
        if abs(b - a) <= tol * (1.0 + max(abs(a), abs(b))):
            groups[-1].append(int(idx))
        else:
            groups.append([int(idx)])
    return groups


def _sort_key(sphere: CurvatureSphere) -> Tuple[bool, float]:
    return (bool(np.isinf(sphere.r)), sphere.r if np.isfinite(sphere.r) else 0.0)


def curvature_at(
    L: LegendreMap, b: ArrayLike, cluster_tol: Optional[float] = None
) -> CurvatureAtPoint:
    """Curvature spheres at b with multiplicities, principal spaces and a stability flag.

    The differentials of the two representatives are reduced to L^perp / L. With a
    well-conditioned line point P0 and its partner P_inf, the curvature spheres are
    K = -mu P0 + P_inf for the eigenvalues mu of the symmetric-definite pencil
    (D0^T D_inf, D0^T D0).
    """
    tol = settings.cluster_tol if cluster_tol is None else cluster_tol
    b = np.asarray(b, dtype=float)
    line = L.line_at(b)
    y1, y2 = line.y1.coords, line.y2.coords
    n1, n2 = float(np.linalg.norm(y1)), float(np.linalg.norm(y2))
    dY1, dY2 = L.differentials(b)
    D1, D2 = contact_quotient(y1, y2, dY1, dY2)

    phi, regularity = generic_point(D1, D2)
    if regularity <= 1e-10:
        raise NumericalFailureError(f"Legendre map is singular at {b.tolist()}", b=b.tolist())
    c, s = np.cos(phi), np.sin(phi)
    D0 = c * D1 + s * D2
    Dinf = -s * D1 + c * D2

    pencil = D0.T @ Dinf
    scale = max(float(np.max(np.abs(pencil))), np.finfo(float).tiny)
    asymmetry = float(np.max(np.abs(pencil - pencil.T))) / scale
    try:
        mu, vectors = linalg.eigh((pencil + pencil.T) / 2.0, D0.T @ D0)
    except linalg.LinAlgError as exc:
        raise NumericalFailureError(f"eigen-solver failed at {b.tolist()}: {exc}") from exc

    groups = _cluster(mu, tol)
    stable = len(_cluster(mu, 2.0 * tol)) == len(groups) == len(_cluster(mu, tol / 2.0))
    if not stable:
        logger.warning("unstable_clustering", b=b.tolist(), mu=mu.tolist())

    spheres = []
    for group in groups:
        value = float(np.mean(mu[group]))
        a = (-value * c - s) / n1
        bb = (-value * s + c) / n2
        norm = float(np.hypot(a, bb))
        a, bb = a / norm, bb / norm
        if bb < 0 or (bb == 0 and a < 0):
            a, bb = -a, -bb
        r = a / bb if bb > INFINITE_CUTOFF else float("inf")
        spheres.append(
            CurvatureSphere(
                r=float(r),
                multiplicity=len(group),
                K=LieVector(a * y1 + bb * y2, L.n),
                principal_basis=linalg.orth(vectors[:, group]),
                coefficients=(float(a), float(bb)),
            )
        )
    spheres.sort(key=_sort_key)
    logger.debug(
        "curvature_at",
        b=b.tolist(),
        g=len(spheres),
        multiplicities=[s.multiplicity for s in spheres],
    )
    return CurvatureAtPoint(
        b=tuple(float(x) for x in b), spheres=spheres, stable=stable, asymmetry=asymmetry
    )


def curvature_spheres(
    L: LegendreMap, b: ArrayLike, cluster_tol: Optional[float] = None
) -> List[CurvatureSphere]:
    """Curvature spheres at b ordered by ascending r (r = inf last)."""
    return curvature_at(L, b, cluster_tol).spheres


def lie_curvature(rs: Sequence[float]) -> float:
    """Cross-ratio (r1-r3)(r2-r4) / ((r1-r4)(r2-r3)) of four ascending principal curvatures."""
    values = sorted(float(r) for r in rs)
    if len(values) != 4:
        raise InvalidArgumentError("lie_curvature needs exactly four values")
    if not all(np.isfinite(values)):
        raise InvalidArgumentError("lie_curvature needs finite values")
    scale = 1.0 + max(abs(v) for v in values)
    if min(b - a for a, b in zip(values[:-1], values[1:])) <= 1e-12 * scale:
        raise UndefinedCrossRatioError("principal curvatures are not distinct", values=values)
    r1, r2, r3, r4 = values
    return (r1 - r3) * (r2 - r4) / ((r1 - r4) * (r2 - r3))


def line_coordinates(line: LieLine, x: LieVector, tol: float = 1e-8) -> Tuple[float, float]:
    """(a, b) with x = a y1 + b y2."""
    if on_line(line, x) > tol:
        raise InvalidArgumentError("point does not lie on the line")
    solution, *_ = linalg.lstsq(line.stack().T, x.coords)
    return float(solution[0]), float(solution[1])


PointOnLine = Union[Tuple[float, float], LieVector]


def cross_ratio_on_line(line: LieLine, points: Sequence[PointOnLine]) -> float:
    """Cross-ratio of four points of a line, given as coefficient pairs or vectors.

    Uses the coordinate t = a / b of a y1 + b y2, so pairs (1,0), (0,1), (1,1), (2,1)
    stand for inf, 0, 1, 2.
    """
    if len(points) != 4:
        raise InvalidArgumentError("cross_ratio_on_line needs four points")
    pairs = [
        line_coordinates(line, p) if isinstance(p, LieVector) else (float(p[0]), float(p[1]))
        for p in points
    ]

    def det(i: int, j: int) -> float:
        return pairs[i][0] * pairs[j][1] - pairs[j][0] * pairs[i][1]

    norms = [float(np.hypot(*p)) for p in pairs]
    if min(norms) == 0.0:
        raise UndefinedCrossRatioError("zero coefficient pair")
    for i in range(4):
        for j in range(i + 1, 4):
            if abs(det(i, j)) <= 1e-12 * norms[i] * norms[j]:
                raise UndefinedCrossRatioError(f"points {i} and {j} coincide")
    return det(0, 2) * det(1, 3) / (det(0, 3) * det(1, 2))


def lie_curvature_profile(
    L: LegendreMap, samples: ArrayLike, cluster_tol: Optional[float] = None
) -> Optional[Dict[str, float]]:
    """Statistics of the Lie curvature over samples where g = 4; None when there are none."""
    values = []
    for b in np.atleast_2d(np.asarray(samples, dtype=float)):
        point = curvature_at(L, b, cluster_tol)
        if point.g != 4:
            continue
        line = L.line_at(b)
        values.append(cross_ratio_on_line(line, [s.coefficients for s in point.spheres]))
    if not values:
        return None
    arr = np.array(values)
    return {
        "count": float(arr.size),
        "mean": float(arr.mean()),
        "std": float(arr.std()),
        "min": float(arr.min()),
        "max": float(arr.max()),
    }
