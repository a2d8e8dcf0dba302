"""Curvature-line integration, Dupin verification, focal spans, reducibility and
the timelike-line criterion for isoparametric hypersurfaces."""

from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike
from scipy import linalg, optimize

from opengov_liesphere.config import settings
from opengov_liesphere.core.curvature import curvature_at
from opengov_liesphere.core.errors import (
    InvalidArgumentError,
    LieSphereError,
    OutOfDomainError,
    PathTruncatedError,
    TrackingLostError,
)
from opengov_liesphere.core.legendre import Domain, LegendreMap
from opengov_liesphere.core.lie_core import lie_gram, projective_distance, span_summary
from opengov_liesphere.core.models import (
    BoundKind,
    CriterionResult,
    CriterionVerdict,
    CriterionWitness,
    CurvatureAtPoint,
    CurvatureSphere,
    DupinOutcome,
    DupinSection,
    DupinVerdict,
    FloatArray,
    LeafPath,
    LieVector,
    ReducibilityVerdict,
    SpanSummary,
    metric,
)
from opengov_liesphere.utils.logger import get_logger

logger = get_logger(__name__)

# Consecutive leaf steps must stay within this angle of the principal direction.
ALIGNMENT_DEGREES = 5.0
MAX_HALVINGS = 6
# Weight of the projective K distance when two branches are equally close in angle.
TIE_BREAK = 1e-3


def line_angle(sphere: CurvatureSphere) -> float:
    """Position of K on its line as an angle in [0, pi)."""
    a, b = sphere.coefficients
    return float(np.arctan2(a, b) % np.pi)


def _angle_gap(x: float, y: float) -> float:
    d = abs(x - y) % np.pi
    return min(d, np.pi - d)


def _min_gap(point: CurvatureAtPoint) -> float:
    angles = [line_angle(s) for s in point.spheres]
    if len(angles) < 2:
        return np.pi
    return min(
        _angle_gap(angles[i], angles[j])
        for i in range(len(angles))
        for j in range(i + 1, len(angles))
    )


def match_spheres(previous: CurvatureAtPoint, current: CurvatureAtPoint) -> CurvatureAtPoint:
    """Reorder the spheres of ``current`` to continue the branches of ``previous``.

    Branches are matched by nearest line angle with the projective K distance as a
    tie-break. Losing a branch (g changes, or a match jumps by more than half the
    smallest gap between branches) raises TrackingLostError.
    """
    if current.g != previous.g:
        raise TrackingLostError(
            f"number of curvature spheres changed from {previous.g} to {current.g}",
            b=list(current.b),
        )
    cost = np.array(
        [
            [
                _angle_gap(line_angle(p), line_angle(c))
                + TIE_BREAK * projective_distance(p.K, c.K)
                for c in current.spheres
            ]
            for p in previous.spheres
        ]
    )
    rows, cols = optimize.linear_sum_assignment(cost)
    limit = _min_gap(previous) / 2.0
    for i, j in zip(rows, cols):
        jump = _angle_gap(line_angle(previous.spheres[i]), line_angle(current.spheres[j]))
        if previous.g > 1 and jump > limit:
            raise TrackingLostError(
                f"branch {i} jumped by {jump:.3g} (limit {limit:.3g})", b=list(current.b)
            )
    order = [int(cols[i]) for i in np.argsort(rows)]
    return current.model_copy(update={"spheres": [current.spheres[j] for j in order]})


def snake_grid(domain: Domain, counts: Sequence[int], interior: bool = True) -> FloatArray:
    """Grid samples in boustrophedon order, so consecutive samples are grid neighbours."""
    if len(counts) != domain.dim:
        raise InvalidArgumentError(f"grid needs {domain.dim} counts, got {len(counts)}")
    axes = [domain.axis_samples(i, int(c), interior) for i, c in enumerate(counts)]

    def walk(level: int) -> List[Tuple[float, ...]]:
        if level == len(axes) - 1:
            return [(float(x),) for x in axes[level]]
        inner = walk(level + 1)
        rows: List[Tuple[float, ...]] = []
        for j, x in enumerate(axes[level]):
            for rest in inner if j % 2 == 0 else inner[::-1]:
                rows.append((float(x),) + rest)
        return rows

    return np.array(walk(0))


def track(
    L: LegendreMap, samples: ArrayLike, cluster_tol: Optional[float] = None
) -> List[CurvatureAtPoint]:
    """Curvature data along ``samples`` (taken in order) with consistent branch indices."""
    points: List[CurvatureAtPoint] = []
    for b in np.atleast_2d(np.asarray(samples, dtype=float)):
        point = curvature_at(L, b, cluster_tol)
        points.append(point if not points else match_spheres(points[-1], point))
    return points


def _tracked_index(point: CurvatureAtPoint, angle: float) -> int:
    return int(np.argmin([_angle_gap(line_angle(s), angle) for s in point.spheres]))


def _collision(message: str) -> PathTruncatedError:
    return PathTruncatedError(message, reason="eigenvalue-collision")


def _direction(
    L: LegendreMap, b: FloatArray, angle: float, g: int, previous: FloatArray
) -> Tuple[FloatArray, CurvatureSphere]:
    point = curvature_at(L, b)
    if point.g != g:
        raise _collision(f"g changed to {point.g} at {b.tolist()}")
    sphere = point.spheres[_tracked_index(point, angle)]
    if sphere.multiplicity != 1:
        raise _collision(f"tracked curvature sphere became multiple at {b.tolist()}")
    v = sphere.principal_basis[:, 0]
    v = v / np.linalg.norm(v)
    if float(v @ previous) < 0:
        v = -v
    return v, sphere


def _start(
    L: LegendreMap, b0: ArrayLike, sphere_index: int
) -> Tuple[FloatArray, CurvatureAtPoint, CurvatureSphere]:
    b0 = np.asarray(b0, dtype=float)
    if not L.domain.contains(b0):
        raise OutOfDomainError(f"start point {b0.tolist()} outside the domain", b=b0.tolist())
    point = curvature_at(L, b0)
    if not 0 <= sphere_index < point.g:
        raise InvalidArgumentError(
            f"sphere index {sphere_index} out of range for g = {point.g}"
        )
    return b0, point, point.spheres[sphere_index]


def integrate_curvature_line(
    L: LegendreMap,
    b0: ArrayLike,
    sphere_index: int,
    arclength: Optional[float] = None,
    step: Optional[float] = None,
) -> LeafPath:
    """Trace a curvature line of a simple curvature sphere with classical RK4.

    Lengths are measured in the chart metric of the parameter domain. Each accepted
    step is re-checked against the principal direction at its end point; the step is
    halved until they agree within a few degrees.
    """
    arclength = settings.leaf_length if arclength is None else arclength
    step = settings.leaf_step if step is None else step
    if arclength <= 0 or step <= 0:
        raise InvalidArgumentError("arclength and step must be positive")

    b, point, sphere = _start(L, b0, sphere_index)
    if sphere.multiplicity != 1:
        raise PathTruncatedError(
            f"curvature sphere {sphere_index} has multiplicity {sphere.multiplicity} at the start",
            reason="multiple-eigenvalue",
        )
    g = point.g
    angle = line_angle(sphere)
    heading = sphere.principal_basis[:, 0] / np.linalg.norm(sphere.principal_basis[:, 0])

    points = [b.copy()]
    travelled = 0.0
    truncated: Optional[str] = None
    cos_limit = np.cos(np.radians(ALIGNMENT_DEGREES))

    while travelled < arclength - 1e-12 and truncated is None:
        h = min(step, arclength - travelled)
        for _ in range(MAX_HALVINGS + 1):
            try:
                k1, _ = _direction(L, b, angle, g, heading)
                k2, _ = _direction(L, b + 0.5 * h * k1, angle, g, k1)
                k3, _ = _direction(L, b + 0.5 * h * k2, angle, g, k1)
                k4, _ = _direction(L, b + h * k3, angle, g, k1)
                candidate = b + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
                if not L.domain.contains(candidate):
                    truncated = "domain-boundary"
                    break
                end_dir, end_sphere = _direction(L, candidate, angle, g, k1)
            except PathTruncatedError as exc:
                truncated = exc.reason
                break
            except OutOfDomainError:
                truncated = "domain-boundary"
                break
            move = candidate - b
            if abs(float(move @ end_dir)) >= cos_limit * float(np.linalg.norm(move)):
                b, heading = candidate, end_dir
                angle = line_angle(end_sphere)
                travelled += float(np.linalg.norm(move))
                points.append(b.copy())
                break
            h /= 2.0
        else:
            truncated = "alignment"

    if truncated is not None:
        logger.info("leaf_truncated", reason=truncated, points=len(points), length=travelled)
    return LeafPath(
        points=np.array(points),
        sphere_index=sphere_index,
        arclength=travelled,
        truncated=truncated,
    )


def sample_leaf(
    L: LegendreMap,
    b0: ArrayLike,
    sphere_index: int,
    steps: int = 20,
    step: Optional[float] = None,
    seed: Optional[int] = None,
) -> LeafPath:
    """Random walk inside the principal distribution of a multiple curvature sphere."""
    step = settings.leaf_step if step is None else step
    rng = np.random.default_rng(settings.seed if seed is None else seed)
    b, point, sphere = _start(L, b0, sphere_index)
    g, mult, angle = point.g, sphere.multiplicity, line_angle(sphere)

    points = [b.copy()]
    travelled = 0.0
    truncated: Optional[str] = None
    for _ in range(steps):
        weights = rng.normal(size=mult)
        direction = sphere.principal_basis @ (weights / np.linalg.norm(weights))
        candidate = b + step * direction
        if not L.domain.contains(candidate):
            truncated = "domain-boundary"
            break
        current = curvature_at(L, candidate)
        if current.g != g:
            truncated = "eigenvalue-collision"
            break
        sphere = current.spheres[_tracked_index(current, angle)]
        if sphere.multiplicity != mult:
            truncated = "eigenvalue-collision"
            break
        angle = line_angle(sphere)
        b = candidate
        travelled += step
        points.append(b.copy())
    return LeafPath(
        points=np.array(points), sphere_index=sphere_index, arclength=travelled, truncated=truncated
    )


def dupin_deviation(L: LegendreMap, path: LeafPath) -> float:
    """Largest projective distance between K(b) along the leaf and K at its start."""
    iterator: Iterator[FloatArray] = iter(path.points)
    start = curvature_at(L, next(iterator))
    if not 0 <= path.sphere_index < start.g:
        raise InvalidArgumentError("path sphere index does not exist at its start point")
    first = start.spheres[path.sphere_index]
    angle = line_angle(first)
    worst = 0.0
    for b in iterator:
        point = curvature_at(L, b)
        sphere = point.spheres[_tracked_index(point, angle)]
        angle = line_angle(sphere)
        worst = max(worst, projective_distance(first.K, sphere.K))
    return worst


def _leaves_at(L: LegendreMap, seed_point: CurvatureAtPoint) -> List[LeafPath]:
    leaves = []
    for index, sphere in enumerate(seed_point.spheres):
        try:
            if sphere.multiplicity == 1:
                leaf = integrate_curvature_line(L, seed_point.b, index)
            else:
                steps = max(1, int(round(settings.leaf_length / settings.leaf_step)))
                leaf = sample_leaf(L, seed_point.b, index, steps=steps)
        except PathTruncatedError as exc:
            logger.info("leaf_skipped", b=list(seed_point.b), index=index, reason=exc.reason)
            continue
        except LieSphereError as exc:
            logger.warning("leaf_skipped", b=list(seed_point.b), index=index, error=str(exc))
            continue
        if len(leaf.points) > 1:
            leaves.append(leaf)
    return leaves


def dupin_verify(
    L: LegendreMap, counts: Sequence[int], tol: Optional[float] = None
) -> DupinOutcome:
    """Grid-sampled Dupin check: per-point g, leaf deviations per sphere, and a verdict."""
    yes_tol = settings.dupin_yes_tol if tol is None else tol
    no_tol = max(settings.dupin_no_tol, yes_tol)

    points: List[CurvatureAtPoint] = []
    for b in L.domain.grid(counts, interior=True):
        try:
            points.append(curvature_at(L, b))
        except LieSphereError as exc:
            logger.warning("curvature_failed", b=b.tolist(), error=str(exc))
    g_values = sorted({p.g for p in points})
    unstable = sum(1 for p in points if not p.stable)

    stable = [p for p in points if p.stable]
    rng = np.random.default_rng(settings.seed)
    chosen = (
        sorted(rng.choice(len(stable), size=min(settings.leaf_seeds, len(stable)), replace=False))
        if stable
        else []
    )
    leaves: List[LeafPath] = []
    for i in chosen:
        leaves.extend(_leaves_at(L, stable[int(i)]))

    measured: List[LeafPath] = []
    deviations: List[float] = []
    for leaf in leaves:
        try:
            deviations.append(dupin_deviation(L, leaf))
        except LieSphereError as exc:
            logger.warning("leaf_skipped", index=leaf.sphere_index, error=str(exc))
            continue
        measured.append(leaf)
    leaves = measured
    width = max(g_values) if g_values else 0
    per_sphere: List[Optional[float]] = [None] * width
    for leaf, value in zip(leaves, deviations):
        current = per_sphere[leaf.sphere_index]
        per_sphere[leaf.sphere_index] = value if current is None else max(current, value)

    if not deviations:
        verdict = DupinVerdict.INCONCLUSIVE
    elif max(deviations) > no_tol:
        verdict = DupinVerdict.NOT_DUPIN
    elif max(deviations) < yes_tol:
        verdict = DupinVerdict.PROPER_DUPIN if len(g_values) == 1 else DupinVerdict.MIXED_G
    else:
        verdict = DupinVerdict.INCONCLUSIVE

    logger.info(
        "dupin_verify",
        verdict=verdict.value,
        g_values=g_values,
        leaves=len(leaves),
        max_deviation=max(deviations) if deviations else None,
    )
    section = DupinSection(
        verdict=verdict,
        g_values=g_values,
        unstable_points=unstable,
        max_deviation=per_sphere,
        leaf_count=len(leaves),
    )
    return DupinOutcome(section=section, points=points, leaves=leaves, deviations=deviations)


def _branch_vectors(points: List[CurvatureAtPoint], index: int) -> List[LieVector]:
    if not points:
        raise InvalidArgumentError("no samples")
    if not 0 <= index < points[0].g:
        raise InvalidArgumentError(f"sphere index {index} out of range for g = {points[0].g}")
    return [p.spheres[index].K for p in points]


def focal_span(
    L: LegendreMap,
    sphere_index: int,
    samples: ArrayLike,
    tracked: Optional[List[CurvatureAtPoint]] = None,
) -> SpanSummary:
    """Span of one curvature-sphere branch over the samples."""
    points = tracked if tracked is not None else track(L, samples)
    return span_summary(_branch_vectors(points, sphere_index))


def reducibility_test(
    L: LegendreMap,
    samples: ArrayLike,
    rank_tol: Optional[float] = None,
    tracked: Optional[List[CurvatureAtPoint]] = None,
) -> Tuple[ReducibilityVerdict, List[SpanSummary]]:
    """Reducible iff some curvature-sphere map lies in a subspace of codimension two."""
    points = tracked if tracked is not None else track(L, samples)
    spans = [
        span_summary(_branch_vectors(points, i), rank_tol) for i in range(points[0].g)
    ]
    threshold = L.n + 1
    verdict = (
        ReducibilityVerdict.REDUCIBLE
        if any(s.dim <= threshold for s in spans)
        else ReducibilityVerdict.NOT_REDUCIBLE
    )
    logger.info("reducibility_test", verdict=verdict.value, dims=[s.dim for s in spans])
    return verdict, spans


def _unit_rows(vectors: List[LieVector]) -> FloatArray:
    return np.vstack([v.coords / v.norm() for v in vectors])


def _orthogonal_points(
    rows: FloatArray, J: FloatArray, rank_tol: float
) -> Tuple[FloatArray, float]:
    """Basis of {P : <K, P> = 0 for every row K} and a residual lower bound for it."""
    constraint = rows @ J
    basis = linalg.null_space(constraint, rcond=rank_tol)
    sv = linalg.svdvals(constraint)
    lower = float(sv[-1]) / np.sqrt(constraint.shape[0]) if sv.size == J.shape[0] else 0.0
    return basis, lower


def _timelike_pair(
    first: FloatArray, second: FloatArray, J: FloatArray, margin: float
) -> Optional[Tuple[FloatArray, FloatArray]]:
    """Search P1 in span(first), P2 in span(second) spanning a timelike line."""
    starts = []
    for basis in (first, second):
        restricted = basis.T @ J @ basis
        values, vectors = linalg.eigh((restricted + restricted.T) / 2.0)
        if values[0] >= -margin:
            return None
        starts.append(vectors[:, 0])
    k1 = first.shape[1]

    def points(c: FloatArray) -> Tuple[FloatArray, FloatArray]:
        return first @ c[:k1], second @ c[k1:]

    def energy(c: FloatArray) -> float:
        p1, p2 = points(c)
        n1, n2 = float(p1 @ J @ p1), float(p2 @ J @ p2)
        if n1 >= -margin or n2 >= -margin:
            return 1e3 + max(n1, n2)
        return float(p1 @ J @ p2) ** 2 / (n1 * n2)

    c0 = np.concatenate(starts)
    if energy(c0) > 1e-24:
        result = optimize.minimize(
            energy,
            c0,
            method="Nelder-Mead",
            options={"xatol": 1e-12, "fatol": 1e-16, "maxiter": 4000},
        )
        c0 = result.x
    p1, p2 = points(c0)
    n1, n2 = float(p1 @ J @ p1), float(p2 @ J @ p2)
    if n1 >= -margin or n2 >= -margin:
        return None
    cosine = abs(float(p1 @ J @ p2)) / np.sqrt(n1 * n2)
    if -1.0 + cosine >= -margin:
        return None
    return p1, p2


def _line_meets(
    line: FloatArray, space: FloatArray, rank_tol: float
) -> Tuple[Optional[FloatArray], float]:
    """Point of the 2-plane ``line`` (columns) lying in ``space`` (columns), if any."""
    stacked = np.hstack([line / np.linalg.norm(line, axis=0), -space])
    sv = linalg.svdvals(stacked)
    if sv[-1] > rank_tol * sv[0]:
        return None, float(sv[-1] / sv[0])
    coefficients = linalg.null_space(stacked, rcond=rank_tol)[:, 0]
    return (line / np.linalg.norm(line, axis=0)) @ coefficients[:2], 0.0


def _witness(
    P: List[FloatArray], points: List[CurvatureAtPoint], J: FloatArray, n: int
) -> Tuple[CriterionWitness, float]:
    scaled = []
    for p in P:
        norm2 = float(p @ J @ p)
        scaled.append(2.0 * p / np.sqrt(-norm2))
    for i in range(1, len(scaled)):
        if float(scaled[0] @ J @ scaled[i]) > 0:
            scaled[i] = -scaled[i]
    residual = 0.0
    for i, p in enumerate(scaled):
        for point in points:
            K = point.spheres[i].K.coords
            residual = max(
                residual, abs(float(K @ J @ p)) / (np.linalg.norm(K) * np.linalg.norm(p))
            )
    pair = np.vstack(scaled[:2])
    gram = lie_gram(pair)
    witness = CriterionWitness(
        points=[LieVector(p, n) for p in scaled],
        line_basis=(LieVector(pair[0], n), LieVector(pair[1], n)),
        gram=gram,
        residuals=residual,
    )
    return witness, residual


def isoparametric_criterion(
    L: LegendreMap,
    samples: ArrayLike,
    g: Optional[int] = None,
    tracked: Optional[List[CurvatureAtPoint]] = None,
) -> CriterionResult:
    """Look for points P_1..P_g on a timelike line with <K_i(b), P_i> = 0 on the samples.

    The search is sound but incomplete: a witness is reported only when its residuals
    stay below ``witness_tol``; "no-witness" needs a certified residual lower bound,
    and everything else is "indeterminate".
    """
    points = tracked if tracked is not None else track(L, samples)
    J = metric(L.n)
    margin, witness_tol, rank_tol = settings.witness_margin, settings.witness_tol, settings.rank_tol
    branches = points[0].g
    if g is not None and g != branches:
        logger.warning("criterion_g_mismatch", expected=g, found=branches)
        return CriterionResult(verdict=CriterionVerdict.INDETERMINATE)

    spaces, lowers = [], []
    for i in range(branches):
        basis, lower = _orthogonal_points(_unit_rows(_branch_vectors(points, i)), J, rank_tol)
        spaces.append(basis)
        lowers.append(lower)
    dims = [s.shape[1] for s in spaces]

    def verdict(
        kind: CriterionVerdict, lower: Optional[float] = None, bound: BoundKind = "residual"
    ) -> CriterionResult:
        if kind is CriterionVerdict.NO_WITNESS and (lower is None or lower <= 10 * witness_tol):
            kind = CriterionVerdict.INDETERMINATE
        bound_kind = bound if lower is not None else None
        logger.info(
            "isoparametric_criterion",
            verdict=kind.value,
            dims=dims,
            lower_bound=lower,
            bound_kind=bound_kind,
        )
        return CriterionResult(
            verdict=kind, nullspace_dims=dims, lower_bound=lower, bound_kind=bound_kind
        )

    if 0 in dims:
        return verdict(CriterionVerdict.NO_WITNESS, max(lowers))

    singles = [i for i, d in enumerate(dims) if d == 1]
    chosen: Optional[List[FloatArray]] = None
    if len(singles) >= 2:
        a, b = spaces[singles[0]][:, 0], spaces[singles[1]][:, 0]
        line = np.column_stack([a, b])
        sv = linalg.svdvals(np.vstack([a / np.linalg.norm(a), b / np.linalg.norm(b)]))
        if sv[-1] <= rank_tol * sv[0]:
            return verdict(CriterionVerdict.INDETERMINATE)
        chosen = []
        for i in range(branches):
            if dims[i] == 1:
                p = spaces[i][:, 0]
                # every 1-dimensional space must lie on the line through the first two
                rows = np.vstack(
                    [a / np.linalg.norm(a), b / np.linalg.norm(b), p / np.linalg.norm(p)]
                )
                off = float(linalg.svdvals(rows)[-1])
                if off > rank_tol:
                    return verdict(CriterionVerdict.NO_WITNESS, off)
            else:
                p, off = _line_meets(line, spaces[i], rank_tol)
                if p is None:
                    return verdict(CriterionVerdict.NO_WITNESS, off)
            chosen.append(p)
        unit_line = np.vstack([a / np.linalg.norm(a), b / np.linalg.norm(b)])
        restricted = linalg.eigvalsh(lie_gram(unit_line))
        if restricted[-1] >= -margin:
            return verdict(CriterionVerdict.NO_WITNESS, float(restricted[-1]), "line-gram")
    elif branches == 2:
        pair = _timelike_pair(spaces[0], spaces[1], J, margin)
        if pair is None:
            return verdict(CriterionVerdict.INDETERMINATE)
        chosen = list(pair)
    else:
        return verdict(CriterionVerdict.INDETERMINATE)

    witness, residual = _witness(chosen, points, J, L.n)
    if residual >= witness_tol:
        logger.info("criterion_residual_too_large", residual=residual)
        return verdict(CriterionVerdict.INDETERMINATE)
    logger.info("isoparametric_criterion", verdict="witness", dims=dims, residual=residual)
    return CriterionResult(
        verdict=CriterionVerdict.WITNESS, witness=witness, nullspace_dims=dims
    )
