"""Example generators: cyclides, classical surfaces, Veronese surfaces, the Cartan
isoparametric family, reducible constructions and explicit cyclide equivalences."""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from scipy import linalg

from opengov_liesphere.core.curvature import principal_curvatures, shape_operator
from opengov_liesphere.core.dupin import snake_grid, track
from opengov_liesphere.core.errors import (
    InvalidArgumentError,
    InvalidConstructionError,
    NotEquivalentError,
    SelfIntersectingSpecError,
)
from opengov_liesphere.core.legendre import (
    Domain,
    ImmersionOracle,
    LegendreMap,
    Representatives,
    lift_euclidean,
    lift_normal_bundle_s4,
    lift_spherical,
    stereographic_pair,
)
from opengov_liesphere.core.lie_core import (
    as_lie_transform,
    lie_gram,
    parallel_transform,
    span_summary,
)
from opengov_liesphere.core.models import (
    ArrayField,
    ConstructionKind,
    FloatArray,
    LieLine,
    LieTransform,
    LieVector,
    Provenance,
    SpanSummary,
    metric,
)
from opengov_liesphere.utils.logger import get_logger

logger = get_logger(__name__)

Surface = Tuple[ImmersionOracle, ImmersionOracle]

TWO_PI = 2.0 * np.pi
# Latitude-type chart angles stay this far from the poles.
POLAR_LIMIT = 1.2


# ---------------------------------------------------------------- cyclides


class CyclideSpec(BaseModel):
    """Characteristic (p, q) of a cyclide in R^n with n = p + q + 1."""

    model_config = ConfigDict(frozen=True)

    p: int = Field(ge=1)
    q: int = Field(ge=1)
    n: int = 0

    @model_validator(mode="after")
    def dimension(self) -> "CyclideSpec":
        if self.n == 0:
            object.__setattr__(self, "n", self.p + self.q + 1)
        if self.n != self.p + self.q + 1:
            raise ValueError(f"n must equal p + q + 1 = {self.p + self.q + 1}")
        return self


def sphere_chart(angles: ArrayLike) -> FloatArray:
    """Point of S^k from k hyperspherical angles; the first angle is the periodic one."""
    angles = np.asarray(angles, dtype=float)
    point = np.array([np.cos(angles[0]), np.sin(angles[0])])
    for angle in angles[1:]:
        point = np.concatenate([np.cos(angle) * point, [np.sin(angle)]])
    return point


def sphere_domain(k: int) -> Domain:
    bounds = [(0.0, TWO_PI)] + [(-POLAR_LIMIT, POLAR_LIMIT)] * (k - 1)
    return Domain.box(*bounds, periodic=[True] + [False] * (k - 1))


def cyclide(spec: CyclideSpec) -> LegendreMap:
    """The standard cyclide: lines joining [e1 + u], u in S^q, to [v + e_{n+3}], v in S^p."""
    p, q, n = spec.p, spec.q, spec.n

    def representatives(b: FloatArray) -> Representatives:
        y1 = np.zeros(n + 3)
        y2 = np.zeros(n + 3)
        y1[0] = 1.0
        y1[1 : q + 2] = sphere_chart(b[:q])
        y2[q + 2 : n + 2] = sphere_chart(b[q:])
        y2[-1] = 1.0
        return y1, y2

    return LegendreMap(
        representatives=representatives,
        domain=sphere_domain(q).product(sphere_domain(p)),
        n=n,
        provenance=Provenance.ZOO_ANALYTIC,
        label=f"cyclide(p={p},q={q})",
    )


# ------------------------------------------------------ classical surfaces


def torus(a: float, b: float, patch: Optional[Tuple[float, float]] = None) -> Surface:
    """Torus of revolution about the x3 axis with the inward (towards the core) normal.

    Principal curvatures are cos v / (a + b cos v) along u and 1/b along v. ``patch``
    restricts v to a non-periodic interval.
    """
    if not 0 < b < a:
        raise SelfIntersectingSpecError(f"torus needs a > b > 0, got a={a}, b={b}")
    if patch is None:
        domain = Domain.box((0.0, TWO_PI), (0.0, TWO_PI), periodic=[True, True])
    else:
        domain = Domain.box((0.0, TWO_PI), patch, periodic=[True, False])

    def f(x: FloatArray) -> FloatArray:
        u, v = x
        radius = a + b * np.cos(v)
        return np.array([radius * np.cos(u), radius * np.sin(u), b * np.sin(v)])

    def xi(x: FloatArray) -> FloatArray:
        u, v = x
        return -np.array([np.cos(v) * np.cos(u), np.cos(v) * np.sin(u), np.sin(v)])

    normal = ImmersionOracle(xi, domain)
    return ImmersionOracle(f, domain, normal=normal), normal


def ellipsoid(a: float, b: float, c: float) -> Surface:
    """Ellipsoid with semi-axes a, b, c and the inward normal, away from the poles."""
    if min(a, b, c) <= 0:
        raise InvalidArgumentError("ellipsoid semi-axes must be positive")
    domain = Domain.box((0.0, TWO_PI), (0.15, np.pi - 0.15), periodic=[True, False])
    axes = np.array([a, b, c], dtype=float)

    def f(x: FloatArray) -> FloatArray:
        u, v = x
        return axes * np.array([np.cos(u) * np.sin(v), np.sin(u) * np.sin(v), np.cos(v)])

    def xi(x: FloatArray) -> FloatArray:
        gradient = f(x) / axes**2
        return -gradient / np.linalg.norm(gradient)

    normal = ImmersionOracle(xi, domain)
    return ImmersionOracle(f, domain, normal=normal), normal


def sphere(radius: float = 1.0) -> Surface:
    """Round sphere (every point umbilic)."""
    return ellipsoid(radius, radius, radius)


def plane() -> Surface:
    """The plane x3 = 0 over [-1, 1]^2 with normal e3."""
    domain = Domain.box((-1.0, 1.0), (-1.0, 1.0))

    def f(x: FloatArray) -> FloatArray:
        return np.array([x[0], x[1], 0.0])

    normal = ImmersionOracle(lambda x: np.array([0.0, 0.0, 1.0]), domain)
    return ImmersionOracle(f, domain, normal=normal), normal


# --------------------------------------------------------------- Veronese


def _unit_3(y: ArrayLike) -> FloatArray:
    y = np.asarray(y, dtype=float)
    if y.shape != (3,) or abs(float(np.linalg.norm(y)) - 1.0) > 1e-10:
        raise InvalidArgumentError("Veronese map needs a unit 3-vector")
    return y


def veronese_affine(y: ArrayLike) -> FloatArray:
    """(2 y2 y3, 2 y3 y1, 2 y1 y2, y1^2, y2^2); even under y -> -y."""
    y1, y2, y3 = _unit_3(y)
    return np.array([2 * y2 * y3, 2 * y3 * y1, 2 * y1 * y2, y1**2, y2**2])


# Frobenius-orthonormal basis of the traceless symmetric 3x3 matrices.
_SYM_BASIS = np.array(
    [
        [[0, 0, 0], [0, 0, 1], [0, 1, 0]],
        [[0, 0, 1], [0, 0, 0], [1, 0, 0]],
        [[0, 1, 0], [1, 0, 0], [0, 0, 0]],
        [[1, 0, 0], [0, -1, 0], [0, 0, 0]],
    ],
    dtype=float,
) / np.sqrt(2.0)
_SYM_BASIS = np.concatenate([_SYM_BASIS, [np.diag([1.0, 1.0, -2.0]) / np.sqrt(6.0)]])


def symmetric_coordinates(matrix: ArrayLike) -> FloatArray:
    """Coordinates of a symmetric matrix in the traceless orthonormal basis."""
    return np.einsum("kij,ij->k", _SYM_BASIS, np.asarray(matrix, dtype=float))


def veronese_spherical(y: ArrayLike) -> FloatArray:
    """The Veronese surface on the unit S^4: sqrt(3/2) times the coordinates of y y^T - I/3.

    Equals (sqrt3 y2 y3, sqrt3 y3 y1, sqrt3 y1 y2, sqrt3/2 (y1^2 - y2^2),
    (y1^2 + y2^2 - 2 y3^2) / 2), an affine image of :func:`veronese_affine`.
    """
    y = _unit_3(y)
    return np.sqrt(1.5) * symmetric_coordinates(np.outer(y, y))


def _veronese_chart(x: FloatArray) -> Tuple[FloatArray, FloatArray, FloatArray]:
    u, v = x[0], x[1]
    y = np.array([np.sin(v) * np.cos(u), np.sin(v) * np.sin(u), np.cos(v)])
    a = np.array([np.cos(v) * np.cos(u), np.cos(v) * np.sin(u), -np.sin(v)])
    b = np.array([-np.sin(u), np.cos(u), 0.0])
    return y, a, b


def veronese_surface() -> Tuple[ImmersionOracle, Callable, Callable]:
    """Chart of the spherical Veronese surface with its orthonormal normal frame in S^4."""
    domain = Domain.box((0.0, TWO_PI), (0.3, np.pi - 0.3), periodic=[True, False])

    def phi(x: FloatArray) -> FloatArray:
        return veronese_spherical(_veronese_chart(x)[0])

    def nu1(x: FloatArray) -> FloatArray:
        _, a, b = _veronese_chart(x)
        return symmetric_coordinates(np.outer(a, a) - np.outer(b, b)) / np.sqrt(2.0)

    def nu2(x: FloatArray) -> FloatArray:
        _, a, b = _veronese_chart(x)
        return symmetric_coordinates(np.outer(a, b) + np.outer(b, a)) / np.sqrt(2.0)

    return ImmersionOracle(phi, domain), nu1, nu2


def veronese() -> LegendreMap:
    """Legendre lift of the unit normal bundle of the Veronese surface in S^4."""
    phi, nu1, nu2 = veronese_surface()
    return lift_normal_bundle_s4(phi, nu1, nu2)


class VeroneseFrame(BaseModel):
    """Frame vectors built from the rows a_1, a_2, a_3 of a rotation A.

    F_i is the affine Veronese image of a_i and G_ik = DV(a_k)[a_i].
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    A: ArrayField
    F1: ArrayField
    F2: ArrayField
    F3: ArrayField
    G12: ArrayField
    G23: ArrayField
    G31: ArrayField

    @property
    def Y3(self) -> FloatArray:
        return self.G12

    @property
    def Y4(self) -> FloatArray:
        return -self.G23

    @property
    def Y5(self) -> FloatArray:
        return self.G31

    @property
    def Z3(self) -> FloatArray:
        return 2.0 * (self.F2 - self.F1)

    @property
    def Z4(self) -> FloatArray:
        return 2.0 * (self.F3 - self.F2)

    @property
    def Z5(self) -> FloatArray:
        return 2.0 * (self.F1 - self.F3)

    def solution(self) -> Dict[str, FloatArray]:
        return {
            "Y3": self.Y3,
            "Y4": self.Y4,
            "Y5": self.Y5,
            "Z3": self.Z3,
            "Z4": self.Z4,
            "Z5": self.Z5,
        }


def veronese_bilinear(y: ArrayLike, w: ArrayLike) -> FloatArray:
    """Symmetric form B with B(y, y) = 2 V(y); B(y, w) is the derivative of V at y along w."""
    y1, y2, y3 = np.asarray(y, dtype=float)
    w1, w2, w3 = np.asarray(w, dtype=float)
    return np.array(
        [
            2 * (y2 * w3 + y3 * w2),
            2 * (y3 * w1 + y1 * w3),
            2 * (y1 * w2 + y2 * w1),
            2 * y1 * w1,
            2 * y2 * w2,
        ]
    )


def _rotation(A: ArrayLike) -> FloatArray:
    A = np.asarray(A, dtype=float)
    if A.shape != (3, 3):
        raise InvalidArgumentError("expected a 3x3 matrix")
    if float(np.max(np.abs(A.T @ A - np.eye(3)))) > 1e-10 or np.linalg.det(A) <= 0:
        raise InvalidArgumentError("matrix is not a rotation")
    return A


def f_frames(A: ArrayLike) -> VeroneseFrame:
    A = _rotation(A)
    a1, a2, a3 = A
    return VeroneseFrame(
        A=A,
        F1=veronese_affine(a1),
        F2=veronese_affine(a2),
        F3=veronese_affine(a3),
        G12=veronese_bilinear(a2, a1),
        G23=veronese_bilinear(a3, a2),
        G31=veronese_bilinear(a1, a3),
    )


def maurer_cartan(A: ArrayLike, dA: ArrayLike) -> FloatArray:
    """(theta_1, theta_2, theta_3) = (alpha_23, alpha_31, alpha_12) with alpha = dA A^T."""
    alpha = np.asarray(dA, dtype=float) @ np.asarray(A, dtype=float).T
    return np.array([alpha[1, 2], alpha[2, 0], alpha[0, 1]])


def f_frame_derivatives(A: ArrayLike, dA: ArrayLike) -> Dict[str, FloatArray]:
    """Differentials of F_i and G_ik along dA, expressed through the frame itself."""
    A = _rotation(A)
    alpha = np.asarray(dA, dtype=float) @ A.T
    rows = list(A)

    def B(i: int, k: int) -> FloatArray:
        return veronese_bilinear(rows[i], rows[k])

    def dF(i: int) -> FloatArray:
        return sum(alpha[i, k] * B(i, k) for k in range(3))

    def dG(i: int, j: int) -> FloatArray:
        return sum(alpha[i, k] * B(k, j) + alpha[j, k] * B(i, k) for k in range(3))

    return {
        "F1": dF(0),
        "F2": dF(1),
        "F3": dF(2),
        "G12": dG(0, 1),
        "G23": dG(1, 2),
        "G31": dG(2, 0),
    }


# Gram matrix of the frame basis (E1, ..., E5, W1, W2).
_FRAME_GRAM = linalg.block_diag(
    np.diag([0.25, 0.25, 0.25]),
    np.array([[1.0, 0.5], [0.5, 1.0]]),
    np.array([[-4.0, -2.0], [-2.0, -4.0]]),
)
_C1 = np.array([0, 0, 0, 0, 0, -1.0, 2.0])
_C2 = np.array([0, 0, 0, 0, 0, 2.0, -1.0])


@lru_cache()
def frame_coordinates() -> FloatArray:
    """T with T^T J T equal to the frame Gram; maps frame coordinates to standard ones."""
    values, vectors = linalg.eigh(_FRAME_GRAM)
    negative = [i for i in range(7) if values[i] < 0]
    positive = [i for i in range(7) if values[i] > 0]
    order = [negative[0]] + positive + [negative[1]]
    T = np.sqrt(np.abs(values[order]))[:, None] * vectors[:, order].T
    T.setflags(write=False)
    return T


def _pad(vector: FloatArray) -> FloatArray:
    return np.concatenate([vector, [0.0, 0.0]])


def frame_solution(A: ArrayLike) -> Dict[str, LieVector]:
    """Y1..Y7 of the frame assembled from the Veronese frame of A, in standard coordinates."""
    frame = f_frames(A)
    W1, W2 = np.eye(7)[5], np.eye(7)[6]
    Y1 = (_pad(frame.Z4) - _pad(frame.Z5) - _C1) / 6.0
    Y7 = (_pad(frame.Z4) + 2.0 * _pad(frame.Z5) - _C2) / 6.0
    frame_vectors = {
        "Y1": Y1,
        "Y2": W2 + 2.0 * Y1 + Y7,
        "Y3": _pad(frame.Y3),
        "Y4": _pad(frame.Y4),
        "Y5": _pad(frame.Y5),
        "Y6": W1 + Y1 + 2.0 * Y7,
        "Y7": Y7,
    }
    T = frame_coordinates()
    return {name: LieVector(T @ c, 4) for name, c in frame_vectors.items()}


def fixed_timelike_pair() -> Tuple[LieVector, LieVector]:
    """W1, W2 with <W1,W1> = <W2,W2> = -4 and <W1,W2> = -2."""
    T = frame_coordinates()
    return LieVector(T[:, 5], 4), LieVector(T[:, 6], 4)


def euler_zyz(angles: ArrayLike) -> FloatArray:
    alpha, beta, gamma = np.asarray(angles, dtype=float)

    def rz(t: float) -> FloatArray:
        return np.array([[np.cos(t), -np.sin(t), 0], [np.sin(t), np.cos(t), 0], [0, 0, 1.0]])

    ry = np.array(
        [[np.cos(beta), 0, np.sin(beta)], [0, 1.0, 0], [-np.sin(beta), 0, np.cos(beta)]]
    )
    return rz(alpha) @ ry @ rz(gamma)


def veronese_frame_map() -> LegendreMap:
    """[Y1, Y7] of the assembled frame over SO(3) in Euler angles.

    Its curvature spheres are Y1, Y7 and Y1 + Y7, orthogonal to W1, W2 and W1 - W2.
    """
    domain = Domain.box(
        (0.0, TWO_PI), (0.3, 1.2), (0.0, TWO_PI), periodic=[True, False, True]
    )

    def representatives(b: FloatArray) -> Representatives:
        solution = frame_solution(euler_zyz(b))
        return solution["Y1"].coords, solution["Y7"].coords

    return LegendreMap(
        representatives=representatives,
        domain=domain,
        n=4,
        provenance=Provenance.ZOO_ANALYTIC,
        label="veronese-frame",
    )


# ----------------------------------------------------------------- Cartan


@dataclass(frozen=True)
class CartanMember:
    """One parallel hypersurface of the Cartan family in S^4 with its Legendre lift."""

    t: float
    immersion: ImmersionOracle
    normal: ImmersionOracle
    lift: LegendreMap
    degenerate: bool = False


def cartan_hypersurface(t: float) -> CartanMember:
    """Tube of spherical radius t over the Veronese surface, over (u, v, theta).

    At t = k pi/3 the tube collapses onto a focal Veronese surface; the member is
    flagged as degenerate and its lift is the (still regular) normal-bundle lift.
    """
    phi, nu1, nu2 = veronese_surface()
    domain = phi.domain.product(Domain((0.0,), (TWO_PI,), (True,)))

    def nu(x: FloatArray) -> FloatArray:
        return np.cos(x[2]) * nu1(x[:2]) + np.sin(x[2]) * nu2(x[:2])

    def point(x: FloatArray) -> FloatArray:
        return np.cos(t) * phi(x[:2]) + np.sin(t) * nu(x)

    def normal(x: FloatArray) -> FloatArray:
        return -np.sin(t) * phi(x[:2]) + np.cos(t) * nu(x)

    immersion = ImmersionOracle(point, domain)
    eta = ImmersionOracle(normal, domain)
    offset = abs(t / (np.pi / 3.0) - round(t / (np.pi / 3.0)))
    if offset < 1e-9:
        logger.warning("degenerate_tube", t=t)
        lift = veronese().transformed(parallel_transform(-t, 4))
        lift = LegendreMap(
            representatives=lift.representatives,
            domain=lift.domain,
            n=4,
            provenance=lift.provenance,
            label=f"cartan(t={t:g})",
            flags={"degenerate": True},
        )
        return CartanMember(t=t, immersion=immersion, normal=eta, lift=lift, degenerate=True)

    lift = lift_spherical(immersion, eta)
    lift = LegendreMap(
        representatives=lift.representatives,
        domain=lift.domain,
        n=lift.n,
        provenance=lift.provenance,
        source=lift.source,
        label=f"cartan(t={t:g})",
    )
    return CartanMember(t=t, immersion=immersion, normal=eta, lift=lift)


# ------------------------------------------------- reducible constructions


def _max_curvature(base: Surface, counts: int = 5) -> float:
    f, xi = base
    worst = 0.0
    for b in f.domain.grid((counts,) * f.domain.dim):
        worst = max(worst, float(np.max(np.abs(principal_curvatures(shape_operator(f, xi, b))))))
    return worst


def pinkall_construction(
    kind: ConstructionKind,
    base: Optional[Surface] = None,
    radius: float = 0.2,
    d: float = 5.0,
) -> Surface:
    """Hypersurface of R^4 built from a surface of R^3 by a standard construction.

    cylinder: (f, w); revolution: rotate f + d e1 about the plane x1 = 0;
    cone: cone over the stereographic image of f in S^3; tube: tube of ``radius``.
    The default base is a torus(2, 1) patch on which the result has three distinct
    principal curvatures.
    """
    kind = ConstructionKind(kind)
    f, xi = base if base is not None else torus(2.0, 1.0, patch=(-np.pi / 3, np.pi / 3))
    if f.domain.dim != 2:
        raise InvalidConstructionError("constructions need a surface in R^3")

    def unit_xi(x: FloatArray) -> FloatArray:
        value = xi(x)
        return value / np.linalg.norm(value)

    if kind is ConstructionKind.CYLINDER:
        domain = f.domain.product(Domain((-1.0,), (1.0,)))

        def point(x: FloatArray) -> FloatArray:
            return np.concatenate([f(x[:2]), [x[2]]])

        def normal(x: FloatArray) -> FloatArray:
            return np.concatenate([unit_xi(x[:2]), [0.0]])

    elif kind is ConstructionKind.REVOLUTION:
        for b in f.domain.grid((5,) * 2):
            if f(b)[0] + d <= 0:
                raise InvalidConstructionError(
                    f"surface meets the rotation plane (shift d={d} too small)"
                )
        domain = f.domain.product(Domain((-1.0,), (1.0,)))

        def point(x: FloatArray) -> FloatArray:
            p = f(x[:2])
            r = p[0] + d
            return np.array([r * np.cos(x[2]), p[1], p[2], r * np.sin(x[2])])

        def normal(x: FloatArray) -> FloatArray:
            n = unit_xi(x[:2])
            return np.array([n[0] * np.cos(x[2]), n[1], n[2], n[0] * np.sin(x[2])])

    elif kind is ConstructionKind.CONE:
        phi, eta = stereographic_pair(f, xi)
        domain = f.domain.product(Domain((0.5,), (1.5,)))

        def point(x: FloatArray) -> FloatArray:
            return x[2] * phi(x[:2])

        def normal(x: FloatArray) -> FloatArray:
            return eta(x[:2])

    else:
        if radius <= 0:
            raise InvalidConstructionError("tube radius must be positive")
        focal = 1.0 / max(_max_curvature((f, xi)), np.finfo(float).tiny)
        if radius >= focal:
            raise InvalidConstructionError(
                f"tube radius {radius} reaches the focal distance {focal:.4g}"
            )
        domain = f.domain.product(Domain((0.3,), (1.2,)))

        def direction(x: FloatArray) -> FloatArray:
            return np.concatenate([np.cos(x[2]) * unit_xi(x[:2]), [np.sin(x[2])]])

        def point(x: FloatArray) -> FloatArray:
            return np.concatenate([f(x[:2]), [0.0]]) + radius * direction(x)

        def normal(x: FloatArray) -> FloatArray:
            return -direction(x)

    eta_hat = ImmersionOracle(normal, domain)
    logger.debug("pinkall_construction", kind=kind.value, radius=radius, d=d)
    return ImmersionOracle(point, domain, normal=eta_hat), eta_hat


# --------------------------------------------------- cyclide equivalence


def focal_pair(
    L: LegendreMap, counts: Optional[Sequence[int]] = None
) -> Tuple[Tuple[SpanSummary, SpanSummary], Tuple[int, int]]:
    """Spans of the two curvature-sphere maps of a cyclide with their multiplicities."""
    counts = counts if counts is not None else (5,) * L.dim
    points = track(L, snake_grid(L.domain, counts))
    if points[0].g != 2:
        raise NotEquivalentError(f"a cyclide has two curvature spheres, found {points[0].g}")
    spans = tuple(span_summary([p.spheres[i].K for p in points]) for i in range(2))
    return (spans[0], spans[1]), points[0].multiplicities  # type: ignore[return-value]


def _adapted_basis(span: SpanSummary) -> Tuple[FloatArray, FloatArray]:
    """J-orthonormal rows of a span of signature (k, 1): (timelike row, spacelike rows)."""
    rows = np.vstack([v.coords for v in span.basis])
    values, vectors = linalg.eigh(lie_gram(rows))
    scaled = (vectors.T @ rows) / np.sqrt(np.abs(values))[:, None]
    negative = values < 0
    if int(negative.sum()) != 1 or np.any(np.abs(values) < 1e-9):
        raise NotEquivalentError(f"focal span has signature {span.signature}, expected (k, 1)")
    return scaled[negative][0], scaled[~negative]


def _pair_basis(first: SpanSummary, second: SpanSummary) -> FloatArray:
    t1, s1 = _adapted_basis(first)
    t2, s2 = _adapted_basis(second)
    return np.column_stack([t1, *s1, *s2, t2])


def family_residual(line: LieLine, spans: Tuple[SpanSummary, SpanSummary]) -> float:
    """How far a line is from meeting both spans (0 for lines of the cyclide)."""
    rows = np.vstack([line.y1.coords / line.y1.norm(), line.y2.coords / line.y2.norm()])
    worst = 0.0
    for span in spans:
        stacked = np.vstack([rows] + [v.coords for v in span.basis])
        worst = max(worst, float(linalg.svdvals(stacked)[-1]))
    return worst


def cyclide_equivalence(
    first: LegendreMap, second: LegendreMap, counts: Optional[Sequence[int]] = None
) -> LieTransform:
    """A Lie transformation carrying the focal-span pair of ``first`` onto that of ``second``."""
    spans1, mult1 = focal_pair(first, counts)
    spans2, mult2 = focal_pair(second, counts)
    if sorted(mult1) != sorted(mult2) or first.n != second.n:
        raise NotEquivalentError(f"characteristics differ: {mult1} vs {mult2}")
    if mult1[0] != mult2[0]:
        spans2 = (spans2[1], spans2[0])
    B1 = _pair_basis(*spans1)
    B2 = _pair_basis(*spans2)
    J = metric(first.n)
    try:
        G = as_lie_transform(B2 @ J @ B1.T @ J, tol=1e-6)
    except InvalidArgumentError as exc:
        raise NotEquivalentError("focal spans are not orthogonal complements") from exc
    logger.info("cyclide_equivalence", multiplicities=list(mult1))
    return G


# ---------------------------------------------------------------- registry


@dataclass(frozen=True)
class Generated:
    """A built example: its Legendre map, and a Euclidean surface when there is one."""

    name: str
    params: Dict[str, Any]
    legendre: LegendreMap
    surface: Optional[Surface] = None
    spherical: Optional[Surface] = None
    default_grid: int = 6


@dataclass(frozen=True)
class GeneratorEntry:
    builder: Callable[..., Generated]
    defaults: Dict[str, Any]
    description: str
    examples: List[str] = field(default_factory=list)


def _euclidean(name: str, params: Dict[str, Any], surface: Surface, grid: int = 6) -> Generated:
    return Generated(name, params, lift_euclidean(*surface), surface=surface, default_grid=grid)


def _build_cyclide(p: int, q: int, n: int = 0) -> Generated:
    try:
        spec = CyclideSpec(p=p, q=q, n=n)
    except ValidationError as exc:
        raise InvalidArgumentError(f"invalid cyclide: {exc.errors()[0]['msg']}") from exc
    return Generated("cyclide", spec.model_dump(), cyclide(spec), default_grid=5)


def _build_cartan(t: float) -> Generated:
    member = cartan_hypersurface(t)
    return Generated(
        "cartan",
        {"t": t},
        member.lift,
        spherical=(member.immersion, member.normal),
        default_grid=4,
    )


def _build_pinkall(kind: str, radius: float, d: float) -> Generated:
    try:
        construction = ConstructionKind(kind)
    except ValueError as exc:
        raise InvalidArgumentError(f"unknown construction {kind!r}") from exc
    surface = pinkall_construction(construction, radius=radius, d=d)
    return _euclidean("pinkall", {"kind": kind, "radius": radius, "d": d}, surface, grid=4)


GENERATORS: Dict[str, GeneratorEntry] = {
    "cyclide": GeneratorEntry(
        _build_cyclide, {"p": 1, "q": 1, "n": 0}, "standard cyclide of characteristic (p, q)"
    ),
    "torus": GeneratorEntry(
        lambda a, b: _euclidean("torus", {"a": a, "b": b}, torus(a, b)),
        {"a": 2.0, "b": 1.0},
        "torus of revolution in R^3",
    ),
    "ellipsoid": GeneratorEntry(
        lambda a, b, c: _euclidean("ellipsoid", {"a": a, "b": b, "c": c}, ellipsoid(a, b, c)),
        {"a": 1.0, "b": 2.0, "c": 3.0},
        "ellipsoid in R^3 (not Dupin unless it is a sphere)",
    ),
    "sphere": GeneratorEntry(
        lambda radius: _euclidean("sphere", {"radius": radius}, sphere(radius)),
        {"radius": 1.0},
        "round sphere in R^3 (umbilic)",
    ),
    "plane": GeneratorEntry(
        lambda: _euclidean("plane", {}, plane()), {}, "plane in R^3 (flat)"
    ),
    "cartan": GeneratorEntry(
        _build_cartan, {"t": np.pi / 6}, "Cartan isoparametric hypersurface in S^4"
    ),
    "veronese": GeneratorEntry(
        lambda: Generated("veronese", {}, veronese(), default_grid=4),
        {},
        "normal-bundle lift of the Veronese surface in S^4",
    ),
    "veronese-frame": GeneratorEntry(
        lambda: Generated("veronese-frame", {}, veronese_frame_map(), default_grid=4),
        {},
        "Legendre map assembled from the Veronese frame over SO(3)",
    ),
    "pinkall": GeneratorEntry(
        _build_pinkall,
        {"kind": "cylinder", "radius": 0.2, "d": 5.0},
        "reducible construction (cylinder, revolution, cone, tube) over a torus patch",
    ),
}


def _coerce(value: str, default: Any) -> Any:
    if isinstance(default, bool):
        return value.lower() in ("1", "true", "yes")
    if isinstance(default, int):
        return int(value)
    if isinstance(default, float):
        return float(value)
    return value


def parse_generator(spec: str) -> Tuple[str, Dict[str, Any]]:
    """Split "name:key=value,..." (or positional "name:v1,v2") into a name and parameters."""
    name, _, rest = spec.partition(":")
    name = name.strip()
    if name not in GENERATORS:
        raise InvalidArgumentError(
            f"unknown generator {name!r} (known: {', '.join(sorted(GENERATORS))})"
        )
    defaults = GENERATORS[name].defaults
    params = dict(defaults)
    names = list(defaults)
    for position, item in enumerate(filter(None, (s.strip() for s in rest.split(",")))):
        key, sep, value = item.partition("=")
        if not sep:
            if position >= len(names):
                raise InvalidArgumentError(f"too many values for generator {name!r}")
            key, value = names[position], item
        key = key.strip()
        if key not in defaults:
            raise InvalidArgumentError(f"generator {name!r} has no parameter {key!r}")
        try:
            params[key] = _coerce(value.strip(), defaults[key])
        except ValueError as exc:
            raise InvalidArgumentError(f"bad value {value!r} for {key!r}") from exc
    return name, params


def build_generator(spec: str) -> Generated:
    name, params = parse_generator(spec)
    logger.debug("build_generator", name=name, params=params)
    return GENERATORS[name].builder(**params)
