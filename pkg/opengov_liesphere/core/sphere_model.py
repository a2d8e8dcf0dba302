"""Translation between sphere data and Lie quadric points, plus oriented contact."""

from typing import Optional, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike

from opengov_liesphere.config import settings
from opengov_liesphere.core.errors import InvalidArgumentError, NotASphereError
from opengov_liesphere.core.lie_core import lie_inner, on_quadric
from opengov_liesphere.core.models import (
    FloatArray,
    Infinity,
    LieVector,
    Plane,
    Point,
    Sphere,
    SphericalPoint,
    SphericalSphere,
)
from opengov_liesphere.utils.logger import get_logger

logger = get_logger(__name__)

Element = Union[Point, Infinity, Sphere, Plane]
SphericalElement = Union[SphericalPoint, SphericalSphere]

# Unit-length checks on user-supplied points of S^n.
UNIT_TOL = 1e-10


def element_dim(e: Element) -> Optional[int]:
    return e.dim


def encode(e: Element, n: int) -> LieVector:
    """Quadric representative of a point, infinity, oriented sphere or oriented plane.

    Points u map to ((1+u·u)/2, (1-u·u)/2, u, 0), spheres (p, r) to
    ((1+p·p-r²)/2, (1-p·p+r²)/2, p, r) and planes (N, h) to (h, -h, N, 1).
    """
    dim = element_dim(e)
    if dim is not None and dim != n:
        raise InvalidArgumentError(f"element has dimension {dim}, expected {n}")

    coords = np.zeros(n + 3)
    if isinstance(e, Infinity):
        coords[0], coords[1] = 1.0, -1.0
    elif isinstance(e, Point):
        u = np.asarray(e.u)
        uu = float(u @ u)
        coords[0], coords[1] = (1.0 + uu) / 2.0, (1.0 - uu) / 2.0
        coords[2:-1] = u
    elif isinstance(e, Sphere):
        p = np.asarray(e.center)
        pp, rr = float(p @ p), e.radius**2
        coords[0], coords[1] = (1.0 + pp - rr) / 2.0, (1.0 - pp + rr) / 2.0
        coords[2:-1] = p
        coords[-1] = e.radius
    elif isinstance(e, Plane):
        coords[0], coords[1] = e.offset, -e.offset
        coords[2:-1] = e.normal
        coords[-1] = 1.0
    else:
        raise InvalidArgumentError(f"unknown sphere element {type(e).__name__}")
    return LieVector(coords, n)


def decode(x: LieVector, tol: Optional[float] = None) -> Element:
    """Inverse of :func:`encode` up to projective scale.

    Thresholds are relative to the largest coordinate magnitude. The point-sphere
    test (x_{n+3} = 0) runs before the plane test (x1 + x2 = 0).
    """
    tol = settings.quadric_tol if tol is None else tol
    if not on_quadric(x, tol):
        raise NotASphereError("vector is not on the Lie quadric", residual=lie_inner(x, x))

    c = x.coords
    scale = float(np.max(np.abs(c)))
    cut = tol * scale
    s12 = float(c[0] + c[1])

    if abs(c[-1]) <= cut:
        if abs(s12) <= cut:
            return Infinity()
        return Point(u=c[2:-1] / s12)

    if abs(s12) <= cut:
        y = c / c[-1]
        normal = y[2:-1]
        length = float(np.linalg.norm(normal))
        return Plane(normal=normal / length, offset=float(y[0]) / length)

    y = c / s12
    return Sphere(center=y[2:-1], radius=float(y[-1]))


def oriented_contact_lie(k1: LieVector, k2: LieVector, tol: Optional[float] = None) -> bool:
    """Oriented contact as orthogonality <k1, k2> = 0 of two quadric points."""
    tol = settings.quadric_tol if tol is None else tol
    if not (on_quadric(k1, tol) and on_quadric(k2, tol)):
        raise InvalidArgumentError("oriented contact needs two quadric points")
    return abs(lie_inner(k1, k2)) <= tol * k1.norm() * k2.norm()


def _close(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol * (1.0 + abs(a) + abs(b))


def _euclidean_contact(e1: Element, e2: Element, tol: float) -> Optional[bool]:
    """Ordered case table; None when the pair belongs to the mirrored order."""
    if isinstance(e1, Infinity):
        if isinstance(e2, Infinity):
            return True
        if isinstance(e2, Plane):
            return True
        return False if isinstance(e2, (Point, Sphere)) else None

    if isinstance(e1, Point):
        u = np.asarray(e1.u)
        if isinstance(e2, Point):
            return bool(np.all([_close(a, b, tol) for a, b in zip(e1.u, e2.u)]))
        if isinstance(e2, Sphere):
            distance = float(np.linalg.norm(u - np.asarray(e2.center)))
            return _close(distance, abs(e2.radius), tol)
        if isinstance(e2, Plane):
            return _close(float(u @ np.asarray(e2.normal)), e2.offset, tol)
        return None

    if isinstance(e1, Sphere):
        p = np.asarray(e1.center)
        if isinstance(e2, Sphere):
            distance = float(np.linalg.norm(p - np.asarray(e2.center)))
            return _close(distance, abs(e1.radius - e2.radius), tol)
        if isinstance(e2, Plane):
            return _close(float(p @ np.asarray(e2.normal)), e2.offset + e1.radius, tol)
        return None

    if isinstance(e1, Plane) and isinstance(e2, Plane):
        return bool(
            np.all([_close(a, b, tol) for a, b in zip(e1.normal, e2.normal)])
        )
    return None


def oriented_contact_euclidean(e1: Element, e2: Element, tol: float = 1e-9) -> bool:
    """Oriented contact decided directly from the geometry of the two elements.

    Spheres touch when |p1 - p2| = |r1 - r2|, a sphere touches a plane when
    p·N = h + r, planes touch when their unit normals agree, points are incident,
    and infinity touches every plane.
    """
    if element_dim(e1) is not None and element_dim(e2) is not None:
        if element_dim(e1) != element_dim(e2):
            raise InvalidArgumentError("elements live in different dimensions")
    verdict = _euclidean_contact(e1, e2, tol)
    if verdict is None:
        verdict = _euclidean_contact(e2, e1, tol)
    if verdict is None:
        raise InvalidArgumentError(
            f"unsupported pair {type(e1).__name__}/{type(e2).__name__}"
        )
    return verdict


def _unit(values: ArrayLike, what: str) -> FloatArray:
    arr = np.asarray(values, dtype=float)
    if abs(float(np.linalg.norm(arr)) - 1.0) > UNIT_TOL:
        raise InvalidArgumentError(f"{what} must be a unit vector")
    return arr


def encode_spherical(e: SphericalElement, n: int) -> LieVector:
    """Points x of S^n map to e1 + x; spheres (m, rho) map to cos(rho) e1 + m + sin(rho) e_{n+3}."""
    coords = np.zeros(n + 3)
    if isinstance(e, SphericalPoint):
        x = _unit(e.x, "spherical point")
        if x.shape[0] != n + 1:
            raise InvalidArgumentError(f"point has {x.shape[0]} coordinates, expected {n + 1}")
        coords[0] = 1.0
        coords[1:-1] = x
    elif isinstance(e, SphericalSphere):
        m = _unit(e.center, "spherical center")
        if m.shape[0] != n + 1:
            raise InvalidArgumentError(f"center has {m.shape[0]} coordinates, expected {n + 1}")
        if not -np.pi < e.radius < np.pi:
            raise InvalidArgumentError("spherical radius must lie in (-pi, pi)")
        coords[0] = np.cos(e.radius)
        coords[1:-1] = m
        coords[-1] = np.sin(e.radius)
    else:
        raise InvalidArgumentError(f"unknown spherical element {type(e).__name__}")
    return LieVector(coords, n)


def decode_spherical(x: LieVector, tol: Optional[float] = None) -> SphericalElement:
    """Inverse of :func:`encode_spherical`; radii are reported in [-pi/2, pi/2]."""
    tol = settings.quadric_tol if tol is None else tol
    if not on_quadric(x, tol):
        raise NotASphereError("vector is not on the Lie quadric", residual=lie_inner(x, x))
    c = np.array(x.coords)
    timelike = float(np.hypot(c[0], c[-1]))
    if timelike <= tol * x.norm():
        raise NotASphereError("vector has no timelike part")
    c /= timelike
    if c[0] < 0 or (c[0] == 0 and c[-1] < 0):
        c = -c
    rho = float(np.arctan2(c[-1], c[0]))
    if abs(rho) <= tol:
        return SphericalPoint(x=c[1:-1])
    return SphericalSphere(center=c[1:-1], radius=rho)


def oriented_contact_spherical(
    s1: SphericalElement, s2: SphericalElement, tol: float = 1e-9
) -> bool:
    """Great-circle distance of the centers equals the radius difference (mod 2 pi)."""

    def center_radius(s: SphericalElement) -> Tuple[FloatArray, float]:
        if isinstance(s, SphericalPoint):
            return np.asarray(s.x), 0.0
        return np.asarray(s.center), s.radius

    m1, r1 = center_radius(s1)
    m2, r2 = center_radius(s2)
    distance = float(np.arccos(np.clip(m1 @ m2, -1.0, 1.0)))
    gap = abs(r1 - r2)
    return _close(distance, gap, tol) or _close(distance, 2.0 * np.pi - gap, tol)


def stereographic(u: ArrayLike) -> FloatArray:
    """Inverse projection from -e: u in R^n goes to S^n with 0 going to e = (1, 0, ..., 0)."""
    u = np.asarray(u, dtype=float)
    uu = float(u @ u)
    return np.concatenate([[(1.0 - uu) / (1.0 + uu)], 2.0 * u / (1.0 + uu)])


def stereographic_inv(x: ArrayLike, tol: float = 1e-12) -> Union[Point, Infinity]:
    """Projection of S^n from the pole -e back to R^n; -e itself goes to Infinity."""
    x = _unit(x, "spherical point")
    if 1.0 + x[0] <= tol:
        return Infinity()
    return Point(u=x[1:] / (1.0 + x[0]))
