"""Legendre lifts of immersions, their projections, and numerical Legendre residuals."""

from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike
from scipy import linalg

from opengov_liesphere.config import settings
from opengov_liesphere.core.errors import (
    InvalidArgumentError,
    InvalidFrameError,
    NotAnImmersionError,
    NotANormalFieldError,
    NumericalFailureError,
    OutOfDomainError,
    ProjectionSingularError,
)
from opengov_liesphere.core.lie_core import lie_gram
from opengov_liesphere.core.models import (
    FloatArray,
    LegendreResiduals,
    LieLine,
    LieTransform,
    LieVector,
    Provenance,
    metric,
)
from opengov_liesphere.core.sphere_model import stereographic
from opengov_liesphere.utils import jets
from opengov_liesphere.utils.logger import get_logger

logger = get_logger(__name__)

Representatives = Tuple[FloatArray, FloatArray]

# Angles tried when picking a generic point of the line.
PENCIL_ANGLES = np.arange(8) * np.pi / 8


@dataclass(frozen=True)
class Domain:
    """Axis-aligned parameter box; periodic axes wrap and never bound integration."""

    lower: Tuple[float, ...]
    upper: Tuple[float, ...]
    periodic: Tuple[bool, ...] = ()

    def __post_init__(self) -> None:
        lower = tuple(float(x) for x in self.lower)
        upper = tuple(float(x) for x in self.upper)
        periodic = tuple(bool(p) for p in self.periodic) or (False,) * len(lower)
        if not (len(lower) == len(upper) == len(periodic)) or not lower:
            raise InvalidArgumentError("domain bounds and periodic flags must have equal length")
        if any(hi <= lo for lo, hi in zip(lower, upper)):
            raise InvalidArgumentError("domain upper bounds must exceed lower bounds")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "periodic", periodic)

    @classmethod
    def box(cls, *bounds: Tuple[float, float], periodic: Sequence[bool] = ()) -> "Domain":
        return cls(
            tuple(lo for lo, _ in bounds), tuple(hi for _, hi in bounds), tuple(periodic)
        )

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def extent(self) -> float:
        return max(hi - lo for lo, hi in zip(self.lower, self.upper))

    def contains(self, b: ArrayLike, tol: float = 1e-12) -> bool:
        b = np.asarray(b, dtype=float)
        if b.shape != (self.dim,):
            return False
        for value, lo, hi, wraps in zip(b, self.lower, self.upper, self.periodic):
            if not wraps and not (lo - tol <= value <= hi + tol):
                return False
        return True

    def product(self, other: "Domain") -> "Domain":
        return Domain(
            self.lower + other.lower, self.upper + other.upper, self.periodic + other.periodic
        )

    def axis_samples(self, axis: int, count: int, interior: bool = True) -> FloatArray:
        """Periodic axes are sampled without the duplicate seam point."""
        lo, hi = self.lower[axis], self.upper[axis]
        if self.periodic[axis]:
            return lo + (hi - lo) * np.arange(count) / count
        if interior:
            return lo + (hi - lo) * (np.arange(count) + 0.5) / count
        return np.linspace(lo, hi, count)

    def grid(self, counts: Sequence[int], interior: bool = True) -> FloatArray:
        """Row-major sample grid, shape (prod(counts), dim)."""
        if len(counts) != self.dim:
            raise InvalidArgumentError(f"grid needs {self.dim} counts, got {len(counts)}")
        axes = [self.axis_samples(i, int(c), interior) for i, c in enumerate(counts)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)


@dataclass(frozen=True)
class ImmersionOracle:
    """Smooth map of a parameter box into R^n (or S^n ⊂ R^{n+1}) with finite-difference jets."""

    evaluate: Callable[[FloatArray], ArrayLike]
    domain: Domain
    fd_step: Optional[float] = None
    derivative: Optional[Callable[[FloatArray], ArrayLike]] = None
    normal: Optional["ImmersionOracle"] = None

    def __post_init__(self) -> None:
        if self.fd_step is not None:
            if self.fd_step <= 0:
                raise InvalidArgumentError("fd_step must be positive")
            if self.fd_step > 1e-2 * self.domain.extent:
                logger.warning(
                    "fd_step_large", fd_step=self.fd_step, extent=self.domain.extent
                )

    @property
    def step(self) -> float:
        if self.fd_step is not None:
            return self.fd_step
        return settings.fd_step_fraction * self.domain.extent

    def __call__(self, b: ArrayLike) -> FloatArray:
        return np.asarray(self.evaluate(np.asarray(b, dtype=float)), dtype=float)

    def differential(self, b: ArrayLike) -> FloatArray:
        """Jacobian with column i the derivative along parameter axis i."""
        b = np.asarray(b, dtype=float)
        if self.derivative is not None:
            return np.asarray(self.derivative(b), dtype=float)
        return jets.jacobian(self, b, self.step, settings.richardson)


@dataclass(frozen=True)
class LegendreMap:
    """A parameter family b -> [Y1(b), Y_{n+3}(b)] of lines on the Lie quadric."""

    representatives: Callable[[FloatArray], Representatives]
    domain: Domain
    n: int
    provenance: Provenance
    fd_step: Optional[float] = None
    source: Optional[Tuple[ImmersionOracle, ImmersionOracle]] = None
    label: str = ""
    flags: Dict[str, bool] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.domain.dim != self.n - 1:
            raise InvalidArgumentError(
                f"a Legendre map into R^{self.n + 3} needs {self.n - 1} parameters, "
                f"domain has {self.domain.dim}"
            )

    @property
    def dim(self) -> int:
        return self.domain.dim

    @property
    def step(self) -> float:
        if self.fd_step is not None:
            return self.fd_step
        return settings.fd_step_fraction * self.domain.extent

    def raw(self, b: ArrayLike) -> Representatives:
        y1, y2 = self.representatives(np.asarray(b, dtype=float))
        return np.asarray(y1, dtype=float), np.asarray(y2, dtype=float)

    def line_at(self, b: ArrayLike) -> LieLine:
        b = np.asarray(b, dtype=float)
        if not self.domain.contains(b):
            raise OutOfDomainError(f"parameter {b.tolist()} outside the domain", b=b.tolist())
        y1, y2 = self.raw(b)
        return LieLine(LieVector(y1, self.n), LieVector(y2, self.n))

    def differentials(self, b: ArrayLike) -> Tuple[FloatArray, FloatArray]:
        """dY1, dY2 as (n+3) x dim matrices."""
        size = self.n + 3

        def stacked(point: FloatArray) -> FloatArray:
            y1, y2 = self.raw(point)
            return np.concatenate([y1, y2])

        jac = jets.jacobian(stacked, np.asarray(b, dtype=float), self.step, settings.richardson)
        return jac[:size], jac[size:]

    def transformed(self, G: LieTransform) -> "LegendreMap":
        """The map b -> [G Y1(b), G Y_{n+3}(b)]."""
        if G.n != self.n:
            raise InvalidArgumentError(f"transform acts on n={G.n}, map has n={self.n}")
        matrix = np.array(G.matrix)
        base = self.raw

        def representatives(b: FloatArray) -> Representatives:
            y1, y2 = base(b)
            return matrix @ y1, matrix @ y2

        return LegendreMap(
            representatives=representatives,
            domain=self.domain,
            n=self.n,
            provenance=Provenance.TRANSFORMED,
            fd_step=self.fd_step,
            label=f"{self.label}|transformed" if self.label else "transformed",
            flags=dict(self.flags),
        )


def _validation_points(domain: Domain) -> FloatArray:
    return domain.grid((3,) * domain.dim, interior=True)


def _check_immersion(df: FloatArray, b: FloatArray, what: str = "immersion") -> None:
    sv = linalg.svdvals(df)
    if sv[0] == 0.0 or sv[-1] <= 1e-8 * sv[0]:
        raise NotAnImmersionError(f"{what} is rank deficient at {b.tolist()}", b=b.tolist())


def _unitize(vector: FloatArray) -> FloatArray:
    norm = float(np.linalg.norm(vector))
    if norm == 0.0:
        raise NotANormalFieldError("normal field vanishes")
    return vector / norm


def euclidean_line(point: FloatArray, normal: FloatArray) -> Representatives:
    """Y1 = ((1+f·f)/2, (1-f·f)/2, f, 0) and Y_{n+3} = (h, -h, xi, 1) with h = f·xi."""
    ff = float(point @ point)
    h = float(point @ normal)
    y1 = np.concatenate([[(1.0 + ff) / 2.0, (1.0 - ff) / 2.0], point, [0.0]])
    y2 = np.concatenate([[h, -h], normal, [1.0]])
    return y1, y2


def lift_euclidean(f: ImmersionOracle, xi: Optional[ImmersionOracle] = None) -> LegendreMap:
    """Legendre lift of a hypersurface f: B^{n-1} -> R^n with unit normal field xi."""
    xi = xi if xi is not None else f.normal
    if xi is None:
        raise InvalidArgumentError("lift_euclidean needs a normal field")

    for b in _validation_points(f.domain):
        point = f(b)
        n = point.shape[0]
        if f.domain.dim != n - 1:
            raise InvalidArgumentError(
                f"hypersurface in R^{n} needs {n - 1} parameters, got {f.domain.dim}"
            )
        df = f.differential(b)
        _check_immersion(df, b)
        normal = _unitize(xi(b))
        defect = float(np.max(np.abs(normal @ df)) / np.max(np.linalg.norm(df, axis=0)))
        if defect > settings.normal_tol:
            raise NotANormalFieldError(
                f"normal field is not normal at {b.tolist()}", defect=defect
            )

    n = f(_validation_points(f.domain)[0]).shape[0]

    def representatives(b: FloatArray) -> Representatives:
        return euclidean_line(f(b), _unitize(xi(b)))

    return LegendreMap(
        representatives=representatives,
        domain=f.domain,
        n=n,
        provenance=Provenance.EUCLIDEAN_LIFT,
        fd_step=f.fd_step,
        source=(f, xi),
        label="euclidean-lift",
    )


def spherical_line(point: FloatArray, normal: FloatArray) -> Representatives:
    """[e1 + phi, eta + e_{n+3}]."""
    y1 = np.concatenate([[1.0], point, [0.0]])
    y2 = np.concatenate([[0.0], normal, [1.0]])
    return y1, y2


def lift_spherical(phi: ImmersionOracle, eta: ImmersionOracle) -> LegendreMap:
    """Legendre lift of a hypersurface phi: B^{n-1} -> S^n with unit tangent normal eta."""
    for b in _validation_points(phi.domain):
        point = phi(b)
        if abs(float(np.linalg.norm(point)) - 1.0) > 1e-10:
            raise InvalidArgumentError(f"phi({b.tolist()}) is not on the unit sphere")
        n = point.shape[0] - 1
        if phi.domain.dim != n - 1:
            raise InvalidArgumentError(
                f"hypersurface in S^{n} needs {n - 1} parameters, got {phi.domain.dim}"
            )
        dphi = phi.differential(b)
        _check_immersion(dphi, b)
        normal = _unitize(eta(b))
        scale = float(np.max(np.linalg.norm(dphi, axis=0)))
        defect = max(abs(float(normal @ point)), float(np.max(np.abs(normal @ dphi))) / scale)
        if defect > settings.normal_tol:
            raise NotANormalFieldError(
                f"eta is not a unit normal in S^{n} at {b.tolist()}", defect=defect
            )

    n = phi(_validation_points(phi.domain)[0]).shape[0] - 1

    def representatives(b: FloatArray) -> Representatives:
        return spherical_line(phi(b), _unitize(eta(b)))

    return LegendreMap(
        representatives=representatives,
        domain=phi.domain,
        n=n,
        provenance=Provenance.SPHERICAL_LIFT,
        fd_step=phi.fd_step,
        source=(phi, eta),
        label="spherical-lift",
    )


NormalField = Callable[[FloatArray], ArrayLike]


def lift_normal_bundle_s4(
    phi: ImmersionOracle, nu1: NormalField, nu2: NormalField
) -> LegendreMap:
    """Lift of the unit normal bundle of a surface phi: M^2 -> S^4 over M^2 x S^1.

    (u, theta) goes to [e1 + phi(u), cos(theta) nu1(u) + sin(theta) nu2(u) + e7].
    """
    if phi.domain.dim != 2:
        raise InvalidArgumentError("normal-bundle lift needs a surface (two parameters)")
    for b in _validation_points(phi.domain):
        frame = np.vstack([phi(b), np.asarray(nu1(b), float), np.asarray(nu2(b), float)])
        if frame.shape[1] != 5:
            raise InvalidArgumentError("normal-bundle lift needs a surface in S^4 ⊂ R^5")
        gram_defect = float(np.max(np.abs(frame @ frame.T - np.eye(3))))
        dphi = phi.differential(b)
        scale = float(np.max(np.linalg.norm(dphi, axis=0)))
        normality = float(np.max(np.abs(frame[1:] @ dphi))) / scale
        if gram_defect > 1e-8 or normality > settings.normal_tol:
            raise InvalidFrameError(
                f"{{phi, nu1, nu2}} is not an orthonormal normal frame at {b.tolist()}",
                gram_defect=gram_defect,
                normality=normality,
            )

    domain = phi.domain.product(Domain((0.0,), (2.0 * np.pi,), (True,)))

    def representatives(b: FloatArray) -> Representatives:
        u, theta = b[:2], b[2]
        normal = np.cos(theta) * np.asarray(nu1(u), float) + np.sin(theta) * np.asarray(
            nu2(u), float
        )
        return spherical_line(phi(u), normal)

    return LegendreMap(
        representatives=representatives,
        domain=domain,
        n=4,
        provenance=Provenance.NORMAL_BUNDLE_LIFT,
        fd_step=phi.fd_step,
        label="normal-bundle-lift",
    )


def stereographic_pair(
    f: ImmersionOracle, xi: ImmersionOracle
) -> Tuple[ImmersionOracle, ImmersionOracle]:
    """Carry (f, xi) in R^n to (sigma∘f, eta) in S^n with eta = (1+|f|²)/2 · dsigma_f(xi).

    The spherical lift of the result spans the same lines as the Euclidean lift of (f, xi).
    """

    def phi(b: FloatArray) -> FloatArray:
        return stereographic(f(b))

    def eta(b: FloatArray) -> FloatArray:
        u = f(b)
        w = _unitize(xi(b))
        uu = float(u @ u)
        uw = float(u @ w)
        return np.concatenate([[-2.0 * uw / (1.0 + uu)], w - 2.0 * u * uw / (1.0 + uu)])

    return (
        ImmersionOracle(phi, f.domain, f.fd_step),
        ImmersionOracle(eta, f.domain, f.fd_step),
    )


FrameSpec = Sequence[Union[int, ArrayLike]]


def _frame_vector(entry: Union[int, ArrayLike], n: int) -> FloatArray:
    if isinstance(entry, (int, np.integer)):
        return LieVector.basis(int(entry), n).coords.copy()
    vector = np.asarray(entry, dtype=float)
    if vector.shape != (n + 3,):
        raise InvalidArgumentError(f"frame vector must have {n + 3} coordinates")
    return vector


def frame_change(slots: Dict[int, FloatArray], n: int) -> FloatArray:
    """J-orthonormal basis with prescribed columns at the given 0-based slots.

    Remaining columns come from J-Gram-Schmidt on e_1, ..., e_{n+3} in order, so the
    standard frame gives the identity. Returns B with B^T J B = J.
    """
    J = metric(n)
    size = n + 3
    basis = np.zeros((size, size))
    placed = []
    for slot, vector in slots.items():
        norm2 = float(vector @ J @ vector)
        if abs(norm2 - J[slot, slot]) > 1e-9:
            raise InvalidFrameError(f"frame vector for slot {slot + 1} has <v,v> = {norm2}")
        basis[:, slot] = vector
        placed.append(vector)
    if placed:
        chosen = lie_gram(np.array(placed))
        if float(np.max(np.abs(chosen - np.diag(np.diag(chosen))))) > 1e-9:
            raise InvalidFrameError("frame vectors are not mutually orthogonal")

    free_slots = [s for s in range(size) if s not in slots]
    completed = list(placed)
    signs = [float(v @ J @ v) for v in placed]
    candidates = iter(np.eye(size))
    for slot in free_slots:
        want = J[slot, slot]
        for candidate in candidates:
            w = candidate.copy()
            for v, s in zip(completed, signs):
                w -= (float(w @ J @ v) / s) * v
            norm2 = float(w @ J @ w)
            if norm2 * want > 1e-9:
                w /= np.sqrt(abs(norm2))
                basis[:, slot] = w
                completed.append(w)
                signs.append(want)
                break
        else:
            raise InvalidFrameError("could not complete the frame to a basis")
    return basis


def _reframe(L: LegendreMap, frame: Optional[FrameSpec], slots: Sequence[int]) -> LegendreMap:
    if frame is None:
        return L
    if len(frame) != len(slots):
        raise InvalidArgumentError(f"projection frame needs {len(slots)} entries")
    vectors = {slot: _frame_vector(entry, L.n) for slot, entry in zip(slots, frame)}
    B = frame_change(vectors, L.n)
    J = metric(L.n)
    return L.transformed(LieTransform(J @ B.T @ J))


def _singular(b: FloatArray, why: str) -> ProjectionSingularError:
    return ProjectionSingularError(f"{why} at {np.asarray(b).tolist()}", b=b)


def euclidean_projection(
    L: LegendreMap,
    frame: Optional[FrameSpec] = None,
    samples: Optional[ArrayLike] = None,
    tol: float = 1e-9,
) -> Tuple[ImmersionOracle, ImmersionOracle]:
    """Hypersurface f and unit normal xi with lift_euclidean(f, xi) = L projectively.

    ``frame`` is the ordered triple (e1, e2, e_{n+3}) as 1-based indices or vectors;
    the default is the standard triple. ``samples`` are checked eagerly.
    """
    framed = _reframe(L, frame, (0, 1, L.n + 2))

    def project(b: FloatArray) -> Representatives:
        y1, y2 = framed.raw(b)
        point = y2[-1] * y1 - y1[-1] * y2
        scale = float(np.max(np.abs(point)))
        s12 = float(point[0] + point[1])
        if scale == 0.0 or abs(s12) <= tol * scale:
            raise _singular(b, "line meets the point at infinity")
        f = point[2:-1] / s12

        plane = (y2[0] + y2[1]) * y1 - (y1[0] + y1[1]) * y2
        if abs(plane[-1]) <= tol * float(np.max(np.abs(plane))):
            raise _singular(b, "line has no oriented plane")
        xi = plane[2:-1] / plane[-1]
        return f, _unitize(xi)

    if samples is not None:
        for b in np.atleast_2d(np.asarray(samples, dtype=float)):
            project(b)

    return (
        ImmersionOracle(lambda b: project(b)[0], L.domain, L.fd_step),
        ImmersionOracle(lambda b: project(b)[1], L.domain, L.fd_step),
    )


def spherical_projection(
    L: LegendreMap,
    pair: Optional[FrameSpec] = None,
    samples: Optional[ArrayLike] = None,
    tol: float = 1e-9,
) -> Tuple[ImmersionOracle, ImmersionOracle]:
    """Spherical hypersurface f (Y1 = e1 + f, |f| = 1) and its normal from Y_{n+3}.

    ``pair`` is the ordered pair (e_{n+3}, e1) as 1-based indices or vectors.
    """
    framed = L
    if pair is not None:
        framed = _reframe(L, (pair[1], pair[0]), (0, L.n + 2))

    def project(b: FloatArray) -> Representatives:
        y1, y2 = framed.raw(b)
        point = y2[-1] * y1 - y1[-1] * y2
        if abs(point[0]) <= tol * float(np.max(np.abs(point)) or 1.0):
            raise _singular(b, "point sphere has no e1 component")
        normal = y2[0] * y1 - y1[0] * y2
        if abs(normal[-1]) <= tol * float(np.max(np.abs(normal)) or 1.0):
            raise _singular(b, "line has no great sphere")
        return point[1:-1] / point[0], normal[1:-1] / normal[-1]

    if samples is not None:
        for b in np.atleast_2d(np.asarray(samples, dtype=float)):
            project(b)

    return (
        ImmersionOracle(lambda b: project(b)[0], L.domain, L.fd_step),
        ImmersionOracle(lambda b: project(b)[1], L.domain, L.fd_step),
    )


def contact_quotient(
    y1: FloatArray, y2: FloatArray, dY1: FloatArray, dY2: FloatArray
) -> Tuple[FloatArray, FloatArray]:
    """Differentials of the unit representatives reduced to L^perp / L.

    L^perp / L is positive definite; it is modelled by the Euclidean complement of
    span(y1, y2, J y1, J y2), made J-orthonormal. Returns D1, D2 of shape (n-1, dim).
    """
    n = y1.shape[0] - 3
    J = metric(n)
    n1, n2 = float(np.linalg.norm(y1)), float(np.linalg.norm(y2))
    try:
        complement = linalg.null_space(np.vstack([y1, y2, J @ y1, J @ y2]))
        if complement.shape[1] != n - 1:
            raise NumericalFailureError(
                f"line quotient has dimension {complement.shape[1]}, expected {n - 1}"
            )
        chol = linalg.cholesky(complement.T @ J @ complement, lower=True)
        orth = linalg.solve_triangular(chol, complement.T, lower=True).T
    except linalg.LinAlgError as exc:
        raise NumericalFailureError(f"line quotient is degenerate: {exc}") from exc
    return orth.T @ J @ (dY1 / n1), orth.T @ J @ (dY2 / n2)


def generic_point(D1: FloatArray, D2: FloatArray) -> Tuple[float, float]:
    """Angle phi of the line point cos(phi) y1 + sin(phi) y2 whose differential is best conditioned.

    Returns (phi, least singular value).
    """
    best = (0.0, -1.0)
    for phi in PENCIL_ANGLES:
        sv = float(linalg.svdvals(np.cos(phi) * D1 + np.sin(phi) * D2)[-1])
        if sv > best[1]:
            best = (float(phi), sv)
    return best


def legendre_residuals(L: LegendreMap, b: ArrayLike) -> LegendreResiduals:
    """Quadric, orthogonality and contact residuals plus the regularity singular value."""
    b = np.asarray(b, dtype=float)
    line = L.line_at(b)
    y1, y2 = line.y1.coords, line.y2.coords
    J = metric(L.n)
    n1, n2 = float(np.linalg.norm(y1)), float(np.linalg.norm(y2))
    dY1, dY2 = L.differentials(b)

    column_norms = np.maximum(np.linalg.norm(dY1, axis=0), np.finfo(float).tiny)
    contact = float(np.max(np.abs(dY1.T @ J @ y2) / (column_norms * n2)))

    if L.provenance in (Provenance.EUCLIDEAN_LIFT, Provenance.SPHERICAL_LIFT) and L.source:
        regularity = float(linalg.svdvals(L.source[0].differential(b))[-1])
    else:
        D1, D2 = contact_quotient(y1, y2, dY1, dY2)
        regularity = generic_point(D1, D2)[1]

    return LegendreResiduals(
        quadric1=abs(float(y1 @ J @ y1)) / n1**2,
        quadric2=abs(float(y2 @ J @ y2)) / n2**2,
        orthogonality=abs(float(y1 @ J @ y2)) / (n1 * n2),
        contact=contact,
        regularity_sv=regularity,
    )
