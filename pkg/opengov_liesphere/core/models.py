"""Core data models for Lie sphere geometry."""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Annotated, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field, InstanceOf, field_validator

from opengov_liesphere.core.errors import InvalidArgumentError

FloatArray = NDArray[np.float64]

# Field types for records holding numeric values; checked by isinstance only.
ArrayField = InstanceOf[np.ndarray]


def frozen_array(values: ArrayLike) -> FloatArray:
    """Copy ``values`` into a read-only float array."""
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


def metric(n: int) -> FloatArray:
    """Diagonal metric J = diag(-1, 1, ..., 1, -1) of R^{n+3}_2."""
    diag = np.ones(n + 3)
    diag[0] = -1.0
    diag[-1] = -1.0
    return np.diag(diag)


@dataclass(frozen=True, eq=False)
class LieVector:
    """Homogeneous coordinates (x_1, ..., x_{n+3}) in R^{n+3}_2."""

    coords: FloatArray
    chart_dim: int

    def __post_init__(self) -> None:
        coords = frozen_array(self.coords)
        if self.chart_dim < 2:
            raise InvalidArgumentError(f"chart dimension must be >= 2, got {self.chart_dim}")
        if coords.ndim != 1 or coords.shape[0] != self.chart_dim + 3:
            raise InvalidArgumentError(
                f"expected {self.chart_dim + 3} coordinates, got shape {coords.shape}"
            )
        object.__setattr__(self, "coords", coords)

    @classmethod
    def of(cls, coords: ArrayLike) -> "LieVector":
        """Build a vector, inferring n from the coordinate count."""
        arr = np.asarray(coords, dtype=float).ravel()
        return cls(arr, arr.shape[0] - 3)

    @classmethod
    def basis(cls, index: int, n: int) -> "LieVector":
        """Standard basis vector e_index (1-based, as e_1 ... e_{n+3})."""
        if not 1 <= index <= n + 3:
            raise InvalidArgumentError(f"basis index {index} outside 1..{n + 3}")
        coords = np.zeros(n + 3)
        coords[index - 1] = 1.0
        return cls(coords, n)

    @property
    def n(self) -> int:
        return self.chart_dim

    def norm(self) -> float:
        """Euclidean norm of the coordinates."""
        return float(np.linalg.norm(self.coords))

    def normalized(self) -> "LieVector":
        """Unit Euclidean representative of the same projective point."""
        norm = self.norm()
        if norm == 0.0:
            raise InvalidArgumentError("zero vector has no projective class")
        return LieVector(self.coords / norm, self.chart_dim)

    def __add__(self, other: "LieVector") -> "LieVector":
        return LieVector(self.coords + other.coords, self.chart_dim)

    def __sub__(self, other: "LieVector") -> "LieVector":
        return LieVector(self.coords - other.coords, self.chart_dim)

    def __neg__(self) -> "LieVector":
        return LieVector(-self.coords, self.chart_dim)

    def __rmul__(self, scalar: float) -> "LieVector":
        return LieVector(float(scalar) * self.coords, self.chart_dim)

    def __repr__(self) -> str:
        return f"LieVector({np.array2string(self.coords, precision=6)})"


@dataclass(frozen=True, eq=False)
class LieLine:
    """Projective line [y1, y2] on the Lie quadric (see ``lie_core.line_through``)."""

    y1: LieVector
    y2: LieVector

    def __post_init__(self) -> None:
        if self.y1.chart_dim != self.y2.chart_dim:
            raise InvalidArgumentError("line endpoints live in different dimensions")

    @property
    def n(self) -> int:
        return self.y1.chart_dim

    def point(self, a: float, b: float) -> LieVector:
        """The point a*y1 + b*y2."""
        return LieVector(a * self.y1.coords + b * self.y2.coords, self.n)

    def stack(self) -> FloatArray:
        """2 x (n+3) matrix of the representatives."""
        return np.vstack([self.y1.coords, self.y2.coords])


@dataclass(frozen=True, eq=False)
class LieTransform:
    """Element G of O(n+1, 2) acting linearly on R^{n+3}_2, normalized so G^T J G = J."""

    matrix: FloatArray

    def __post_init__(self) -> None:
        mat = frozen_array(self.matrix)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] < 5:
            raise InvalidArgumentError(f"transform must be square of size >= 5, got {mat.shape}")
        object.__setattr__(self, "matrix", mat)

    @property
    def n(self) -> int:
        return int(self.matrix.shape[0]) - 3

    def compose(self, other: "LieTransform") -> "LieTransform":
        """self after other."""
        return LieTransform(self.matrix @ other.matrix)

    def inverse(self) -> "LieTransform":
        """G^{-1} = J G^T J for a normalized element."""
        J = metric(self.n)
        return LieTransform(J @ self.matrix.T @ J)


VectorField = InstanceOf[LieVector]


class SpanSummary(BaseModel):
    """Rank, basis and signature of the span of sampled quadric points."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    dim: int = Field(description="Numerical rank")
    basis: List[VectorField] = Field(description="Euclidean-orthonormal basis of the span")
    signature: Tuple[int, int, int] = Field(description="(n_plus, n_minus, n_zero)")
    residual: Tuple[float, float] = Field(
        description="Smallest retained / largest discarded relative singular value"
    )


class ElementKind(str, Enum):
    """Tags of the sphere-element union."""

    POINT = "point"
    INFINITY = "infinity"
    SPHERE = "sphere"
    PLANE = "plane"


def _vector(values: Any) -> Tuple[float, ...]:
    return tuple(float(x) for x in values)


class Point(BaseModel):
    """A point u of R^n."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["point"] = "point"
    u: Tuple[float, ...]

    @field_validator("u", mode="before")
    @classmethod
    def as_floats(cls, v: Any) -> Tuple[float, ...]:
        return _vector(v)

    @property
    def dim(self) -> int:
        return len(self.u)


class Infinity(BaseModel):
    """The improper point of R^n ∪ {∞}."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["infinity"] = "infinity"

    @property
    def dim(self) -> Optional[int]:
        return None


class Sphere(BaseModel):
    """Oriented sphere: positive radius means inward normal orientation."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["sphere"] = "sphere"
    center: Tuple[float, ...]
    radius: float

    @field_validator("center", mode="before")
    @classmethod
    def as_floats(cls, v: Any) -> Tuple[float, ...]:
        return _vector(v)

    @field_validator("radius")
    @classmethod
    def nonzero_radius(cls, v: float) -> float:
        if v == 0.0:
            raise ValueError("sphere radius must be nonzero (use a Point)")
        return v

    @property
    def dim(self) -> int:
        return len(self.center)


class Plane(BaseModel):
    """Oriented plane {u : u·N = h} with unit normal N."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["plane"] = "plane"
    normal: Tuple[float, ...]
    offset: float

    @field_validator("normal", mode="before")
    @classmethod
    def as_floats(cls, v: Any) -> Tuple[float, ...]:
        return _vector(v)

    @field_validator("normal")
    @classmethod
    def unit_normal(cls, v: Tuple[float, ...]) -> Tuple[float, ...]:
        if abs(float(np.linalg.norm(v)) - 1.0) > 1e-12:
            raise ValueError("plane normal must be a unit vector")
        return v

    @property
    def dim(self) -> int:
        return len(self.normal)


SphereElement = Annotated[Union[Point, Infinity, Sphere, Plane], Field(discriminator="kind")]


class SphericalPoint(BaseModel):
    """A point x of the unit sphere S^n ⊂ R^{n+1}."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["spherical-point"] = "spherical-point"
    x: Tuple[float, ...]

    @field_validator("x", mode="before")
    @classmethod
    def as_floats(cls, v: Any) -> Tuple[float, ...]:
        return _vector(v)


class SphericalSphere(BaseModel):
    """Oriented sphere in S^n with center m and signed spherical radius rho."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["spherical-sphere"] = "spherical-sphere"
    center: Tuple[float, ...]
    radius: float

    @field_validator("center", mode="before")
    @classmethod
    def as_floats(cls, v: Any) -> Tuple[float, ...]:
        return _vector(v)


SphericalElement = Annotated[
    Union[SphericalPoint, SphericalSphere], Field(discriminator="kind")
]


class Provenance(str, Enum):
    """How a Legendre map was produced."""

    EUCLIDEAN_LIFT = "euclidean-lift"
    SPHERICAL_LIFT = "spherical-lift"
    NORMAL_BUNDLE_LIFT = "normal-bundle-lift"
    ZOO_ANALYTIC = "zoo-analytic"
    TRANSFORMED = "transformed"


class LegendreResiduals(BaseModel):
    """Numerical residuals of the Legendre conditions at one parameter point."""

    model_config = ConfigDict(frozen=True)

    quadric1: float
    quadric2: float
    orthogonality: float
    contact: float
    regularity_sv: float


class ShapeData(BaseModel):
    """First fundamental form and shape operator in the coordinate tangent frame."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    first_form: ArrayField
    shape: ArrayField
    basis: ArrayField = Field(description="Columns df(∂_i) of the coordinate tangent frame")
    asymmetry: float = Field(default=0.0, description="Self-adjointness defect before symmetrizing")


class CurvatureSphere(BaseModel):
    """A curvature sphere K = r·y1 + y2 on λ(b) with its principal space."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    r: float = Field(
        description="Line coordinate; the principal curvature for Euclidean lifts, inf if K ∝ y1"
    )
    multiplicity: int
    K: VectorField
    principal_basis: ArrayField = Field(description="m x k array of orthonormal parameter vectors")
    coefficients: Tuple[float, float] = Field(description="Unit (a, b) with K = a·y1 + b·y2")


class CurvatureAtPoint(BaseModel):
    """All curvature spheres at one parameter point plus clustering diagnostics."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    b: Tuple[float, ...]
    spheres: List[CurvatureSphere]
    stable: bool = Field(description="g unchanged at half and double cluster tolerance")
    asymmetry: float = 0.0

    @property
    def g(self) -> int:
        return len(self.spheres)

    @property
    def multiplicities(self) -> Tuple[int, ...]:
        return tuple(s.multiplicity for s in self.spheres)


class LeafPath(BaseModel):
    """Parameter samples along a curvature submanifold of one curvature sphere."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    points: ArrayField
    sphere_index: int
    arclength: float
    truncated: Optional[str] = Field(default=None, description="Reason the path stopped early")


class CriterionWitness(BaseModel):
    """Points P_1..P_g on a timelike line with <K_i, P_i> = 0."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    points: List[VectorField]
    line_basis: Tuple[VectorField, VectorField]
    gram: ArrayField
    residuals: float


class DupinVerdict(str, Enum):
    PROPER_DUPIN = "proper-Dupin"
    MIXED_G = "Dupin-mixed-g"
    NOT_DUPIN = "not-Dupin"
    INCONCLUSIVE = "inconclusive"


class ReducibilityVerdict(str, Enum):
    REDUCIBLE = "reducible"
    NOT_REDUCIBLE = "not-reducible"


class CriterionVerdict(str, Enum):
    WITNESS = "witness"
    NO_WITNESS = "no-witness"
    INDETERMINATE = "indeterminate"


BoundKind = Literal["residual", "line-gram"]


class ConstructionKind(str, Enum):
    """Standard constructions producing reducible Dupin hypersurfaces."""

    CYLINDER = "cylinder"
    REVOLUTION = "revolution"
    CONE = "cone"
    TUBE = "tube"


class PointRecord(BaseModel):
    """Per-sample curvature data in a report."""

    b: List[float]
    g: int
    multiplicities: List[int]
    curvatures: List[Optional[float]] = Field(description="r values; null when infinite")
    stable: bool


class DupinSection(BaseModel):
    verdict: DupinVerdict
    g_values: List[int]
    unstable_points: int
    max_deviation: List[Optional[float]] = Field(description="Per sphere index")
    leaf_count: int


class ReducibilitySection(BaseModel):
    verdict: ReducibilityVerdict
    span_dims: List[int]
    signatures: List[List[int]]
    threshold: int


class CriterionSection(BaseModel):
    verdict: CriterionVerdict
    gram: Optional[List[List[float]]] = None
    normalized_gram: Optional[List[List[float]]] = None
    residual: Optional[float] = None
    lower_bound: Optional[float] = Field(
        default=None,
        description=(
            "Separation behind no-witness: a residual lower bound when bound_kind is "
            "\"residual\", the largest eigenvalue of the restricted Gram when it is \"line-gram\""
        ),
    )
    bound_kind: Optional[BoundKind] = None
    nullspace_dims: List[int] = Field(default_factory=list)


class AnalysisReport(BaseModel):
    """Serialized outcome of an analysis run."""

    schema_version: str
    tool_version: str
    input: Dict[str, Any]
    settings: Dict[str, Any]
    points: List[PointRecord] = Field(default_factory=list)
    dupin: Optional[DupinSection] = None
    reducibility: Optional[ReducibilitySection] = None
    isoparametric: Optional[CriterionSection] = None
    lie_curvature: Optional[Dict[str, float]] = None
    errors: List[str] = Field(default_factory=list)
    timing: Optional[Dict[str, float]] = None


class CriterionResult(BaseModel):
    """Outcome of the timelike-line test: a verdict, and the witness when one was found."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    verdict: CriterionVerdict
    witness: Optional[CriterionWitness] = None
    nullspace_dims: List[int] = Field(default_factory=list)
    lower_bound: Optional[float] = Field(
        default=None, description="Separation certifying no-witness; see bound_kind"
    )
    bound_kind: Optional[BoundKind] = Field(
        default=None,
        description="residual: orthogonality residual; line-gram: candidate line not timelike",
    )


class DupinOutcome(BaseModel):
    """Report section of a Dupin check together with the data it was computed from."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    section: DupinSection
    points: List[CurvatureAtPoint]
    leaves: List[LeafPath]
    deviations: List[float]
