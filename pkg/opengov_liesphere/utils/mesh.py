"""Quad meshes of two-parameter slices of projected hypersurfaces, written as OBJ."""

from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from opengov_liesphere.core.errors import InvalidArgumentError, ProjectionSingularError
from opengov_liesphere.core.legendre import ImmersionOracle
from opengov_liesphere.core.models import FloatArray, Infinity
from opengov_liesphere.core.sphere_model import stereographic_inv
from opengov_liesphere.utils.logger import get_logger

logger = get_logger(__name__)


class FlattenMode(str, Enum):
    """How vertices of R^4 are brought down to R^3."""

    stereo = "stereo"
    drop = "drop"


@dataclass(frozen=True)
class Mesh:
    vertices: FloatArray
    normals: Optional[FloatArray]
    faces: List[Tuple[int, int, int, int]]
    skipped: int
    counts: Tuple[int, int]

    @property
    def empty(self) -> bool:
        return not self.faces


def _slice_point(
    lower: Sequence[float], upper: Sequence[float], fixed: Optional[Sequence[float]]
) -> FloatArray:
    extra = len(lower) - 2
    if fixed is None:
        return np.array([(lo + hi) / 2.0 for lo, hi in zip(lower[2:], upper[2:])])
    if len(fixed) != extra:
        raise InvalidArgumentError(f"slice needs {extra} values, got {len(fixed)}")
    return np.asarray(fixed, dtype=float)


def flatten_vertex(point: FloatArray, mode: Union[FlattenMode, str]) -> Optional[FloatArray]:
    """Three coordinates for a vertex, or None when it lands at infinity.

    "drop" keeps the first three coordinates. "stereo" takes a vertex of R^4 radially
    onto S^3 and projects it from the pole -e, so points of S^3 go to their exact
    stereographic image.
    """
    try:
        mode = FlattenMode(mode)
    except ValueError as exc:
        raise InvalidArgumentError(f"unknown flatten mode {mode!r}") from exc
    if mode is FlattenMode.drop:
        return point[:3]
    if point.shape[0] != 4:
        raise InvalidArgumentError(
            f"stereo flattening needs vertices in R^4, got R^{point.shape[0]}"
        )
    norm = float(np.linalg.norm(point))
    if norm == 0.0:
        return None
    image = stereographic_inv(point / norm)
    if isinstance(image, Infinity):
        return None
    return np.asarray(image.u, dtype=float)


def build_mesh(
    f: ImmersionOracle,
    xi: Optional[ImmersionOracle],
    counts: Sequence[int],
    fixed: Optional[Sequence[float]] = None,
    flatten: Optional[Union[FlattenMode, str]] = None,
) -> Mesh:
    """Sample the first two parameter axes of ``f`` (others held at ``fixed``).

    Periodic axes close up without a seam. Vertices where the projection is singular
    are dropped together with every cell touching them; the count of dropped cells is
    returned. Faces are oriented counterclockwise when seen against the normal. With
    ``flatten`` each vertex goes to R^3 through :func:`flatten_vertex` and normals are
    omitted; vertices sent to infinity are dropped like singular ones.
    """
    domain = f.domain
    if domain.dim < 2:
        raise InvalidArgumentError("a mesh needs at least two parameters")
    if len(counts) != 2 or min(counts) < 2:
        raise InvalidArgumentError("mesh resolution needs two counts of at least 2")
    rest = _slice_point(domain.lower, domain.upper, fixed)
    axes = [domain.axis_samples(i, int(counts[i]), interior=False) for i in range(2)]
    wraps = domain.periodic[:2]

    index: Dict[Tuple[int, int], int] = {}
    vertices: List[FloatArray] = []
    normals: List[FloatArray] = []
    for i, u in enumerate(axes[0]):
        for j, v in enumerate(axes[1]):
            b = np.concatenate([[u, v], rest])
            try:
                point = np.asarray(f(b), dtype=float)
                normal = xi(b) if xi is not None else None
            except ProjectionSingularError:
                continue
            if not np.all(np.isfinite(point)):
                continue
            if point.shape[0] != 3 and flatten is None:
                raise InvalidArgumentError(
                    f"vertices live in R^{point.shape[0]}; use flatten to map them to R^3"
                )
            if flatten is not None:
                flat = flatten_vertex(point, flatten)
                if flat is None:
                    continue
                point, normal = flat, None
            index[(i, j)] = len(vertices)
            vertices.append(point)
            if normal is not None:
                normals.append(normal / np.linalg.norm(normal))

    nu, nv = (int(c) for c in counts)
    faces: List[Tuple[int, int, int, int]] = []
    skipped = 0
    for i in range(nu if wraps[0] else nu - 1):
        for j in range(nv if wraps[1] else nv - 1):
            corners = [(i, j), ((i + 1) % nu, j), ((i + 1) % nu, (j + 1) % nv), (i, (j + 1) % nv)]
            if any(c not in index for c in corners):
                skipped += 1
                continue
            quad = tuple(index[c] for c in corners)
            if normals:
                p0, p1, p3 = (vertices[quad[k]] for k in (0, 1, 3))
                if float(np.cross(p1 - p0, p3 - p0) @ normals[quad[0]]) < 0:
                    quad = (quad[0], quad[3], quad[2], quad[1])
            faces.append(quad)  # type: ignore[arg-type]

    coords = np.array(vertices).reshape(-1, 3)
    if skipped:
        logger.warning("mesh_cells_skipped", skipped=skipped, faces=len(faces))
    return Mesh(
        vertices=coords,
        normals=np.array(normals) if normals else None,
        faces=faces,
        skipped=skipped,
        counts=(nu, nv),
    )


def obj_text(mesh: Mesh, comment: str = "") -> str:
    """OBJ with 1-based indices; faces reference normals when present."""
    lines = [f"# {comment}"] if comment else []
    lines.extend("v " + " ".join(f"{x:.9f}" for x in p) for p in mesh.vertices)
    if mesh.normals is not None:
        lines.extend("vn " + " ".join(f"{x:.9f}" for x in n) for n in mesh.normals)
    for face in mesh.faces:
        if mesh.normals is not None:
            lines.append("f " + " ".join(f"{k + 1}//{k + 1}" for k in face))
        else:
            lines.append("f " + " ".join(str(k + 1) for k in face))
    return "\n".join(lines).replace("-0.000000000", "0.000000000") + "\n"


def write_obj(path: Union[str, Path], mesh: Mesh, comment: str = "") -> None:
    Path(path).write_text(obj_text(mesh, comment), encoding="utf-8")
