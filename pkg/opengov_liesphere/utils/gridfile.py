"""Plain-text sampled hypersurfaces.

Format: a header line ``n k c_1 ... c_k`` (ambient dimension, parameter count, samples
per axis), then one row per sample with k parameter values followed by n coordinates.
Rows may come in any order but must fill the tensor grid of the distinct axis values.
"""

from pathlib import Path
from typing import List, Sequence, Tuple, Union

import numpy as np
from scipy import linalg
from scipy.interpolate import RegularGridInterpolator

from opengov_liesphere.core.errors import InvalidArgumentError
from opengov_liesphere.core.legendre import Domain, ImmersionOracle
from opengov_liesphere.core.models import FloatArray
from opengov_liesphere.utils.logger import get_logger

logger = get_logger(__name__)

PathLike = Union[str, Path]


def _parse(text: str) -> Tuple[int, int, List[int], FloatArray]:
    lines = [line.split("#", 1)[0].strip() for line in text.splitlines()]
    lines = [line for line in lines if line]
    if not lines:
        raise InvalidArgumentError("grid file is empty")
    try:
        header = [int(x) for x in lines[0].split()]
    except ValueError as exc:
        raise InvalidArgumentError("grid header must be integers 'n k counts...'") from exc
    if len(header) < 3:
        raise InvalidArgumentError("grid header needs n, k and one count per axis")
    n, k, counts = header[0], header[1], header[2:]
    if k != n - 1 or len(counts) != k or min(counts) < 2:
        raise InvalidArgumentError(
            f"grid header {header} does not describe a hypersurface grid (k = n - 1)"
        )
    try:
        rows = np.array([[float(x) for x in line.split()] for line in lines[1:]])
    except ValueError as exc:
        raise InvalidArgumentError("grid rows must be numeric") from exc
    expected = int(np.prod(counts))
    if rows.ndim != 2 or rows.shape != (expected, k + n):
        raise InvalidArgumentError(
            f"expected {expected} rows of {k + n} values, got shape {rows.shape}"
        )
    return n, k, counts, rows


def _tensor(rows: FloatArray, k: int, counts: Sequence[int]) -> Tuple[List[FloatArray], FloatArray]:
    axes = [np.unique(rows[:, i]) for i in range(k)]
    if [len(a) for a in axes] != list(counts):
        raise InvalidArgumentError("parameter values do not match the header counts")
    values = np.full(tuple(counts) + (rows.shape[1] - k,), np.nan)
    index = tuple(np.searchsorted(axes[i], rows[:, i]) for i in range(k))
    values[index] = rows[:, k:]
    if np.isnan(values).any():
        raise InvalidArgumentError("grid rows do not cover the full tensor grid")
    return axes, values


def read_grid(path: PathLike) -> Tuple[ImmersionOracle, ImmersionOracle]:
    """Immersion and unit normal oracles interpolating a sampled hypersurface.

    Positions are interpolated with cubic splines (linear on axes with fewer than four
    samples); the normal spans the orthogonal complement of the interpolated tangent
    space, oriented so that (df, xi) is positively oriented.
    """
    n, k, counts, rows = _parse(Path(path).read_text(encoding="utf-8"))
    axes, values = _tensor(rows, k, counts)
    method = "cubic" if min(counts) >= 4 else "linear"
    interpolant = RegularGridInterpolator(
        axes, values, method=method, bounds_error=False, fill_value=None
    )
    domain = Domain(tuple(float(a[0]) for a in axes), tuple(float(a[-1]) for a in axes))

    def f(b: FloatArray) -> FloatArray:
        return np.asarray(interpolant(b[None, :])[0], dtype=float)

    immersion = ImmersionOracle(f, domain)

    def xi(b: FloatArray) -> FloatArray:
        df = immersion.differential(b)
        normal = linalg.null_space(df.T)[:, 0]
        if np.linalg.det(np.column_stack([df, normal])) < 0:
            normal = -normal
        return normal

    logger.info("read_grid", path=str(path), n=n, counts=counts, method=method)
    normal = ImmersionOracle(xi, domain)
    return ImmersionOracle(f, domain, normal=normal), normal


def write_grid(path: PathLike, f: ImmersionOracle, counts: Sequence[int]) -> None:
    """Sample ``f`` on the closed grid of its domain and write it in the grid format."""
    samples = f.domain.grid(counts, interior=False)
    points = np.array([f(b) for b in samples])
    n, k = points.shape[1], samples.shape[1]
    lines = [" ".join(str(int(x)) for x in [n, k, *counts])]
    for b, x in zip(samples, points):
        lines.append(" ".join(f"{v:.17g}" for v in (*b, *x)))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
