"""Test reading and writing sampled hypersurfaces."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from opengov_liesphere.core.curvature import curvature_spheres
from opengov_liesphere.core.errors import InvalidArgumentError
from opengov_liesphere.core.legendre import Domain, ImmersionOracle, lift_euclidean
from opengov_liesphere.utils.gridfile import read_grid, write_grid


def _paraboloid() -> ImmersionOracle:
    domain = Domain.box((-1.0, 1.0), (-1.0, 1.0))
    return ImmersionOracle(lambda b: np.array([b[0], b[1], (b[0] ** 2 + b[1] ** 2) / 2]), domain)


@pytest.fixture
def paraboloid_file(tmp_path):
    path = tmp_path / "paraboloid.grid"
    write_grid(path, _paraboloid(), (5, 5))
    return path


def test_write_grid_layout(paraboloid_file) -> None:
    lines = paraboloid_file.read_text().splitlines()
    assert lines[0] == "3 2 5 5"
    assert len(lines) == 26
    assert [float(x) for x in lines[1].split()] == [-1.0, -1.0, -1.0, -1.0, 1.0]


def test_read_grid_reproduces_surface(paraboloid_file) -> None:
    f, xi = read_grid(paraboloid_file)
    assert f.domain.lower == (-1.0, -1.0)
    assert f.domain.upper == (1.0, 1.0)
    for b in ([0.0, 0.0], [0.5, -0.5], [0.3, 0.7]):
        b = np.array(b)
        assert_allclose(f(b), _paraboloid()(b), atol=1e-10)
        expected = np.array([-b[0], -b[1], 1.0]) / np.sqrt(1.0 + b @ b)
        assert_allclose(xi(b), expected, atol=1e-6)


def test_read_grid_curvatures(paraboloid_file) -> None:
    """The vertex of the paraboloid is umbilic with curvature 1."""
    L = lift_euclidean(*read_grid(paraboloid_file))
    for s in curvature_spheres(L, [0.0, 0.0]):
        assert s.r == pytest.approx(1.0, abs=1e-4)


def test_read_grid_accepts_comments_and_any_row_order(tmp_path) -> None:
    path = tmp_path / "plane.grid"
    rows = [f"{u} {v} {u} {v} 0" for u in (0, 1) for v in (0, 1)]
    path.write_text("# a unit square\n3 2 2 2\n" + "\n".join(reversed(rows)) + "  # done\n")
    f, xi = read_grid(path)
    assert_allclose(f(np.array([0.25, 0.5])), [0.25, 0.5, 0.0], atol=1e-12)
    assert_allclose(xi(np.array([0.25, 0.5])), [0.0, 0.0, 1.0], atol=1e-9)


@pytest.mark.parametrize(
    "text",
    [
        "",
        "three 2 2 2\n",
        "3 1 4\n",
        "3 2 2 1\n",
        "3 2 2 2\n0 0 0 0 0\n",
        "3 2 2 2\n0 0 0 0 0\n0 1 0 1 0\n1 0 1 0 0\n1 1 1 1 x\n",
        "3 2 2 2\n0 0 0 0 0\n0 1 0 1 0\n1 0 1 0 0\n0 0 0 0 0\n",
        "3 2 2 2\n0 0 0 0 0\n0 1 0 1 0\n1 0 1 0 0\n2 1 1 1 0\n",
    ],
)
def test_read_grid_rejects_malformed(tmp_path, text: str) -> None:
    path = tmp_path / "bad.grid"
    path.write_text(text)
    with pytest.raises(InvalidArgumentError):
        read_grid(path)
