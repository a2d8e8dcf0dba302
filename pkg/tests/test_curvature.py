"""Test shape operators, curvature spheres and cross-ratios."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from opengov_liesphere.core.curvature import (
    cross_ratio_on_line,
    curvature_at,
    curvature_spheres,
    lie_curvature,
    lie_curvature_profile,
    lie_second_form,
    line_coordinates,
    orthonormal_frame,
    orthonormal_shape,
    principal_curvatures,
    shape_operator,
    shape_operator_hessian,
)
from opengov_liesphere.core.errors import (
    InvalidArgumentError,
    UndefinedCrossRatioError,
    UnsupportedProvenanceError,
)
from opengov_liesphere.core.legendre import lift_euclidean
from opengov_liesphere.core.lie_core import random_lie_transform
from opengov_liesphere.core.models import LieVector, Plane, Sphere
from opengov_liesphere.core.sphere_model import decode
from opengov_liesphere.core.zoo import CyclideSpec, cyclide, ellipsoid, plane, sphere, torus


def _torus_oracle(v: float, a: float = 2.0, b: float = 1.0) -> list:
    return sorted([np.cos(v) / (a + b * np.cos(v)), 1.0 / b])


@pytest.mark.parametrize("b", [(0.0, 0.0), (0.7, 1.1), (2.5, 2.0), (4.0, 4.4)])
def test_torus_principal_curvatures(b: tuple) -> None:
    f, xi = torus(2.0, 1.0)
    shape = shape_operator(f, xi, b)
    assert shape.asymmetry < 1e-6
    assert_allclose(principal_curvatures(shape), _torus_oracle(b[1]), atol=1e-6)


def test_torus_outer_equator() -> None:
    """At v = 0 the inward normal gives curvatures 1/3 and 1."""
    f, xi = torus(2.0, 1.0)
    curvatures = principal_curvatures(shape_operator(f, xi, [0.0, 0.0]))
    assert_allclose(curvatures, [1 / 3, 1.0], atol=1e-6)


def test_shape_operator_matches_hessian_form() -> None:
    f, xi = ellipsoid(1.0, 2.0, 3.0)
    for b in ([0.3, 0.8], [2.0, 1.7], [5.1, 2.4]):
        first = principal_curvatures(shape_operator(f, xi, b))
        second = principal_curvatures(shape_operator_hessian(f, xi, b))
        assert_allclose(first, second, rtol=1e-4, atol=1e-6)


def test_orthonormal_frame() -> None:
    f, xi = ellipsoid(1.0, 2.0, 3.0)
    shape = shape_operator(f, xi, [0.3, 0.8])
    C = orthonormal_frame(shape.first_form)
    assert_allclose(C.T @ shape.first_form @ C, np.eye(2), atol=1e-12)
    symmetric = orthonormal_shape(shape)
    assert_allclose(symmetric, symmetric.T, atol=1e-8)
    assert_allclose(np.linalg.eigvalsh(symmetric), principal_curvatures(shape), atol=1e-8)


def test_lie_second_form_is_minus_shape_operator() -> None:
    L = lift_euclidean(*torus(2.0, 1.0))
    h = lie_second_form(L, [0.4, 0.9])
    assert_allclose(h, h.T, atol=1e-10)
    assert_allclose(np.linalg.eigvalsh(h), sorted(-np.array(_torus_oracle(0.9))), atol=1e-6)


def test_lie_second_form_needs_euclidean_lift() -> None:
    with pytest.raises(UnsupportedProvenanceError):
        lie_second_form(cyclide(CyclideSpec(p=1, q=1)), [0.1, 0.2])


def test_curvature_spheres_of_torus() -> None:
    """The tube-direction sphere is centred on the core circle with radius b."""
    L = lift_euclidean(*torus(2.0, 1.0))
    u, v = 0.7, 1.1
    point = curvature_at(L, [u, v])
    assert point.g == 2
    assert point.multiplicities == (1, 1)
    assert point.stable
    assert_allclose([s.r for s in point.spheres], _torus_oracle(v), atol=1e-6)
    tube = decode(point.spheres[1].K)
    assert isinstance(tube, Sphere)
    assert_allclose(tube.center, (2.0 * np.cos(u), 2.0 * np.sin(u), 0.0), atol=1e-6)
    assert tube.radius == pytest.approx(1.0, abs=1e-6)


def test_curvature_spheres_of_round_sphere() -> None:
    """Every point is umbilic and the curvature sphere is the sphere itself."""
    L = lift_euclidean(*sphere())
    spheres = curvature_spheres(L, [0.4, 1.0])
    assert len(spheres) == 1
    assert spheres[0].multiplicity == 2
    assert spheres[0].r == pytest.approx(1.0, abs=1e-6)
    decoded = decode(spheres[0].K)
    assert isinstance(decoded, Sphere)
    assert_allclose(decoded.center, (0.0, 0.0, 0.0), atol=1e-6)
    assert decoded.radius == pytest.approx(1.0, abs=1e-6)


def test_curvature_spheres_of_plane() -> None:
    L = lift_euclidean(*plane())
    spheres = curvature_spheres(L, [0.2, -0.3])
    assert len(spheres) == 1
    assert spheres[0].multiplicity == 2
    assert spheres[0].r == pytest.approx(0.0, abs=1e-8)
    assert isinstance(decode(spheres[0].K), Plane)


def test_principal_basis_shapes() -> None:
    L = lift_euclidean(*torus(2.0, 1.0))
    for s in curvature_spheres(L, [0.7, 1.1]):
        assert s.principal_basis.shape == (2, 1)
        assert np.linalg.norm(s.principal_basis) == pytest.approx(1.0)
        assert np.hypot(*s.coefficients) == pytest.approx(1.0)


def test_torus_principal_directions_are_coordinate_axes() -> None:
    L = lift_euclidean(*torus(2.0, 1.0))
    spheres = curvature_spheres(L, [0.7, 1.1])
    assert abs(spheres[0].principal_basis[0, 0]) == pytest.approx(1.0, abs=1e-6)
    assert abs(spheres[1].principal_basis[1, 0]) == pytest.approx(1.0, abs=1e-6)


def test_multiplicities_survive_lie_transform() -> None:
    L = lift_euclidean(*torus(2.0, 1.0)).transformed(random_lie_transform(4, 3))
    point = curvature_at(L, [0.7, 1.1])
    assert point.g == 2
    assert point.multiplicities == (1, 1)


def test_cyclide_has_an_infinite_sphere() -> None:
    """For the standard cyclide y1 itself is a curvature sphere."""
    point = curvature_at(cyclide(CyclideSpec(p=1, q=1)), [0.3, 1.2])
    assert point.g == 2
    assert np.isinf(point.spheres[-1].r)


def test_lie_curvature() -> None:
    assert lie_curvature([1.0, 2.0, 3.0, 4.0]) == pytest.approx(4.0 / 3.0)
    assert lie_curvature([4.0, 3.0, 2.0, 1.0]) == pytest.approx(4.0 / 3.0)


def test_lie_curvature_rejects_bad_input() -> None:
    with pytest.raises(UndefinedCrossRatioError):
        lie_curvature([1.0, 1.0, 2.0, 3.0])
    with pytest.raises(InvalidArgumentError):
        lie_curvature([1.0, 2.0, 3.0])
    with pytest.raises(InvalidArgumentError):
        lie_curvature([1.0, 2.0, 3.0, float("inf")])


def test_cross_ratio_on_line() -> None:
    """Coefficient pairs (1,0), (0,1), (1,1), (2,1) are inf, 0, 1, 2."""
    line = lift_euclidean(*torus(2.0, 1.0)).line_at([0.1, 0.2])
    assert cross_ratio_on_line(line, [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (2.0, 1.0)]) == (
        pytest.approx(2.0)
    )
    finite = [(r, 1.0) for r in (1.0, 2.0, 3.0, 4.0)]
    assert cross_ratio_on_line(line, finite) == pytest.approx(lie_curvature([1, 2, 3, 4]))


def test_cross_ratio_from_vectors() -> None:
    line = lift_euclidean(*torus(2.0, 1.0)).line_at([0.1, 0.2])
    y1, y2 = line.y1.coords, line.y2.coords
    vectors = [LieVector(r * y1 + y2, 3) for r in (1.0, 2.0, 3.0)] + [LieVector(-2.0 * y1, 3)]
    assert cross_ratio_on_line(line, vectors) == pytest.approx(
        cross_ratio_on_line(line, [(1.0, 1.0), (2.0, 1.0), (3.0, 1.0), (1.0, 0.0)])
    )


def test_cross_ratio_rejects_coincident_points() -> None:
    line = lift_euclidean(*torus(2.0, 1.0)).line_at([0.1, 0.2])
    with pytest.raises(UndefinedCrossRatioError):
        cross_ratio_on_line(line, [(1.0, 0.0), (2.0, 0.0), (1.0, 1.0), (2.0, 1.0)])


def test_line_coordinates() -> None:
    line = lift_euclidean(*torus(2.0, 1.0)).line_at([0.1, 0.2])
    x = LieVector(2.0 * line.y1.coords + 3.0 * line.y2.coords, 3)
    assert_allclose(line_coordinates(line, x), (2.0, 3.0), atol=1e-10)
    with pytest.raises(InvalidArgumentError):
        line_coordinates(line, LieVector.basis(1, 3))


def test_lie_curvature_profile_needs_four_spheres() -> None:
    L = lift_euclidean(*torus(2.0, 1.0))
    assert lie_curvature_profile(L, [[0.1, 0.2], [0.5, 1.0]]) is None
