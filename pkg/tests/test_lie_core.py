"""Test the indefinite inner product, lines and the Lie sphere group."""

import numpy as np
import pytest
from hypothesis import given, settings as hsettings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy import linalg

from opengov_liesphere.core.errors import (
    DegenerateLineError,
    InvalidArgumentError,
    NotAContactLineError,
)
from opengov_liesphere.core.lie_core import (
    apply,
    apply_line,
    as_lie_transform,
    is_lie_transform,
    is_moebius,
    lie_gram,
    lie_inner,
    line_through,
    on_line,
    on_quadric,
    parallel_transform,
    projective_distance,
    random_lie_transform,
    span_summary,
)
from opengov_liesphere.core.models import LieVector, Point, Sphere, SphericalPoint, metric
from opengov_liesphere.core.sphere_model import decode_spherical, encode, encode_spherical


def test_metric_signature() -> None:
    """J = diag(-1, 1, ..., 1, -1)."""
    J = metric(3)
    assert J.shape == (6, 6)
    assert_allclose(np.diag(J), [-1, 1, 1, 1, 1, -1])


def test_lie_inner_basis() -> None:
    """Basis vectors have the expected norms."""
    e1 = LieVector.basis(1, 3)
    e2 = LieVector.basis(2, 3)
    e6 = LieVector.basis(6, 3)
    assert lie_inner(e1, e1) == -1.0
    assert lie_inner(e2, e2) == 1.0
    assert lie_inner(e6, e6) == -1.0
    assert lie_inner(e1, e2) == 0.0


def test_lie_inner_dimension_mismatch() -> None:
    with pytest.raises(InvalidArgumentError):
        lie_inner(LieVector.basis(1, 3), LieVector.basis(1, 4))


def test_lie_vector_validates_length() -> None:
    with pytest.raises(InvalidArgumentError):
        LieVector(np.zeros(5), 3)
    with pytest.raises(InvalidArgumentError):
        LieVector(np.zeros(4), 1)


def test_lie_vector_is_read_only() -> None:
    x = LieVector.of([1, 1, 0, 0, 0, 0])
    with pytest.raises(ValueError):
        x.coords[0] = 2.0


def test_on_quadric() -> None:
    assert on_quadric(LieVector.of([1, 1, 0, 0, 0, 0]))
    assert not on_quadric(LieVector.of([1, 0, 0, 0, 0, 0]))
    with pytest.raises(InvalidArgumentError):
        on_quadric(LieVector.of(np.zeros(6)))


def test_line_through_contact_pair() -> None:
    """A point on a sphere gives a contact line."""
    x = encode(Point(u=(1.0, 0.0, 0.0)), 3)
    y = encode(Sphere(center=(0.0, 0.0, 0.0), radius=1.0), 3)
    line = line_through(x, y)
    assert line.n == 3
    assert on_line(line, line.point(2.0, -3.0)) < 1e-12


def test_line_through_rejects_non_contact() -> None:
    x = encode(Point(u=(2.0, 0.0, 0.0)), 3)
    y = encode(Sphere(center=(0.0, 0.0, 0.0), radius=1.0), 3)
    with pytest.raises(NotAContactLineError):
        line_through(x, y)


def test_line_through_rejects_repeated_point() -> None:
    x = encode(Point(u=(1.0, 2.0, 3.0)), 3)
    with pytest.raises(DegenerateLineError):
        line_through(x, 2.0 * x)


def test_on_line_off_line_point() -> None:
    line = line_through(LieVector.basis(1, 3) + LieVector.basis(2, 3),
                        LieVector.basis(4, 3) + LieVector.basis(6, 3))
    assert on_line(line, LieVector.basis(3, 3)) > 0.1


def test_random_lie_transform_matches_scipy_expm() -> None:
    """The seeded generator is exp(J S) for the seeded skew matrix S."""
    n, seed, scale = 3, 7, 0.3
    G = random_lie_transform(seed, n, scale)
    rng = np.random.default_rng(seed)
    raw = rng.uniform(-scale, scale, size=(n + 3, n + 3))
    expected = linalg.expm(metric(n) @ ((raw - raw.T) / 2.0))
    assert_allclose(G.matrix, expected, atol=1e-12)
    assert is_lie_transform(G)


def test_random_lie_transform_rejects_bad_input() -> None:
    with pytest.raises(InvalidArgumentError):
        random_lie_transform(0, 3, scale=-1.0)
    with pytest.raises(InvalidArgumentError):
        random_lie_transform(0, 1)


@given(seed=st.integers(min_value=0, max_value=10_000), n=st.integers(min_value=2, max_value=5))
@hsettings(max_examples=30, deadline=None)
def test_lie_transforms_preserve_inner_product(seed: int, n: int) -> None:
    """<Gx, Gy> = <x, y> for random vectors."""
    G = random_lie_transform(seed, n)
    rng = np.random.default_rng(seed + 1)
    x = LieVector(rng.normal(size=n + 3), n)
    y = LieVector(rng.normal(size=n + 3), n)
    scale = 1.0 + abs(lie_inner(x, y))
    assert abs(lie_inner(apply(G, x), apply(G, y)) - lie_inner(x, y)) < 1e-9 * scale * 10


def test_inverse_and_compose() -> None:
    G = random_lie_transform(3, 4)
    identity = G.compose(G.inverse())
    assert_allclose(identity.matrix, np.eye(7), atol=1e-10)


def test_as_lie_transform_rescales() -> None:
    G = random_lie_transform(11, 3)
    scaled = as_lie_transform(3.0 * G.matrix)
    assert_allclose(scaled.matrix, G.matrix, atol=1e-10)


def test_as_lie_transform_rejects_non_member() -> None:
    matrix = np.eye(6)
    matrix[0, 1] = 0.5
    assert not is_lie_transform(matrix)
    with pytest.raises(InvalidArgumentError):
        as_lie_transform(matrix)


def test_apply_line_keeps_contact() -> None:
    G = random_lie_transform(5, 3)
    line = line_through(encode(Point(u=(1.0, 0.0, 0.0)), 3),
                        encode(Sphere(center=(0.0, 0.0, 0.0), radius=1.0), 3))
    image = apply_line(G, line)
    assert abs(lie_inner(image.y1, image.y2)) < 1e-8 * image.y1.norm() * image.y2.norm()


def test_moebius_detection() -> None:
    """Rotations of the R^n block fix e_{n+3}; parallel transforms do not."""
    rotation = np.eye(6)
    rotation[2:4, 2:4] = [[0.0, -1.0], [1.0, 0.0]]
    assert is_moebius(as_lie_transform(rotation))
    assert not is_moebius(parallel_transform(0.4, 3))


def test_parallel_transform_moves_points_to_spheres() -> None:
    """A point of S^n goes to the sphere of radius t around it."""
    x = np.array([0.0, 1.0, 0.0, 0.0])
    image = apply(parallel_transform(0.3, 3), encode_spherical(SphericalPoint(x=x), 3))
    decoded = decode_spherical(image)
    assert decoded.kind == "spherical-sphere"
    assert decoded.radius == pytest.approx(0.3)
    assert_allclose(decoded.center, x, atol=1e-12)


def test_projective_distance_ignores_scale_and_sign() -> None:
    x = np.array([1.0, 2.0, 0.0, 0.0, 0.0, 1.0])
    assert projective_distance(x, -3.0 * x) == pytest.approx(0.0, abs=1e-15)
    assert projective_distance(LieVector.basis(1, 3), LieVector.basis(2, 3)) == pytest.approx(
        np.sqrt(2.0)
    )


def test_span_summary_of_sphere_pencil() -> None:
    """Spheres through a common point and tangent plane span a 2-plane of signature (0,0,2)."""
    point = encode(Point(u=(0.0, 0.0, 0.0)), 3)
    plane = LieVector.of([0, 0, 0, 0, 1, 1])
    samples = [point.normalized(), plane] + [
        LieVector(point.coords * t + plane.coords, 3) for t in (0.5, 1.0, 2.0)
    ]
    summary = span_summary(samples)
    assert summary.dim == 2
    assert summary.signature == (0, 0, 2)


def test_span_summary_of_basis_vectors() -> None:
    samples = [LieVector.basis(i, 3) for i in (1, 2, 6)]
    summary = span_summary(samples)
    assert summary.dim == 3
    assert summary.signature == (1, 2, 0)


@pytest.mark.parametrize("seed", [0, 4, 9])
def test_span_summary_is_lie_invariant(seed: int) -> None:
    rng = np.random.default_rng(seed)
    centers = rng.normal(size=(8, 3))
    spheres = [encode(Sphere(center=tuple(c), radius=0.5), 3) for c in centers]
    G = random_lie_transform(seed, 3)
    before = span_summary(spheres)
    after = span_summary([apply(G, s) for s in spheres])
    assert before.dim == after.dim == 5
    assert before.signature == after.signature == (4, 1, 0)


def test_span_summary_rejects_empty() -> None:
    with pytest.raises(InvalidArgumentError):
        span_summary([])


def test_lie_gram_rows() -> None:
    rows = np.eye(5)[[0, 1]]
    assert_allclose(lie_gram(rows), [[-1.0, 0.0], [0.0, 1.0]])
