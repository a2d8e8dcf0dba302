"""Test the example generators."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from opengov_liesphere.core.curvature import curvature_at
from opengov_liesphere.core.dupin import snake_grid
from opengov_liesphere.core.errors import (
    InvalidArgumentError,
    InvalidConstructionError,
    NotEquivalentError,
    SelfIntersectingSpecError,
)
from opengov_liesphere.core.legendre import legendre_residuals, lift_euclidean
from opengov_liesphere.core.lie_core import (
    apply_line,
    is_lie_transform,
    lie_gram,
    lie_inner,
    random_lie_transform,
)
from opengov_liesphere.core.models import ConstructionKind, Provenance
from opengov_liesphere.core.zoo import (
    GENERATORS,
    CyclideSpec,
    build_generator,
    cartan_hypersurface,
    cyclide,
    cyclide_equivalence,
    euler_zyz,
    f_frame_derivatives,
    f_frames,
    family_residual,
    fixed_timelike_pair,
    focal_pair,
    frame_solution,
    maurer_cartan,
    parse_generator,
    pinkall_construction,
    sphere,
    sphere_chart,
    torus,
    veronese,
    veronese_affine,
    veronese_frame_map,
    veronese_spherical,
)

ANGLES = np.array([0.4, 0.9, 2.2])


def test_cyclide_spec_dimension() -> None:
    assert CyclideSpec(p=2, q=1).n == 4
    with pytest.raises(ValueError):
        CyclideSpec(p=1, q=1, n=5)
    with pytest.raises(ValueError):
        CyclideSpec(p=0, q=1)


def test_sphere_chart_is_unit() -> None:
    for angles in ([0.3], [0.3, -0.8], [1.0, 0.2, 0.5]):
        assert np.linalg.norm(sphere_chart(angles)) == pytest.approx(1.0)


@pytest.mark.parametrize("p,q", [(1, 1), (2, 1), (1, 2)])
def test_cyclide_multiplicities(p: int, q: int) -> None:
    """The sphere fixed along S^p has multiplicity p, the other one q."""
    L = cyclide(CyclideSpec(p=p, q=q))
    b = L.domain.grid((3,) * L.dim)[4]
    point = curvature_at(L, b)
    assert point.g == 2
    assert point.multiplicities == (q, p)
    assert point.spheres[0].r == pytest.approx(0.0, abs=1e-8)
    assert np.isinf(point.spheres[1].r)


def test_cyclide_focal_spans() -> None:
    spans, multiplicities = focal_pair(cyclide(CyclideSpec(p=1, q=1)))
    assert multiplicities == (1, 1)
    assert [s.dim for s in spans] == [3, 3]
    assert [s.signature for s in spans] == [(2, 1, 0), (2, 1, 0)]


@pytest.mark.slow
@pytest.mark.parametrize("p,q", [(2, 2), (3, 1)])
def test_higher_cyclide_focal_spans(p: int, q: int) -> None:
    """The point-sphere map spans q + 2 dimensions, the other one p + 2."""
    L = cyclide(CyclideSpec(p=p, q=q))
    spans, multiplicities = focal_pair(L, counts=(3, 3, 3, 3))
    assert multiplicities == (q, p)
    assert [s.dim for s in spans] == [q + 2, p + 2]
    assert [s.signature for s in spans] == [(q + 1, 1, 0), (p + 1, 1, 0)]


def test_torus_rejects_self_intersection() -> None:
    with pytest.raises(SelfIntersectingSpecError):
        torus(1.0, 2.0)


def test_torus_normal_points_to_core() -> None:
    f, xi = torus(2.0, 1.0)
    b = np.array([0.0, 0.0])
    assert_allclose(f(b) + xi(b), [2.0, 0.0, 0.0], atol=1e-12)


def test_veronese_affine_examples() -> None:
    assert_allclose(veronese_affine([1.0, 0.0, 0.0]), [0, 0, 0, 1, 0])
    assert_allclose(veronese_affine([0.0, 0.0, 1.0]), [0, 0, 0, 0, 0])
    y = np.array([1.0, 1.0, 1.0]) / np.sqrt(3.0)
    assert_allclose(veronese_affine(y), [2 / 3, 2 / 3, 2 / 3, 1 / 3, 1 / 3])


def test_veronese_spherical_explicit_form() -> None:
    y = np.array([0.36, 0.48, 0.8])
    y1, y2, y3 = y
    s = np.sqrt(3.0)
    expected = [
        s * y2 * y3,
        s * y3 * y1,
        s * y1 * y2,
        s / 2 * (y1**2 - y2**2),
        (y1**2 + y2**2 - 2 * y3**2) / 2,
    ]
    assert_allclose(veronese_spherical(y), expected, atol=1e-12)


def test_veronese_spherical_properties() -> None:
    rng = np.random.default_rng(0)
    ys = rng.normal(size=(20, 3))
    ys /= np.linalg.norm(ys, axis=1)[:, None]
    images = np.array([veronese_spherical(y) for y in ys])
    assert_allclose(np.linalg.norm(images, axis=1), 1.0, atol=1e-12)
    assert_allclose(images, [veronese_spherical(-y) for y in ys], atol=1e-12)
    assert np.linalg.matrix_rank(images) == 5


def test_veronese_rejects_non_unit() -> None:
    with pytest.raises(InvalidArgumentError):
        veronese_spherical([1.0, 1.0, 0.0])
    with pytest.raises(InvalidArgumentError):
        veronese_affine([0.0, 0.0])


def test_veronese_lift() -> None:
    L = veronese()
    assert L.n == 4
    assert curvature_at(L, [0.5, 1.0, 0.7]).g == 3


def test_f_frame_identities() -> None:
    frame = f_frames(euler_zyz(ANGLES))
    assert_allclose(frame.F1 + frame.F2 + frame.F3, [0, 0, 0, 1, 1], atol=1e-12)
    assert_allclose(frame.Z3 + frame.Z4 + frame.Z5, np.zeros(5), atol=1e-12)
    assert set(frame.solution()) == {"Y3", "Y4", "Y5", "Z3", "Z4", "Z5"}


def test_f_frames_rejects_non_rotation() -> None:
    with pytest.raises(InvalidArgumentError):
        f_frames(np.diag([1.0, 1.0, -1.0]))
    with pytest.raises(InvalidArgumentError):
        f_frames(np.eye(2))


def test_f_frame_derivatives_match_finite_differences() -> None:
    """dF1 = -G31 theta2 + G12 theta3, and the rest agree with finite differences."""
    h = 1e-6
    direction = np.array([0.3, -0.5, 0.8])
    A = euler_zyz(ANGLES)
    plus, minus = euler_zyz(ANGLES + h * direction), euler_zyz(ANGLES - h * direction)
    dA = (plus - minus) / (2 * h)
    derivatives = f_frame_derivatives(A, dA)
    frame, up, down = f_frames(A), f_frames(plus), f_frames(minus)
    for name in ("F1", "F2", "F3", "G12", "G23", "G31"):
        numeric = (getattr(up, name) - getattr(down, name)) / (2 * h)
        assert_allclose(derivatives[name], numeric, atol=1e-7)
    _, theta2, theta3 = maurer_cartan(A, dA)
    assert_allclose(derivatives["F1"], -frame.G31 * theta2 + frame.G12 * theta3, atol=1e-8)


def test_fixed_timelike_pair_gram() -> None:
    W1, W2 = fixed_timelike_pair()
    assert_allclose(lie_gram(np.vstack([W1.coords, W2.coords])), [[-4, -2], [-2, -4]], atol=1e-12)


def test_frame_solution_lines() -> None:
    """Y1 and Y7 span a Legendre line; its spheres are orthogonal to W1, W2 and W1 - W2."""
    Y = frame_solution(euler_zyz(ANGLES))
    W1, W2 = fixed_timelike_pair()
    Y1, Y7 = Y["Y1"], Y["Y7"]
    assert abs(lie_inner(Y1, Y1)) < 1e-12
    assert abs(lie_inner(Y7, Y7)) < 1e-12
    assert abs(lie_inner(Y1, Y7)) < 1e-12
    assert abs(lie_inner(Y1, W1)) < 1e-12
    assert abs(lie_inner(Y7, W2)) < 1e-12
    assert abs(lie_inner(Y1 + Y7, W1 - W2)) < 1e-12


def test_veronese_frame_map_residuals() -> None:
    L = veronese_frame_map()
    assert L.provenance is Provenance.ZOO_ANALYTIC
    residuals = legendre_residuals(L, [0.4, 0.9, 2.2])
    assert residuals.quadric1 < 1e-10
    assert residuals.orthogonality < 1e-10


def test_cartan_member() -> None:
    member = cartan_hypersurface(np.pi / 6)
    assert not member.degenerate
    assert member.lift.label == "cartan(t=0.523599)"
    b = np.array([0.5, 1.0, 0.7])
    assert np.linalg.norm(member.immersion(b)) == pytest.approx(1.0)
    point = curvature_at(member.lift, b)
    assert point.g == 3
    assert point.multiplicities == (1, 1, 1)


def test_cartan_degenerate_member() -> None:
    member = cartan_hypersurface(np.pi / 3)
    assert member.degenerate
    assert member.lift.flags["degenerate"] is True
    assert legendre_residuals(member.lift, [0.5, 1.0, 0.7]).orthogonality < 1e-10


def test_pinkall_cylinder_has_three_spheres() -> None:
    f, xi = pinkall_construction(ConstructionKind.CYLINDER)
    L = lift_euclidean(f, xi)
    point = curvature_at(L, [0.5, 0.2, 0.1])
    assert point.g == 3
    assert any(abs(s.r) < 1e-6 for s in point.spheres)


@pytest.mark.parametrize("kind", ["revolution", "cone", "tube"])
def test_pinkall_constructions_are_immersions(kind: str) -> None:
    f, xi = pinkall_construction(ConstructionKind(kind))
    assert f.domain.dim == 3
    L = lift_euclidean(f, xi)
    assert L.n == 4
    assert curvature_at(L, f.domain.grid((3, 3, 3))[13]).g == 3


def test_pinkall_rejects_invalid_input() -> None:
    with pytest.raises(InvalidConstructionError):
        pinkall_construction(ConstructionKind.TUBE, radius=1.5)
    with pytest.raises(InvalidConstructionError):
        pinkall_construction(ConstructionKind.TUBE, radius=-0.1)
    with pytest.raises(InvalidConstructionError):
        pinkall_construction(ConstructionKind.REVOLUTION, d=0.5)


def test_cyclide_equivalence_of_torus() -> None:
    """The torus lift is Lie equivalent to the standard cyclide."""
    torus_lift = lift_euclidean(*torus(2.0, 1.0))
    target = cyclide(CyclideSpec(p=1, q=1))
    G = cyclide_equivalence(torus_lift, target)
    assert is_lie_transform(G, tol=1e-6)
    spans, _ = focal_pair(target)
    for b in snake_grid(torus_lift.domain, (3, 3)):
        assert family_residual(apply_line(G, torus_lift.line_at(b)), spans) < 1e-6


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(10))
def test_cyclide_equivalence_undoes_random_transform(seed: int) -> None:
    standard = cyclide(CyclideSpec(p=1, q=1))
    moved = standard.transformed(random_lie_transform(seed, 3))
    G = cyclide_equivalence(moved, standard, counts=(4, 4))
    assert is_lie_transform(G, tol=1e-6)
    spans, _ = focal_pair(standard, counts=(4, 4))
    for b in snake_grid(moved.domain, (3, 3)):
        assert family_residual(apply_line(G, moved.line_at(b)), spans) < 1e-6


def test_cyclide_equivalence_rejects_other_characteristic() -> None:
    with pytest.raises(NotEquivalentError):
        cyclide_equivalence(cyclide(CyclideSpec(p=1, q=1)), cyclide(CyclideSpec(p=2, q=1)))


def test_cyclide_equivalence_rejects_sphere() -> None:
    """A round sphere has a single curvature sphere, so no focal pair exists."""
    with pytest.raises(NotEquivalentError):
        cyclide_equivalence(lift_euclidean(*sphere()), cyclide(CyclideSpec(p=1, q=1)))



def test_parse_generator() -> None:
    assert parse_generator("torus") == ("torus", {"a": 2.0, "b": 1.0})
    assert parse_generator("torus:a=3,b=0.5") == ("torus", {"a": 3.0, "b": 0.5})
    assert parse_generator("cyclide:2,1") == ("cyclide", {"p": 2, "q": 1, "n": 0})
    assert parse_generator("pinkall:kind=tube")[1]["kind"] == "tube"


@pytest.mark.parametrize(
    "spec", ["nope", "torus:c=1", "torus:1,2,3", "torus:a=x", "cyclide:p=1.5"]
)
def test_parse_generator_rejects(spec: str) -> None:
    with pytest.raises(InvalidArgumentError):
        parse_generator(spec)


def test_build_generator() -> None:
    generated = build_generator("cyclide:p=2,q=1")
    assert generated.legendre.n == 4
    assert generated.params == {"p": 2, "q": 1, "n": 4}
    assert build_generator("torus").surface is not None
    assert build_generator("cartan").spherical is not None


def test_build_generator_rejects_bad_parameters() -> None:
    with pytest.raises(InvalidArgumentError):
        build_generator("cyclide:p=1,q=1,n=5")
    with pytest.raises(InvalidArgumentError):
        build_generator("pinkall:kind=hyper")


def test_every_generator_builds() -> None:
    for name in GENERATORS:
        assert build_generator(name).legendre.dim >= 2
