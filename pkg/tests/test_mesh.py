"""Test quad-mesh construction and OBJ output."""

import numpy as np
import pytest

from opengov_liesphere.core.errors import InvalidArgumentError
from opengov_liesphere.core.legendre import Domain, ImmersionOracle, euclidean_projection
from opengov_liesphere.core.models import ConstructionKind
from opengov_liesphere.core.zoo import CyclideSpec, cyclide, pinkall_construction, plane, torus
from opengov_liesphere.core.sphere_model import stereographic
from opengov_liesphere.utils.mesh import (
    FlattenMode,
    build_mesh,
    flatten_vertex,
    obj_text,
    write_obj,
)


def test_torus_mesh_is_closed() -> None:
    f, xi = torus(2.0, 1.0)
    mesh = build_mesh(f, xi, (64, 64))
    assert mesh.vertices.shape == (4096, 3)
    assert mesh.normals.shape == (4096, 3)
    assert len(mesh.faces) == 4096
    assert mesh.skipped == 0
    assert not mesh.empty


def test_faces_follow_the_normal() -> None:
    f, xi = torus(2.0, 1.0)
    mesh = build_mesh(f, xi, (12, 8))
    for quad in mesh.faces:
        p0, p1, p3 = (mesh.vertices[k] for k in (quad[0], quad[1], quad[3]))
        assert np.cross(p1 - p0, p3 - p0) @ mesh.normals[quad[0]] > 0


def test_plane_mesh_has_boundary() -> None:
    f, xi = plane()
    mesh = build_mesh(f, xi, (3, 4))
    assert len(mesh.vertices) == 12
    assert len(mesh.faces) == 6
    assert mesh.counts == (3, 4)


def test_singular_vertices_are_dropped() -> None:
    """The standard cyclide reaches infinity on the circle where the first angle is pi."""
    f, xi = euclidean_projection(cyclide(CyclideSpec(p=1, q=1)))
    mesh = build_mesh(f, xi, (8, 8))
    assert len(mesh.vertices) == 56
    assert mesh.skipped == 16
    assert len(mesh.faces) == 48


def test_higher_dimensions_need_flatten() -> None:
    f, xi = pinkall_construction(ConstructionKind.CYLINDER)
    with pytest.raises(InvalidArgumentError):
        build_mesh(f, xi, (4, 4))
    mesh = build_mesh(f, xi, (4, 4), flatten=FlattenMode.drop)
    assert mesh.vertices.shape == (16, 3)
    assert mesh.normals is None
    assert len(mesh.faces) == 12


def test_slice_values() -> None:
    f, xi = pinkall_construction(ConstructionKind.CYLINDER)
    low = build_mesh(f, xi, (4, 4), fixed=[-0.5], flatten="drop")
    high = build_mesh(f, xi, (4, 4), fixed=[0.5], flatten="drop")
    np.testing.assert_allclose(low.vertices, high.vertices)
    with pytest.raises(InvalidArgumentError):
        build_mesh(f, xi, (4, 4), fixed=[0.1, 0.2], flatten="drop")


def test_stereo_flatten_inverts_stereographic_projection() -> None:
    """A patch of R^3 lifted to S^3 comes back unchanged."""
    lifted = ImmersionOracle(
        lambda b: stereographic([b[0], b[1], 0.5]),
        Domain.box((-1.0, 1.0), (-1.0, 1.0)),
    )
    mesh = build_mesh(lifted, None, (3, 3), flatten=FlattenMode.stereo)
    expected = [[u, v, 0.5] for u in (-1.0, 0.0, 1.0) for v in (-1.0, 0.0, 1.0)]
    np.testing.assert_allclose(mesh.vertices, expected, atol=1e-12)
    assert len(mesh.faces) == 4


def test_flatten_vertex() -> None:
    x = np.array([0.6, 0.0, 0.8, 0.0])
    np.testing.assert_allclose(flatten_vertex(x, "stereo"), [0.0, 0.5, 0.0])
    np.testing.assert_allclose(flatten_vertex(2.0 * x, "stereo"), [0.0, 0.5, 0.0])
    np.testing.assert_allclose(flatten_vertex(x, "drop"), [0.6, 0.0, 0.8])
    assert flatten_vertex(np.array([-1.0, 0.0, 0.0, 0.0]), "stereo") is None
    with pytest.raises(InvalidArgumentError):
        flatten_vertex(np.array([1.0, 0.0, 0.0]), "stereo")
    with pytest.raises(InvalidArgumentError):
        flatten_vertex(x, "orthographic")


def test_stereo_flatten_drops_the_pole() -> None:
    """Vertices at the projection pole go to infinity and take their cells along."""

    def meridian(b: np.ndarray) -> np.ndarray:
        s = np.sin(b[0])
        return np.array([np.cos(b[0]), s * np.cos(b[1]), s * np.sin(b[1]), 0.0])

    through_pole = ImmersionOracle(meridian, Domain.box((0.0, np.pi), (0.0, 1.0)))
    mesh = build_mesh(through_pole, None, (3, 2), flatten=FlattenMode.stereo)
    assert len(mesh.vertices) == 4
    assert mesh.skipped == 1
    assert len(mesh.faces) == 1


def test_mesh_rejects_bad_resolution() -> None:
    f, xi = plane()
    with pytest.raises(InvalidArgumentError):
        build_mesh(f, xi, (1, 4))
    with pytest.raises(InvalidArgumentError):
        build_mesh(f, xi, (4,))


def test_obj_text() -> None:
    f, xi = plane()
    text = obj_text(build_mesh(f, xi, (2, 2)), comment="plane")
    lines = text.splitlines()
    assert lines[0] == "# plane"
    assert sum(line.startswith("v ") for line in lines) == 4
    assert sum(line.startswith("vn ") for line in lines) == 4
    assert lines[-1] == "f 1//1 3//3 4//4 2//2"
    assert "-0.000000000" not in text


def test_obj_without_normals(tmp_path) -> None:
    f, _ = plane()
    path = tmp_path / "plane.obj"
    write_obj(path, build_mesh(f, None, (2, 2)))
    lines = path.read_text().splitlines()
    assert lines[0].startswith("v ")
    assert lines[-1] == "f 1 3 4 2"
