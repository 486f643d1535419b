import json
import math

import numpy as np
import pytest

from dualbm import Rotation, SphereGrid, grid_permutation, integrate, make_grid, rotation_2d, rotation_3d
from dualbm.exceptions import GridError, GridNotClosedError
from dualbm.sphere_grid import cyclic_rotations, min_angular_separation, sphere_area


def test_circle_four_nodes():
    g = make_grid(2, 4)
    angles = np.mod(np.arctan2(g.nodes[:, 1], g.nodes[:, 0]), 2 * np.pi)
    np.testing.assert_allclose(angles, [0, np.pi / 2, np.pi, 3 * np.pi / 2], atol=1e-15)
    np.testing.assert_array_equal(g.weights, np.full(4, np.pi / 2))


@pytest.mark.parametrize("dim,res,tol", [(2, 4, 1e-12), (2, 360, 1e-12), (3, 4, 1e-10), (3, 16, 1e-10), (3, 64, 1e-10)])
def test_weight_sum_is_sphere_area(dim, res, tol):
    g = make_grid(dim, res)
    assert abs(math.fsum(g.weights) - sphere_area(dim)) <= tol
    assert abs(integrate(g, np.ones(g.size)) - sphere_area(dim)) <= tol


def test_sphere_grid_shape():
    g = make_grid(3, 16)
    assert g.size == 16 * 32
    np.testing.assert_allclose(np.linalg.norm(g.nodes, axis=1), 1.0, atol=1e-12)
    assert np.all(g.weights > 0)


def test_sphere_area_values():
    assert sphere_area(2) == pytest.approx(2 * math.pi, abs=1e-15)
    assert sphere_area(3) == pytest.approx(4 * math.pi, abs=1e-14)


@pytest.mark.parametrize("res", [8, 16, 32])
def test_second_moment_on_sphere(res):
    # \int_{S^2} x^2 du = |S^2| / 3 by symmetry; Gauss-Legendre is exact here.
    g = make_grid(3, res)
    assert abs(integrate(g, g.nodes[:, 0] ** 2) - 4 * math.pi / 3) <= 1e-12


@pytest.mark.parametrize("k", [4, 5, 7, 16, 101])
def test_cos_squared_on_circle(k):
    g = make_grid(2, k)
    assert abs(integrate(g, g.nodes[:, 0] ** 2) - math.pi) <= 1e-12


def test_refinement_reduces_error():
    ref_grid = make_grid(2, 4096)
    ref = integrate(ref_grid, np.exp(ref_grid.nodes[:, 0]))
    errs = []
    for k in range(4, 16, 2):
        g = make_grid(2, k)
        errs.append(abs(integrate(g, np.exp(g.nodes[:, 0])) - ref))
    assert all(a > b for a, b in zip(errs, errs[1:]))
    # 2 pi I_0(1)
    assert abs(ref - 7.954926521012845) <= 1e-12


@pytest.mark.parametrize("dim,res", [(1, 8), (4, 8), (2, 3), (3, 2), (2, 4.5)])
def test_make_grid_rejects(dim, res):
    with pytest.raises(GridError):
        make_grid(dim, res)


def test_integrate_length_mismatch(circle):
    with pytest.raises(GridError):
        integrate(circle, np.ones(circle.size + 1))


def test_invariant_violations_rejected():
    g = make_grid(2, 8)
    with pytest.raises(GridError, match="unit"):
        SphereGrid(2, 2 * g.nodes, g.weights)
    with pytest.raises(GridError, match="positive"):
        SphereGrid(2, g.nodes, np.r_[g.weights[:-1] * 8 / 7, 0.0])
    with pytest.raises(GridError, match="sum"):
        SphereGrid(2, g.nodes, g.weights * 1.01)
    with pytest.raises(GridError, match="distinct"):
        SphereGrid(2, np.r_[g.nodes[:1], g.nodes[:1]], [math.pi, math.pi])


def test_grids_are_immutable(circle):
    with pytest.raises(ValueError):
        circle.weights[0] = 1.0
    with pytest.raises(AttributeError):
        circle.dim = 3


def test_json_round_trip(sphere):
    data = json.loads(json.dumps(sphere.to_dict()))
    assert set(data) == {"dim", "nodes", "weights"}
    g = SphereGrid.from_dict(data)
    assert g.same_as(sphere)


def test_from_dict_missing_field():
    with pytest.raises(GridError, match="weights"):
        SphereGrid.from_dict({"dim": 2, "nodes": [[1, 0]]})


def test_rotation_validation():
    with pytest.raises(GridError):
        Rotation(np.diag([1.0, -1.0]))
    with pytest.raises(GridError):
        Rotation(np.array([[1.0, 0.1], [0.0, 1.0]]))
    R = rotation_3d([0, 0, 1], 0.3)
    np.testing.assert_allclose(R.matrix.T @ R.matrix, np.eye(3), atol=1e-12)


def test_permutation_cyclic_shift():
    g = make_grid(2, 8)
    perm = grid_permutation(g, rotation_2d(2 * np.pi / 8))
    np.testing.assert_array_equal(perm, (np.arange(8) + 1) % 8)


def test_permutation_identity(sphere):
    perm = grid_permutation(sphere, Rotation(np.eye(3)))
    np.testing.assert_array_equal(perm, np.arange(sphere.size))


def test_permutation_not_closed():
    g = make_grid(2, 8)
    with pytest.raises(GridNotClosedError) as info:
        grid_permutation(g, rotation_2d(np.pi / 3))
    assert info.value.node == 0


def test_generator_has_order_k():
    k = 12
    g = make_grid(2, k)
    step = grid_permutation(g, rotation_2d(2 * np.pi / k))
    p = np.arange(k)
    for _ in range(k):
        p = step[p]
    np.testing.assert_array_equal(p, np.arange(k))


def test_sphere_grid_azimuthal_symmetry(sphere):
    k = 16
    perm = grid_permutation(sphere, rotation_3d([0, 0, 1], 2 * np.pi / (2 * k)))
    np.testing.assert_array_equal(np.sort(perm), np.arange(sphere.size))
    np.testing.assert_array_equal(sphere.weights[perm], sphere.weights)


def test_cyclic_rotations_size():
    g = make_grid(2, 10)
    assert len(cyclic_rotations(g)) == 10
    with pytest.raises(GridError):
        cyclic_rotations(make_grid(3, 4))


def test_min_angular_separation():
    assert min_angular_separation(make_grid(2, 16)) == pytest.approx(2 * np.pi / 16, rel=1e-12)
