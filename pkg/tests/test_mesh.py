"""Tests for graded grid construction, distances, and grid functions."""

import numpy as np
import pytest

from fracblow.errors import BadConfig, GridMismatch, OutOfDomain
from fracblow.mesh import (
    Constant,
    Grid,
    GridFunction,
    PowerTail,
    Zero,
    build_graded,
    distance_D,
    distance_d,
)


def test_uniform_grid_at_unit_grading():
    grid = build_graded(16, 1.0, 0.25)
    assert grid.n_nodes == 32
    gaps = np.diff(grid.nodes)
    assert np.allclose(gaps, 1.0 / 16.0)
    # midpoint layout: innermost nodes at +-1/32
    assert abs(grid.nodes[16] - 1.0 / 32.0) < 1e-15
    assert abs(grid.nodes[15] + 1.0 / 32.0) < 1e-15


def test_graded_innermost_gap_matches_power():
    grid = build_graded(64, 3.0, 0.25)
    innermost = grid.nodes[grid.nodes > 0][0]
    target = (1.0 / 64.0) ** 3
    assert target / 2.0 <= innermost <= 2.0 * target


def test_grid_is_symmetric():
    for gamma in (1.0, 2.0, 3.5):
        grid = build_graded(32, gamma)
        assert np.allclose(grid.nodes, -grid.nodes[::-1], atol=0.0)


def test_grid_clusters_at_both_ends():
    grid = build_graded(128, 2.0)
    right = grid.nodes[grid.nodes > 0]
    gaps = np.diff(right)
    mid = len(gaps) // 2
    assert gaps[0] < gaps[mid] / 10.0       # fine near 0
    assert gaps[-1] < gaps[mid] / 10.0      # fine near 1


def test_grid_excludes_singular_point_and_boundary():
    grid = build_graded(64, 2.0)
    assert np.all(grid.nodes != 0.0)
    assert np.all(np.abs(grid.nodes) < 1.0)
    assert np.all(np.diff(grid.nodes) > 0.0)


def test_band_node_sets_are_disjoint():
    # nodes within delta of 0 and nodes within delta of the boundary
    # can never overlap when delta <= 1/4
    for delta in (0.1, 0.25):
        grid = build_graded(64, 2.0, delta)
        near_zero = np.abs(grid.nodes) < delta
        near_boundary = distance_d(grid.nodes) < delta
        assert not np.any(near_zero & near_boundary)


def test_build_graded_validates_arguments():
    with pytest.raises(BadConfig):
        build_graded(15, 2.0)
    with pytest.raises(BadConfig):
        build_graded(32, 0.5)
    with pytest.raises(BadConfig):
        build_graded(32, 7.0)
    with pytest.raises(BadConfig):
        build_graded(32, 2.0, delta=0.3)
    with pytest.raises(BadConfig):
        build_graded(32, 2.0, delta=0.0)


def test_grid_constructor_rejects_bad_nodes():
    with pytest.raises(BadConfig):
        Grid(nodes=np.array([-0.5, 0.0, 0.5]), grading_exponent=1.0,
             n_per_side=1, delta=0.25)
    with pytest.raises(BadConfig):
        Grid(nodes=np.array([0.5, 0.25]), grading_exponent=1.0,
             n_per_side=1, delta=0.25)
    with pytest.raises(BadConfig):
        Grid(nodes=np.array([-0.5, 1.0]), grading_exponent=1.0,
             n_per_side=1, delta=0.25)


def test_distances():
    assert distance_D(0.3) == 0.3
    assert abs(distance_d(0.3) - 0.7) < 1e-15
    assert distance_D(-0.9) == 0.9
    assert abs(distance_d(-0.9) - 0.1) < 1e-15
    assert distance_D(1e-12) == 1e-12
    xs = np.array([-0.5, 0.25])
    assert np.allclose(distance_D(xs), [0.5, 0.25])
    assert np.allclose(distance_d(xs), [0.5, 0.75])


def test_distances_reject_exterior_points():
    for bad in (1.0, -1.0, 1.5, -2.0):
        with pytest.raises(OutOfDomain):
            distance_D(bad)
        with pytest.raises(OutOfDomain):
            distance_d(bad)


def test_all_nodes_have_positive_distances():
    grid = build_graded(64, 3.0)
    assert np.all(distance_D(grid.nodes) > 0.0)
    assert np.all(distance_d(grid.nodes) > 0.0)


def test_local_spacing_positive_and_small_near_zero():
    grid = build_graded(64, 2.0)
    spacing = grid.local_spacing()
    assert np.all(spacing > 0.0)
    inner = np.argmin(np.abs(grid.nodes))
    assert spacing[inner] < np.max(spacing) / 20.0


def test_grid_function_validation():
    grid = build_graded(16, 1.0)
    u = GridFunction(grid, np.ones(grid.n_nodes), Zero())
    assert u.exterior == Zero()
    with pytest.raises(GridMismatch):
        GridFunction(grid, np.ones(grid.n_nodes + 1))
    bad = np.ones(grid.n_nodes)
    bad[0] = np.inf
    with pytest.raises(BadConfig):
        GridFunction(grid, bad)
    with pytest.raises(BadConfig):
        GridFunction(grid, np.ones(grid.n_nodes), exterior="zero")


def test_exterior_kinds():
    grid = build_graded(16, 1.0)
    vals = np.ones(grid.n_nodes)
    assert GridFunction(grid, vals, Constant(2.0)).exterior.value == 2.0
    tail = GridFunction(grid, vals, PowerTail(-0.5, 3.0)).exterior
    assert tail.tau == -0.5 and tail.amplitude == 3.0


def test_csv_round_trip(tmp_path):
    grid = build_graded(16, 2.0)
    gpath = tmp_path / "grid.csv"
    grid.to_csv(gpath)
    rows = gpath.read_text().strip().splitlines()
    assert rows[0] == "x"
    assert len(rows) == grid.n_nodes + 1
    assert float(rows[1]) == grid.nodes[0]

    u = GridFunction(grid, grid.nodes ** 2)
    upath = tmp_path / "u.csv"
    u.to_csv(upath)
    rows = upath.read_text().strip().splitlines()
    assert rows[0] == "x,value"
    x0, v0 = rows[1].split(",")
    assert float(v0) == float(x0) ** 2
