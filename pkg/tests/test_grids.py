import math

import numpy as np
import pytest

from willmorelab.grids import AxisInterval, QuadratureGrid


def test_weights_sum_to_domain_volume():
    axes = (
        AxisInterval(0.0, 2.0 * math.pi, periodic=True),
        AxisInterval(0.0, math.pi, periodic=False),
    )
    grid = QuadratureGrid.for_axes(axes, (16, 9))
    assert abs(grid.weights().sum() - 2.0 * math.pi**2) < 1e-12
    assert grid.shape == (16, 9)
    assert grid.node_total == 16 * 9


def test_periodic_nodes_are_offset_from_endpoints():
    ax = AxisInterval(0.0, 2.0 * math.pi, periodic=True)
    grid = QuadratureGrid.for_axes((ax,), (8,))
    nodes = grid.nodes_1d[0]
    h = 2.0 * math.pi / 8
    assert abs(grid.spacing(0) - h) < 1e-15
    assert abs(nodes[0] - 0.5 * h) < 1e-15
    assert nodes.min() > 0.0 and nodes.max() < 2.0 * math.pi


def test_periodic_rule_integrates_trig_polynomials_exactly():
    ax = AxisInterval(0.0, 2.0 * math.pi, periodic=True)
    grid = QuadratureGrid.for_axes((ax,), (16,))
    t = grid.points()[:, 0]
    w = grid.weights()
    # modes below the node count integrate to machine zero
    for k in range(1, 8):
        assert abs(np.sum(w * np.cos(k * t))) < 1e-12
    assert abs(np.sum(w * np.cos(t) ** 2) - math.pi) < 1e-12


def test_gauss_nodes_integrate_high_degree_polynomials():
    ax = AxisInterval(-1.0, 1.0, periodic=False)
    grid = QuadratureGrid.for_axes((ax,), (6,))
    t = grid.points()[:, 0]
    w = grid.weights()
    for deg in range(0, 12):  # exact through degree 2*6 - 1
        val = np.sum(w * t**deg)
        exact = 0.0 if deg % 2 else 2.0 / (deg + 1)
        assert abs(val - exact) < 1e-13
    assert t.min() > -1.0 and t.max() < 1.0


def test_mixed_grid_point_ordering_is_row_major():
    axes = (
        AxisInterval(0.0, 1.0, periodic=True),
        AxisInterval(0.0, 2.0, periodic=True),
    )
    grid = QuadratureGrid.for_axes(axes, (2, 3))
    pts = grid.points()
    assert pts.shape == (6, 2)
    # the second axis varies fastest
    assert np.allclose(pts[0:3, 0], pts[0, 0])
    assert not np.allclose(pts[0, 1], pts[1, 1])


def test_per_axis_counts_and_validation():
    axes = (
        AxisInterval(0.0, 1.0, periodic=True),
        AxisInterval(0.0, 1.0, periodic=True),
    )
    grid = QuadratureGrid.for_axes(axes, (4, 8))
    assert grid.counts == (4, 8)
    with pytest.raises(ValueError):
        QuadratureGrid.for_axes(axes, (4,))
    with pytest.raises(ValueError):
        QuadratureGrid.for_axes(axes, (0, 8))


def test_spacing_requires_periodic_axis():
    axes = (AxisInterval(0.0, 1.0, periodic=False),)
    grid = QuadratureGrid.for_axes(axes, (8,))
    with pytest.raises(ValueError):
        grid.spacing(0)


def test_matches_domain():
    axes = (AxisInterval(0.0, 2.0 * math.pi, periodic=True),)
    grid = QuadratureGrid.for_axes(axes, (8,))
    assert grid.matches_domain(axes)
    other = (AxisInterval(0.0, math.pi, periodic=True),)
    assert not grid.matches_domain(other)


def test_axis_interval_validation():
    with pytest.raises(ValueError):
        AxisInterval(1.0, 0.0)
