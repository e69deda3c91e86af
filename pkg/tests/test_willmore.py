import math

import numpy as np
import pytest

from willmorelab.catalog import (
    IsoparametricSpec,
    clifford_torus,
    product_spheres,
    resolve,
    round_sphere,
    round_sphere_spec,
    torus_family_patch,
    veronese,
    willmore_torus,
)
from willmorelab.grids import QuadratureGrid
from willmorelab.linalg import SymmetricMatrix
from willmorelab.tensors import ShapeFamily
from willmorelab.willmore import (
    AT_THRESHOLD_UNRECOGNIZED,
    OUTSIDE_PINCHING_RANGE,
    TOTALLY_UMBILIC,
    VERONESE,
    WILLMORE_TORUS,
    classify_willmore,
    el_residual_isoparametric,
    el_residual_surface,
    grid_integral,
    pinching_integral,
    pinching_threshold,
    willmore_energy,
)


def _spec_from_diagonal(diag, p=1):
    diag = np.asarray(diag, dtype=float)
    mats = tuple(SymmetricMatrix(np.diag(diag)) for _ in range(p))
    return IsoparametricSpec(len(diag), p, ShapeFamily(len(diag), p, mats))


def test_energy_of_balanced_square_torus():
    patch, _ = clifford_torus(1, 2)
    grid = QuadratureGrid.for_patch(patch, 64)
    val = willmore_energy(patch, grid)
    assert abs(val - 4.0 * math.pi**2) < 1e-9


def test_energy_of_great_sphere_vanishes():
    patch = round_sphere(2, 1, 1.0)
    grid = QuadratureGrid.for_patch(patch, 32)
    assert abs(willmore_energy(patch, grid)) < 1e-12


def test_energy_of_projective_plane_surface():
    patch = veronese()
    grid = QuadratureGrid.for_patch(patch, 32)
    assert abs(willmore_energy(patch, grid) - 8.0 * math.pi) < 1e-9


def test_energy_grid_domain_mismatch():
    patch, _ = clifford_torus(1, 2)
    other = QuadratureGrid.for_patch(veronese(), 16)
    with pytest.raises(ValueError, match="domain"):
        willmore_energy(patch, other)


def test_grid_integral_flat_area_and_shape_check():
    patch, _ = clifford_torus(1, 2)
    grid = QuadratureGrid.for_patch(patch, 32)
    area = grid_integral(patch, grid, np.ones(grid.shape))
    assert abs(area - 2.0 * math.pi**2) < 1e-10
    with pytest.raises(ValueError, match="shape"):
        grid_integral(patch, grid, np.ones((3, 3)))


def test_pinching_threshold_table():
    assert pinching_threshold(2, 1, "simons") == 2.0
    assert pinching_threshold(3, 1, "simons") == 3.0
    assert pinching_threshold(2, 2, "simons") == 4.0 / 3.0
    assert pinching_threshold(4, 3, "simons") == 4.0 / (2.0 - 1.0 / 3.0)
    assert pinching_threshold(3, 2, "li") == 2.0
    with pytest.raises(ValueError, match="mode"):
        pinching_threshold(2, 1, "strict")
    with pytest.raises(ValueError):
        pinching_threshold(0, 1, "simons")


def test_pinching_integral_vanishes_at_threshold():
    patch, _ = willmore_torus(1, 2)
    grid = QuadratureGrid.for_patch(patch, 48)
    assert abs(pinching_integral(patch, grid)) < 1e-10
    vpatch = veronese()
    vgrid = QuadratureGrid.for_patch(vpatch, 32)
    assert abs(pinching_integral(vpatch, vgrid, mode="simons")) < 1e-10


def test_pinching_integral_negative_off_threshold():
    patch, _ = product_spheres((1, 1, 1))
    grid = QuadratureGrid.for_patch(patch, 12)
    assert pinching_integral(patch, grid) < -1.0


def test_isoparametric_residual_vanishes_for_balanced_tori():
    for m, n in [(1, 2), (1, 3), (2, 3), (2, 4), (3, 5)]:
        res = el_residual_isoparametric(willmore_torus(m, n)[1])
        assert res.is_zero, (m, n, res.norm)
        assert abs(res.scale - math.sqrt(n) ** (n - 2)) < 1e-12 or n == 2


def test_isoparametric_residual_detects_unbalanced_minimal_tori():
    res = el_residual_isoparametric(clifford_torus(1, 3)[1])
    assert abs(res.values[0] + 3.0 / math.sqrt(2.0)) < 1e-12
    assert not res.is_zero
    balanced = el_residual_isoparametric(clifford_torus(1, 2)[1])
    assert balanced.is_zero


def test_isoparametric_residual_odd_umbilic_guard():
    with pytest.raises(ValueError, match="odd"):
        el_residual_isoparametric(round_sphere_spec(3, 1, 0.9))
    res = el_residual_isoparametric(round_sphere_spec(2, 1, 0.9))
    assert res.is_zero and res.scale == 1.0


def test_surface_residual_dimension_guards():
    patch3, _ = willmore_torus(1, 3)
    with pytest.raises(ValueError, match="2-dimensional"):
        el_residual_surface(patch3, QuadratureGrid.for_patch(patch3, 8))
    vp = veronese()
    with pytest.raises(ValueError, match="codimension"):
        el_residual_surface(vp, QuadratureGrid.for_patch(vp, 8))


def test_surface_residual_vanishes_on_critical_surfaces():
    patch, _ = clifford_torus(1, 2)
    grid = QuadratureGrid.for_patch(patch, 32)
    assert el_residual_surface(patch, grid).max_norm < 1e-10
    sphere = round_sphere(2, 1, 0.8)
    sgrid = QuadratureGrid.for_patch(sphere, 32)
    assert el_residual_surface(sphere, sgrid).max_norm < 1e-6


def test_surface_residual_magnitude_on_distorted_torus():
    patch, spec = torus_family_patch(1, 2, 0.6)
    grid = QuadratureGrid.for_patch(patch, 64)
    res = el_residual_surface(patch, grid)
    expect = spec.mean_norm * spec.rho_sq
    assert abs(expect - (7.0 / 24.0) * (625.0 / 288.0)) < 1e-12
    assert abs(res.max_norm - expect) < 1e-4


def test_classifier_umbilic_branch():
    spec = round_sphere_spec(2, 1, 1.0)
    out = classify_willmore(spec, spec.rho_sq)
    assert out.kind == TOTALLY_UMBILIC


def test_classifier_torus_branch_with_mirror_index():
    spec = willmore_torus(2, 5)[1]
    out = classify_willmore(spec, spec.rho_sq)
    assert out.kind == WILLMORE_TORUS
    assert out.m == 2 and out.mirror == 3
    flipped = IsoparametricSpec(
        5,
        1,
        ShapeFamily(5, 1, (SymmetricMatrix(-spec.constant_shape.matrices[0].data),)),
        tuple((-k, mult) for k, mult in spec.principal_curvatures),
    )
    out2 = classify_willmore(flipped, flipped.rho_sq)
    assert out2.kind == WILLMORE_TORUS
    assert out2.m == 3 and out2.mirror == 2


def test_classifier_projective_plane_branch():
    spec = resolve("veronese").spec
    out = classify_willmore(spec, spec.rho_sq)
    assert out.kind == VERONESE


def test_classifier_rejects_threshold_impostors():
    spec = _spec_from_diagonal([1.5, -0.5])
    assert abs(spec.rho_sq - 2.0) < 1e-12
    out = classify_willmore(spec, spec.rho_sq)
    assert out.kind == AT_THRESHOLD_UNRECOGNIZED


def test_classifier_flags_the_forbidden_gap():
    a = math.sqrt(0.5)
    spec = _spec_from_diagonal([a, -a, a, -a])
    out = classify_willmore(spec, spec.rho_sq)
    assert out.kind == OUTSIDE_PINCHING_RANGE
    assert "inside" in out.detail
    out_hi = classify_willmore(spec, 8.0)
    assert out_hi.kind == OUTSIDE_PINCHING_RANGE
    assert "exceeds" in out_hi.detail


def test_classifier_input_guards():
    spec = round_sphere_spec(2, 1, 1.0)
    with pytest.raises(ValueError):
        classify_willmore(spec, 1.0, tol=0.0)
    with pytest.raises(ValueError):
        classify_willmore(spec, -0.5)
