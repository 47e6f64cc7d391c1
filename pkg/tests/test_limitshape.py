import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from grothendieck.core import DegenerateAllZero, InvalidRegime, PoleProximity, StencilLeavesLiquid
from grothendieck.limitshape import (
    AsymptoticParams, L_slope, W_slope, boundary_slope_check, boundary_tau, boundary_xi,
    burgers_residual, classify_point, cubic_coefficients, cubic_roots, cusp_discriminant_closed_form,
    cusp_point, cusp_polynomial, cubic_discriminant, frozen_boundary, gradient_grid, height_surface,
    limit_shape, root_residual, row_structure, shape_W)

P6 = AsymptoticParams(1 / 3, 1 / 5, -6)
P25 = AsymptoticParams(1 / 3, 1 / 5, -25)

params = st.tuples(st.floats(0.05, 0.9), st.floats(0.05, 0.9), st.floats(-30, -0.01))


@pytest.fixture(scope="module")
def shape6():
    return limit_shape(P6, tau_steps=50, xi_points=200)


@settings(max_examples=40, deadline=None)
@given(params, st.floats(0.01, 4), st.floats(0.01, 0.99))
def test_cubic_roots_residual(pr, xi, tau):
    p = AsymptoticParams(*pr)
    for z in cubic_roots(p, xi, tau):
        assert root_residual(p, xi, tau, z) < 1e-9


def test_tau_one_has_root_at_beta():
    for xi in (0.3, 1.0, 2.5):
        roots = cubic_roots(P6, xi, 1.0)
        assert np.min(np.abs(roots - P6.beta)) < 1e-9


def test_boundary_is_double_root():
    # the cubic and its z-derivative both vanish at the curve parameter
    for z in (-7.5, -3.0, -0.4, 0.1, 1.0, 4.0):
        xi, tau = float(boundary_xi(P6, z)), float(boundary_tau(P6, z))
        c = cubic_coefficients(P6, xi, tau)
        poly = np.array([float(np.asarray(v)) for v in c])
        scale = np.abs(poly).sum() * max(1, abs(z)) ** 3
        assert abs(np.polyval(poly, z)) / scale < 1e-12
        assert abs(np.polyval(np.polyder(poly), z)) / scale < 1e-12


def test_boundary_touches_top_at_beta():
    assert float(boundary_tau(P6, P6.beta)) == pytest.approx(1.0, abs=1e-15)


def test_boundary_slope():
    for z in (-4.0, -1.0, 0.5):
        got, want = boundary_slope_check(P6, z)
        assert abs(abs(got) - abs(want)) < 1e-5 * max(1, abs(want))


def test_pole_proximity():
    with pytest.raises(PoleProximity):
        frozen_boundary(P6, [0.1, P6.y])
    with pytest.raises(PoleProximity):
        frozen_boundary(P6, [1 / P6.x])


@settings(max_examples=20, deadline=None)
@given(params)
def test_cusp_discriminant_closed_form(pr):
    p = AsymptoticParams(*pr)
    d = cubic_discriminant(cusp_polynomial(p))
    want = cusp_discriminant_closed_form(p)
    assert abs(d - want) <= 1e-9 * max(1.0, abs(want))
    assert want < 0  # one real cusp


def test_cusp_point_value():
    xi, tau, z = cusp_point(P6)
    assert (round(xi, 4), round(tau, 4), round(z, 3)) == (0.9108, 0.7286, -1.362)


def test_cusp_flattens_for_large_negative_beta():
    ratios = []
    for b in (-1e2, -1e4, -1e6):
        xi, tau, _ = cusp_point(AsymptoticParams(1 / 3, 1 / 5, b))
        ratios.append(xi / (1 - tau))
    assert abs(ratios[-1] - 1) < abs(ratios[0] - 1)


def test_burgers_second_order():
    r1 = burgers_residual(P6, 1.0, 0.5, 1e-3)
    r2 = burgers_residual(P6, 1.0, 0.5, 5e-4)
    assert r1 / r2 == pytest.approx(4, rel=0.05)
    assert burgers_residual(P6, 1.0, 0.5, 1e-4) < 1e-4
    with pytest.raises(StencilLeavesLiquid):
        burgers_residual(P6, 1.0, 0.5, 10.0)


def test_classify_point():
    assert classify_point(P6, 1.0, 0.5).zone == "LIQUID"
    assert classify_point(P6, 50.0, 0.5).zone == "Ia"


def test_regimes():
    with pytest.raises(InvalidRegime):
        AsymptoticParams(1 / 3, 1 / 5, 0.1)
    with pytest.raises(InvalidRegime):
        AsymptoticParams(2, 1, -1)
    AsymptoticParams(1 / 3, 1 / 5, 1 / 12, allow_positive_beta=True).conjectural


def test_shape_basic_properties(shape6):
    sg = shape6
    assert np.all(np.abs(sg.H[:, 0] - 1) < 1e-9)
    assert np.all(np.diff(sg.H, axis=1) <= 1e-12)          # h decreases in xi
    assert sg.L[-1] == 0
    assert np.all(np.diff(sg.L) < 0)
    W = np.array(shape_W(sg))
    assert np.all(W[:, 1] >= np.abs(W[:, 0]) - 1e-9)
    lip = np.abs(np.diff(W[:, 1]) / np.diff(W[:, 0]))
    assert lip.max() <= 1 + 1e-9


def test_gradient_triangle(shape6):
    gx, gt = gradient_grid(shape6)
    # beta < 0 gives 0 <= Arg(z - beta) <= Arg z <= pi, hence -1 <= h_xi <= h_tau <= 0
    assert np.all(gx >= -1 - 1e-9)
    assert np.all(gt >= gx - 1e-9)
    assert np.all(gt <= 1e-9)


def test_step_refinement():
    taus = [0.2, 0.5, 0.725, 0.9]
    a = height_surface(P6, taus, xi_max=4.0, step=0.02)
    b = height_surface(P6, taus, xi_max=4.0, step=0.01)
    assert np.max(np.abs(a.H - b.H[:, ::2])) < 1e-6


def test_zone_two_everywhere_at_large_negative_beta():
    for t in np.linspace(0.05, 0.95, 7):
        row = row_structure(P25, float(t), 15.0)
        assert any(s.zone == "II" for s in row.stretches)


def test_slopes_on_zone_two():
    t = 0.5
    row = row_structure(P25, t, 15.0)
    s = next(s for s in row.stretches if s.zone == "II")
    mid = 0.5 * (s.lo + s.hi)
    assert L_slope(P25, mid, t) == pytest.approx(-2)
    # W_slope takes (u, W) with xi = u + 1 and tau = (W - u) / 2
    assert W_slope(P25, mid - 1, mid - 1 + 2 * t) == pytest.approx(0, abs=1e-12)


def test_slopes_match_finite_differences(shape6):
    sg = shape6
    k = 20
    t = sg.tau_grid[k]
    fd = (sg.L[k + 1] - sg.L[k - 1]) / (sg.tau_grid[k + 1] - sg.tau_grid[k - 1])
    assert L_slope(P6, sg.L[k], t) == pytest.approx(fd, rel=5e-3, abs=5e-3)
    W = np.array(shape_W(sg))
    fdw = (W[k + 1, 1] - W[k - 1, 1]) / (W[k + 1, 0] - W[k - 1, 0])
    assert W_slope(P6, W[k, 0], W[k, 1]) == pytest.approx(fdw, abs=5e-3)


def test_degenerate_all_zero():
    from grothendieck.limitshape import solve_cubic
    with pytest.raises(DegenerateAllZero):
        solve_cubic(0.0, 0.0, 0.0, 0.0)
