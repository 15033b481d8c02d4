"""Spherical-harmonic transforms and the two PDE solution routes."""

import math

import numpy as np
import pytest

from sphgreen.geometry import central_angle, make_params, SphericalPoint
from sphgreen.legendre import legendre_all
from sphgreen.spectral import (
    HarmonicCoeffs,
    SphereField,
    SphereGrid,
    UnderResolved,
    analyze,
    kernel_table,
    l2_discrepancy,
    norm_assoc_legendre,
    solve_convolution,
    solve_spectral,
    synthesize,
)

EARTH = make_params(6371.0, 1000.0)
GRID = SphereGrid.build(33, 65, 6371.0)


def harmonic_field(grid, l, m, amplitude=1.0):
    c = np.zeros((16 + 1) ** 2)
    c[l * (l + 1) + m] = amplitude
    return synthesize(HarmonicCoeffs(16, c), grid)


# explicit low-degree harmonics, written out independently of the recurrence
def y10(theta, phi):
    return math.sqrt(3.0 / (4 * math.pi)) * np.cos(theta)


def y21(theta, phi):
    return math.sqrt(15.0 / (4 * math.pi)) * np.sin(theta) * np.cos(theta) * np.cos(phi)


def y3m2(theta, phi):
    return math.sqrt(105.0 / (16 * math.pi)) * np.sin(theta) ** 2 * np.cos(theta) * np.sin(2 * phi)


def grid_eval(grid, fn):
    th = grid.theta[:, None]
    ph = grid.phi[None, :]
    return SphereField(grid, np.broadcast_to(fn(th, ph), (grid.n_theta, grid.n_phi)).copy())


def test_grid_total_area():
    area = 4 * math.pi * 6371.0**2
    assert abs(GRID.total_area() - area) < 1e-12 * area


def test_recurrence_matches_explicit_harmonics():
    table = norm_assoc_legendre(4, GRID.x)
    th = GRID.theta
    # m = 0, l = 1 row against sqrt(3/4pi) cos(theta)
    assert np.allclose(table[0][1], math.sqrt(3 / (4 * math.pi)) * np.cos(th), rtol=1e-13)
    # m = 1, l = 2: Y21 = sqrt(2) Pbar cos(phi)
    assert np.allclose(
        math.sqrt(2) * table[1][1],
        math.sqrt(15 / (4 * math.pi)) * np.sin(th) * np.cos(th),
        rtol=1e-13,
    )


def test_norm_assoc_legendre_orthonormal_on_grid():
    # int Pbar_lm Pbar_l'm dx = delta / (2 pi) for every order m
    l_max = 12
    table = norm_assoc_legendre(l_max, GRID.x)
    for m in (0, 3, 12):
        rows = table[m]
        gram = (rows * GRID.gl_weights) @ rows.T * (2.0 * math.pi)
        assert np.allclose(gram, np.eye(rows.shape[0]), atol=1e-12)


def test_analyze_picks_out_y21():
    f = grid_eval(GRID, y21)
    c = analyze(f, 4)
    assert abs(c.get(2, 1) - 1.0) < 1e-12
    others = np.delete(c.coeffs, 2 * 3 + 1)
    assert np.max(np.abs(others)) < 1e-12


def test_analyze_constant_field():
    c_val = 2.75
    f = SphereField(GRID, np.full((33, 65), c_val))
    c = analyze(f, 4)
    assert abs(c.get(0, 0) - c_val * math.sqrt(4 * math.pi)) < 1e-12
    assert np.max(np.abs(c.coeffs[1:])) < 1e-12


def test_analyze_linear_combination():
    f = SphereField(GRID, grid_eval(GRID, y3m2).values + 0.5 * grid_eval(GRID, y10).values)
    c = analyze(f, 5)
    assert abs(c.get(3, -2) - 1.0) < 1e-12
    assert abs(c.get(1, 0) - 0.5) < 1e-12
    drop = [3 * 4 - 2, 1 * 2 + 0]
    others = np.delete(c.coeffs, drop)
    assert np.max(np.abs(others)) < 1e-12


def test_round_trip_band_limited():
    rng = np.random.default_rng(31)
    coeffs = HarmonicCoeffs(16, rng.standard_normal(17**2))
    f = synthesize(coeffs, GRID)
    back = analyze(f, 16)
    assert np.max(np.abs(back.coeffs - coeffs.coeffs)) < 1e-11
    again = synthesize(back, GRID)
    assert np.max(np.abs(again.values - f.values)) < 1e-11


def test_single_harmonic_synthesis_amplitude():
    f = harmonic_field(GRID, 5, 3, amplitude=2.0)
    table = norm_assoc_legendre(5, GRID.x)
    direct = 2.0 * math.sqrt(2) * np.outer(table[3][2], np.cos(3 * GRID.phi))
    assert np.max(np.abs(f.values - direct)) < 1e-12


def test_addition_theorem():
    rng = np.random.default_rng(32)
    for _ in range(50):
        a = SphericalPoint(rng.uniform(0.05, math.pi - 0.05), rng.uniform(0, 2 * math.pi))
        b = SphericalPoint(rng.uniform(0.05, math.pi - 0.05), rng.uniform(0, 2 * math.pi))
        gamma = central_angle(a, b)
        pl = legendre_all(gamma.cos_gamma, 8).values
        ta = norm_assoc_legendre(8, np.array([math.cos(a.theta)]))
        tb = norm_assoc_legendre(8, np.array([math.cos(b.theta)]))
        for l in range(9):
            s = ta[0][l, 0] * tb[0][l, 0]
            for m in range(1, l + 1):
                ya = math.sqrt(2) * ta[m][l - m, 0]
                yb = math.sqrt(2) * tb[m][l - m, 0]
                s += ya * yb * (
                    math.cos(m * a.phi) * math.cos(m * b.phi)
                    + math.sin(m * a.phi) * math.sin(m * b.phi)
                )
        assert abs(4 * math.pi / (2 * l + 1) * s - pl[l]) < 1e-12


def test_under_resolved():
    f = SphereField(GRID, np.zeros((33, 65)))
    with pytest.raises(UnderResolved):
        analyze(f, 33)
    with pytest.raises(UnderResolved):
        solve_spectral(f, EARTH, 40)


def test_field_validation():
    with pytest.raises(ValueError):
        SphereField(GRID, np.zeros((4, 4)))
    bad = np.zeros((33, 65))
    bad[0, 0] = np.inf
    with pytest.raises(ValueError):
        SphereField(GRID, bad)


# ------------------------------------------------------------- solvers

def test_spectral_solver_is_diagonal():
    for l, m in [(2, 0), (5, -3), (8, 8)]:
        f = harmonic_field(GRID, l, m)
        psi = solve_spectral(f, EARTH, 12)
        denom = -l * (l + 1) / 6371.0**2 - 1.0 / 1000.0**2
        assert np.max(np.abs(psi.values - f.values / denom)) < 1e-10 * abs(1 / denom)


def test_spectral_solver_constant_forcing():
    c_val = 3.5
    f = SphereField(GRID, np.full((33, 65), c_val))
    psi = solve_spectral(f, EARTH, 8)
    assert np.max(np.abs(psi.values + c_val * 1000.0**2)) < 1e-9 * 1000.0**2


def test_spectral_solver_residual():
    # apply the operator back through the transforms and recover the forcing
    rng = np.random.default_rng(33)
    l_max = 32
    grid = SphereGrid.build(40, 81, 6371.0)
    coeffs = rng.standard_normal((l_max + 1) ** 2)
    f = synthesize(HarmonicCoeffs(l_max, coeffs), grid)
    psi = solve_spectral(f, EARTH, l_max)
    u = analyze(psi, l_max)
    ls = np.repeat(np.arange(l_max + 1), 2 * np.arange(l_max + 1) + 1)
    lap = u.coeffs * (-ls * (ls + 1) / 6371.0**2) - u.coeffs / 1000.0**2
    resid = lap - coeffs
    assert np.linalg.norm(resid) <= 1e-10 * np.linalg.norm(coeffs)


def test_spectral_solver_self_adjoint():
    rng = np.random.default_rng(34)
    f = synthesize(HarmonicCoeffs(10, rng.standard_normal(121)), GRID)
    g = synthesize(HarmonicCoeffs(10, rng.standard_normal(121)), GRID)
    psi_f = solve_spectral(f, EARTH, 16)
    psi_g = solve_spectral(g, EARTH, 16)
    w = GRID.row_weights[:, None]
    lhs = float((w * psi_f.values * g.values).sum())
    rhs = float((w * f.values * psi_g.values).sum())
    assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), abs(rhs))


def test_spectral_solver_sign():
    rng = np.random.default_rng(35)
    f = SphereField(GRID, rng.uniform(0.1, 1.0, (33, 65)))
    psi = solve_spectral(f, EARTH, 16)
    assert analyze(psi, 2).get(0, 0) < 0.0


def test_convolution_zero_field():
    f = SphereField(GRID, np.zeros((33, 65)))
    psi = solve_convolution(f, EARTH)
    assert np.max(np.abs(psi.values)) == 0.0


def test_convolution_matches_spectral_single_harmonic():
    f = harmonic_field(GRID, 2, 0)
    psi_s = solve_spectral(f, EARTH, 8)
    psi_c = solve_convolution(f, EARTH, eps=1e-12)
    assert l2_discrepancy(psi_c, psi_s) <= 1e-3


def test_convolution_quadrature_evaluator_agrees():
    grid = SphereGrid.build(9, 19, 6371.0)
    f = SphereField(grid, np.cos(grid.theta)[:, None] * np.ones((9, 19)))
    a = solve_convolution(f, EARTH, eps=1e-12, evaluator="split")
    b = solve_convolution(f, EARTH, eps=1e-12, evaluator="quadrature")
    assert l2_discrepancy(a, b) < 1e-8
    with pytest.raises(ValueError):
        solve_convolution(f, EARTH, evaluator="direct")


def gaussian_bump(grid, params):
    th0, ph0 = 1.0, 1.0
    th = grid.theta[:, None]
    ph = grid.phi[None, :]
    cosd = np.cos(th) * math.cos(th0) + np.sin(th) * math.sin(th0) * np.cos(ph - ph0)
    gam = np.arccos(np.clip(cosd, -1.0, 1.0))
    return SphereField(grid, np.exp(-((gam / (5.0 * params.gamma_star)) ** 2)))


def test_convolution_matches_spectral_gaussian_bump():
    f = gaussian_bump(GRID, EARTH)
    psi_s = solve_spectral(f, EARTH, 32)
    psi_c = solve_convolution(f, EARTH, eps=1e-12)
    assert l2_discrepancy(psi_c, psi_s) <= 1e-2


def test_convolution_refinement_trend():
    discs = []
    for n_t, n_p in [(17, 33), (33, 65)]:
        grid = SphereGrid.build(n_t, n_p, 6371.0)
        f = gaussian_bump(grid, EARTH)
        psi_s = solve_spectral(f, EARTH, 16)
        psi_c = solve_convolution(f, EARTH, eps=1e-12)
        discs.append(l2_discrepancy(psi_c, psi_s))
    assert discs[1] <= discs[0] / 1.5


def test_kernel_table_diagonal_patch():
    # diagonal entries hold the disk-averaged kernel: finite, negative, and
    # roughly the kernel one cell-radius out
    grid = SphereGrid.build(9, 19, 6371.0)
    tab = kernel_table(EARTH, grid, eps=1e-12)
    assert np.all(np.isfinite(tab))
    for i in range(9):
        assert tab[i, i, 0] < 0.0
        assert tab[i, i, 0] < tab[i, i, 1] < 0.0  # singular cell deeper than neighbour
