"""Shell parameters and central-angle computation."""

import math

import numpy as np
import pytest

from sphgreen.geometry import (
    BetaImaginary,
    DegenerateSeparation,
    EvalPoint,
    InvalidParams,
    SphericalPoint,
    central_angle,
    make_params,
)


def test_antipodal_on_equator():
    p = central_angle(SphericalPoint(math.pi / 2, 0.0), SphericalPoint(math.pi / 2, math.pi))
    assert p.gamma == math.pi
    assert p.cos_gamma == -1.0


def test_pole_to_equator_ignores_longitude():
    p = central_angle(SphericalPoint(0.0, 0.0), SphericalPoint(math.pi / 2, 1.3))
    assert abs(p.gamma - math.pi / 2) < 1e-15
    assert abs(p.cos_gamma) < 1e-15


def test_law_of_cosines_example():
    # cos gamma = cos1 cos0.7 + sin1 sin0.7 cos0.9, evaluated independently
    expected_cos = math.cos(1.0) * math.cos(0.7) + math.sin(1.0) * math.sin(0.7) * math.cos(0.9)
    p = central_angle(SphericalPoint(1.0, 0.2), SphericalPoint(0.7, 1.1))
    assert abs(p.cos_gamma - expected_cos) < 1e-15
    assert abs(p.gamma - math.acos(expected_cos)) < 1e-15


def test_symmetry_bit_exact():
    rng = np.random.default_rng(5)
    for _ in range(200):
        a = SphericalPoint(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
        b = SphericalPoint(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
        try:
            pab = central_angle(a, b)
            pba = central_angle(b, a)
        except DegenerateSeparation:
            continue
        assert pab.gamma == pba.gamma
        assert pab.cos_gamma == pba.cos_gamma


def test_antipode_property():
    rng = np.random.default_rng(6)
    for _ in range(200):
        a = SphericalPoint(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
        bar = SphericalPoint(math.pi - a.theta, (a.phi + math.pi) % (2 * math.pi))
        p = central_angle(a, bar)
        assert abs(p.cos_gamma + 1.0) < 1e-14


def test_coincident_points_rejected():
    a = SphericalPoint(1.0, 2.0)
    with pytest.raises(DegenerateSeparation):
        central_angle(a, SphericalPoint(1.0, 2.0))
    with pytest.raises(DegenerateSeparation):
        central_angle(a, SphericalPoint(1.0, 2.0 + 1e-12))


def test_make_params_earth():
    p = make_params(6371.0, 1000.0)
    assert p.gamma_star == 1000.0 / 6371.0          # 0.15696123...
    assert abs(p.gamma_star - 0.15696123) < 1e-8    # matches the table caption
    assert abs(p.beta - math.sqrt(6.371**2 - 0.25)) < 1e-13
    assert abs(p.beta - 6.351349541632865) < 1e-12


def test_make_params_unit_ratio():
    p = make_params(1000.0, 1000.0)
    assert p.gamma_star == 1.0
    assert p.w == 1.0
    assert p.beta == math.sqrt(0.75)


def test_derived_invariants():
    for r, ld in [(6371.0, 1000.0), (6371.0, 50.0), (7000.0, 2000.0)]:
        p = make_params(r, ld)
        assert p.w == 1.0 / p.gamma_star**2
        assert abs(p.beta**2 + 0.25 - p.w) <= 1e-14 * p.w


def test_scaling_invariance():
    base = make_params(6371.0, 1000.0)
    for k in (1e-3, 2.0, 7.5, 1e4):
        scaled = make_params(k * 6371.0, k * 1000.0)
        assert abs(scaled.gamma_star - base.gamma_star) <= 1e-15 * base.gamma_star
        assert abs(scaled.w - base.w) <= 1e-15 * base.w


def test_param_validation():
    with pytest.raises(InvalidParams):
        make_params(0.0, 1000.0)
    with pytest.raises(InvalidParams):
        make_params(6371.0, -1.0)
    with pytest.raises(BetaImaginary):
        make_params(1000.0, 2000.0)
    with pytest.raises(BetaImaginary):
        make_params(1000.0, 2000.1)


def test_eval_point_constructors():
    p = EvalPoint.from_gamma(math.pi)
    assert p.cos_gamma == -1.0 and p.one_minus_cos == 2.0
    q = EvalPoint.from_cos(0.0)
    assert q.gamma == math.acos(0.0) and q.one_minus_cos == 1.0
    with pytest.raises(ValueError):
        EvalPoint.from_gamma(0.0)
    with pytest.raises(ValueError):
        EvalPoint.from_gamma(math.pi + 1e-9)
    with pytest.raises(DegenerateSeparation):
        EvalPoint.from_gamma(1e-9)
    with pytest.raises(DegenerateSeparation):
        EvalPoint.from_cos(1.0)
    with pytest.raises(ValueError):
        EvalPoint.from_cos(-1.0000001)


def test_eval_point_cos_consistency():
    rng = np.random.default_rng(9)
    for gamma in rng.uniform(1e-6, math.pi, 300):
        p = EvalPoint.from_gamma(gamma)
        # both routes are within ~1.5 ulp of the true cosine
        assert abs(p.cos_gamma - math.cos(gamma)) < 5e-16
        assert p.one_minus_cos > 0.0
