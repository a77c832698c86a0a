"""The frozen references agree with freshly computed oracle values, and the oracles agree with each other."""

import math

import mpmath as mp
import pytest

import oracles
import reference_values as ref


@pytest.mark.parametrize("key", sorted(ref.ML))
def test_frozen_ml_values(key):
    alpha, beta, z = key
    if abs(z) ** (1 / alpha) > 100:
        # the power series would need ~|z|^(1/alpha) terms; the integral representation does not
        value = oracles.ml_integral(alpha, beta, z)
    else:
        value = oracles.ml_series(alpha, beta, z, nterms=1200, dps=80)
    assert float(value) == pytest.approx(ref.ML[key], rel=1e-15)


def test_frozen_derivative():
    value = oracles.ml_series(0.5, 1.0, -1.0, deriv=1)
    assert float(value) == pytest.approx(ref.DML[(0.5, 1.0, -1.0)], rel=1e-15)


def test_series_matches_integral_representation():
    for alpha, beta, z in [(0.5, 1.0, -1.0), (0.35, 1.0, -2.0), (0.5, 0.5, -4.0)]:
        a = oracles.ml_series(alpha, beta, z, nterms=1200, dps=80)
        b = oracles.ml_integral(alpha, beta, z)
        assert float(abs(a - b)) < 1e-25 * max(1.0, float(abs(a)))


def test_half_order_closed_form():
    for z in (-3.0, -1.0, 0.5, 2.0):
        assert float(oracles.ml_series(0.5, 1.0, z, nterms=600)) == pytest.approx(float(oracles.ml_half(z)), rel=1e-30)


def test_solution_references():
    s = oracles.ml_series
    r1, r2 = -1.0, -2.0
    thm1 = s(0.5, 0.5, r1) + s(0.5, 0.5, r2)
    assert float(thm1) == pytest.approx(ref.THM1_U1, rel=1e-15)
    with mp.workdps(60):
        x = mp.mpf(2) ** mp.mpf(0.4)
        thm2 = 1.5 * s(0.4, 1.0, -0.5 * x, nterms=600) - 0.5 * s(0.4, 1.0, -1.5 * x, nterms=600)
    assert float(thm2) == pytest.approx(ref.THM2_U2, rel=1e-15)
    assert float(s(0.5, 1.0, -2.0, nterms=600)) == pytest.approx(ref.THM4_U4, rel=1e-15)


def test_elementary():
    assert float(mp.exp(-30)) == pytest.approx(ref.EXP_M30, rel=1e-16)
    assert math.cosh(2.0) == pytest.approx(ref.COSH_2, rel=1e-15)
