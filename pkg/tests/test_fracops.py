import math

import numpy as np
import pytest

from mlorder.errors import DomainError
from mlorder.fdesolve import FdeProblem, solve, solve_thm4
from mlorder.fracops import (
    SampledFunction,
    caputo_derivative,
    caputo_derivative_all,
    fde_residual,
    grunwald_weights,
    rl_derivative,
    rl_derivative_all,
    rl_integral,
    rl_integral_all,
    sequential_derivative,
)
from mlorder.mlcore import MLParams, ml

INV_GAMMA_15 = 1.1283791670955126  # 1/Gamma(1.5)


def grid(f, t_end, n):
    return SampledFunction.from_callable(f, 0.0, t_end / n, n)


def observed_order(errors):
    return [math.log2(a / b) for a, b in zip(errors, errors[1:])]


# -- carrier ------------------------------------------------------------------------------


def test_sampled_function_validation():
    with pytest.raises(DomainError):
        SampledFunction(0.0, 0.0, [1.0])
    with pytest.raises(DomainError):
        SampledFunction(-1.0, 0.1, [1.0])
    with pytest.raises(DomainError):
        SampledFunction(0.0, 0.1, [])
    with pytest.raises(DomainError):
        SampledFunction(0.0, 0.1, [1.0, math.nan])
    f = grid(lambda t: t, 1.0, 4)
    assert f.times == pytest.approx([0, 0.25, 0.5, 0.75, 1.0])


# -- RL integral ------------------------------------------------------------------------


def test_rl_integral_examples():
    assert rl_integral(grid(lambda t: 1.0, 1.0, 64), 0.5, 64) == pytest.approx(INV_GAMMA_15, rel=1e-13)
    assert rl_integral(grid(lambda t: t, 2.0, 64), 1.0, 64) == pytest.approx(2.0, rel=1e-13)
    assert rl_integral(grid(lambda t: t, 1.0, 64), 0.5, 64) == pytest.approx(0.7522527780636751, rel=1e-13)


def test_rl_integral_errors():
    f = grid(lambda t: t, 1.0, 8)
    with pytest.raises(DomainError):
        rl_integral(f, 0.0, 4)
    with pytest.raises(IndexError):
        rl_integral(f, 0.5, 0)
    with pytest.raises(IndexError):
        rl_integral(f, 0.5, 9)


def test_rl_integral_second_order():
    exact = 2.0 / math.gamma(3.5)  # I^0.5 t^2 at t = 1
    errors = [abs(rl_integral(grid(lambda t: t * t, 1.0, n), 0.5, n) - exact) for n in (32, 64, 128, 256)]
    for p in observed_order(errors):
        assert p == pytest.approx(2.0, abs=0.3)


@pytest.mark.parametrize("b1, b2", [(0.3, 0.4), (0.5, 0.5)])
def test_rl_integral_semigroup(b1, b2):
    n = 256
    f = grid(lambda t: t, 1.0, n)
    inner = f.with_values(rl_integral_all(f, b1))
    composed = rl_integral(inner, b2, n)
    direct = rl_integral(f, b1 + b2, n)
    assert composed == pytest.approx(direct, abs=5.0 / n**2)


# -- Caputo -----------------------------------------------------------------------------


def test_caputo_examples():
    assert caputo_derivative(grid(lambda t: t, 1.0, 64), 0.5, 64) == pytest.approx(INV_GAMMA_15, rel=1e-13)
    assert caputo_derivative(grid(lambda t: t * t, 1.0, 64), 1.5, 64) == pytest.approx(
        2.2567583341910251, rel=1e-12
    )


@pytest.mark.parametrize("beta", [0.2, 0.5, 0.9, 1.3, 1.8])
def test_caputo_kills_constants(beta):
    f = grid(lambda t: 7.5, 3.0, 50)
    assert np.max(np.abs(caputo_derivative_all(f, beta))) <= 1e-12


@pytest.mark.parametrize("beta", [0.0, 1.0, 2.0, -0.5])
def test_caputo_domain(beta):
    with pytest.raises(DomainError):
        caputo_derivative(grid(lambda t: t, 1.0, 8), beta, 4)


@pytest.mark.parametrize("beta", [0.3, 0.5, 0.7])
def test_caputo_l1_order(beta):
    exact = 2.0 / math.gamma(3.0 - beta)  # D^beta t^2 at t = 1
    errors = [abs(caputo_derivative(grid(lambda t: t * t, 1.0, n), beta, n) - exact) for n in (64, 128, 256, 512)]
    for p in observed_order(errors):
        assert p == pytest.approx(2.0 - beta, abs=0.3)


def test_caputo_reproduces_eigenfunction():
    # D^beta E_beta(r t^beta) = r E_beta(r t^beta)
    beta, r = 0.6, -1.0
    sol = solve_thm4(r, beta)
    n = 4096
    f = grid(sol.u, 4.0, n)
    d = caputo_derivative_all(f, beta)
    ts = f.times
    mask = ts >= 0.5
    rel = np.abs(d[mask] - r * f.values[mask]) / np.abs(r * f.values[mask])
    assert np.max(rel) <= 0.05


# -- Riemann-Liouville ------------------------------------------------------------------


def test_grunwald_weights():
    w = grunwald_weights(0.5, 5)
    expected = [(-1) ** k * math.gamma(1.5) / (math.gamma(k + 1) * math.gamma(1.5 - k)) for k in range(5)]
    assert w == pytest.approx(expected, rel=1e-14)


def test_rl_derivative_examples():
    n = 4096
    const = rl_derivative(grid(lambda t: 1.0, 1.0, n), 0.5, n)
    assert const == pytest.approx(0.5641895835477563, rel=2e-3)
    lin = rl_derivative(grid(lambda t: t, 1.0, n), 0.5, n)
    assert lin == pytest.approx(INV_GAMMA_15, rel=2e-3)


def test_rl_derivative_first_order():
    exact = 2.0 / math.gamma(2.5)  # D^0.5 t^2 at t = 1
    errors = [abs(rl_derivative(grid(lambda t: t * t, 1.0, n), 0.5, n) - exact) for n in (128, 256, 512, 1024)]
    for p in observed_order(errors):
        assert p == pytest.approx(1.0, abs=0.3)


def test_rl_derivative_near_one():
    n = 2048
    f = grid(lambda t: t * t, 2.0, n)
    d = rl_derivative_all(f, 0.999)
    ts = f.times
    assert np.max(np.abs(d[n // 4 :] - 2 * ts[n // 4 :])) < 0.02


@pytest.mark.parametrize("beta", [0.0, 1.0, 1.5])
def test_rl_derivative_domain(beta):
    with pytest.raises(DomainError):
        rl_derivative(grid(lambda t: t, 1.0, 8), beta, 4)


def test_starting_weights_make_singular_powers_exact():
    beta = 0.4
    exps = [beta - 1.0, 2 * beta - 1.0, 3 * beta - 1.0]
    n = 200
    h = 0.01
    for g in exps:
        vals = np.zeros(n + 1)
        vals[1:] = (h * np.arange(1, n + 1)) ** g
        d = rl_derivative_all(SampledFunction(0.0, h, vals), beta, exps)
        ts = h * np.arange(1, n + 1)
        exact = math.gamma(g + 1) / math.gamma(g + 1 - beta) * ts ** (g - beta) if g + 1 - beta > 0 else 0 * ts
        scale = np.maximum(np.abs(exact), 1.0)
        assert np.max(np.abs(d[1:] - exact) / scale) < 1e-8


# -- sequential ------------------------------------------------------------------------


def test_sequential_single_is_base():
    f = grid(lambda t: t**1.5, 1.0, 64)
    assert sequential_derivative(f, 0.4, 1, 64) == caputo_derivative(f, 0.4, 64)
    assert sequential_derivative(f, 0.4, 1, 64, base="rl") == rl_derivative(f, 0.4, 64)


def test_sequential_two_stage_power():
    exact = 1.0 / math.gamma(1.4)  # D^0.6 t at t = 1
    errors = [abs(sequential_derivative(grid(lambda t: t, 1.0, n), 0.3, 2, n) - exact) for n in (64, 256, 1024)]
    assert errors[-1] < 5e-3
    assert errors[0] > errors[1] > errors[2]


def test_sequential_constant():
    f = grid(lambda t: 2.0, 1.0, 32)
    for n in (1, 2):
        assert abs(sequential_derivative(f, 0.4, n, 32)) <= 1e-13


def test_sequential_errors():
    f = grid(lambda t: t, 1.0, 32)
    with pytest.raises(DomainError):
        sequential_derivative(f, 0.3, 3, 16)
    with pytest.raises(DomainError):
        sequential_derivative(f, 1.2, 2, 16)
    with pytest.raises(DomainError):
        sequential_derivative(f, 0.3, 2, 16, base="other")


# -- residuals ----------------------------------------------------------------------------


def test_residual_thm4():
    p = FdeProblem("thm4", 0.5, {"r": -1.0})
    rep = fde_residual(p, solve(p), 1 / 512, 4.0)
    assert rep.max_abs <= 0.05
    assert rep.converges
    assert rep.max_abs == np.max(np.abs(rep.residuals))


def test_residual_negative_control():
    sol = solve(FdeProblem("thm4", 0.5, {"r": -1.0}))
    wrong = FdeProblem("thm4", 0.6, {"r": -1.0})
    rep = fde_residual(wrong, sol, 1 / 512, 4.0)
    assert not rep.converges
    assert rep.max_abs_half > 0.5 * rep.max_abs > 0.01


def test_residual_integer_order():
    p = FdeProblem("thm4", 1.0, {"r": -1.0})
    rep = fde_residual(p, solve(p), 1 / 256, 4.0)
    assert rep.max_abs < 1 / 256
    assert rep.max_abs / rep.max_abs_half == pytest.approx(2.0, rel=0.1)


def test_residual_thm2_direct_and_sequential():
    p = FdeProblem("thm2", 0.4, {"mu": 1.0, "gamma": 0.75})
    sol = solve(p)
    direct = fde_residual(p, sol, 1 / 256, 2.0)
    seq = fde_residual(p, sol, 1 / 256, 2.0, sequential=True)
    assert direct.converges and seq.converges
    assert np.max(np.abs(direct.residuals - seq.residuals)) < 10 * max(direct.max_abs, seq.max_abs)
    assert max(direct.max_abs, seq.max_abs) < 1e-3


def test_residual_thm1_with_starting_weights():
    p = FdeProblem("thm1", 0.5, {"a1": 3.0, "a0": 2.0, "c1": 1.0, "c2": 1.0}, 0.5)
    rep = fde_residual(p, solve(p), 1 / 256, 4.0)
    assert rep.converges
    assert rep.max_abs < 0.01


def test_residual_thm3_decreases():
    # the L1 scheme applied to u' sees the t^(beta-1) kink of u' at 0; the
    # residual still decreases, though more slowly than the 1.5x criterion
    p = FdeProblem("thm3", 1.5, {"r": -1.0})
    rep = fde_residual(p, solve(p), 1 / 256, 4.0)
    assert rep.max_abs_half < rep.max_abs < 0.05


def test_residual_arguments():
    p = FdeProblem("thm4", 0.5, {"r": -1.0})
    sol = solve(p)
    with pytest.raises(DomainError):
        fde_residual(p, sol, 0.0, 4.0)
    with pytest.raises(DomainError):
        fde_residual(p, sol, 0.5, 4.0)
    with pytest.raises(DomainError):
        fde_residual(p, sol, 0.01, 4.0, t_start=5.0)


def test_solution_value_used_by_residual_matches_ml():
    sol = solve_thm4(-1.0, 0.5)
    assert sol.u(2.0) == ml(MLParams(0.5, 1.0), -(2.0**0.5)).value
