r"""Discrete fractional integrals and derivatives on a uniform grid.

These are low-order reference schemes used to check closed-form solutions
against their equations, not production solvers:

* :func:`rl_integral`: product trapezoidal rule, the weakly singular kernel is
  integrated exactly against the piecewise-linear interpolant, :math:`O(h^2)`.
* :func:`caputo_derivative`: L1 scheme, :math:`O(h^{2-\beta})`; for
  :math:`1 < \beta < 2` it is applied with order :math:`\beta - 1` to a
  second-order difference of :math:`f`.
* :func:`rl_derivative`: Grünwald-Letnikov, :math:`O(h)`.

Every operator has an ``*_all`` variant returning the values at all grid
indices; the sums are discrete convolutions and cost :math:`O(N^2)`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError
from .fdesolve import ClosedFormSolution, FdeClass, FdeProblem
from .mlcore import rgamma_real

__all__ = [
    "SampledFunction",
    "ResidualReport",
    "rl_integral",
    "caputo_derivative",
    "rl_derivative",
    "sequential_derivative",
    "fde_residual",
]

CONVERGENCE_FACTOR = 1.5
BASES = ("caputo", "rl")
# leading powers t^(k beta - 1) corrected by starting weights in the RL residual
SINGULAR_TERMS = 3


@dataclass(frozen=True)
class SampledFunction:
    """Values ``f(t0 + i*h)`` for ``i = 0 .. len(values) - 1``."""

    t0: float
    h: float
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if not self.h > 0:
            raise DomainError(f"step must be positive, got {self.h}")
        if self.t0 < 0:
            raise DomainError(f"t0 must be non-negative, got {self.t0}")
        if vals.ndim != 1 or vals.size == 0 or not np.all(np.isfinite(vals)):
            raise DomainError("values must be a non-empty finite 1-d array")

    @classmethod
    def from_callable(cls, f: Callable[[float], float], t0: float, h: float, n: int) -> "SampledFunction":
        """Sample ``f`` at ``n + 1`` points ``t0, t0 + h, ..., t0 + n h``."""
        return cls(t0, h, np.array([f(t0 + i * h) for i in range(n + 1)], dtype=float))

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.h * np.arange(self.values.size)

    def with_values(self, values: np.ndarray) -> "SampledFunction":
        return SampledFunction(self.t0, self.h, values)


@dataclass(frozen=True)
class ResidualReport:
    grid: np.ndarray
    residuals: np.ndarray
    max_abs: float
    #: ``max_abs`` of the same check with the step halved
    max_abs_half: float
    converges: bool


def _check_index(f: SampledFunction, i: int, lowest: int) -> None:
    if not lowest <= i < f.values.size:
        raise IndexError(f"index {i} outside [{lowest}, {f.values.size - 1}]")


# -- Riemann-Liouville integral -----------------------------------------------


def rl_integral_all(f: SampledFunction, beta: float) -> np.ndarray:
    if not beta > 0:
        raise DomainError(f"integral order must be positive, got {beta}")
    y = f.values
    n_pts = y.size
    m = np.arange(n_pts, dtype=float)
    bp1 = beta + 1.0
    # interior weights depend on m = n - j only; w[0] = 1 is the endpoint j = n
    w = np.empty(n_pts)
    w[0] = 1.0
    if n_pts > 1:
        mm = m[1:]
        w[1:] = (mm + 1) ** bp1 - 2 * mm**bp1 + (mm - 1) ** bp1
    out = np.convolve(w, y)[:n_pts]
    # the j = 0 endpoint has its own weight
    nn = m[1:]
    a0 = (nn - 1) ** bp1 - (nn - 1 - beta) * nn**beta
    out[1:] += (a0 - w[1:]) * y[0]
    out[0] = 0.0
    return out * f.h**beta / math.gamma(beta + 2.0)


def rl_integral(f: SampledFunction, beta: float, i: int) -> float:
    """Riemann-Liouville integral of order ``beta`` at ``t0 + i*h`` (product trapezoid)."""
    if not beta > 0:
        raise DomainError(f"integral order must be positive, got {beta}")
    _check_index(f, i, 1)
    return float(rl_integral_all(f.with_values(f.values[: i + 1]), beta)[i])


# -- Caputo -------------------------------------------------------------------


def _l1_all(y: np.ndarray, h: float, beta: float) -> np.ndarray:
    """L1 scheme of order 0 < beta < 1 at every index."""
    n_pts = y.size
    out = np.zeros(n_pts)
    if n_pts < 2:
        return out
    k = np.arange(n_pts - 1, dtype=float)
    b = (k + 1) ** (1.0 - beta) - k ** (1.0 - beta)
    # D(t_n) = c * sum_{j<n} b_{n-1-j} (y_{j+1} - y_j)
    out[1:] = np.convolve(b, np.diff(y))[: n_pts - 1]
    return out * h**-beta / math.gamma(2.0 - beta)


def caputo_derivative_all(f: SampledFunction, beta: float) -> np.ndarray:
    if not (0 < beta < 2 and beta != 1):
        raise DomainError(f"Caputo order must lie in (0, 2) without 1, got {beta}")
    if beta < 1:
        return _l1_all(f.values, f.h, beta)
    if f.values.size < 3:
        raise DomainError("need at least 3 samples for orders above 1")
    slope = np.gradient(f.values, f.h, edge_order=2)
    return _l1_all(slope, f.h, beta - 1.0)


def caputo_derivative(f: SampledFunction, beta: float, i: int) -> float:
    """Caputo derivative of order ``beta`` in ``(0, 1) | (1, 2)`` at ``t0 + i*h``."""
    if not (0 < beta < 2 and beta != 1):
        raise DomainError(f"Caputo order must lie in (0, 2) without 1, got {beta}")
    _check_index(f, i, 2 if beta > 1 else 1)
    return float(caputo_derivative_all(f, beta)[i])


# -- Riemann-Liouville derivative ----------------------------------------------


def grunwald_weights(beta: float, n: int) -> np.ndarray:
    """``(-1)^k binom(beta, k)`` for ``k = 0 .. n-1``."""
    w = np.empty(n)
    w[0] = 1.0
    for k in range(1, n):
        w[k] = w[k - 1] * (1.0 - (beta + 1.0) / k)
    return w


def _starting_weights(beta: float, exponents: Sequence[float], w: np.ndarray) -> np.ndarray:
    """Weights ``s[n, j]`` on nodes ``j = 1..m`` making GL exact for ``t**g``, ``g`` in ``exponents``.

    Node 0 is assumed to hold 0 (the singular value is dropped). The system
    is independent of ``h`` after scaling.
    """
    n_pts = w.size
    g = np.asarray(exponents, dtype=float)
    m = g.size
    j = np.arange(1, m + 1, dtype=float)
    a = j[None, :] ** g[:, None]
    k = np.arange(n_pts, dtype=float)
    rhs = np.empty((m, n_pts))
    for q, gq in enumerate(g):
        pw = np.zeros(n_pts)
        pw[1:] = k[1:] ** gq
        approx = np.convolve(w, pw)[:n_pts]
        exact = np.zeros(n_pts)
        exact[1:] = math.gamma(gq + 1.0) * rgamma_real(gq + 1.0 - beta) * k[1:] ** (gq - beta)
        rhs[q] = exact - approx
    return np.linalg.solve(a, rhs).T


def rl_derivative_all(
    f: SampledFunction, beta: float, singular_exponents: Sequence[float] | None = None
) -> np.ndarray:
    """GL derivative at every index.

    ``singular_exponents`` lists powers ``t**g`` (``-1 < g``) present in ``f``
    near the origin; starting weights then remove their O(1) error. With
    them, ``f.values[0]`` is ignored.
    """
    if not 0 < beta < 1:
        raise DomainError(f"Riemann-Liouville order must lie in (0, 1), got {beta}")
    y = f.values
    w = grunwald_weights(beta, y.size)
    if not singular_exponents:
        return np.convolve(w, y)[: y.size] * f.h**-beta
    m = len(singular_exponents)
    if y.size <= m:
        raise DomainError(f"need more than {m} samples for {m} starting weights")
    y = y.copy()
    y[0] = 0.0
    out = np.convolve(w, y)[: y.size]
    out += _starting_weights(beta, singular_exponents, w) @ y[1 : m + 1]
    out[0] = 0.0
    return out * f.h**-beta


def rl_derivative(f: SampledFunction, beta: float, i: int) -> float:
    """Grünwald-Letnikov approximation of the Riemann-Liouville derivative at ``t0 + i*h``."""
    if not 0 < beta < 1:
        raise DomainError(f"Riemann-Liouville order must lie in (0, 1), got {beta}")
    _check_index(f, i, 1)
    return float(rl_derivative_all(f, beta)[i])


# -- sequential ---------------------------------------------------------------


def _base_all(base: str) -> Callable[[SampledFunction, float], np.ndarray]:
    if base == "caputo":
        return caputo_derivative_all
    if base == "rl":
        return rl_derivative_all
    raise DomainError(f"base operator must be one of {BASES}, got {base!r}")


def sequential_derivative_all(f: SampledFunction, beta: float, n: int, base: str = "caputo") -> np.ndarray:
    if n not in (1, 2):
        raise DomainError(f"composition depth must be 1 or 2, got {n}")
    if not n * beta < 2:
        raise DomainError(f"need n*beta < 2, got {n}*{beta}")
    op = _base_all(base)
    out = op(f, beta)
    if n == 2:
        out = op(f.with_values(out), beta)
    return out


def sequential_derivative(f: SampledFunction, beta: float, n: int, i: int, base: str = "caputo") -> float:
    """``n``-fold composition of the ``base`` derivative of order ``beta``, each stage on the same grid."""
    _check_index(f, i, 1)
    return float(sequential_derivative_all(f, beta, n, base)[i])


# -- equation residuals -------------------------------------------------------


def _sample_solution(sol: ClosedFormSolution, h: float, t_max: float) -> SampledFunction:
    n = int(round(t_max / h))
    ts = h * np.arange(n + 1)
    vals = np.empty(n + 1)
    for i, t in enumerate(ts):
        if t == 0 and sol.fde_class is FdeClass.RL_SEQUENTIAL_2TERM:
            # singular node; its weight is dropped
            vals[i] = 0.0
        else:
            vals[i] = sol.u(float(t))
    return SampledFunction(0.0, h, vals)


def _operator_residual(problem: FdeProblem, f: SampledFunction, sequential: bool) -> np.ndarray:
    b = problem.beta
    c = problem.coefficients
    u = f.values
    kind = problem.fde_class
    if kind is FdeClass.CAPUTO_SINGLE_LOW and b == 1.0:
        res = np.zeros_like(u)
        res[1:] = np.diff(u) / f.h - c["r"] * u[1:]
        return res
    if kind in (FdeClass.CAPUTO_SINGLE_LOW, FdeClass.CAPUTO_SINGLE_HIGH):
        return caputo_derivative_all(f, b) - c["r"] * u
    if kind is FdeClass.CAPUTO_2TERM:
        d1 = caputo_derivative_all(f, b)
        if sequential:
            d2 = caputo_derivative_all(f.with_values(d1), b)
        else:
            d2 = caputo_derivative_all(f, 2 * b)
        return d2 + 2 * c["mu"] * d1 + c["gamma"] * u
    if b == 1.0:
        d1 = np.gradient(u, f.h, edge_order=2)
        d2 = np.gradient(d1, f.h, edge_order=2)
    else:
        sing = [k * b - 1.0 for k in range(1, SINGULAR_TERMS + 1)]
        d1 = rl_derivative_all(f, b, sing)
        d2 = rl_derivative_all(f.with_values(d1), b, sing)
    return d2 + c["a1"] * d1 + c["a0"] * u


def _window_residuals(problem, sol, h, t_max, t_start, sequential):
    f = _sample_solution(sol, h, t_max)
    res = _operator_residual(problem, f, sequential)
    ts = f.times
    mask = ts >= t_start - 1e-9 * h
    return ts[mask], res[mask]


def fde_residual(
    problem: FdeProblem,
    sol: ClosedFormSolution,
    h: float,
    t_max: float,
    t_start: float | None = None,
    sequential: bool = False,
) -> ResidualReport:
    """Apply the discrete operator of ``problem`` to samples of ``sol.u`` on ``[0, t_max]``.

    The operator memory always starts at 0; residuals are reported on
    ``[t_start, t_max]`` (default ``max(t0, t_max/8)``) because the schemes
    have an O(1) local error in the first few steps for solutions that are not
    smooth at the origin. The check is repeated with ``h/2``; it converges if
    the maximum residual drops by at least ``CONVERGENCE_FACTOR``.

    ``problem.beta`` may differ from ``sol.beta`` (negative control).
    ``sequential`` selects the composed derivative for the two-term Caputo class.
    """
    if not h > 0:
        raise DomainError(f"step must be positive, got {h}")
    if not t_max >= 10 * h:
        raise DomainError(f"need t_max >= 10 h, got t_max={t_max}, h={h}")
    if t_start is None:
        t_start = max(problem.t0, t_max / 8.0)
    if not 0 <= t_start < t_max:
        raise DomainError(f"need 0 <= t_start < t_max, got {t_start}")
    grid, res = _window_residuals(problem, sol, h, t_max, t_start, sequential)
    _, res_half = _window_residuals(problem, sol, h / 2.0, t_max, t_start, sequential)
    max_abs = float(np.max(np.abs(res)))
    max_half = float(np.max(np.abs(res_half)))
    return ResidualReport(grid, res, max_abs, max_half, max_half * CONVERGENCE_FACTOR <= max_abs)
