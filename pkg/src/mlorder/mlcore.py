r"""Gamma function helpers and the two-parameter Mittag-Leffler function on the real line.

.. math::

    E_{\alpha,\beta}(z) = \sum_{k=0}^\infty \frac{z^k}{\Gamma(k\alpha + \beta)}

Three evaluation regimes are used, selected by :func:`switch_radius`:

* ``series``: the power series, summed in double precision when the terms do
  not cancel and in extended precision (``mpmath.libmp``, explicit precision,
  no global context) when they do.
* ``asymptotic-negative``: the algebraic expansion in inverse powers of ``z``
  for ``z < 0``, optimally truncated. For ``1 <= alpha < 2`` the two
  oscillating exponential contributions are added; they decay only like
  ``exp(|z|^{1/alpha} cos(pi/alpha))`` and are not negligible near the switch.
* ``exponential-positive``: the dominant exponential plus the algebraic
  expansion for ``z > 0``.
"""

from __future__ import annotations

import cmath
import enum
import functools
import math
from dataclasses import dataclass

from mpmath import libmp

from .errors import (
    ConvergenceError,
    DomainError,
    MLOverflowError,
    PoleError,
    UnsupportedOrderError,
)

__all__ = [
    "MLParams",
    "EvalResult",
    "Regime",
    "gamma_real",
    "rgamma_real",
    "switch_radius",
    "ml_series",
    "ml_asymptotic_negative",
    "ml",
    "ml_derivative",
    "mittag_leffler",
]

EPS = 2.0**-52
MAX_SERIES_TERMS = 10_000
MAX_ASYMPTOTIC_TERMS = 2_000
DEFAULT_SERIES_TOL = 2.0**-60
# |z|^(1/alpha) at the regime switch: exp(-32.24) ~ 1e-14
SWITCH_EXPONENT = 14.0 * math.log(10.0)
# double-precision summation is accepted while its rounding bound stays below this relative error
FLOAT_REL_BUDGET = 1e-13
DEGRADED_REL_ERROR = 1e-10

_LOG_PI = math.log(math.pi)
_POLE_TOL = 1e-12


class Regime(str, enum.Enum):
    SERIES = "series"
    ASYMPTOTIC_NEGATIVE = "asymptotic-negative"
    EXPONENTIAL_POSITIVE = "exponential-positive"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class MLParams:
    """Parameter pair ``(alpha, beta)`` of :math:`E_{\\alpha,\\beta}`."""

    alpha: float
    beta: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "beta", float(self.beta))
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise DomainError(f"alpha and beta must be finite, got {self.alpha!r}, {self.beta!r}")
        if self.alpha <= 0:
            raise DomainError(f"alpha must be positive, got {self.alpha!r}")


@dataclass(frozen=True)
class EvalResult:
    """A function value together with an absolute error estimate."""

    value: float
    abs_error_estimate: float
    regime: Regime
    #: set when the error estimate exceeds ``DEGRADED_REL_ERROR`` relative to the value
    degraded: bool = False

    def __float__(self) -> float:
        return self.value


def _result(value: float, err: float, regime: Regime) -> EvalResult:
    err = abs(err)
    if not math.isfinite(value):
        raise MLOverflowError(f"value is not representable ({value!r})")
    if not math.isfinite(err):
        err = math.inf if value == 0 else abs(value)
    degraded = err > DEGRADED_REL_ERROR * abs(value)
    return EvalResult(value, err, regime, degraded)


# -- Gamma -------------------------------------------------------------------


def _sinpi(x: float) -> float:
    """sin(pi*x), exactly zero at the integers."""
    n = round(x)
    # exact for |x| < 2^52: x and n share their leading bits
    r = x - n
    sign = -1.0 if n % 2 else 1.0
    return sign * math.sin(math.pi * r)


def _is_nonpositive_integer(x: float, tol: float) -> bool:
    return x <= 0.5 and abs(x - round(x)) <= tol * max(1.0, abs(x))


def gamma_real(x: float) -> float:
    """Gamma function for real ``x``; the reflection identity is used below 1/2.

    Raises :class:`PoleError` within ``1e-12`` of a non-positive integer.
    """
    if not math.isfinite(x):
        raise DomainError(f"gamma_real needs a finite argument, got {x!r}")
    if _is_nonpositive_integer(x, _POLE_TOL):
        raise PoleError(f"Gamma has a pole at {x!r}")
    if x >= 0.5:
        return math.gamma(x)
    # reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
    return math.pi / (_sinpi(x) * math.gamma(1.0 - x))


def _log_rgamma(x: float) -> tuple[float, float]:
    """Return ``(sign, log|1/Gamma(x)|)``; sign is 0 at the poles."""
    if _is_nonpositive_integer(x, 4 * EPS):
        return 0.0, -math.inf
    if x > 0:
        return 1.0, -math.lgamma(x)
    # Gamma(x) for x < 0 has sign (-1)^ceil(-x)
    sign = -1.0 if math.ceil(-x) % 2 else 1.0
    return sign, -math.lgamma(x)


def rgamma_real(x: float) -> float:
    """Reciprocal Gamma function, total on finite reals (zero at the poles)."""
    if not math.isfinite(x):
        raise DomainError(f"rgamma_real needs a finite argument, got {x!r}")
    if _is_nonpositive_integer(x, 4 * EPS):
        return 0.0
    if 0.5 <= x <= 170.0:
        return 1.0 / math.gamma(x)
    if -169.0 <= x < 0.5:
        return _sinpi(x) * math.gamma(1.0 - x) / math.pi
    sign, logabs = _log_rgamma(x)
    if logabs > 709.0:
        return math.copysign(math.inf, sign)
    return sign * math.exp(logabs)


# -- regimes -----------------------------------------------------------------


def switch_radius(alpha: float) -> float:
    """|z| at which :func:`ml` leaves the power series."""
    return SWITCH_EXPONENT**alpha


def _series_float(alpha: float, beta: float, z: float, tol: float, deriv: int):
    """Double-precision pass; returns (terms, last_term, rounding_bound)."""
    terms: list[float] = []
    logz = math.log(abs(z))
    zsign = -1.0 if z < 0 else 1.0
    # terms decrease for good once k*alpha + beta exceeds |z|^(1/alpha) + 1
    k_tail = (abs(z) ** (1.0 / alpha) + 1.0 - beta) / alpha
    partial = comp = 0.0  # Neumaier running sum for the stopping rule
    small_run = 0
    rounding = 0.0
    k = deriv
    while True:
        if k - deriv >= MAX_SERIES_TERMS:
            raise ConvergenceError(
                f"power series of E_{{{alpha},{beta}}}({z}) needs more than {MAX_SERIES_TERMS} terms"
            )
        arg = k * alpha + beta
        power = k - deriv
        coef = float(k) if deriv else 1.0
        if power * abs(logz) < 690.0 and 0.5 <= arg <= 170.0:
            term = coef * z**power / math.gamma(arg)
            rounding += 4.0 * EPS * abs(term)
        else:
            sign, lrg = _log_rgamma(arg)
            if sign == 0.0:
                term, lt = 0.0, -math.inf
            else:
                lt = math.log(coef) + power * logz + lrg
                if lt > 709.0:
                    raise MLOverflowError(f"series term {k} of E_{{{alpha},{beta}}}({z}) overflows")
                term = sign * zsign**power * coef * math.exp(lt)
                # exp() amplifies the absolute error of its argument
                rounding += (4.0 + abs(lt)) * EPS * abs(term)
        terms.append(term)
        s = partial + term
        if abs(partial) >= abs(term):
            comp += (partial - s) + term
        else:
            comp += (term - s) + partial
        partial = s
        total = partial + comp
        if k > k_tail and abs(term) <= tol * abs(total):
            small_run += 1
            if small_run >= 2:
                return terms, term, rounding
        else:
            small_run = 0
        k += 1


_RGAMMA_BLOCK = 64


@functools.lru_cache(maxsize=256)
def _rgamma_block(alpha: float, beta: float, prec: int, block: int) -> tuple:
    """Immutable block of 1/Gamma(k*alpha + beta), k in [64*block, 64*block + 64), at ``prec`` bits."""
    a = libmp.from_float(alpha)
    b = libmp.from_float(beta)
    out = []
    for k in range(block * _RGAMMA_BLOCK, (block + 1) * _RGAMMA_BLOCK):
        arg = libmp.mpf_add(libmp.mpf_mul(libmp.from_int(k), a, prec + 64), b, prec + 64)
        out.append(libmp.mpf_rgamma(arg, prec, libmp.round_nearest))
    return tuple(out)


def _rgamma_coef(alpha: float, beta: float, k: int, prec: int):
    return _rgamma_block(alpha, beta, prec, k // _RGAMMA_BLOCK)[k % _RGAMMA_BLOCK]


def _series_mp(alpha: float, beta: float, z: float, tol: float, deriv: int, prec: int):
    """Extended-precision pass at ``prec`` bits; returns (sum, last_term, sum_abs) as floats."""
    rnd = libmp.round_nearest
    x = libmp.from_float(z)
    xp = libmp.fone
    total = libmp.fzero
    sum_abs = libmp.fzero
    k_tail = (abs(z) ** (1.0 / alpha) + 1.0 - beta) / alpha
    small_run = 0
    k = deriv
    while True:
        if k - deriv >= MAX_SERIES_TERMS:
            raise ConvergenceError(
                f"power series of E_{{{alpha},{beta}}}({z}) needs more than {MAX_SERIES_TERMS} terms"
            )
        term = libmp.mpf_mul(_rgamma_coef(alpha, beta, k, prec), xp, prec, rnd)
        if deriv:
            term = libmp.mpf_mul(term, libmp.from_int(k), prec, rnd)
        total = libmp.mpf_add(total, term, prec, rnd)
        sum_abs = libmp.mpf_add(sum_abs, libmp.mpf_abs(term), prec, rnd)
        xp = libmp.mpf_mul(xp, x, prec, rnd)
        tf = abs(libmp.to_float(term))
        if k > k_tail and tf <= tol * abs(libmp.to_float(total)):
            small_run += 1
            if small_run >= 2:
                return libmp.to_float(total), tf, libmp.to_float(sum_abs)
        else:
            small_run = 0
        k += 1


def _series(p: MLParams, z: float, tol: float, deriv: int) -> EvalResult:
    alpha, beta = p.alpha, p.beta
    if z == 0.0:
        if deriv:
            return _result(rgamma_real(alpha + beta), 0.0, Regime.SERIES)
        return _result(rgamma_real(beta), 0.0, Regime.SERIES)
    terms, last, rounding = _series_float(alpha, beta, z, tol, deriv)
    value = math.fsum(terms)
    if rounding <= FLOAT_REL_BUDGET * abs(value):
        err = abs(last) + rounding + EPS * abs(value)
        return _result(value, err, Regime.SERIES)
    sum_abs = math.fsum(abs(t) for t in terms)
    # cancellation: redo in extended precision; digits lost ~ log2(sum_abs/|value|) <= 2*log2(sum_abs)
    lost = 2.0 * math.log2(max(sum_abs, 1.0))
    if value != 0.0:
        lost = max(lost, math.log2(sum_abs / abs(value)))
    else:
        lost += 64.0
    # rounded up so that the coefficient cache is shared between nearby arguments
    prec = 32 * ((80 + int(lost)) // 32 + 1)
    value, last, sum_abs = _series_mp(alpha, beta, z, tol, deriv, prec)
    err = last + sum_abs * 2.0 ** (4 - prec) + EPS * abs(value)
    return _result(value, err, Regime.SERIES)


def ml_series(p: MLParams, z: float, tol: float = DEFAULT_SERIES_TOL) -> EvalResult:
    """Sum the defining power series until two consecutive terms drop below ``tol*|sum|``.

    The error estimate is the last included term plus a rounding bound. Raises
    :class:`ConvergenceError` past ``MAX_SERIES_TERMS`` terms.
    """
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    if not math.isfinite(z):
        raise DomainError(f"z must be finite, got {z!r}")
    return _series(p, z, tol, 0)


def _algebraic_term(beta: float, alpha: float, k: int, logz: float, zsign: float, deriv: int) -> float:
    """k-th term of -sum 1/(Gamma(beta - k alpha) z^k), or of its z-derivative."""
    sign, lrg = _log_rgamma(beta - k * alpha)
    if sign == 0.0:
        return 0.0
    if deriv:
        # d/dz (-c z^-k) = k c z^-(k+1)
        lt = lrg + math.log(k) - (k + 1) * logz
        return sign * zsign ** (k + 1) * math.exp(lt)
    lt = lrg - k * logz
    return -sign * zsign**k * math.exp(lt)


def _algebraic_envelope(beta: float, alpha: float, k: int, logz: float, deriv: int) -> float:
    """Upper bound of |term k|, smooth in k (1/|Gamma(x)| <= Gamma(1-x)/pi for x < 1)."""
    m = 1.0 - beta + k * alpha
    if m <= 0.5:
        return abs(_algebraic_term(beta, alpha, k, logz, 1.0, deriv))
    lt = math.lgamma(m) - _LOG_PI - k * logz
    if deriv:
        lt += math.log(k) - logz
    return math.exp(min(lt, 709.0))


def _algebraic_sum(alpha: float, beta: float, z: float, n_terms: int | None, deriv: int):
    """Sum of the algebraic expansion; returns (value, first omitted term bound, n used)."""
    logz = math.log(abs(z))
    zsign = -1.0 if z < 0 else 1.0
    terms: list[float] = []
    if n_terms is not None:
        for k in range(1, n_terms + 1):
            terms.append(_algebraic_term(beta, alpha, k, logz, zsign, deriv))
        omitted = 0.0
        for k in range(n_terms + 1, n_terms + 4):
            omitted = abs(_algebraic_term(beta, alpha, k, logz, zsign, deriv))
            if omitted:
                break
        return math.fsum(terms), omitted, n_terms
    if alpha.is_integer() and beta.is_integer():
        # beta - k alpha runs into the poles of Gamma: the expansion terminates
        n = max(0, math.ceil(beta / alpha) - 1)
        for k in range(1, n + 1):
            terms.append(_algebraic_term(beta, alpha, k, logz, zsign, deriv))
        return math.fsum(terms), 0.0, n
    # optimal truncation: stop before the envelope starts to grow or once converged
    total = 0.0
    env_prev = math.inf
    k = 1
    while True:
        env = _algebraic_envelope(beta, alpha, k, logz, deriv)
        if env > env_prev or k > MAX_ASYMPTOTIC_TERMS:
            return math.fsum(terms), env_prev, k - 1
        if env < 0.25 * EPS * abs(total):
            return math.fsum(terms), env, k - 1
        term = _algebraic_term(beta, alpha, k, logz, zsign, deriv)
        terms.append(term)
        total += term
        env_prev = env
        k += 1


def _exponential_negative(alpha: float, beta: float, z: float, deriv: int) -> tuple[float, float]:
    """Oscillating exponential part on the negative axis, present for 1 <= alpha < 2."""
    if alpha < 1.0:
        return 0.0, 0.0
    mag = abs(z) ** (1.0 / alpha)
    zeta = cmath.rect(mag, math.pi / alpha)
    weight = 1.0 / alpha if alpha == 1.0 else 2.0 / alpha
    if deriv:
        piece = cmath.exp(zeta) * zeta ** (1.0 - beta) * (1.0 - beta + zeta) / (alpha * z)
    else:
        piece = cmath.exp(zeta) * zeta ** (1.0 - beta)
    value = weight * piece.real
    return value, abs(weight * piece) * EPS * (4.0 + mag)


def ml_asymptotic_negative(p: MLParams, z: float, n_terms: int | None = None) -> EvalResult:
    """Algebraic large-|z| expansion ``-sum_{k=1}^n 1/(Gamma(beta - k alpha) z^k)`` for ``z < 0``.

    With ``n_terms=None`` the expansion is optimally truncated. The error
    estimate is the first omitted term.
    """
    if not (z < 0 and math.isfinite(z)):
        raise DomainError(f"asymptotic expansion needs finite z < 0, got {z!r}")
    if not 0 < p.alpha < 2:
        raise DomainError(f"asymptotic expansion needs 0 < alpha < 2, got {p.alpha!r}")
    if n_terms is not None and n_terms < 1:
        raise DomainError(f"n_terms must be at least 1, got {n_terms!r}")
    value, omitted, _ = _algebraic_sum(p.alpha, p.beta, z, n_terms, 0)
    return _result(value, omitted, Regime.ASYMPTOTIC_NEGATIVE)


def _negative_far(p: MLParams, z: float, deriv: int) -> EvalResult:
    if not 0 < p.alpha < 2:
        raise DomainError(
            f"E_{{{p.alpha},{p.beta}}}({z}): |z| beyond the series radius needs 0 < alpha < 2"
        )
    alg, omitted, _ = _algebraic_sum(p.alpha, p.beta, z, None, deriv)
    expo, expo_err = _exponential_negative(p.alpha, p.beta, z, deriv)
    value = alg + expo
    err = omitted + expo_err + 4 * EPS * (abs(alg) + abs(expo))
    return _result(value, err, Regime.ASYMPTOTIC_NEGATIVE)


def _positive_far(p: MLParams, z: float, deriv: int) -> EvalResult:
    alpha, beta = p.alpha, p.beta
    big = z ** (1.0 / alpha)
    if big > 709.0:
        raise MLOverflowError(f"E_{{{alpha},{beta}}}({z}) overflows a double")
    lead = math.exp(big) * big ** (1.0 - beta) / alpha
    if deriv:
        lead *= (1.0 - beta + big) / (alpha * z)
    alg, omitted, _ = _algebraic_sum(alpha, beta, z, None, deriv)
    value = lead + alg
    err = omitted + abs(lead) * EPS * (4.0 + big) + 4 * EPS * abs(alg)
    return _result(value, err, Regime.EXPONENTIAL_POSITIVE)


def _dispatch(p: MLParams, z: float, deriv: int) -> EvalResult:
    if not math.isfinite(z):
        raise DomainError(f"z must be finite, got {z!r}")
    radius = switch_radius(p.alpha)
    if abs(z) <= radius:
        return _series(p, z, DEFAULT_SERIES_TOL, deriv)
    if z < 0:
        return _negative_far(p, z, deriv)
    if p.alpha < 2:
        return _positive_far(p, z, deriv)
    return _series(p, z, DEFAULT_SERIES_TOL, deriv)


def ml(p: MLParams, z: float) -> EvalResult:
    """Evaluate :math:`E_{\\alpha,\\beta}(z)` for real ``z``, picking the regime automatically.

    >>> round(ml(MLParams(1.0, 1.0), 1.0).value, 12)
    2.718281828459
    """
    return _dispatch(p, z, 0)


def ml_derivative(p: MLParams, z: float, k: int = 1) -> EvalResult:
    """k-th derivative (k in {0, 1}) of :math:`E_{\\alpha,\\beta}` with respect to its argument."""
    if k == 0:
        return ml(p, z)
    if k != 1:
        raise UnsupportedOrderError(f"only derivative orders 0 and 1 are supported, got {k!r}")
    return _dispatch(p, z, 1)


def mittag_leffler(alpha: float, beta: float, z: float) -> float:
    """Shortcut returning only the value of :func:`ml`."""
    return ml(MLParams(alpha, beta), z).value
