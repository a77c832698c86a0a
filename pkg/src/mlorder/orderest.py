"""Recover the fractional order from the decay indicator ``eta(t) = -t u'(t) / u(t)``.

The limit of ``eta`` as ``t -> oo`` is extrapolated from finitely many samples
by fitting ``eta(t) ~ beta_inf + a * t**-p`` on the tail of the grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, FitError, SignalError
from .fdesolve import ClosedFormSolution

__all__ = [
    "IndicatorSeries",
    "indicator",
    "order_from_limit",
    "extrapolate_limit",
    "indicator_series_analytic",
    "indicator_series_sampled",
    "log_grid",
]

TINY_SIGNAL = 1e-300
EXPONENT_GRID = np.geomspace(0.05, 4.0, 200)
FIT_REJECT_FRACTION = 0.1
# the extrapolated limit may lie at most this many tail spreads beyond the last sample
MAX_EXTRAPOLATION_RATIO = 4.0


@dataclass(frozen=True)
class IndicatorSeries:
    ts: np.ndarray
    etas: np.ndarray
    #: order estimate, i.e. the extrapolated limit shifted by ``offset``
    beta_hat: float
    decay_exponent: float
    residual: float
    eta_limit: float
    offset: int

    def __post_init__(self) -> None:
        _check_grid(self.ts, minimum=3)
        if len(self.etas) != len(self.ts):
            raise DomainError("ts and etas differ in length")


def _check_grid(ts: np.ndarray, minimum: int) -> None:
    if ts.ndim != 1 or len(ts) < minimum:
        raise SignalError(f"need a 1-d grid of at least {minimum} points, got shape {ts.shape}")
    if not np.all(np.isfinite(ts)) or ts[0] <= 0:
        raise SignalError("grid points must be finite and positive")
    if np.any(np.diff(ts) <= 0):
        raise SignalError("grid must be strictly increasing")


def log_grid(t_min: float, t_max: float, n: int) -> np.ndarray:
    """``n`` log-spaced points on ``[t_min, t_max]``."""
    if not 0 < t_min < t_max or n < 2:
        raise DomainError(f"bad grid ({t_min}, {t_max}, {n})")
    return np.geomspace(t_min, t_max, n)


def indicator(u: float, du: float, t: float) -> float:
    """``-t * du / u``.

    >>> indicator(math.exp(-3.0), -math.exp(-3.0), 3.0)
    3.0
    """
    if not t > 0:
        raise DomainError(f"indicator needs t > 0, got {t}")
    if abs(u) < TINY_SIGNAL:
        raise ZeroDivisionError(f"|u(t)| = {abs(u)!r} at t = {t} is too small to form -t u'/u")
    return -t * du / u


def order_from_limit(class_offset: float, eta_limit: float) -> float:
    """Order ``beta`` from the limit of ``-t u'/u``: ``eta_limit + class_offset``."""
    if class_offset not in (-1, 0, 1):
        raise DomainError(f"class offset must be -1, 0 or +1, got {class_offset!r}")
    return eta_limit + class_offset


def extrapolate_limit(ts: Sequence[float], etas: Sequence[float]) -> tuple[float, float, float]:
    """Fit ``eta = beta_inf + a t^-p`` on the later half of the samples.

    ``p`` is scanned over ``EXPONENT_GRID``; for each ``p`` the pair
    ``(beta_inf, a)`` solves a linear least-squares problem. Returns
    ``(beta_inf, p, rms_residual)`` of the best exponent.

    Raises :class:`FitError` if the best RMS residual exceeds
    ``FIT_REJECT_FRACTION`` times the spread of ``etas``, or if the limit
    lies further beyond the last sample than ``MAX_EXTRAPOLATION_RATIO``
    times the spread of the tail (an unbounded indicator, e.g. ``eta = t``).
    """
    ts = np.asarray(ts, dtype=float)
    etas = np.asarray(etas, dtype=float)
    _check_grid(ts, minimum=3)
    if etas.shape != ts.shape or not np.all(np.isfinite(etas)):
        raise SignalError("etas must be finite and match ts")
    start = min(len(ts) // 2, len(ts) - 3)
    tail_t, tail_eta = ts[start:], etas[start:]
    # normalise time so that t^-p stays O(1) over the tail
    x = tail_t / tail_t[0]
    best = (math.inf, math.nan, math.nan)
    for p in EXPONENT_GRID:
        basis = x**-p
        design = np.column_stack([np.ones_like(basis), basis])
        coef, *_ = np.linalg.lstsq(design, tail_eta, rcond=None)
        rms = float(np.sqrt(np.mean((design @ coef - tail_eta) ** 2)))
        if rms < best[0]:
            best = (rms, float(p), float(coef[0]))
    rms, p, beta_inf = best
    spread = float(np.ptp(etas))
    if rms > FIT_REJECT_FRACTION * spread + 1e-13 * float(np.max(np.abs(etas))):
        raise FitError(f"no finite limit: fit residual {rms:.3g} exceeds {FIT_REJECT_FRACTION} x spread {spread:.3g}")
    tail_spread = float(np.ptp(tail_eta))
    if abs(beta_inf - tail_eta[-1]) > MAX_EXTRAPOLATION_RATIO * tail_spread + 1e-12 * abs(tail_eta[-1]):
        raise FitError(
            f"no finite limit: extrapolated {beta_inf:.6g} is far beyond the data (last {tail_eta[-1]:.6g})"
        )
    return beta_inf, p, rms


def _series(ts: np.ndarray, etas: np.ndarray, offset: int) -> IndicatorSeries:
    beta_inf, p, rms = extrapolate_limit(ts, etas)
    return IndicatorSeries(ts, etas, order_from_limit(offset, beta_inf), p, rms, beta_inf, offset)


def indicator_series_analytic(sol: ClosedFormSolution, ts: Sequence[float]) -> IndicatorSeries:
    """Indicator from the exact ``u`` and ``u'`` of ``sol`` and its extrapolated order."""
    ts = np.asarray(ts, dtype=float)
    _check_grid(ts, minimum=3)
    etas = np.array([indicator(sol.u(t), sol.du(t), t) for t in ts])
    return _series(ts, etas, sol.offset)


def sampled_derivative(ts: np.ndarray, us: np.ndarray) -> np.ndarray:
    """``u'`` from samples of a sign-definite ``u``.

    Three-point Lagrange differentiation (one-sided at the ends) of ``ln|u|``
    against ``ln t``: exact for power laws, which is what the indicator sees
    at large ``t``, and blind to a constant factor in ``u``.
    """
    slope = np.gradient(np.log(np.abs(us)), np.log(ts), edge_order=2)
    return us * slope / ts


def indicator_series_sampled(ts: Sequence[float], us: Sequence[float], offset: int) -> IndicatorSeries:
    """Indicator from samples ``u(t_i)``; ``u'`` comes from :func:`sampled_derivative`."""
    ts = np.asarray(ts, dtype=float)
    us = np.asarray(us, dtype=float)
    _check_grid(ts, minimum=5)
    if us.shape != ts.shape or not np.all(np.isfinite(us)):
        raise SignalError("samples must be finite and match the grid")
    if np.any(np.abs(us) < TINY_SIGNAL):
        raise SignalError("signal vanishes at some sample; -t u'/u is undefined there")
    if np.any(np.sign(us) != np.sign(us[0])):
        raise SignalError("signal changes sign; -t u'/u is undefined at the crossing")
    etas = -np.gradient(np.log(np.abs(us)), np.log(ts), edge_order=2)
    return _series(ts, etas, offset)
