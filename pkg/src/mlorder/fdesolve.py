"""Closed-form solutions of the four linear FDE classes whose order can be read off at infinity.

=====================  ===================================================  ======
class                  equation                                             offset
=====================  ===================================================  ======
RL_SEQUENTIAL_2TERM    D^{2b}u + a1 D^b u + a0 u = 0, Riemann-Liouville,       -1
                       sequential, 0 < b <= 1
CAPUTO_2TERM           D^{2b}u + 2 mu D^b u + gamma u = 0, Caputo,              0
                       0 < b < 1/2, u(0) = 1, D^b u(0) = 0
CAPUTO_SINGLE_HIGH     D^b u - r u = 0, Caputo, 1 < b < 2, u(0) = u'(0) = 1    +1
CAPUTO_SINGLE_LOW      D^b u - r u = 0, Caputo, 0 < b < 1, u(0) = 1             0
=====================  ===================================================  ======

The offset is the constant that turns the limit of ``-t u'(t)/u(t)`` into the
order: ``b = lim(-t u'/u) + offset``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

from .errors import DomainError
from .mlcore import MLParams, ml, rgamma_real, switch_radius

__all__ = [
    "FdeClass",
    "FdeProblem",
    "MLTerm",
    "ClosedFormSolution",
    "characteristic_roots",
    "thm2_coefficients",
    "solve_thm1",
    "solve_thm2",
    "solve_thm3",
    "solve_thm4",
    "solve",
    "asymptotic_u",
]

DEGENERACY_RTOL = 1e-12


class FdeClass(str, enum.Enum):
    RL_SEQUENTIAL_2TERM = "thm1"
    CAPUTO_2TERM = "thm2"
    CAPUTO_SINGLE_HIGH = "thm3"
    CAPUTO_SINGLE_LOW = "thm4"

    def __str__(self) -> str:
        return self.value


OFFSETS = {
    FdeClass.RL_SEQUENTIAL_2TERM: -1,
    FdeClass.CAPUTO_2TERM: 0,
    FdeClass.CAPUTO_SINGLE_HIGH: 1,
    FdeClass.CAPUTO_SINGLE_LOW: 0,
}


@dataclass(frozen=True)
class FdeProblem:
    """One equation of a supported class.

    ``coefficients`` holds ``a1, a0`` (and the solution constants ``c1, c2``)
    for ``thm1``, ``mu, gamma`` for ``thm2`` and ``r`` for ``thm3``/``thm4``.
    The initial data of the Caputo classes are fixed by the class.
    """

    fde_class: FdeClass
    beta: float
    coefficients: dict = field(default_factory=dict)
    t0: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "fde_class", FdeClass(self.fde_class))
        b = self.beta
        c = self.coefficients
        kind = self.fde_class
        if kind is FdeClass.RL_SEQUENTIAL_2TERM:
            if not 0 < b <= 1:
                raise DomainError(f"thm1 needs 0 < beta <= 1, got {b}")
            if not self.t0 > 0:
                raise DomainError(f"thm1 needs t0 > 0, got {self.t0}")
            characteristic_roots(c["a1"], c["a0"])
        elif kind is FdeClass.CAPUTO_2TERM:
            if not 0 < b < 0.5:
                raise DomainError(f"thm2 needs 0 < beta < 1/2, got {b}")
            thm2_coefficients(c["mu"], c["gamma"])
        elif kind is FdeClass.CAPUTO_SINGLE_HIGH:
            if not 1 < b < 2:
                raise DomainError(f"thm3 needs 1 < beta < 2, got {b}")
            if not c["r"] < 0:
                raise DomainError(f"thm3 needs r < 0, got {c['r']}")
        else:
            # beta = 1 is admitted as the classical exponential sanity case
            if not 0 < b <= 1:
                raise DomainError(f"thm4 needs 0 < beta < 1, got {b}")
            if not c["r"] < 0:
                raise DomainError(f"thm4 needs r < 0, got {c['r']}")

    @property
    def offset(self) -> int:
        return OFFSETS[self.fde_class]


@dataclass(frozen=True)
class MLTerm:
    """``coefficient * t**power * E_{alpha,beta}(rate * t**alpha)``."""

    coefficient: float
    rate: float
    params: MLParams
    power: float


@dataclass(frozen=True)
class ClosedFormSolution:
    """Exact solution: ``u(t)`` is the sum of ``terms``; ``du`` is its derivative."""

    fde_class: FdeClass
    beta: float
    u: Callable[[float], float]
    du: Callable[[float], float]
    terms: tuple[MLTerm, ...]
    offset: int
    #: ``(c_i, r_i)`` pairs of the characteristic modes
    modes: tuple[tuple[float, float], ...]
    t_min: float = 0.0


def _term_value(term: MLTerm, t: float) -> float:
    z = term.rate * t**term.params.alpha
    return term.coefficient * t**term.power * ml(term.params, z).value


def _sum_terms(terms: tuple[MLTerm, ...], t: float) -> float:
    return math.fsum(_term_value(term, t) for term in terms)


def characteristic_roots(a1: float, a0: float) -> tuple[float, float]:
    """Distinct negative real roots ``r1 > r2`` of ``r**2 + a1*r + a0 = 0``.

    >>> characteristic_roots(3.0, 2.0)
    (-1.0, -2.0)
    """
    disc = a1 * a1 - 4.0 * a0
    if not disc > 0:
        raise DomainError(f"roots of r^2 + {a1} r + {a0} are not distinct and real")
    sq = math.sqrt(disc)
    # cancellation-free: q carries the sign of a1
    q = -0.5 * (a1 + math.copysign(sq, a1))
    if q == 0.0:
        raise DomainError("degenerate characteristic equation")
    x1, x2 = q, a0 / q
    r1, r2 = max(x1, x2), min(x1, x2)
    if abs(r1 - r2) <= 1e-12 * max(abs(r1), abs(r2)):
        raise DomainError(f"repeated characteristic root {r1}")
    if not (r1 < 0 and r2 < 0):
        raise DomainError(f"characteristic roots ({r1}, {r2}) are not both negative")
    return r1, r2


def thm2_coefficients(mu: float, gamma: float) -> tuple[float, float, float, float]:
    """``(c1, c2, r1, r2)`` of the two-term Caputo problem with ``u(0)=1`` and ``D^b u(0)=0``."""
    if not 0 < gamma < mu * mu:
        raise DomainError(f"need 0 < gamma < mu^2, got mu={mu}, gamma={gamma}")
    if not mu > 0:
        raise DomainError(f"need mu > 0 for decaying modes, got {mu}")
    s = math.sqrt(mu * mu - gamma)
    c1 = 0.5 * (1.0 + mu / s)
    # 1 - mu/s and -mu + s, rewritten to avoid cancellation when gamma << mu^2
    c2 = -0.5 * gamma / ((mu + s) * s)
    r1 = -gamma / (mu + s)
    r2 = -mu - s
    scale = abs(c1 * r1) + abs(c2 * r2)
    if abs(c1 + c2 - 1.0) > 4e-16 * (abs(c1) + abs(c2)) or abs(c1 * r1 + c2 * r2) > 1e-14 * scale:
        raise ArithmeticError("thm2 coefficients failed their consistency check")
    return c1, c2, r1, r2


def _check_degenerate(weights: list[tuple[float, float]], name: str) -> None:
    total = math.fsum(w for w, _ in weights)
    scale = math.fsum(abs(w) for w, _ in weights)
    if abs(total) <= DEGENERACY_RTOL * scale:
        raise DomainError(f"{name} vanishes: the leading asymptotic term is annihilated")


def solve_thm1(a1: float, a0: float, c1: float, c2: float, t0: float, beta: float) -> ClosedFormSolution:
    """Sequential Riemann-Liouville two-term equation; ``c1, c2`` are taken as given.

    ``u`` and ``du`` are singular at ``t = 0`` for ``beta < 1`` and require ``t > 0``.
    """
    FdeProblem(FdeClass.RL_SEQUENTIAL_2TERM, beta, {"a1": a1, "a0": a0}, t0)
    r1, r2 = characteristic_roots(a1, a0)
    if beta < 1:
        _check_degenerate([(c1 / r1**2, r1), (c2 / r2**2, r2)], "c1/r1^2 + c2/r2^2")
    p = MLParams(beta, beta)
    dp = MLParams(beta, beta - 1.0)
    terms = (MLTerm(c1, r1, p, beta - 1.0), MLTerm(c2, r2, p, beta - 1.0))
    dterms = (MLTerm(c1, r1, dp, beta - 2.0), MLTerm(c2, r2, dp, beta - 2.0))

    def u(t: float) -> float:
        if not t > 0:
            raise DomainError(f"thm1 solution is singular at t = 0; need t > 0, got {t}")
        return _sum_terms(terms, t)

    def du(t: float) -> float:
        if not t > 0:
            raise DomainError(f"thm1 solution is singular at t = 0; need t > 0, got {t}")
        return _sum_terms(dterms, t)

    return ClosedFormSolution(
        FdeClass.RL_SEQUENTIAL_2TERM, beta, u, du, terms, -1, ((c1, r1), (c2, r2)), t_min=0.0
    )


def solve_thm2(mu: float, gamma: float, beta: float) -> ClosedFormSolution:
    """Two-term Caputo equation with ``u(0) = 1`` and ``D^b u(0) = 0``."""
    FdeProblem(FdeClass.CAPUTO_2TERM, beta, {"mu": mu, "gamma": gamma})
    c1, c2, r1, r2 = thm2_coefficients(mu, gamma)
    _check_degenerate([(c1 / r1, r1), (c2 / r2, r2)], "c1/r1 + c2/r2")
    p = MLParams(beta, 1.0)
    dp = MLParams(beta, beta)
    terms = (MLTerm(c1, r1, p, 0.0), MLTerm(c2, r2, p, 0.0))
    dterms = (MLTerm(c1 * r1, r1, dp, beta - 1.0), MLTerm(c2 * r2, r2, dp, beta - 1.0))

    def u(t: float) -> float:
        if t < 0:
            raise DomainError(f"need t >= 0, got {t}")
        if t == 0:
            return 1.0
        return _sum_terms(terms, t)

    def du(t: float) -> float:
        if not t > 0:
            raise DomainError(f"u' is singular at t = 0; need t > 0, got {t}")
        return _sum_terms(dterms, t)

    return ClosedFormSolution(FdeClass.CAPUTO_2TERM, beta, u, du, terms, 0, ((c1, r1), (c2, r2)))


def solve_thm3(r: float, beta: float) -> ClosedFormSolution:
    """``D^b u = r u`` with ``1 < b < 2``, ``u(0) = 1``, ``u'(0) = 1``."""
    FdeProblem(FdeClass.CAPUTO_SINGLE_HIGH, beta, {"r": r})
    terms = (MLTerm(1.0, r, MLParams(beta, 1.0), 0.0), MLTerm(1.0, r, MLParams(beta, 2.0), 1.0))
    dterms = (MLTerm(r, r, MLParams(beta, beta), beta - 1.0), MLTerm(1.0, r, MLParams(beta, 1.0), 0.0))

    def u(t: float) -> float:
        if t < 0:
            raise DomainError(f"need t >= 0, got {t}")
        if t == 0:
            return 1.0
        return _sum_terms(terms, t)

    def du(t: float) -> float:
        if t < 0:
            raise DomainError(f"need t >= 0, got {t}")
        if t == 0:
            return 1.0
        return _sum_terms(dterms, t)

    return ClosedFormSolution(FdeClass.CAPUTO_SINGLE_HIGH, beta, u, du, terms, 1, ((1.0, r),))


def solve_thm4(r: float, beta: float) -> ClosedFormSolution:
    """``D^b u = r u`` with ``0 < b < 1`` (``b = 1`` allowed), ``u(0) = 1``."""
    FdeProblem(FdeClass.CAPUTO_SINGLE_LOW, beta, {"r": r})
    terms = (MLTerm(1.0, r, MLParams(beta, 1.0), 0.0),)
    dterms = (MLTerm(r, r, MLParams(beta, beta), beta - 1.0),)

    def u(t: float) -> float:
        if t < 0:
            raise DomainError(f"need t >= 0, got {t}")
        if t == 0:
            return 1.0
        return _sum_terms(terms, t)

    def du(t: float) -> float:
        if t == 0 and beta == 1:
            return r
        if not t > 0:
            raise DomainError(f"u' is singular at t = 0; need t > 0, got {t}")
        return _sum_terms(dterms, t)

    return ClosedFormSolution(FdeClass.CAPUTO_SINGLE_LOW, beta, u, du, terms, 0, ((1.0, r),))


def solve(problem: FdeProblem) -> ClosedFormSolution:
    """Dispatch on ``problem.fde_class``."""
    c = problem.coefficients
    kind = problem.fde_class
    if kind is FdeClass.RL_SEQUENTIAL_2TERM:
        return solve_thm1(c["a1"], c["a0"], c.get("c1", 1.0), c.get("c2", 1.0), problem.t0, problem.beta)
    if kind is FdeClass.CAPUTO_2TERM:
        return solve_thm2(c["mu"], c["gamma"], problem.beta)
    if kind is FdeClass.CAPUTO_SINGLE_HIGH:
        return solve_thm3(c["r"], problem.beta)
    return solve_thm4(c["r"], problem.beta)


def asymptotic_threshold(solution: ClosedFormSolution) -> float:
    """Smallest ``t`` with ``r_i t^b <= -switch_radius(b)`` for every mode."""
    radius = switch_radius(solution.beta)
    slowest = min(abs(r) for _, r in solution.modes)
    return (radius / slowest) ** (1.0 / solution.beta)


def asymptotic_u(
    problem: FdeProblem, solution: ClosedFormSolution, t: float, dominant: bool = False
) -> tuple[float, float]:
    """Leading algebraic terms ``(u_lead, du_lead)`` of the large-``t`` expansion.

    For ``thm3`` the default keeps both powers ``t^{-b}`` and ``t^{1-b}`` of the
    leading bracket; ``dominant=True`` keeps only the largest power of each,
    whose indicator ratio is exact at every ``t``. The other classes have a
    single leading power and ignore the flag.
    """
    b = solution.beta
    if t < asymptotic_threshold(solution):
        raise DomainError(f"t = {t} is below the asymptotic threshold {asymptotic_threshold(solution)}")
    kind = problem.fde_class
    if kind is FdeClass.RL_SEQUENTIAL_2TERM:
        weight = math.fsum(c / r**2 for c, r in solution.modes)
        g = rgamma_real(-b)
        if g == 0.0:
            raise DomainError("beta = 1 has no algebraic tail")
        return -(t ** (-b - 1.0)) * g * weight, (b + 1.0) * t ** (-b - 2.0) * g * weight
    g = rgamma_real(1.0 - b)
    if g == 0.0:
        raise DomainError("beta = 1 has no algebraic tail")
    if kind is FdeClass.CAPUTO_2TERM:
        weight = math.fsum(c / r for c, r in solution.modes)
        return -(t**-b) * g * weight, b * t ** (-b - 1.0) * g * weight
    r = solution.modes[0][1]
    if kind is FdeClass.CAPUTO_SINGLE_HIGH:
        if dominant:
            return -(t ** (1.0 - b)) * g / (r * (1.0 - b)), -(t**-b) * g / r
        u_lead = -(t**-b) * g / r * (1.0 + t / (1.0 - b))
        du_lead = t**-b * g / r * (b / t - 1.0)
        return u_lead, du_lead
    return -(t**-b) * g / r, b * t ** (-b - 1.0) * g / r
