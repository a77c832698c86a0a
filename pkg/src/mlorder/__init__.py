"""Mittag-Leffler functions, exact solutions of linear fractional ODEs and order recovery."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConvergenceError,
    DomainError,
    FitError,
    MLOrderError,
    MLOverflowError,
    PoleError,
    SignalError,
    UnsupportedOrderError,
)
from .mlcore import (  # noqa: E402
    EvalResult,
    MLParams,
    Regime,
    gamma_real,
    ml,
    ml_asymptotic_negative,
    ml_derivative,
    ml_series,
    mittag_leffler,
    rgamma_real,
    switch_radius,
)
from .fdesolve import (  # noqa: E402
    ClosedFormSolution,
    FdeClass,
    FdeProblem,
    asymptotic_threshold,
    asymptotic_u,
    characteristic_roots,
    solve,
    solve_thm1,
    solve_thm2,
    solve_thm3,
    solve_thm4,
    thm2_coefficients,
)
from .orderest import (  # noqa: E402
    IndicatorSeries,
    extrapolate_limit,
    indicator,
    indicator_series_analytic,
    indicator_series_sampled,
    log_grid,
    order_from_limit,
)
from .fracops import (  # noqa: E402
    ResidualReport,
    SampledFunction,
    caputo_derivative,
    fde_residual,
    rl_derivative,
    rl_integral,
    sequential_derivative,
)
