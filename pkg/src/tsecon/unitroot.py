"""Dickey-Fuller and augmented Dickey-Fuller unit-root tests.

The test regresses the first difference on deterministic terms, the lagged
level, and ``lag_order`` lagged differences; the statistic is the t-ratio on
the lagged level.  Approximate asymptotic p-values come from the MacKinnon
response-surface polynomials, indexed by the deterministic case and by the
number of variables in a cointegrating relation for residual-based tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .dataset import AnnualSeries
from .regress import EstimationError

__all__ = ["AdfResult", "AdfSpec", "adf_test", "df_residual_test", "mackinnon_pvalue"]

DETERMINISTICS = ("none", "constant", "constant_and_trend")

# MacKinnon (1994, 2010 update) response-surface coefficients for the
# asymptotic distribution of the tau statistic.  Rows are N = 1..6 series in
# the (cointegrating) relation; N=1 is the plain unit-root test.  p-values are
# Phi(polynomial(tau)); the small-p polynomial applies below tau_star.
_SMALLP = {
    "none": [
        (0.6344, 1.2378, 0.032496), (1.9129, 1.3857, 0.035322),
        (2.7648, 1.4502, 0.034186), (3.4336, 1.4835, 0.0319),
        (4.0999, 1.5533, 0.0359), (4.5388, 1.5344, 0.029807),
    ],
    "constant": [
        (2.1659, 1.4412, 0.038269), (2.92, 1.5012, 0.039796),
        (3.4699, 1.4856, 0.03164), (3.9673, 1.4777, 0.026315),
        (4.5509, 1.5338, 0.029545), (5.1399, 1.6036, 0.034445),
    ],
    "constant_and_trend": [
        (3.2512, 1.6047, 0.049588), (3.6646, 1.5419, 0.036448),
        (4.0983, 1.5173, 0.029898), (4.5844, 1.5338, 0.028796),
        (5.0722, 1.5634, 0.029472), (5.53, 1.5914, 0.030392),
    ],
}
_LARGEP = {
    "none": [
        (0.4797, 0.93557, -0.06999, 0.033066), (1.5578, 0.8558, -0.2083, -0.033549),
        (2.2268, 0.68093, -0.32362, -0.054448), (2.7654, 0.64502, -0.30811, -0.044946),
        (3.2684, 0.68051, -0.26778, -0.034972), (3.7268, 0.7167, -0.23648, -0.028288),
    ],
    "constant": [
        (1.7339, 0.93202, -0.12745, -0.010368), (2.1945, 0.64695, -0.29198, -0.042377),
        (2.5893, 0.45168, -0.36529, -0.050074), (3.0387, 0.45452, -0.33666, -0.041921),
        (3.5049, 0.52098, -0.29158, -0.033468), (3.9489, 0.58933, -0.25359, -0.02721),
    ],
    "constant_and_trend": [
        (2.5261, 0.61654, -0.37956, -0.060285), (2.85, 0.5272, -0.36622, -0.051695),
        (3.221, 0.5255, -0.32685, -0.041501), (3.652, 0.59758, -0.27483, -0.032081),
        (4.0712, 0.66428, -0.23464, -0.02546), (4.4735, 0.71757, -0.20681, -0.021196),
    ],
}
_TAU_STAR = {
    "none": [-1.04, -1.53, -2.68, -3.09, -3.07, -3.77],
    "constant": [-1.61, -2.62, -3.13, -3.47, -3.78, -3.93],
    "constant_and_trend": [-2.89, -3.19, -3.5, -3.65, -3.8, -4.36],
}
_TAU_MIN = {
    "none": [-19.04, -19.62, -21.21, -23.25, -21.63, -25.74],
    "constant": [-18.83, -18.86, -23.48, -28.07, -25.96, -23.27],
    "constant_and_trend": [-16.18, -21.15, -25.37, -26.63, -26.53, -26.18],
}
_TAU_MAX = {
    "none": [math.inf, 1.51, 0.86, 0.88, 1.05, 1.24],
    "constant": [2.74, 0.92, 0.55, 0.61, 0.79, 1.0],
    "constant_and_trend": [0.7, 0.63, 0.71, 0.93, 1.19, 1.42],
}


def mackinnon_pvalue(tau: float, deterministic: str, n_vars: int = 1) -> float:
    """Asymptotic p-value for a (residual) Dickey-Fuller tau statistic."""
    if deterministic not in DETERMINISTICS:
        raise ValueError(f"unknown deterministic case {deterministic!r}")
    if not 1 <= n_vars <= 6:
        raise ValueError("n_vars must be between 1 and 6")
    i = n_vars - 1
    if tau <= _TAU_MIN[deterministic][i]:
        return 0.0
    if tau >= _TAU_MAX[deterministic][i]:
        return 1.0
    coeffs = (
        _SMALLP[deterministic][i]
        if tau <= _TAU_STAR[deterministic][i]
        else _LARGEP[deterministic][i]
    )
    poly = sum(c * tau**k for k, c in enumerate(coeffs))
    return float(stats.norm.cdf(poly))


@dataclass(frozen=True)
class AdfSpec:
    deterministic: str = "constant"
    lag_order: int = 1

    def __post_init__(self):
        if self.deterministic not in DETERMINISTICS:
            raise ValueError(f"unknown deterministic case {self.deterministic!r}")
        if self.lag_order < 0:
            raise ValueError("lag_order must be >= 0")


@dataclass(frozen=True)
class AdfResult:
    t_stat: float
    alpha_minus_one: float
    p_value: float
    spec: AdfSpec
    n_used: int
    reject_5pct: bool
    series_name: str = ""
    n_vars: int = 1

    @property
    def conclusion(self) -> str:
        return "reject unit root at 5%" if self.reject_5pct else "fail to reject unit root at 5%"


def _adf_regression(values: np.ndarray, spec: AdfSpec) -> tuple[float, float, int]:
    k = spec.lag_order
    n = len(values)
    rows = n - 1 - k
    n_det = {"none": 0, "constant": 1, "constant_and_trend": 2}[spec.deterministic]
    if rows - (n_det + 1 + k) < 1:
        raise EstimationError("series too short for the requested ADF specification")
    if np.ptp(values) == 0.0:
        raise EstimationError("cannot run a unit-root test on a constant series")
    dy = np.diff(values)
    Y = dy[k:]
    cols = []
    if n_det >= 1:
        cols.append(np.ones(rows))
    if n_det == 2:
        cols.append(np.arange(1.0, rows + 1.0))
    cols.append(values[k:-1])
    level_idx = len(cols) - 1
    for i in range(1, k + 1):
        cols.append(dy[k - i : len(dy) - i])
    X = np.column_stack(cols)
    beta, *_ = np.linalg.lstsq(X, Y, rcond=None)
    e = Y - X @ beta
    df = rows - X.shape[1]
    s2 = float(e @ e) / df
    se = math.sqrt(s2 * np.linalg.inv(X.T @ X)[level_idx, level_idx])
    return float(beta[level_idx] / se), float(beta[level_idx]), rows


def adf_test(series: AnnualSeries, spec: AdfSpec) -> AdfResult:
    """Augmented Dickey-Fuller test; the null is a unit root."""
    tau, coef, rows = _adf_regression(np.asarray(series.values), spec)
    p = mackinnon_pvalue(tau, spec.deterministic)
    return AdfResult(tau, coef, p, spec, rows, p < 0.05, series.name)


def df_residual_test(
    residuals: AnnualSeries,
    lag_order: int,
    n_vars: int = 1,
    surface: str = "none",
) -> AdfResult:
    """Dickey-Fuller test on cointegrating-regression residuals.

    The regression runs without constant and without trend.  The p-value uses
    the response surface for ``n_vars`` series in the long-run relation;
    ``surface`` names the deterministic case of that static regression (the
    default ``none`` matches a no-constant long-run fit).
    """
    spec = AdfSpec("none", lag_order)
    tau, coef, rows = _adf_regression(np.asarray(residuals.values), spec)
    p = mackinnon_pvalue(tau, surface, n_vars)
    return AdfResult(tau, coef, p, spec, rows, p < 0.05, residuals.name, n_vars)
