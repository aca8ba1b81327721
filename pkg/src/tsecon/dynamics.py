"""Serial-correlation and stability machinery: iterative AR estimation with an
arbitrary disturbance-lag list, nested model comparison, Granger causality,
and Chow structural-break tests."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .dataset import Dataset, Term, apply_term
from .regress import (
    EstimationError,
    FitResult,
    ModelSpec,
    build_design,
    diagnostics,
    solve_ls,
)

__all__ = [
    "ArFitResult",
    "ArSpec",
    "ChowResult",
    "GrangerEntry",
    "GrangerResult",
    "ModelComparison",
    "chow_test",
    "cochrane_orcutt_fit",
    "compare_models",
    "granger_causality",
]


@dataclass(frozen=True)
class ArSpec:
    """A regression plus the lag structure of its disturbance process.

    ``ar_lags`` lists the disturbance lags, e.g. ``(1, 3, 4)`` for
    u_t = p1 u_{t-1} + p3 u_{t-3} + p4 u_{t-4} + e_t.  Iterations stop when two
    successive residual sums of squares differ by no more than
    ``convergence_rel_tol`` (0.005 percent) or after ``max_iterations``.
    """

    model: ModelSpec
    ar_lags: tuple[int, ...]
    max_iterations: int = 20
    convergence_rel_tol: float = 5e-5

    def __post_init__(self):
        if any(k <= 0 for k in self.ar_lags):
            raise EstimationError("AR lags must be positive")
        if any(b <= a for a, b in zip(self.ar_lags, self.ar_lags[1:])):
            raise EstimationError("AR lag list must be strictly increasing")
        if self.max_iterations < 1:
            raise EstimationError("max_iterations must be >= 1")


@dataclass(frozen=True)
class ArFitResult:
    structural: FitResult
    rho: tuple[float, ...]
    ar_lags: tuple[int, ...]
    iterations_used: int
    converged: bool
    divergence_flag: bool


@dataclass(frozen=True)
class GrangerEntry:
    cause: str
    effect: str
    lags: int
    n_obs: int
    f_stat: float
    p_value: float
    reject_5pct: bool


@dataclass(frozen=True)
class GrangerResult:
    pairs: tuple[GrangerEntry, ...]


@dataclass(frozen=True)
class ChowResult:
    break_year: int
    f_stat: float
    df: tuple[int, int]
    p_value: float
    reject_5pct: bool


def _ar_poly_stationary(rho: np.ndarray, lags: tuple[int, ...]) -> bool:
    """True when all roots of 1 - sum(rho_k z^k) lie outside the unit circle."""
    if not lags:
        return True
    order = max(lags)
    coeffs = np.zeros(order + 1)
    coeffs[0] = 1.0
    for r, k in zip(rho, lags):
        coeffs[k] = -r
    roots = np.roots(coeffs[::-1])  # np.roots wants highest degree first
    if roots.size == 0:
        return True
    return bool(np.min(np.abs(roots)) > 1.0 + 1e-12)


def cochrane_orcutt_fit(dataset: Dataset, spec: ArSpec) -> ArFitResult:
    """Iterative generalized least squares for a lagged disturbance process.

    Each iteration quasi-differences the data with the current disturbance
    coefficients, re-estimates the regression, and re-fits the disturbance
    coefficients by OLS of the residuals on their listed lags, until the
    transformed-regression SSR converges.
    """
    y, X, labels, years = build_design(dataset, spec.model)
    lags = spec.ar_lags
    if not lags:
        beta = solve_ls(X, y)
        fit = diagnostics(
            y, X, beta, labels, years, spec.model.dependent.rendered_label(),
            spec.model.include_constant, method="ar",
        )
        return ArFitResult(fit, (), (), 0, True, False)
    m = max(lags)
    n = len(y)
    if n - m <= X.shape[1]:
        raise EstimationError("insufficient observations after AR-lag trimming")

    rho = np.zeros(len(lags))
    beta = solve_ls(X, y)
    last_ssr = None
    converged = False
    iterations = 0
    final = None
    for iterations in range(1, spec.max_iterations + 1):
        # re-estimate the disturbance coefficients from current residuals
        e = y - X @ beta
        E = np.column_stack([e[m - k : n - k] for k in lags])
        rho, *_ = np.linalg.lstsq(E, e[m:], rcond=None)
        # quasi-difference and re-estimate the regression
        y_star = y[m:] - sum(r * y[m - k : n - k] for r, k in zip(rho, lags))
        X_star = X[m:] - sum(r * X[m - k : n - k] for r, k in zip(rho, lags))
        beta = solve_ls(X_star, y_star)
        final = diagnostics(
            y_star, X_star, beta, labels, years[m:],
            spec.model.dependent.rendered_label(), spec.model.include_constant,
            method="ar",
        )
        if last_ssr is not None and abs(final.ssr - last_ssr) <= spec.convergence_rel_tol * last_ssr:
            converged = True
            break
        last_ssr = final.ssr
    diverged = not _ar_poly_stationary(rho, lags)
    return ArFitResult(final, tuple(float(r) for r in rho), lags, iterations, converged, diverged)


@dataclass(frozen=True)
class ModelComparison:
    """Side-by-side selection statistics for two fits of the same dependent."""

    ssr: tuple[float, float]
    resid_std_error: tuple[float, float]
    schwarz: tuple[float, float]
    improved: dict[str, bool]


def compare_models(a: ArFitResult, b: ArFitResult) -> ModelComparison:
    """Selection table between two AR fits; ``improved`` flags where b beats a."""
    fa, fb = a.structural, b.structural
    if fa.dep_label != fb.dep_label:
        raise EstimationError("model comparison requires the same dependent variable")
    if fa.sample != fb.sample:
        raise EstimationError("model comparison requires identical samples")
    return ModelComparison(
        ssr=(fa.ssr, fb.ssr),
        resid_std_error=(fa.resid_std_error, fb.resid_std_error),
        schwarz=(fa.bic, fb.bic),
        improved={
            "ssr": fb.ssr < fa.ssr,
            "resid_std_error": fb.resid_std_error < fa.resid_std_error,
            "schwarz": fb.bic < fa.bic,
        },
    )


def _granger_one_direction(x: np.ndarray, y: np.ndarray, lags: int) -> tuple[float, float, int]:
    n = len(y)
    rows = n - lags
    k_u = 2 * lags + 1
    if rows - k_u <= 0:
        raise EstimationError("insufficient observations for the Granger regression")
    Y = y[lags:]
    own = [np.ones(rows)] + [y[lags - i : n - i] for i in range(1, lags + 1)]
    Xr = np.column_stack(own)
    Xu = np.column_stack(own + [x[lags - i : n - i] for i in range(1, lags + 1)])
    if np.linalg.matrix_rank(Xu) < Xu.shape[1]:
        raise EstimationError("collinear lag block in the Granger regression")
    br, *_ = np.linalg.lstsq(Xr, Y, rcond=None)
    bu, *_ = np.linalg.lstsq(Xu, Y, rcond=None)
    ssr_r = float((Y - Xr @ br) @ (Y - Xr @ br))
    ssr_u = float((Y - Xu @ bu) @ (Y - Xu @ bu))
    f = ((ssr_r - ssr_u) / lags) / (ssr_u / (rows - k_u))
    return float(f), float(stats.f.sf(f, lags, rows - k_u)), rows


def granger_causality(
    dataset: Dataset,
    x: Term,
    y: Term,
    lags: int,
    sample: tuple[int, int] | None = None,
) -> GrangerResult:
    """F tests of Granger non-causality in both directions.

    Stationarity of the two series is the caller's responsibility (the
    pipeline feeds first differences of I(1) variables).  ``sample`` clips the
    common window of the two evaluated series.
    """
    sx = apply_term(dataset, x)
    sy = apply_term(dataset, y)
    lo = max(sx.start_year, sy.start_year)
    hi = min(sx.end_year, sy.end_year)
    if sample is not None:
        lo, hi = max(lo, sample[0]), min(hi, sample[1])
    if lo > hi:
        raise EstimationError("Granger series do not overlap")
    ax = np.array([sx.value_in(t) for t in range(lo, hi + 1)])
    ay = np.array([sy.value_in(t) for t in range(lo, hi + 1)])
    entries = []
    for cause, effect, cs, es in ((sx, sy, ax, ay), (sy, sx, ay, ax)):
        f, p, rows = _granger_one_direction(cs, es, lags)
        entries.append(GrangerEntry(cause.name, effect.name, lags, rows, f, p, p < 0.05))
    return GrangerResult(tuple(entries))


def chow_test(dataset: Dataset, spec: ModelSpec, break_year: int) -> ChowResult:
    """Structural-break F test at a candidate year.

    The sample splits into years before ``break_year`` and years from it on;
    F = [(SSR_pooled - SSR1 - SSR2)/p] / [(SSR1 + SSR2)/(n - 2p)].
    """
    y, X, labels, years = build_design(dataset, spec)
    n, p = X.shape
    mask = years < break_year
    n1, n2 = int(mask.sum()), int((~mask).sum())
    if n1 <= p or n2 <= p:
        raise EstimationError(
            f"sub-sample too short for a {p}-parameter model at break {break_year}"
        )

    def ssr(yy, XX):
        b = solve_ls(XX, yy)
        r = yy - XX @ b
        return float(r @ r)

    ssr_p = ssr(y, X)
    ssr_1 = ssr(y[mask], X[mask])
    ssr_2 = ssr(y[~mask], X[~mask])
    f = ((ssr_p - ssr_1 - ssr_2) / p) / ((ssr_1 + ssr_2) / (n - 2 * p))
    pval = float(stats.f.sf(f, p, n - 2 * p))
    return ChowResult(break_year, float(f), (p, n - 2 * p), pval, pval < 0.05)
