"""Counterfactual capital-growth scenarios for unemployment and exports.

The counterfactual is a dynamic deviation simulation: from the first override
year onward the fitted equation propagates the gap between the scenario
capital-growth rate and the actual one, with previously simulated deviations
feeding the autoregressive lags.  The baseline is the actual data path, so a
scenario that prescribes the actual growth rates reproduces the baseline
exactly, while an early shock still moves every later year through the lag
dynamics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from .dataset import AnnualSeries
from .regress import EstimationError, FitResult

__all__ = ["CapitalScenario", "ScenarioResult", "simulate_exports", "simulate_unemployment"]


@dataclass(frozen=True)
class CapitalScenario:
    """Named schedule of capital growth overrides.

    ``overrides`` maps a year to a growth rate; each rate applies from its
    year until the next override year (the last one carries to the end of the
    window).  Rates are plain growth fractions, e.g. 0.15 for 15% growth.
    """

    name: str
    overrides: Mapping[int, float]

    def rate_for(self, year: int) -> float | None:
        applicable = [y for y in self.overrides if y <= year]
        return self.overrides[max(applicable)] if applicable else None

    @property
    def first_year(self) -> int | None:
        return min(self.overrides) if self.overrides else None


@dataclass(frozen=True)
class ScenarioResult:
    baseline_path: AnnualSeries
    counterfactual_path: AnnualSeries
    terminal_delta: float
    derived_quantities: dict[str, float] = field(default_factory=dict)


def _coeff(fit: FitResult, label: str) -> float:
    try:
        return fit.coefficient(label).estimate
    except KeyError:
        raise EstimationError(f"fit is missing the required coefficient {label!r}") from None


def _deviation_path(
    beta_k: float,
    ar_coeffs: tuple[float, float],
    scenario: CapitalScenario,
    years: range,
    actual_growth: AnnualSeries,
    as_log_growth: bool,
) -> dict[int, float]:
    dev: dict[int, float] = {}
    for y in years:
        rate = scenario.rate_for(y)
        if rate is None:
            dev[y] = 0.0
            continue
        g_scen = math.log1p(rate) if as_log_growth else rate
        g_act = actual_growth.value_in(y)
        dev[y] = (
            beta_k * (g_scen - g_act)
            + ar_coeffs[0] * dev.get(y - 1, 0.0)
            + ar_coeffs[1] * dev.get(y - 2, 0.0)
        )
    return dev


def _check_window(
    window: tuple[int, int], scenario: CapitalScenario, *series: AnnualSeries
) -> range:
    lo, hi = window
    if lo > hi:
        raise EstimationError("empty simulation window")
    outside = [y for y in scenario.overrides if not lo <= y <= hi]
    if outside:
        raise EstimationError(f"override years {outside} lie outside the window {lo}-{hi}")
    for s in series:
        if lo < s.start_year or hi > s.end_year:
            raise EstimationError(
                f"window {lo}-{hi} outside the data range of {s.name!r} "
                f"({s.start_year}-{s.end_year})"
            )
    return range(lo, hi + 1)


def simulate_unemployment(
    fit: FitResult,
    scenario: CapitalScenario,
    window: tuple[int, int],
    eap: float,
    unemployment: AnnualSeries,
    capital_growth: AnnualSeries,
    capital_label: str = "d_Ln(K)",
    as_log_growth: bool = True,
) -> ScenarioResult:
    """Counterfactual unemployment path under a capital-growth schedule.

    ``fit`` must carry coefficients for the constant, the capital-growth
    regressor (``capital_label``), and the first two lags of the dependent
    variable.  Jobs created = (terminal actual - terminal simulated)/100 x eap.
    """
    _coeff(fit, "const")
    beta_k = _coeff(fit, capital_label)
    dep = fit.dep_label
    ar = (_coeff(fit, f"{dep}(-1)"), _coeff(fit, f"{dep}(-2)"))
    years = _check_window(window, scenario, unemployment, capital_growth)
    dev = _deviation_path(beta_k, ar, scenario, years, capital_growth, as_log_growth)
    base = tuple(unemployment.value_in(y) for y in years)
    cf = tuple(b + dev[y] for b, y in zip(base, years))
    terminal = cf[-1] - base[-1]
    jobs = (base[-1] - cf[-1]) / 100.0 * eap
    return ScenarioResult(
        AnnualSeries("unemployment baseline", years[0], base, "percent"),
        AnnualSeries(f"unemployment: {scenario.name}", years[0], cf, "percent"),
        terminal,
        {"terminal_unemployment": cf[-1], "jobs_created": jobs},
    )


def simulate_exports(
    fit: FitResult,
    scenario: CapitalScenario,
    window: tuple[int, int],
    terminal_actual_usd: float,
    exports: AnnualSeries,
    capital_growth: AnnualSeries,
    capital_label: str = "d_Ln(K)",
    as_log_growth: bool = True,
) -> ScenarioResult:
    """Counterfactual export path; the equation is dynamic in log exports.

    The deviation propagates in log space and is exponentiated for reporting;
    the terminal percentage delta converts to dollars against
    ``terminal_actual_usd``.
    """
    _coeff(fit, "const")
    beta_k = _coeff(fit, capital_label)
    dep = fit.dep_label
    ar = (_coeff(fit, f"{dep}(-1)"), _coeff(fit, f"{dep}(-2)"))
    years = _check_window(window, scenario, exports, capital_growth)
    dev = _deviation_path(beta_k, ar, scenario, years, capital_growth, as_log_growth)
    base = tuple(exports.value_in(y) for y in years)
    cf = tuple(b * math.exp(dev[y]) for b, y in zip(base, years))
    pct = cf[-1] / base[-1] - 1.0
    return ScenarioResult(
        AnnualSeries("exports baseline", years[0], base, exports.unit),
        AnnualSeries(f"exports: {scenario.name}", years[0], cf, exports.unit),
        cf[-1] - base[-1],
        {
            "terminal_pct_delta": 100.0 * pct,
            "usd_delta": pct * terminal_actual_usd,
        },
    )
