"""VAR(p) estimation with orthogonalized impulse responses and forecast-error
variance decomposition.

Estimation is equation-by-equation OLS on a shared lag design.  Impulse
responses use the moving-average recursion Psi_0 = I,
Psi_h = sum_i A_i Psi_{h-i}, orthogonalized by the lower Cholesky factor of
the residual covariance; the variable ordering is the Cholesky ordering.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import Dataset, Term, apply_term
from .regress import EstimationError

__all__ = ["FevdResult", "IrfResult", "VarModel", "impulse_response", "var_fit", "variance_decomposition"]


@dataclass(frozen=True)
class VarModel:
    labels: tuple[str, ...]
    p: int
    intercepts: np.ndarray
    coefficient_matrices: tuple[np.ndarray, ...]
    residual_cov: np.ndarray
    sample: tuple[int, int]
    n_effective: int

    @property
    def k(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class IrfResult:
    """Orthogonalized responses to one-standard-deviation shocks.

    ``responses[shock, respond, step]``; step 0 is the impact period, so the
    step-0 matrix (transposed back) is the Cholesky factor itself.
    """

    horizon: int
    responses: np.ndarray
    ordering: tuple[str, ...]
    cholesky_failed: bool = False

    def response(self, shock: str, respond: str) -> np.ndarray:
        i = self.ordering.index(shock)
        j = self.ordering.index(respond)
        return self.responses[i, j, :]


@dataclass(frozen=True)
class FevdResult:
    """``shares[respond, step, shock]``, summing to one over shocks."""

    horizon: int
    shares: np.ndarray
    ordering: tuple[str, ...]


def var_fit(
    dataset: Dataset,
    variables: Sequence[Term],
    p: int,
    sample: tuple[int, int] | None = None,
) -> VarModel:
    """Fit a VAR(p) by per-equation OLS over the common sample."""
    if p < 1:
        raise EstimationError("VAR lag order must be >= 1")
    evaluated = [apply_term(dataset, t) for t in variables]
    lo = max(s.start_year for s in evaluated)
    hi = min(s.end_year for s in evaluated)
    if sample is not None:
        lo, hi = max(lo, sample[0]), min(hi, sample[1])
    if lo > hi:
        raise EstimationError("VAR variables do not share a sample window")
    years = np.arange(lo, hi + 1)
    Y = np.column_stack([[s.value_in(int(t)) for t in years] for s in evaluated])
    T, k = Y.shape
    rows = T - p
    ncoef = k * p + 1
    if rows < ncoef + 1:
        raise EstimationError(
            f"insufficient sample: {rows} effective observations for {ncoef} "
            "coefficients per equation"
        )
    X = np.column_stack([np.ones(rows)] + [Y[p - i : T - i] for i in range(1, p + 1)])
    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise EstimationError("rank-deficient VAR design")
    B, *_ = np.linalg.lstsq(X, Y[p:], rcond=None)
    E = Y[p:] - X @ B
    sigma = E.T @ E / (rows - ncoef)
    A = tuple(B[1 + i * k : 1 + (i + 1) * k].T for i in range(p))
    return VarModel(
        labels=tuple(s.name for s in evaluated),
        p=p,
        intercepts=B[0].copy(),
        coefficient_matrices=A,
        residual_cov=(sigma + sigma.T) / 2.0,
        sample=(int(years[0]), int(years[-1])),
        n_effective=rows,
    )


def _ma_matrices(model: VarModel, horizon: int) -> list[np.ndarray]:
    k, p = model.k, model.p
    psi = [np.eye(k)]
    for h in range(1, horizon + 1):
        M = np.zeros((k, k))
        for i in range(1, min(h, p) + 1):
            M = M + model.coefficient_matrices[i - 1] @ psi[h - i]
        psi.append(M)
    return psi


def _factor(cov: np.ndarray) -> tuple[np.ndarray, bool]:
    try:
        return np.linalg.cholesky(cov), False
    except np.linalg.LinAlgError:
        # semidefinite fallback: eigenvalue clipping keeps the factor usable
        warnings.warn("residual covariance not positive definite; using clipped factorization")
        w, V = np.linalg.eigh(cov)
        w = np.clip(w, 0.0, None)
        L = V @ np.diag(np.sqrt(w))
        return L, True


def impulse_response(model: VarModel, horizon: int) -> IrfResult:
    """Orthogonalized impulse responses out to ``horizon`` steps."""
    if horizon < 0:
        raise EstimationError("horizon must be >= 0")
    P, failed = _factor(model.residual_cov)
    psi = _ma_matrices(model, horizon)
    k = model.k
    responses = np.empty((k, k, horizon + 1))
    for h, M in enumerate(psi):
        theta = M @ P  # rows respond, columns shock
        responses[:, :, h] = theta.T
    return IrfResult(horizon, responses, model.labels, failed)


def variance_decomposition(model: VarModel, horizon: int) -> FevdResult:
    """Share of each variable's forecast-error variance due to each shock."""
    irf = impulse_response(model, horizon)
    k = model.k
    shares = np.empty((k, horizon + 1, k))
    # cumulative squared responses over steps 0..h
    sq = irf.responses**2  # [shock, respond, step]
    cum = np.cumsum(sq, axis=2)
    for j in range(k):  # responding variable
        for h in range(horizon + 1):
            total = cum[:, j, h].sum()
            if total <= 0.0:
                raise EstimationError("degenerate model: zero forecast-error variance")
            shares[j, h, :] = cum[:, j, h] / total
    return FevdResult(horizon, shares, model.labels)
