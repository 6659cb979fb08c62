"""Residual serial-correlation tests for fitted VARs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from ..distributions import PValue, chi_square_sf
from ..errors import EstimationError
from .ols import lstsq_qr
from .var import VarModel


@dataclass(frozen=True)
class DiagnosticResult:
    method: Literal["PortmanteauAdjusted", "BreuschGodfrey"]
    statistic: float
    df: int
    pvalue: PValue
    lags: int

    def __str__(self) -> str:
        return f"{self.method}(h={self.lags}): stat={self.statistic:.4f} df={self.df} p={self.pvalue.value:.4f}"


def residual_autocov(resid: np.ndarray, lag: int) -> np.ndarray:
    """``C_j = (1/T) sum_{t>j} u_t u_{t-j}'`` (residuals are not re-centred)."""
    n = resid.shape[0]
    if lag == 0:
        return resid.T @ resid / n
    return resid[lag:].T @ resid[:-lag] / n


def portmanteau_test(model: VarModel, h: int = 16) -> DiagnosticResult:
    """Small-sample adjusted multivariate portmanteau test.

    ``Q = T^2 sum_{j=1}^{h} tr(C_j' C_0^-1 C_j C_0^-1) / (T - j)`` on
    ``K^2 (h - order)`` degrees of freedom, with ``order`` the number of
    lags estimated in the model.
    """
    if h <= model.order:
        raise ValueError(f"h={h} must exceed the model order {model.order}")
    u = model.residuals
    n, k = u.shape
    if h >= n:
        raise ValueError(f"h={h} must be below the sample size {n}")
    c0 = residual_autocov(u, 0)
    try:
        c0_inv = np.linalg.inv(c0)
    except np.linalg.LinAlgError:
        raise EstimationError("residual covariance is singular") from None
    q = 0.0
    for j in range(1, h + 1):
        cj = residual_autocov(u, j)
        q += np.trace(cj.T @ c0_inv @ cj @ c0_inv) / (n - j)
    q *= n * n
    df = k * k * (h - model.order)
    return DiagnosticResult("PortmanteauAdjusted", float(q), df, chi_square_sf(max(q, 0.0), df), h)


def breusch_godfrey_test(model: VarModel, h: int = 5) -> DiagnosticResult:
    """LM test from regressing residuals on the VAR regressors plus ``h`` residual lags.

    Presample residual lags are zero. ``LM = T (K - tr(S_full^-1 S_aux))`` on
    ``h K^2`` degrees of freedom.
    """
    if h < 1:
        raise ValueError("h must be at least 1")
    u = model.residuals
    n, k = u.shape
    lagged = np.zeros((n, h * k))
    for j in range(1, h + 1):
        lagged[j:, (j - 1) * k : j * k] = u[:-j]
    aux = lstsq_qr(np.hstack([model.regressors, lagged]), u, what="Breusch-Godfrey auxiliary regression")
    s_full = u.T @ u / n
    s_aux = aux.resid.T @ aux.resid / n
    try:
        ratio = np.linalg.solve(s_full, s_aux)
    except np.linalg.LinAlgError:
        raise EstimationError("residual covariance is singular") from None
    lm = float(n * (k - np.trace(ratio)))
    df = h * k * k
    return DiagnosticResult("BreuschGodfrey", lm, df, chi_square_sf(max(lm, 0.0), df), h)
