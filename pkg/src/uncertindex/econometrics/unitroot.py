"""ADF and KPSS tests and the order-of-integration decision built on them."""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from ..distributions import PValue, adf_pvalue, kpss_pvalue
from ..errors import EstimationError
from .ols import lstsq_qr

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class UnitRootResult:
    method: Literal["ADF", "KPSS"]
    statistic: float
    lags: int
    pvalue: PValue
    nobs: int

    def __str__(self) -> str:
        return (
            f"{self.method}: stat={self.statistic:.4f} lags={self.lags} "
            f"p={self.pvalue.value:.4f}{' (clipped)' if self.pvalue.clipped else ''}"
        )


def _check_series(series, minimum: int = 25) -> np.ndarray:
    x = np.asarray(series, dtype=np.float64).reshape(-1)
    if x.size < minimum:
        raise ValueError(f"need at least {minimum} observations, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise ValueError("series contains non-finite values")
    if np.ptp(x) == 0:
        raise ValueError("series is constant")
    return x


def adf_test(series, lags: int | None = None, regression: str = "ct") -> UnitRootResult:
    """Augmented Dickey-Fuller test.

    Regresses ``dy_t`` on a constant, a linear trend (``regression="ct"``),
    ``y_{t-1}`` and ``lags`` lagged differences. The statistic is the t-ratio
    of the ``y_{t-1}`` coefficient; with ``lags=None`` the order is
    ``floor((T - 1) ** (1/3))``. The p-value is read from the Dickey-Fuller
    table at the series length ``T``.
    """
    x = _check_series(series)
    t_len = x.size
    if lags is None:
        lags = int(math.floor((t_len - 1) ** (1.0 / 3.0)))
    if lags < 0 or lags >= t_len / 3:
        raise ValueError(f"lags must be in [0, T/3), got {lags}")
    if regression not in ("c", "ct"):
        raise ValueError(f"unknown ADF regression {regression!r}")
    dx = np.diff(x)
    rows = dx.size - lags
    dep = dx[lags:]
    cols = [np.ones(rows), x[lags : lags + rows]]
    if regression == "ct":
        cols.append(np.arange(lags + 1, lags + 1 + rows, dtype=np.float64))
    for j in range(1, lags + 1):
        cols.append(dx[lags - j : lags - j + rows])
    design = np.column_stack(cols)
    fit = lstsq_qr(design, dep, what="ADF regression")
    s2 = fit.resid @ fit.resid / fit.df_resid
    if s2 <= 0:
        raise EstimationError("ADF regression has a perfect fit")
    stat = float(fit.coef[1] / math.sqrt(s2 * fit.xtx_inv[1, 1]))
    return UnitRootResult("ADF", stat, lags, adf_pvalue(stat, t_len, regression), rows)


def kpss_statistic(series, lags: int, null: str = "level") -> float:
    """KPSS statistic with Bartlett weights up to ``lags``; no sample-size floor."""
    x = np.asarray(series, dtype=np.float64).reshape(-1)
    t_len = x.size
    if not 0 <= lags < t_len:
        raise ValueError(f"lags must be in [0, T), got {lags}")
    if null == "level":
        e = x - x.mean()
    elif null == "trend":
        t = np.arange(1, t_len + 1, dtype=np.float64)
        e = lstsq_qr(np.column_stack([np.ones(t_len), t]), x, what="KPSS detrending").resid
    else:
        raise ValueError(f"unknown KPSS null {null!r}")
    s = np.cumsum(e)
    lrv = e @ e
    for lag in range(1, lags + 1):
        lrv += 2.0 * (1.0 - lag / (lags + 1.0)) * (e[lag:] @ e[:-lag])
    lrv /= t_len
    if lrv <= 0:
        raise EstimationError("KPSS long-run variance is not positive")
    return float((s @ s) / t_len**2 / lrv)


def kpss_test(series, null: str = "level", lags: int | None = None) -> UnitRootResult:
    """KPSS stationarity test with a Bartlett-weighted long-run variance.

    The default truncation is ``floor(4 * (T/100) ** 0.25)``.
    """
    x = _check_series(series)
    t_len = x.size
    if null not in ("level", "trend"):
        raise ValueError(f"unknown KPSS null {null!r}")
    if lags is None:
        lags = int(math.floor(4.0 * (t_len / 100.0) ** 0.25))
    stat = kpss_statistic(x, lags, null)
    return UnitRootResult("KPSS", stat, lags, kpss_pvalue(stat, null), t_len)


@dataclass(frozen=True)
class IntegrationAssessment:
    """Outcome of the differencing search.

    ``settled`` is False when no difference up to ``max_d`` passed both
    tests; ``order`` is then ``max_d``.
    """

    order: int
    settled: bool
    max_d: int
    tests: tuple[tuple[int, UnitRootResult, UnitRootResult], ...] = field(default=())


def assess_integration(
    series,
    max_d: int = 2,
    alpha: float = 0.05,
    adf_regression: str = "ct",
    kpss_null: str = "level",
    adf_lags: int | None = None,
) -> IntegrationAssessment:
    """Smallest ``d`` whose d-th difference looks stationary.

    A difference is judged stationary when the ADF test rejects a unit root
    (p < alpha) and the KPSS test does not reject stationarity (p >= alpha).
    """
    if max_d not in (1, 2):
        raise ValueError("max_d must be 1 or 2")
    x = np.asarray(series, dtype=np.float64).reshape(-1)
    tests = []
    for d in range(max_d + 1):
        z = np.diff(x, n=d) if d else x
        if z.size < 25:
            raise ValueError(f"series too short after differencing {d} times ({z.size} < 25)")
        adf = adf_test(z, lags=adf_lags, regression=adf_regression)
        kpss = kpss_test(z, null=kpss_null)
        tests.append((d, adf, kpss))
        if adf.pvalue.value < alpha and kpss.pvalue.value >= alpha:
            return IntegrationAssessment(d, True, max_d, tuple(tests))
    logger.info("no difference up to d=%d judged stationary; using d=%d", max_d, max_d)
    return IntegrationAssessment(max_d, False, max_d, tuple(tests))


def integration_order(series, max_d: int = 2, **kwargs) -> int:
    result = assess_integration(series, max_d=max_d, **kwargs)
    if not result.settled:
        warnings.warn(f"series not judged stationary up to d={max_d}", stacklevel=2)
    return result.order
