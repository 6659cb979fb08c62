"""Vector autoregressions in levels: estimation and lag-order criteria."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from ..errors import EstimationError
from ..series import AlignedSeries
from .ols import lstsq_qr

Criterion = Literal["AIC", "HQ", "SC", "FPE"]
CRITERIA: tuple[str, ...] = ("AIC", "HQ", "SC", "FPE")


def _as_matrix(data) -> tuple[np.ndarray, tuple[str, ...]]:
    if isinstance(data, AlignedSeries):
        return data.data, data.labels
    y = np.asarray(data, dtype=np.float64)
    if y.ndim == 1:
        y = y[:, None]
    return y, tuple(f"y{i + 1}" for i in range(y.shape[1]))


def var_design(y: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(Y, Z)`` for a VAR with intercept.

    Row ``t`` of ``Z`` is ``[1, y_{t-1}', ..., y_{t-order}']``; the first
    ``order`` observations are consumed as presample.
    """
    t_len, k = y.shape
    rows = t_len - order
    z = np.empty((rows, 1 + k * order))
    z[:, 0] = 1.0
    for lag in range(1, order + 1):
        z[:, 1 + (lag - 1) * k : 1 + lag * k] = y[order - lag : t_len - lag]
    return y[order:], z


@dataclass(frozen=True)
class VarModel:
    """A fitted VAR of order ``p + extra`` with an intercept.

    ``p`` is the lag order of interest; ``extra`` lags were appended on top
    (the augmentation used for causality testing). ``params`` is the
    ``(1 + K*(p+extra), K)`` coefficient matrix whose column ``k`` holds
    equation ``k``; ``coef_cov`` is the covariance of ``vec(params)``.
    """

    p: int
    extra: int
    labels: tuple[str, ...]
    params: np.ndarray = field(repr=False)
    residuals: np.ndarray = field(repr=False)
    endog: np.ndarray = field(repr=False)
    regressors: np.ndarray = field(repr=False)
    zz_inv: np.ndarray = field(repr=False)

    @property
    def order(self) -> int:
        return self.p + self.extra

    @property
    def k(self) -> int:
        return self.params.shape[1]

    @property
    def nobs(self) -> int:
        return self.residuals.shape[0]

    @property
    def ncoef(self) -> int:
        return self.params.shape[0]

    @property
    def intercept(self) -> np.ndarray:
        return self.params[0]

    @property
    def coefs(self) -> np.ndarray:
        """Lag matrices ``A_1 .. A_{p+extra}``; ``coefs[i][k, j]`` is lag i+1 of var j in eq k."""
        k = self.k
        return np.stack(
            [self.params[1 + i * k : 1 + (i + 1) * k].T for i in range(self.order)]
        ) if self.order else np.empty((0, k, k))

    @property
    def fitted(self) -> np.ndarray:
        return self.regressors @ self.params

    @property
    def sigma_mle(self) -> np.ndarray:
        return self.residuals.T @ self.residuals / self.nobs

    @property
    def sigma_unbiased(self) -> np.ndarray:
        return self.residuals.T @ self.residuals / (self.nobs - self.ncoef)

    @property
    def coef_cov(self) -> np.ndarray:
        return np.kron(self.sigma_unbiased, self.zz_inv)

    def coef_index(self, equation: int, variable: int, lag: int) -> int:
        """Position in ``vec(params)`` of lag ``lag`` of ``variable`` in ``equation``."""
        if not 1 <= lag <= self.order:
            raise ValueError(f"lag {lag} outside 1..{self.order}")
        return equation * self.ncoef + 1 + (lag - 1) * self.k + variable


def fit_var(data, p: int, extra: int = 0) -> VarModel:
    """Least-squares VAR(p + extra) with intercept, equation by equation.

    All equations share one regressor matrix, so a single QR factorization
    serves the whole system.
    """
    y, labels = _as_matrix(data)
    if p < 0 or extra < 0:
        raise ValueError("lag orders must be nonnegative")
    order = p + extra
    t_len, k = y.shape
    if not t_len - order > k * order + 1:
        raise EstimationError(
            f"VAR({p}+{extra}) needs T - {order} > {k * order + 1}, have T = {t_len}"
        )
    endog, z = var_design(y, order)
    fit = lstsq_qr(z, endog, what=f"VAR(p={p}, extra={extra}) on {', '.join(labels)}")
    return VarModel(p, extra, labels, fit.coef, fit.resid, endog, z, fit.xtx_inv)


@dataclass(frozen=True)
class LagSelection:
    """Information criteria for orders ``1 .. p_max`` on a common sample of ``nobs``."""

    p_max: int
    nobs: int | None
    aic: np.ndarray
    hq: np.ndarray
    sc: np.ndarray
    fpe: np.ndarray

    def __post_init__(self) -> None:
        for name in ("aic", "hq", "sc", "fpe"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if arr.shape != (self.p_max,):
                raise ValueError(f"{name} must have one value per order 1..{self.p_max}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} has non-finite entries")
            object.__setattr__(self, name, arr)

    def values(self, criterion: str) -> np.ndarray:
        try:
            return getattr(self, criterion.lower())
        except AttributeError:
            raise ValueError(f"unknown criterion {criterion!r}") from None

    def rows(self) -> list[dict[str, float]]:
        return [
            {"p": p, "AIC": self.aic[p - 1], "HQ": self.hq[p - 1], "SC": self.sc[p - 1], "FPE": self.fpe[p - 1]}
            for p in range(1, self.p_max + 1)
        ]


def information_criteria(
    logdet: float, p: int, k: int, nobs: int, intercept_penalty: bool = True
) -> dict[str, float]:
    """AIC, HQ, SC and FPE for one VAR order from ``ln det`` of the ML covariance.

    The penalty counts ``p * k**2`` slope coefficients, plus the ``k``
    intercepts when ``intercept_penalty`` is set; FPE uses ``k*p + 1``
    regressors per equation.
    """
    npar = p * k * k + (k if intercept_penalty else 0)
    q = k * p + 1
    return {
        "AIC": logdet + 2.0 * npar / nobs,
        "HQ": logdet + 2.0 * math.log(math.log(nobs)) * npar / nobs,
        "SC": logdet + math.log(nobs) * npar / nobs,
        "FPE": ((nobs + q) / (nobs - q)) ** k * math.exp(logdet),
    }


def lag_criteria(data, p_max: int = 10, intercept_penalty: bool = True) -> LagSelection:
    """Criteria for every order up to ``p_max``, all fit on the last ``T - p_max`` rows."""
    y, _ = _as_matrix(data)
    t_len, k = y.shape
    if p_max < 1:
        raise ValueError("p_max must be at least 1")
    nobs = t_len - p_max
    if not nobs > k * p_max + 1:
        raise EstimationError(
            f"p_max={p_max} infeasible: common sample {nobs} must exceed {k * p_max + 1}"
        )
    cols: dict[str, list[float]] = {c: [] for c in CRITERIA}
    for p in range(1, p_max + 1):
        model = fit_var(y[p_max - p :], p)
        sign, logdet = np.linalg.slogdet(model.sigma_mle)
        if sign <= 0:
            raise EstimationError(f"VAR({p}) residual covariance is singular")
        for name, value in information_criteria(logdet, p, k, nobs, intercept_penalty).items():
            cols[name].append(value)
    return LagSelection(
        p_max, nobs, np.array(cols["AIC"]), np.array(cols["HQ"]), np.array(cols["SC"]), np.array(cols["FPE"])
    )


def select_lag(table: LagSelection, criterion: str = "AIC") -> int:
    """Order minimizing ``criterion``; the smallest order wins ties."""
    values = table.values(criterion)
    return int(np.argmin(values)) + 1


def simulate_var(
    coefs: Sequence[np.ndarray],
    nobs: int,
    rng: np.random.Generator,
    intercept=None,
    noise_cov=None,
    burn: int = 100,
) -> np.ndarray:
    """Draw ``nobs`` observations from a Gaussian VAR; handy for tests and demos."""
    coefs = [np.atleast_2d(np.asarray(a, dtype=np.float64)) for a in coefs]
    k = coefs[0].shape[0]
    c = np.zeros(k) if intercept is None else np.asarray(intercept, dtype=np.float64)
    chol = np.eye(k) if noise_cov is None else np.linalg.cholesky(noise_cov)
    total = nobs + burn
    eps = rng.standard_normal((total, k)) @ chol.T
    y = np.zeros((total, k))
    for t in range(total):
        acc = c + eps[t]
        for i, a in enumerate(coefs, start=1):
            if t - i >= 0:
                acc = acc + a @ y[t - i]
        y[t] = acc
    return y[burn:]
