"""Least squares by Householder QR."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from ..errors import EstimationError


@dataclass(frozen=True)
class LstsqResult:
    coef: np.ndarray  # (ncoef,) or (ncoef, neq)
    resid: np.ndarray
    xtx_inv: np.ndarray  # (X'X)^-1 from the R factor
    nobs: int
    ncoef: int

    @property
    def df_resid(self) -> int:
        return self.nobs - self.ncoef


def lstsq_qr(x: np.ndarray, y: np.ndarray, what: str = "regression", rtol: float = 1e-10) -> LstsqResult:
    """Solve ``min ||y - x b||`` via QR, never forming ``x'x``.

    Raises :class:`EstimationError` when ``x`` is rank deficient, judged by
    the smallest ``|R_ii|`` relative to the largest.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, k = x.shape
    if n <= k:
        raise EstimationError(f"{what}: {n} observations for {k} regressors")
    q, r = linalg.qr(x, mode="economic")
    diag = np.abs(np.diag(r))
    if diag.max() == 0 or diag.min() <= rtol * diag.max():
        raise EstimationError(f"{what}: regressor matrix is rank deficient")
    coef = linalg.solve_triangular(r, q.T @ y)
    rinv = linalg.solve_triangular(r, np.eye(k))
    return LstsqResult(coef, y - x @ coef, rinv @ rinv.T, n, k)
