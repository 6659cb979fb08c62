"""Tail probabilities and critical-value tables used by the test statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special


@dataclass(frozen=True)
class PValue:
    """A probability in [0, 1]. ``clipped`` is set when a table lookup hit its edge."""

    value: float
    clipped: bool = False

    def __post_init__(self) -> None:
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"p-value {self.value} outside [0, 1]")

    def __float__(self) -> float:
        return self.value

    def __lt__(self, other) -> bool:
        return self.value < float(other)

    def __le__(self, other) -> bool:
        return self.value <= float(other)

    def __gt__(self, other) -> bool:
        return self.value > float(other)

    def __ge__(self, other) -> bool:
        return self.value >= float(other)

    def format(self, digits: int = 3) -> str:
        if self.value < 10.0**-digits:
            return f"<{10.0**-digits:.{digits}f}"
        return f"{self.value:.{digits}f}"


def chi_square_sf(x: float, df: int) -> PValue:
    """P(chi2_df > x) from the regularized upper incomplete gamma function."""
    if df < 1 or int(df) != df:
        raise ValueError(f"df must be a positive integer, got {df}")
    if not x >= 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    return PValue(float(np.clip(special.gammaincc(df / 2.0, x / 2.0), 0.0, 1.0)))


# Dickey-Fuller tau critical values, Fuller (1976) Table 8.5.2, as reproduced
# in Hamilton (1994) Table B.6. Rows are sample sizes, columns the
# probabilities in _ADF_PROBS. The last row stands in for infinity.
_ADF_SIZES = np.array([25.0, 50.0, 100.0, 250.0, 500.0, 100000.0])
_ADF_PROBS = np.array([0.01, 0.025, 0.05, 0.10, 0.90, 0.95, 0.975, 0.99])
_ADF_TABLES = {
    # constant and linear trend (tau_tau)
    "ct": -np.array(
        [
            [4.38, 3.95, 3.60, 3.24, 1.14, 0.80, 0.50, 0.15],
            [4.15, 3.80, 3.50, 3.18, 1.19, 0.87, 0.58, 0.24],
            [4.04, 3.73, 3.45, 3.15, 1.22, 0.90, 0.62, 0.28],
            [3.99, 3.69, 3.43, 3.13, 1.23, 0.92, 0.64, 0.31],
            [3.98, 3.68, 3.42, 3.13, 1.24, 0.93, 0.65, 0.32],
            [3.96, 3.66, 3.41, 3.12, 1.25, 0.94, 0.66, 0.33],
        ]
    ),
    # constant only (tau_mu)
    "c": np.array(
        [
            [-3.75, -3.33, -3.00, -2.63, -0.37, 0.00, 0.34, 0.72],
            [-3.58, -3.22, -2.93, -2.60, -0.40, -0.03, 0.29, 0.66],
            [-3.51, -3.17, -2.89, -2.58, -0.42, -0.05, 0.26, 0.63],
            [-3.46, -3.14, -2.88, -2.57, -0.42, -0.06, 0.24, 0.62],
            [-3.44, -3.13, -2.87, -2.57, -0.43, -0.07, 0.24, 0.61],
            [-3.43, -3.12, -2.86, -2.57, -0.44, -0.07, 0.23, 0.60],
        ]
    ),
}


def adf_critical_values(n: float, regression: str = "ct") -> np.ndarray:
    """Tau critical values at each probability in the table, interpolated in ``n``."""
    try:
        table = _ADF_TABLES[regression]
    except KeyError:
        raise ValueError(f"unknown ADF regression {regression!r}") from None
    if n < _ADF_SIZES[0]:
        raise ValueError(f"sample size {n} below the smallest table row ({_ADF_SIZES[0]:.0f})")
    return np.array([np.interp(n, _ADF_SIZES, table[:, j]) for j in range(_ADF_PROBS.size)])


def adf_pvalue(stat: float, n: float, regression: str = "ct") -> PValue:
    """Left-tail p-value of a Dickey-Fuller tau statistic by table interpolation.

    Linear in the sample size first, then linear in the statistic between
    the probability knots. Outside [0.01, 0.99] the result is clipped.
    """
    crit = adf_critical_values(n, regression)
    if stat < crit[0]:
        return PValue(float(_ADF_PROBS[0]), clipped=True)
    if stat > crit[-1]:
        return PValue(float(_ADF_PROBS[-1]), clipped=True)
    return PValue(float(np.interp(stat, crit, _ADF_PROBS)))


# KPSS upper-tail critical values, Kwiatkowski et al. (1992) Table 1.
_KPSS_PROBS = np.array([0.10, 0.05, 0.025, 0.01])
_KPSS_TABLES = {
    "level": np.array([0.347, 0.463, 0.574, 0.739]),
    "trend": np.array([0.119, 0.146, 0.176, 0.216]),
}


def kpss_pvalue(stat: float, null: str = "level") -> PValue:
    if stat < 0:
        raise ValueError("KPSS statistic must be nonnegative")
    try:
        crit = _KPSS_TABLES[null]
    except KeyError:
        raise ValueError(f"unknown KPSS null {null!r}") from None
    if stat < crit[0]:
        return PValue(float(_KPSS_PROBS[0]), clipped=True)
    if stat > crit[-1]:
        return PValue(float(_KPSS_PROBS[-1]), clipped=True)
    return PValue(float(np.interp(stat, crit, _KPSS_PROBS)))


def brownian_bridge_sup_sf(lam: float, tol: float = 1e-12) -> PValue:
    """P(sup |B(t)| > lam) for a standard Brownian bridge on [0, 1].

    Uses the alternating series 2 * sum (-1)^(k+1) exp(-2 k^2 lam^2) for
    lam >= 0.5 and the equivalent theta-function form of the CDF below that,
    where the alternating series converges slowly.
    """
    if lam <= 0:
        return PValue(1.0)
    if lam >= 0.5:
        total, k = 0.0, 1
        while True:
            term = math.exp(-2.0 * k * k * lam * lam)
            total += term if k % 2 else -term
            if term < tol:
                break
            k += 1
        return PValue(min(1.0, max(0.0, 2.0 * total)))
    cdf, k = 0.0, 1
    c = math.pi**2 / (8.0 * lam * lam)
    while True:
        term = math.exp(-((2 * k - 1) ** 2) * c)
        cdf += term
        if term < tol:
            break
        k += 1
    cdf *= math.sqrt(2.0 * math.pi) / lam
    return PValue(min(1.0, max(0.0, 1.0 - cdf)))


def brownian_bridge_boundary(alpha: float) -> float:
    """The ``lam`` with ``brownian_bridge_sup_sf(lam) == alpha``."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    return optimize.brentq(
        lambda x: brownian_bridge_sup_sf(x).value - alpha, 0.2, 10.0, xtol=1e-12
    )
