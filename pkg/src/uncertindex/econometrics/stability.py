"""OLS-CUSUM fluctuation processes for each VAR equation."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..distributions import brownian_bridge_boundary
from ..errors import EstimationError
from .var import VarModel


@dataclass(frozen=True)
class StabilityResult:
    labels: tuple[str, ...]
    paths: np.ndarray = field(repr=False)  # (T_eff, K)
    boundary: float
    alpha: float
    crossed: bool

    @property
    def max_abs(self) -> np.ndarray:
        return np.abs(self.paths).max(axis=0)

    def crossed_equations(self) -> list[str]:
        return [lab for lab, m in zip(self.labels, self.max_abs) if m > self.boundary]

    def to_csv(self, target) -> None:
        """``t,equation,value,boundary`` rows, one per path point."""
        lines = ["t,equation,value,boundary"]
        for k, label in enumerate(self.labels):
            for t, v in enumerate(self.paths[:, k], start=1):
                lines.append(f"{t},{label},{v:.8f},{self.boundary:.8f}")
        text = "\n".join(lines) + "\n"
        if isinstance(target, (str, os.PathLike)):
            Path(target).write_text(text, encoding="utf-8", newline="")
        else:
            target.write(text)


def ols_cusum(model: VarModel, alpha: float = 0.05) -> StabilityResult:
    """Cumulated OLS residuals of each equation, scaled by ``sigma * sqrt(T)``.

    ``sigma`` is the degrees-of-freedom adjusted residual standard error.
    The boundary is the constant whose Brownian-bridge exceedance
    probability equals ``alpha``.
    """
    u = model.residuals
    n = u.shape[0]
    if n < 10:
        raise ValueError(f"need at least 10 residuals, got {n}")
    sigma = np.sqrt(np.diag(model.sigma_unbiased))
    # an exact fit leaves rounding-level residuals, so compare against the data scale
    scale = np.maximum(np.abs(model.endog).max(axis=0), 1.0)
    flat = sigma <= 1e-10 * scale
    if np.any(flat):
        names = [lab for lab, f in zip(model.labels, flat) if f]
        raise EstimationError(f"zero residual variance in equation(s) {', '.join(names)}")
    paths = np.cumsum(u, axis=0) / (sigma * np.sqrt(n))
    boundary = brownian_bridge_boundary(alpha)
    crossed = bool(np.any(np.abs(paths) > boundary))
    return StabilityResult(model.labels, paths, float(boundary), alpha, crossed)
