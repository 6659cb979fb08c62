"""Unit roots, VAR estimation, lag selection, residual diagnostics and stability."""

from .diagnostics import DiagnosticResult, breusch_godfrey_test, portmanteau_test
from .ols import lstsq_qr
from .stability import StabilityResult, ols_cusum
from .unitroot import (
    IntegrationAssessment,
    UnitRootResult,
    adf_test,
    assess_integration,
    integration_order,
    kpss_statistic,
    kpss_test,
)
from .var import (
    CRITERIA,
    LagSelection,
    VarModel,
    fit_var,
    information_criteria,
    lag_criteria,
    select_lag,
    simulate_var,
)

__all__ = [
    "CRITERIA",
    "DiagnosticResult",
    "IntegrationAssessment",
    "LagSelection",
    "StabilityResult",
    "UnitRootResult",
    "VarModel",
    "adf_test",
    "assess_integration",
    "breusch_godfrey_test",
    "fit_var",
    "information_criteria",
    "integration_order",
    "kpss_statistic",
    "kpss_test",
    "lag_criteria",
    "lstsq_qr",
    "ols_cusum",
    "portmanteau_test",
    "select_lag",
    "simulate_var",
]
