"""Toda-Yamamoto Granger causality between two monthly series.

The procedure fits a VAR in levels whose order ``p`` is picked by an
information criterion and raised until the residuals look white, appends
``m`` extra lags (``m`` = highest order of integration of the pair), and
Wald-tests only the first ``p`` lags of the candidate cause. The extra lags
keep the statistic asymptotically chi-square whether or not the series have
unit roots or are cointegrated.
"""

from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .distributions import PValue, chi_square_sf
from .econometrics import (
    CRITERIA,
    LagSelection,
    StabilityResult,
    VarModel,
    assess_integration,
    breusch_godfrey_test,
    fit_var,
    lag_criteria,
    ols_cusum,
    portmanteau_test,
    select_lag,
)
from .errors import ConfigError, EstimationError, UncertIndexError
from .series import MonthlySeries, align

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TYConfig:
    criterion: str = "AIC"
    p_max: int = 10
    alpha_diag: float = 0.05
    h_portmanteau: int = 16
    h_bg: int = 5
    max_d: int = 2
    alpha_unit_root: float = 0.05
    adf_regression: str = "ct"
    kpss_null: str = "level"
    alpha_stability: float = 0.05
    min_obs: int = 60
    intercept_penalty: bool = True

    def __post_init__(self) -> None:
        if self.criterion.upper() not in CRITERIA:
            raise ConfigError(f"criterion must be one of {CRITERIA}, got {self.criterion!r}")
        object.__setattr__(self, "criterion", self.criterion.upper())
        if self.p_max < 1:
            raise ConfigError("p_max must be at least 1")
        for name in ("alpha_diag", "alpha_unit_root", "alpha_stability"):
            if not 0.0 < getattr(self, name) < 1.0:
                raise ConfigError(f"{name} must lie in (0, 1)")
        if self.h_portmanteau <= self.p_max:
            raise ConfigError(
                f"h_portmanteau ({self.h_portmanteau}) must exceed p_max ({self.p_max})"
            )
        if self.h_bg < 1:
            raise ConfigError("h_bg must be at least 1")
        if self.max_d not in (1, 2):
            raise ConfigError("max_d must be 1 or 2")
        if self.adf_regression not in ("c", "ct"):
            raise ConfigError("adf_regression must be 'c' or 'ct'")
        if self.kpss_null not in ("level", "trend"):
            raise ConfigError("kpss_null must be 'level' or 'trend'")
        if self.min_obs < 25:
            raise ConfigError("min_obs must be at least 25")


@dataclass(frozen=True)
class WaldResult:
    statistic: float
    df: int
    pvalue: PValue


@dataclass(frozen=True)
class TrailEntry:
    """One test run during the procedure, in execution order."""

    step: int
    test: str
    subject: str
    statistic: float | None = None
    df: int | None = None
    pvalue: float | None = None
    note: str = ""

    def __str__(self) -> str:
        parts = [f"[{self.step}] {self.test} {self.subject}"]
        if self.statistic is not None:
            parts.append(f"stat={self.statistic:.4f}")
        if self.df is not None:
            parts.append(f"df={self.df}")
        if self.pvalue is not None:
            parts.append(f"p={self.pvalue:.4f}")
        if self.note:
            parts.append(self.note)
        return " ".join(parts)


def wald_statistic(beta, cov, restriction) -> float:
    """``(R b)' (R V R')^-1 (R b)`` for the null ``R b = 0``."""
    beta = np.asarray(beta, dtype=np.float64).reshape(-1)
    cov = np.asarray(cov, dtype=np.float64)
    r = np.atleast_2d(np.asarray(restriction, dtype=np.float64))
    rb = r @ beta
    middle = r @ cov @ r.T
    try:
        chol = np.linalg.cholesky(middle)
    except np.linalg.LinAlgError:
        raise EstimationError("restricted covariance R V R' is singular") from None
    z = np.linalg.solve(chol, rb)
    return float(z @ z)


def wald_exclusion(model: VarModel, target_eq: int, source_var: int, p: int) -> WaldResult:
    """Test that lags ``1..p`` of ``source_var`` are zero in equation ``target_eq``.

    Only the first ``p`` lags are restricted; augmentation lags beyond
    ``model.p`` are never part of the null.
    """
    if not 1 <= p <= model.p:
        raise ValueError(f"p={p} must lie in 1..{model.p} (the non-augmentation lags)")
    idx = [model.coef_index(target_eq, source_var, lag) for lag in range(1, p + 1)]
    beta = model.params.flatten(order="F")
    cov = model.coef_cov
    restriction = np.zeros((p, beta.size))
    restriction[np.arange(p), idx] = 1.0
    w = wald_statistic(beta, cov, restriction)
    return WaldResult(w, p, chi_square_sf(max(w, 0.0), p))


@dataclass(frozen=True)
class GrangerReport:
    x_label: str
    y_label: str
    sample_start: str
    sample_end: str
    nobs: int
    m: int
    criterion: str
    p_selected: int
    p: int
    lag_selection: LagSelection = field(repr=False)
    stability: StabilityResult = field(repr=False)
    wald_xy: WaldResult
    wald_yx: WaldResult
    trail: tuple[TrailEntry, ...] = field(repr=False)
    warnings: tuple[str, ...] = ()

    def direction(self, cause: str) -> WaldResult:
        if cause == self.x_label:
            return self.wald_xy
        if cause == self.y_label:
            return self.wald_yx
        raise KeyError(cause)

    def diag_notes(self) -> str:
        final = [e for e in self.trail if e.step == 4][-2:]
        notes = [f"{self.criterion} p={self.p_selected}"]
        notes += [f"{e.test} p={e.pvalue:.4f}" for e in final]
        notes += list(self.warnings)
        return "; ".join(notes)

    def describe(self) -> str:
        """Multi-line account of every step, for the text summary."""
        lines = [
            f"{self.x_label} / {self.y_label}, {self.sample_start}..{self.sample_end} (T={self.nobs})",
            f"  integration order m={self.m}; {self.criterion} p={self.p_selected}; final p={self.p}",
            "  lag criteria:",
            "    p        AIC          HQ          SC         FPE",
        ]
        for row in self.lag_selection.rows():
            lines.append(
                f"    {row['p']:<3d}{row['AIC']:>11.6f} {row['HQ']:>11.6f} {row['SC']:>11.6f} {row['FPE']:>11.6f}"
            )
        lines.append("  trail:")
        lines += [f"    {e}" for e in self.trail]
        lines.append(
            f"  Wald {self.x_label}->{self.y_label}: W={self.wald_xy.statistic:.4f} "
            f"df={self.wald_xy.df} p={self.wald_xy.pvalue.value:.4f}"
        )
        lines.append(
            f"  Wald {self.y_label}->{self.x_label}: W={self.wald_yx.statistic:.4f} "
            f"df={self.wald_yx.df} p={self.wald_yx.pvalue.value:.4f}"
        )
        lines += [f"  warning: {w}" for w in self.warnings]
        return "\n".join(lines)


def toda_yamamoto(
    x: MonthlySeries,
    y: MonthlySeries,
    cfg: TYConfig | None = None,
    start: str | None = None,
    end: str | None = None,
) -> GrangerReport:
    """Run the full procedure for the pair over ``start..end`` (default: overlap)."""
    cfg = cfg or TYConfig()
    data = align([x, y], start, end)
    if data.nobs < cfg.min_obs:
        raise EstimationError(
            f"{x.label}/{y.label}: {data.nobs} common months, need at least {cfg.min_obs}"
        )
    if data.nobs - cfg.p_max <= data.k * (cfg.p_max + cfg.max_d) + 1:
        raise EstimationError(
            f"{x.label}/{y.label}: {data.nobs} months too few for p_max={cfg.p_max}"
        )
    trail: list[TrailEntry] = []
    notes: list[str] = []

    # 1. order of integration
    m = 0
    for label in data.labels:
        res = assess_integration(
            data.column(label),
            max_d=cfg.max_d,
            alpha=cfg.alpha_unit_root,
            adf_regression=cfg.adf_regression,
            kpss_null=cfg.kpss_null,
        )
        for d, adf, kpss in res.tests:
            for t in (adf, kpss):
                trail.append(
                    TrailEntry(1, t.method, f"{label} d={d}", t.statistic, None, t.pvalue.value, f"lags={t.lags}")
                )
        if not res.settled:
            raise EstimationError(
                f"{label}: not judged stationary after {cfg.max_d} differences; "
                "refusing to guess the integration order"
            )
        trail.append(TrailEntry(1, "order", label, note=f"d={res.order}"))
        m = max(m, res.order)

    # 2. lag order on levels
    selection = lag_criteria(data, cfg.p_max, intercept_penalty=cfg.intercept_penalty)
    p_selected = select_lag(selection, cfg.criterion)
    trail.append(TrailEntry(2, cfg.criterion, "levels", note=f"p={p_selected}"))

    # 3. stability of the selected VAR
    model = fit_var(data, p_selected)
    stability = ols_cusum(model, cfg.alpha_stability)
    trail.append(_stability_entry(stability, p_selected))
    if stability.crossed:
        notes.append(f"OLS-CUSUM boundary crossed at p={p_selected}")

    # 4. raise p until residuals pass both serial-correlation tests
    p = p_selected
    while True:
        if p != model.p:
            model = fit_var(data, p)
        pt = portmanteau_test(model, cfg.h_portmanteau)
        bg = breusch_godfrey_test(model, cfg.h_bg)
        for diag in (pt, bg):
            trail.append(TrailEntry(4, diag.method, f"p={p}", diag.statistic, diag.df, diag.pvalue.value))
        if pt.pvalue.value >= cfg.alpha_diag and bg.pvalue.value >= cfg.alpha_diag:
            break
        if p >= cfg.p_max:
            notes.append(f"serial correlation persists at p_max={cfg.p_max}")
            break
        p += 1
    if p != p_selected:
        stability = ols_cusum(model, cfg.alpha_stability)
        trail.append(_stability_entry(stability, p))
        if stability.crossed:
            notes.append(f"OLS-CUSUM boundary crossed at p={p}")

    # 5. augmentation
    augmented = fit_var(data, p, extra=m)
    trail.append(TrailEntry(5, "augment", f"VAR({p}+{m})", note=f"T_eff={augmented.nobs}"))

    # 6. Wald tests on the first p lags only
    wald_xy = wald_exclusion(augmented, target_eq=1, source_var=0, p=p)
    wald_yx = wald_exclusion(augmented, target_eq=0, source_var=1, p=p)
    trail.append(TrailEntry(6, "Wald", f"{x.label}->{y.label}", wald_xy.statistic, p, wald_xy.pvalue.value))
    trail.append(TrailEntry(6, "Wald", f"{y.label}->{x.label}", wald_yx.statistic, p, wald_yx.pvalue.value))

    for n in notes:
        logger.warning("%s/%s %s..%s: %s", x.label, y.label, data.months[0], data.months[-1], n)
    return GrangerReport(
        x.label,
        y.label,
        data.months[0],
        data.months[-1],
        data.nobs,
        m,
        cfg.criterion,
        p_selected,
        p,
        selection,
        stability,
        wald_xy,
        wald_yx,
        tuple(trail),
        tuple(notes),
    )


def _stability_entry(stability: StabilityResult, p: int) -> TrailEntry:
    worst = ", ".join(f"{lab}={v:.4f}" for lab, v in zip(stability.labels, stability.max_abs))
    return TrailEntry(
        3,
        "OLS-CUSUM",
        f"p={p}",
        float(stability.max_abs.max()),
        note=f"boundary={stability.boundary:.4f} crossed={stability.crossed} max|path| {worst}",
    )


REPORT_COLUMNS = (
    "from",
    "to",
    "sample_start",
    "sample_end",
    "m",
    "p",
    "wald_stat",
    "df",
    "pvalue",
    "stability_crossed",
    "diag_notes",
)


@dataclass(frozen=True)
class CausalityCell:
    x_label: str
    y_label: str
    start: str | None
    end: str | None
    report: GrangerReport | None = None
    error: str | None = None


@dataclass(frozen=True)
class CausalityTable:
    cells: tuple[CausalityCell, ...]
    ranges: tuple[tuple[str | None, str | None], ...]

    def rows(self) -> list[dict[str, str]]:
        out = []
        for cell in self.cells:
            r = cell.report
            for src, dst in ((cell.x_label, cell.y_label), (cell.y_label, cell.x_label)):
                if r is None:
                    out.append(
                        {
                            "from": src,
                            "to": dst,
                            "sample_start": cell.start or "",
                            "sample_end": cell.end or "",
                            "m": "",
                            "p": "",
                            "wald_stat": "",
                            "df": "",
                            "pvalue": "",
                            "stability_crossed": "",
                            "diag_notes": f"error: {cell.error}",
                        }
                    )
                    continue
                w = r.direction(src)
                out.append(
                    {
                        "from": src,
                        "to": dst,
                        "sample_start": r.sample_start,
                        "sample_end": r.sample_end,
                        "m": str(r.m),
                        "p": str(r.p),
                        "wald_stat": f"{w.statistic:.8f}",
                        "df": str(w.df),
                        "pvalue": f"{w.pvalue.value:.8f}",
                        "stability_crossed": str(r.stability.crossed).lower(),
                        "diag_notes": r.diag_notes(),
                    }
                )
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=REPORT_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.rows())
        return buf.getvalue()

    def grid(self) -> str:
        """p-values with one From/To row per direction and one column per sample."""
        heads = [_range_label(s, e) for s, e in self.ranges]
        pairs: list[tuple[str, str]] = []
        for c in self.cells:
            if (c.x_label, c.y_label) not in pairs:
                pairs.append((c.x_label, c.y_label))
        lookup = {(c.x_label, c.y_label, c.start, c.end): c for c in self.cells}
        width = max([6] + [len(lab) for pair in pairs for lab in pair]) + 2
        colw = max([8] + [len(h) for h in heads]) + 2
        lines = ["P-values of Toda-Yamamoto Granger causality tests", ""]
        lines.append(("From".ljust(width) + "To".ljust(width) + "".join(h.ljust(colw) for h in heads)).rstrip())
        for x_lab, y_lab in pairs:
            for src, dst in ((x_lab, y_lab), (y_lab, x_lab)):
                cells = []
                for s, e in self.ranges:
                    cell = lookup[(x_lab, y_lab, s, e)]
                    if cell.report is None:
                        cells.append("error")
                    else:
                        cells.append(cell.report.direction(src).pvalue.format(3))
                lines.append(
                    (src.ljust(width) + dst.ljust(width) + "".join(c.ljust(colw) for c in cells)).rstrip()
                )
        return "\n".join(lines) + "\n"

    def summary(self) -> str:
        """The p-value grid, Wald degrees of freedom, then per-cell details."""
        lines = [self.grid(), "Wald degrees of freedom:"]
        for c in self.cells:
            label = f"{c.x_label} and {c.y_label}, {_range_label(c.start, c.end)}"
            lines.append(f"  {label}: {c.report.p if c.report else 'error'}")
        lines.append("")
        for c in self.cells:
            if c.report is None:
                lines.append(f"{c.x_label} / {c.y_label}, {_range_label(c.start, c.end)}: error: {c.error}")
            else:
                lines.append(c.report.describe())
            lines.append("")
        return "\n".join(lines).rstrip("\n") + "\n"


def _range_label(start: str | None, end: str | None) -> str:
    return f"{start or 'start'}..{end or 'end'}"


def causality_matrix(
    pairs: Sequence[tuple[MonthlySeries, MonthlySeries]],
    cfg: TYConfig | None = None,
    subsamples: Sequence[tuple[str | None, str | None]] | None = None,
    max_workers: int | None = None,
) -> CausalityTable:
    """One report per (pair, sample range); failures are kept inline.

    Cells are independent and may run on a thread pool; the output order is
    pairs-major, ranges-minor regardless of completion order.
    """
    cfg = cfg or TYConfig()
    ranges = tuple(subsamples) if subsamples else ((None, None),)
    jobs = [(x, y, s, e) for x, y in pairs for s, e in ranges]

    def run(job) -> CausalityCell:
        x, y, s, e = job
        try:
            return CausalityCell(x.label, y.label, s, e, report=toda_yamamoto(x, y, cfg, s, e))
        except (UncertIndexError, ValueError) as exc:
            logger.error("%s/%s %s: %s", x.label, y.label, _range_label(s, e), exc)
            return CausalityCell(x.label, y.label, s, e, error=str(exc))

    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            cells = list(pool.map(run, jobs))
    else:
        cells = [run(j) for j in jobs]
    return CausalityTable(tuple(cells), ranges)
