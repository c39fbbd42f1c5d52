"""Report rendering: per-run timing table, per-run metrics table, and the
aggregate comparison table, in markdown (bold-max convention), CSV and JSON.

Markdown formats numbers to two decimals and bolds the highest value of each
comparable column pair; CSV and JSON carry full-precision values with no
styling.  The PSNR sentinel renders as "inf" everywhere.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

from .bench import ComparisonReport, ExperimentResult

FORMATS = ("md", "csv", "json")

_ARM_LABELS = {
    "with_generation": "with generation",
    "without_generation": "without generation",
}


@dataclass
class ReportTable:
    """Raw-valued table plus the set of (row, col) cells to bold."""

    key: str
    title: str
    headers: list
    rows: list
    bold: set = field(default_factory=set)


def _arm_label(exp: ExperimentResult) -> str:
    return _ARM_LABELS.get(exp.arm, exp.arm)


def _variant(exp: ExperimentResult) -> str:
    return exp.config_snapshot.get("ssim_variant", "global")


def _pair_bold(table: ReportTable, row_idx: int, col_a: int, col_b: int) -> None:
    a = table.rows[row_idx][col_a]
    b = table.rows[row_idx][col_b]
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        if a > b:
            table.bold.add((row_idx, col_a))
        elif b > a:
            table.bold.add((row_idx, col_b))


def _run_cell(run, getter):
    if run is None or run.failed:
        return None
    return getter(run)


def build_timing_table(experiments) -> ReportTable:
    """Per-run timing segments; columns grouped per arm, one row per run."""
    segments = (
        ("Acquisition (s)", lambda r: r.timing.acquisition_time),
        ("Style transfer (s)", lambda r: r.timing.style_transfer_time),
        ("Total (s)", lambda r: r.timing.total_time),
    )
    headers = ["Run"]
    for name, _ in segments:
        for exp in experiments:
            headers.append(f"{name} [{_arm_label(exp)}]")
    n_runs = max(len(e.runs) for e in experiments)
    table = ReportTable(key="timing_per_run", title="Timing per run", headers=headers, rows=[])
    for i in range(n_runs):
        row = [i + 1]
        for _, getter in segments:
            for exp in experiments:
                run = exp.runs[i] if i < len(exp.runs) else None
                row.append(getter(run) if run is not None else None)
        table.rows.append(row)
    if len(experiments) == 2:
        for r in range(len(table.rows)):
            for col in range(1, len(headers), 2):
                _pair_bold(table, r, col, col + 1)
    return table


def build_metrics_table(experiments) -> ReportTable:
    """Per-run SSIM and PSNR; columns grouped per arm, one row per run."""
    headers = ["Run"]
    for exp in experiments:
        headers.append(f"SSIM ({_variant(exp)}) [{_arm_label(exp)}]")
    for exp in experiments:
        headers.append(f"PSNR (dB) [{_arm_label(exp)}]")
    n_runs = max(len(e.runs) for e in experiments)
    table = ReportTable(key="metrics_per_run", title="Metrics per run", headers=headers, rows=[])
    n_arms = len(experiments)
    for i in range(n_runs):
        row = [i + 1]
        for exp in experiments:
            run = exp.runs[i] if i < len(exp.runs) else None
            row.append(_run_cell(run, lambda r: r.metrics.ssim))
        for exp in experiments:
            run = exp.runs[i] if i < len(exp.runs) else None
            row.append(_run_cell(run, lambda r: r.metrics.psnr))
        table.rows.append(row)
    if n_arms == 2:
        for r in range(len(table.rows)):
            _pair_bold(table, r, 1, 2)
            _pair_bold(table, r, 3, 4)
    return table


def build_aggregate_table(experiments) -> ReportTable:
    """One row per arm with the aggregate means; bold-max per column."""
    variants = {_variant(e) for e in experiments}
    ssim_header = f"Mean SSIM ({variants.pop()})" if len(variants) == 1 else "Mean SSIM"
    headers = [
        "Arm",
        "Mean acquisition (s)",
        "Mean style transfer (s)",
        "Mean total (s)",
        ssim_header,
        "Mean PSNR (dB)",
        "Included",
        "Excluded",
    ]
    table = ReportTable(key="aggregate", title="Aggregate comparison", headers=headers, rows=[])
    for exp in experiments:
        agg = exp.aggregate
        table.rows.append(
            [
                _arm_label(exp),
                agg.mean_acquisition_time,
                agg.mean_style_transfer_time,
                agg.mean_total_time,
                agg.mean_ssim,
                agg.mean_psnr,
                agg.n_included,
                agg.n_excluded,
            ]
        )
    if len(table.rows) >= 2:
        for col in range(1, 6):
            best_row = None
            best = None
            tied = False
            for r, row in enumerate(table.rows):
                v = row[col]
                if not isinstance(v, (int, float)):
                    continue
                if best is None or v > best:
                    best, best_row, tied = v, r, False
                elif v == best:
                    tied = True
            if best_row is not None and not tied:
                table.bold.add((best_row, col))
    return table


def build_comparison_table(comparison: ComparisonReport) -> ReportTable:
    headers = ["Column", "With generation", "Without generation", "Delta", "Percent", "Higher"]
    table = ReportTable(
        key="comparison", title="Arm deltas (with - without)", headers=headers, rows=[]
    )
    for col in comparison.columns:
        higher = "tie" if col.tie else (_ARM_LABELS.get(col.higher, col.higher) or "")
        table.rows.append(
            [col.name, col.with_value, col.without_value, col.delta, col.percent, higher]
        )
    return table


def build_tables(experiments, comparison: ComparisonReport | None = None):
    tables = [
        build_timing_table(experiments),
        build_metrics_table(experiments),
        build_aggregate_table(experiments),
    ]
    if comparison is not None:
        tables.append(build_comparison_table(comparison))
    return tables


def _md_cell(value, bold):
    if value is None:
        text = ""
    elif isinstance(value, float):
        text = "inf" if math.isinf(value) else f"{value:.2f}"
    else:
        text = str(value)
    return f"**{text}**" if bold and text else text


def render_markdown(tables, created_at=None) -> str:
    lines = []
    if created_at:
        lines.append(f"Run archive created at {created_at}.")
        lines.append("")
    for table in tables:
        lines.append(f"### {table.title}")
        lines.append("")
        lines.append("| " + " | ".join(table.headers) + " |")
        lines.append("|" + "|".join(" --- " for _ in table.headers) + "|")
        for r, row in enumerate(table.rows):
            cells = [_md_cell(v, (r, c) in table.bold) for c, v in enumerate(row)]
            lines.append("| " + " | ".join(cells) + " |")
        lines.append("")
    return "\n".join(lines)


def _raw_cell(value):
    if value is None:
        return ""
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return value


def render_csv(tables) -> str:
    """Long-form CSV: one record per cell, full precision."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["table", "row", "column", "value"])
    for table in tables:
        for row in table.rows:
            label = row[0]
            for header, value in zip(table.headers[1:], row[1:]):
                writer.writerow([table.key, label, header, _raw_cell(value)])
    return buf.getvalue()


def _json_cell(value):
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return value


def render_json(tables, created_at=None) -> str:
    doc = {
        "created_at": created_at,
        "tables": [
            {
                "key": t.key,
                "title": t.title,
                "headers": t.headers,
                "rows": [[_json_cell(v) for v in row] for row in t.rows],
            }
            for t in tables
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def render(tables, format: str, created_at=None) -> str:
    if format == "md":
        return render_markdown(tables, created_at)
    if format == "csv":
        return render_csv(tables)
    if format == "json":
        return render_json(tables, created_at)
    raise ValueError(f"unknown report format {format!r}; use one of {FORMATS}")
