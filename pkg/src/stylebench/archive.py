"""Versioned JSON run archive.

Serialization is canonical (sorted keys, two-space indent, trailing newline)
so write -> read -> write round-trips byte-identically.  The PSNR sentinel
for identical images is stored as the string "inf" because JSON has no
portable infinity.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .bench import AggregateRow, ExperimentResult, RunResult, TimingRecord
from .errors import ArchiveError
from .metrics import LossBreakdown, MetricReport

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class RunArchive:
    schema_version: int
    created_at: str
    experiments: list


def new_archive(experiments) -> RunArchive:
    created = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return RunArchive(
        schema_version=SCHEMA_VERSION, created_at=created, experiments=list(experiments)
    )


def _encode_psnr(value):
    if value is None:
        return None
    if math.isinf(value):
        return "inf"
    return value


def _decode_psnr(value, where):
    if value is None:
        return None
    if value == "inf":
        return math.inf
    if isinstance(value, (int, float)):
        return float(value)
    raise ArchiveError(f"{where}: bad psnr value {value!r}")


def _metrics_to_doc(metrics: MetricReport):
    loss = None
    if metrics.loss is not None:
        loss = {
            "content_loss": metrics.loss.content_loss,
            "style_loss": metrics.loss.style_loss,
            "alpha": metrics.loss.alpha,
            "beta": metrics.loss.beta,
            "total": metrics.loss.total,
        }
    return {
        "ssim": metrics.ssim,
        "ssim_variant": metrics.ssim_variant,
        "psnr": _encode_psnr(metrics.psnr),
        "mse": metrics.mse,
        "loss": loss,
    }


def _metrics_from_doc(doc, where):
    loss = None
    if doc.get("loss") is not None:
        ld = doc["loss"]
        loss = LossBreakdown(
            content_loss=ld["content_loss"],
            style_loss=ld["style_loss"],
            alpha=ld["alpha"],
            beta=ld["beta"],
            total=ld["total"],
        )
    return MetricReport(
        ssim=doc["ssim"],
        psnr=_decode_psnr(doc["psnr"], where),
        mse=doc["mse"],
        ssim_variant=doc.get("ssim_variant", "global"),
        loss=loss,
    )


def _run_to_doc(run: RunResult):
    return {
        "run_index": run.run_index,
        "timing": {
            "acquisition_time": run.timing.acquisition_time,
            "style_transfer_time": run.timing.style_transfer_time,
            "total_time": run.timing.total_time,
        },
        "metrics": _metrics_to_doc(run.metrics) if run.metrics is not None else None,
        "style_image_digest": run.style_image_digest,
        "failed": run.failed,
        "failure_reason": run.failure_reason,
        "reference_resized": run.reference_resized,
    }


def _run_from_doc(doc, where):
    timing = doc["timing"]
    metrics = None
    if doc.get("metrics") is not None:
        metrics = _metrics_from_doc(doc["metrics"], where)
    return RunResult(
        run_index=doc["run_index"],
        timing=TimingRecord(
            acquisition_time=timing["acquisition_time"],
            style_transfer_time=timing["style_transfer_time"],
            total_time=timing["total_time"],
        ),
        metrics=metrics,
        style_image_digest=doc.get("style_image_digest"),
        failed=doc.get("failed", False),
        failure_reason=doc.get("failure_reason"),
        reference_resized=doc.get("reference_resized", False),
    )


def _aggregate_to_doc(agg: AggregateRow):
    return {
        "mean_acquisition_time": agg.mean_acquisition_time,
        "mean_style_transfer_time": agg.mean_style_transfer_time,
        "mean_total_time": agg.mean_total_time,
        "mean_ssim": agg.mean_ssim,
        "mean_psnr": _encode_psnr(agg.mean_psnr),
        "n_included": agg.n_included,
        "n_excluded": agg.n_excluded,
    }


def _aggregate_from_doc(doc, where):
    return AggregateRow(
        mean_acquisition_time=doc["mean_acquisition_time"],
        mean_style_transfer_time=doc["mean_style_transfer_time"],
        mean_total_time=doc["mean_total_time"],
        mean_ssim=doc["mean_ssim"],
        mean_psnr=_decode_psnr(doc["mean_psnr"], where),
        n_included=doc["n_included"],
        n_excluded=doc["n_excluded"],
    )


def _experiment_to_doc(exp: ExperimentResult):
    return {
        "arm": exp.arm,
        "config_snapshot": exp.config_snapshot,
        "runs": [_run_to_doc(r) for r in exp.runs],
        "aggregate": _aggregate_to_doc(exp.aggregate),
    }


def _experiment_from_doc(doc, index):
    where = f"experiments[{index}]"
    try:
        return ExperimentResult(
            arm=doc["arm"],
            config_snapshot=doc.get("config_snapshot", {}),
            runs=[_run_from_doc(r, where) for r in doc["runs"]],
            aggregate=_aggregate_from_doc(doc["aggregate"], where),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ArchiveError(f"{where}: {exc}") from exc


def archive_to_doc(archive: RunArchive) -> dict:
    return {
        "schema_version": archive.schema_version,
        "created_at": archive.created_at,
        "experiments": [_experiment_to_doc(e) for e in archive.experiments],
    }


def dumps(archive: RunArchive) -> str:
    """Canonical JSON text for an archive."""
    return json.dumps(archive_to_doc(archive), indent=2, sort_keys=True) + "\n"


def loads(text: str) -> RunArchive:
    try:
        doc = json.loads(text)
    except ValueError as exc:
        raise ArchiveError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ArchiveError("archive root must be an object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ArchiveError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
    try:
        experiments = [
            _experiment_from_doc(e, i) for i, e in enumerate(doc["experiments"])
        ]
        created_at = doc["created_at"]
    except KeyError as exc:
        raise ArchiveError(f"missing archive key: {exc}") from exc
    return RunArchive(
        schema_version=version, created_at=created_at, experiments=experiments
    )


def write_archive(archive: RunArchive, path) -> None:
    Path(path).write_text(dumps(archive), encoding="utf-8")


def read_archive(path) -> RunArchive:
    return loads(Path(path).read_text(encoding="utf-8"))
