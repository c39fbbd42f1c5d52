"""Experimental protocol: timed trials, aggregation, arm comparison.

One trial = acquire style image -> stylize -> measure, all under a single
end-to-end stopwatch.  Experiments run trials strictly sequentially (timing
fidelity), aggregate arithmetic means over the non-failed runs, and two arms
(with-generation vs pre-existing style file) are compared column by column.

Failures never abort an experiment: a failed acquisition or backend call
produces a RunResult flagged ``failed`` that carries the reason and no
metrics.
"""

from __future__ import annotations

import dataclasses
import logging
import math
import time
from dataclasses import dataclass, field

from . import kernels
from .errors import (
    BackendError,
    ChannelMismatchError,
    GenerationError,
    ImageError,
    RateLimitedError,
)
from .genclient import ClientConfig, StyleSource, acquire_style
from .image import RasterImage, image_digest, resize_bilinear, to_luma
from .metrics import (
    DEFAULT_SSIM_PARAMS,
    MetricReport,
    SsimParams,
    metric_report,
    style_transfer_loss,
)
from .stylizer import StylizeRequest, stylize

logger = logging.getLogger(__name__)

ARM_WITH_GENERATION = "with_generation"
ARM_WITHOUT_GENERATION = "without_generation"

REFERENCE_CONTENT = "content"
REFERENCE_STYLE = "style"

# cap on how long a rate-limit retry may sleep, regardless of the header
MAX_RETRY_SLEEP = 30.0

COMPARE_COLUMNS = (
    ("acquisition_time", "mean_acquisition_time"),
    ("style_transfer_time", "mean_style_transfer_time"),
    ("total_time", "mean_total_time"),
    ("ssim", "mean_ssim"),
    ("psnr", "mean_psnr"),
)


@dataclass(frozen=True)
class TimingRecord:
    """The three timing segments of one run; total_time is its own stopwatch,
    not a sum of the segments."""

    acquisition_time: float
    style_transfer_time: float
    total_time: float

    def __post_init__(self):
        for name in ("acquisition_time", "style_transfer_time", "total_time"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.total_time < max(self.acquisition_time, self.style_transfer_time):
            raise ValueError("total_time must be >= each timing segment")


@dataclass(frozen=True)
class RunResult:
    """Outcome of one trial; failed runs carry a reason and no metrics."""

    run_index: int
    timing: TimingRecord
    metrics: MetricReport | None
    style_image_digest: str | None
    failed: bool = False
    failure_reason: str | None = None
    reference_resized: bool = False

    def __post_init__(self):
        if self.failed and self.metrics is not None:
            raise ValueError("failed runs must not carry metrics")
        if self.failed and not self.failure_reason:
            raise ValueError("failed runs must carry a reason")


@dataclass(frozen=True)
class AggregateRow:
    """Arithmetic means over the included (non-failed) runs.

    ``n_excluded`` counts failed runs plus PSNR sentinel values dropped from
    the PSNR mean.  Means are None when nothing could be included.
    """

    mean_acquisition_time: float | None
    mean_style_transfer_time: float | None
    mean_total_time: float | None
    mean_ssim: float | None
    mean_psnr: float | None
    n_included: int
    n_excluded: int


@dataclass(frozen=True)
class ExperimentResult:
    """All runs of one arm plus their aggregate and the resolved config."""

    arm: str
    config_snapshot: dict
    runs: list
    aggregate: AggregateRow


@dataclass(frozen=True)
class ComparisonColumn:
    """One compared column: values, absolute delta, percent difference and
    which arm holds the higher value (None on a tie or missing data)."""

    name: str
    with_value: float | None
    without_value: float | None
    delta: float | None
    percent: float | None
    higher: str | None
    tie: bool


@dataclass(frozen=True)
class ComparisonReport:
    columns: list


@dataclass(frozen=True)
class ArmConfig:
    """Everything one arm needs to run its trials."""

    arm: str
    content: RasterImage
    source: StyleSource
    backend: str = "statistical"
    backend_options: dict = field(default_factory=dict)
    metric_reference: str = REFERENCE_CONTENT
    client_config: ClientConfig = field(default_factory=ClientConfig)
    ssim_params: SsimParams = DEFAULT_SSIM_PARAMS
    ssim_variant: str = "global"
    alpha: float = 1.0
    beta: float = 1.0
    warmup: bool = False
    snapshot_extra: dict = field(default_factory=dict)


def _describe_source(source: StyleSource) -> dict:
    if source.kind == "file":
        return {"kind": "file", "path": source.path}
    req = source.request
    return {
        "kind": source.kind,
        "prompt": req.prompt,
        "seed": req.seed,
        "width": req.width,
        "height": req.height,
        "model": req.model,
    }


def source_for_trial(source: StyleSource, index: int) -> StyleSource:
    """Per-trial source: the mock arm derives a fresh seed per run so each
    run gets a different style image; other kinds are reused as-is."""
    if source.kind == "mock":
        req = dataclasses.replace(source.request, seed=source.request.seed + index)
        return StyleSource.mock(req)
    return source


def _acquire_with_retry(source, client_config):
    # single retry after the advertised delay; the client itself never retries
    try:
        return acquire_style(source, client_config)
    except RateLimitedError as exc:
        delay = exc.retry_after if exc.retry_after is not None else 1.0
        delay = min(max(delay, 0.0), MAX_RETRY_SLEEP)
        logger.warning("rate limited; retrying once after %.1f s", delay)
        if delay > 0:
            time.sleep(delay)
        return acquire_style(source, client_config)


def run_trial(
    content: RasterImage,
    source: StyleSource,
    backend: str = "statistical",
    backend_options: dict | None = None,
    metric_reference: str = REFERENCE_CONTENT,
    client_config: ClientConfig | None = None,
    ssim_params: SsimParams = DEFAULT_SSIM_PARAMS,
    ssim_variant: str = "global",
    alpha: float = 1.0,
    beta: float = 1.0,
    run_index: int = 0,
) -> RunResult:
    """Execute acquire -> stylize -> metrics under one total stopwatch.

    Metrics compare the stylized output against the content image (or the
    style image when ``metric_reference`` says so), resizing the reference to
    the stylized dimensions when needed and recording that it did.
    """
    client_config = client_config or ClientConfig()
    start = time.perf_counter()
    try:
        acq = _acquire_with_retry(source, client_config)
    except (GenerationError, ImageError, OSError, ValueError) as exc:
        total = time.perf_counter() - start
        return RunResult(
            run_index=run_index,
            timing=TimingRecord(total, 0.0, total),
            metrics=None,
            style_image_digest=None,
            failed=True,
            failure_reason=f"acquisition failed: {exc}",
        )
    style_image = acq.style_image
    digest = image_digest(style_image)
    try:
        result = stylize(
            StylizeRequest(
                content=content,
                style=style_image,
                backend=backend,
                backend_options=backend_options or {},
            )
        )
    except (BackendError, ChannelMismatchError, ValueError) as exc:
        total = time.perf_counter() - start
        return RunResult(
            run_index=run_index,
            timing=TimingRecord(acq.acquisition_time, 0.0, total),
            metrics=None,
            style_image_digest=digest,
            failed=True,
            failure_reason=f"stylize failed: {exc}",
        )
    stylized = result.stylized
    reference = content if metric_reference == REFERENCE_CONTENT else style_image
    resized = False
    if (reference.width, reference.height) != (stylized.width, stylized.height):
        logger.warning(
            "resizing metric reference %dx%d to stylized %dx%d",
            reference.width,
            reference.height,
            stylized.width,
            stylized.height,
        )
        reference = resize_bilinear(reference, stylized.width, stylized.height)
        resized = True
    try:
        loss = style_transfer_loss(content, style_image, stylized, alpha=alpha, beta=beta)
        metrics = metric_report(
            to_luma(reference),
            to_luma(stylized),
            params=ssim_params,
            variant=ssim_variant,
            loss=loss,
        )
    except (ChannelMismatchError, ValueError) as exc:
        total = time.perf_counter() - start
        return RunResult(
            run_index=run_index,
            timing=TimingRecord(acq.acquisition_time, result.style_transfer_time, total),
            metrics=None,
            style_image_digest=digest,
            failed=True,
            failure_reason=f"metrics failed: {exc}",
        )
    total = time.perf_counter() - start
    return RunResult(
        run_index=run_index,
        timing=TimingRecord(acq.acquisition_time, result.style_transfer_time, total),
        metrics=metrics,
        style_image_digest=digest,
        reference_resized=resized,
    )


def aggregate(runs) -> AggregateRow:
    """Arithmetic means over non-failed runs; PSNR sentinels are excluded
    from the PSNR mean and counted in n_excluded."""
    if not runs:
        raise ValueError("cannot aggregate an empty run list")
    ok = [r for r in runs if not r.failed]
    n_excluded = len(runs) - len(ok)
    if not ok:
        return AggregateRow(None, None, None, None, None, 0, n_excluded)
    n = len(ok)
    psnr_values = [r.metrics.psnr for r in ok if math.isfinite(r.metrics.psnr)]
    n_excluded += n - len(psnr_values)
    return AggregateRow(
        mean_acquisition_time=math.fsum(r.timing.acquisition_time for r in ok) / n,
        mean_style_transfer_time=math.fsum(r.timing.style_transfer_time for r in ok) / n,
        mean_total_time=math.fsum(r.timing.total_time for r in ok) / n,
        mean_ssim=math.fsum(r.metrics.ssim for r in ok) / n,
        mean_psnr=math.fsum(psnr_values) / len(psnr_values) if psnr_values else None,
        n_included=n,
        n_excluded=n_excluded,
    )


def run_experiment(arm_config: ArmConfig, n_trials: int) -> ExperimentResult:
    """Run ``n_trials`` sequential trials for one arm and aggregate them."""
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    cfg = arm_config
    if cfg.warmup:
        logger.info("running one unrecorded warm-up trial for arm %s", cfg.arm)
        run_trial(
            cfg.content,
            source_for_trial(cfg.source, 0),
            backend=cfg.backend,
            backend_options=cfg.backend_options,
            metric_reference=cfg.metric_reference,
            client_config=cfg.client_config,
            ssim_params=cfg.ssim_params,
            ssim_variant=cfg.ssim_variant,
            alpha=cfg.alpha,
            beta=cfg.beta,
            run_index=-1,
        )
    runs = []
    for index in range(n_trials):
        runs.append(
            run_trial(
                cfg.content,
                source_for_trial(cfg.source, index),
                backend=cfg.backend,
                backend_options=cfg.backend_options,
                metric_reference=cfg.metric_reference,
                client_config=cfg.client_config,
                ssim_params=cfg.ssim_params,
                ssim_variant=cfg.ssim_variant,
                alpha=cfg.alpha,
                beta=cfg.beta,
                run_index=index,
            )
        )
    snapshot = {
        "arm": cfg.arm,
        "trials": n_trials,
        "source": _describe_source(cfg.source),
        "backend": cfg.backend,
        "metric_reference": cfg.metric_reference,
        "ssim_variant": cfg.ssim_variant,
        "alpha": cfg.alpha,
        "beta": cfg.beta,
        "warmup": cfg.warmup,
        "kernel_backend": kernels.backend_name,
        "base_url": cfg.client_config.base_url,
        "api_key_env": cfg.client_config.api_key_env,
    }
    snapshot.update(cfg.snapshot_extra)
    return ExperimentResult(
        arm=cfg.arm, config_snapshot=snapshot, runs=runs, aggregate=aggregate(runs)
    )


def compare(with_gen: ExperimentResult, without_gen: ExperimentResult) -> ComparisonReport:
    """Column-by-column comparison of two arms.

    delta = with - without, percent = (with - without) / without * 100.
    ``higher`` names the arm holding the larger value (the bold-max
    convention); ties are flagged with no winner.
    """
    for exp in (with_gen, without_gen):
        if exp.aggregate.n_included < 1:
            raise ValueError(f"arm {exp.arm!r} has an empty aggregate; nothing to compare")
    columns = []
    for name, attr in COMPARE_COLUMNS:
        a = getattr(with_gen.aggregate, attr)
        b = getattr(without_gen.aggregate, attr)
        delta = percent = higher = None
        tie = False
        if a is not None and b is not None:
            delta = a - b
            if b != 0:
                percent = (a - b) / b * 100.0
            if a > b:
                higher = with_gen.arm
            elif b > a:
                higher = without_gen.arm
            else:
                tie = True
        columns.append(
            ComparisonColumn(
                name=name,
                with_value=a,
                without_value=b,
                delta=delta,
                percent=percent,
                higher=higher,
                tie=tie,
            )
        )
    return ComparisonReport(columns=columns)
