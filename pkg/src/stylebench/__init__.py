"""stylebench: text-driven style transfer pipeline with quality metrics and
timing benchmarks.

Typical flow: acquire a style image (remote generation, offline mock, or a
local file), apply it to a content image through a pluggable stylizer, then
score the result with SSIM/PSNR/MSE and compare timed experiment arms.
"""

from .bench import (
    ARM_WITH_GENERATION,
    ARM_WITHOUT_GENERATION,
    AggregateRow,
    ArmConfig,
    ComparisonReport,
    ExperimentResult,
    RunResult,
    TimingRecord,
    aggregate,
    compare,
    run_experiment,
    run_trial,
)
from .genclient import (
    ClientConfig,
    GenRequest,
    GenResult,
    StyleSource,
    acquire_style,
    mock_generate,
)
from .image import (
    ChannelStats,
    LumaPlane,
    RasterImage,
    channel_stats,
    image_digest,
    load_image,
    resize_bilinear,
    save_image,
    to_luma,
)
from .metrics import (
    DEFAULT_SSIM_PARAMS,
    PSNR_INFINITE,
    LossBreakdown,
    MetricReport,
    SsimParams,
    metric_report,
    mse,
    psnr,
    ssim_global,
    ssim_windowed,
    style_transfer_loss,
)
from .stylizer import StylizeRequest, StylizeResult, stylize, stylize_statistical

__version__ = "0.1.0"

__all__ = [
    "ARM_WITH_GENERATION",
    "ARM_WITHOUT_GENERATION",
    "AggregateRow",
    "ArmConfig",
    "ChannelStats",
    "ClientConfig",
    "ComparisonReport",
    "DEFAULT_SSIM_PARAMS",
    "ExperimentResult",
    "GenRequest",
    "GenResult",
    "LossBreakdown",
    "LumaPlane",
    "MetricReport",
    "PSNR_INFINITE",
    "RasterImage",
    "RunResult",
    "SsimParams",
    "StyleSource",
    "StylizeRequest",
    "StylizeResult",
    "TimingRecord",
    "acquire_style",
    "aggregate",
    "channel_stats",
    "compare",
    "image_digest",
    "load_image",
    "metric_report",
    "mock_generate",
    "mse",
    "psnr",
    "resize_bilinear",
    "run_experiment",
    "run_trial",
    "save_image",
    "ssim_global",
    "ssim_windowed",
    "stylize",
    "stylize_statistical",
    "style_transfer_loss",
    "to_luma",
]
