"""Command-line surface: generate / stylize / evaluate / bench / report.

Exit codes: 0 success, 1 runtime failure, 2 usage error.  Every subcommand
accepts --config (flat key=value file), --json (single machine-readable
document on stdout) and --verbose (debug logging on stderr).  Option
precedence: flags > config file > environment > defaults.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import archive as archive_mod
from . import bench as bench_mod
from . import report as report_mod
from .errors import StylebenchError, UsageError
from .genclient import (
    DEFAULT_API_KEY_ENV,
    DEFAULT_BASE_URL,
    DEFAULT_MODEL,
    ClientConfig,
    GenRequest,
    StyleSource,
    acquire_style,
)
from .image import load_image, resize_bilinear, save_image, to_luma
from .metrics import metric_report
from .stylizer import BACKENDS, DEFAULT_BACKEND_TIMEOUT, StylizeRequest, stylize

logger = logging.getLogger(__name__)

ENV_BASE_URL = "STYLEBENCH_BASE_URL"

# desk-scale default for bench-generated styles; standalone `generate`
# defaults to the service-native 1024x1024 instead
BENCH_DEFAULT_SIZE = "256x256"

_DEFAULTS = {
    "seed": 0,
    "size": "1024x1024",
    "model": DEFAULT_MODEL,
    "backend": "statistical",
    "backend_timeout": DEFAULT_BACKEND_TIMEOUT,
    "trials": 5,
    "alpha": 1.0,
    "beta": 1.0,
    "metric_reference": "content",
    "out": "stylebench-runs.json",
    "base_url": DEFAULT_BASE_URL,
    "api_key_env": DEFAULT_API_KEY_ENV,
    "timeout": 120.0,
    "mock": False,
    "warmup": False,
}

_BOOL_TRUE = ("1", "true", "yes", "on")
_BOOL_FALSE = ("0", "false", "no", "off")


def _parse_bool(text, key):
    lowered = str(text).strip().lower()
    if lowered in _BOOL_TRUE:
        return True
    if lowered in _BOOL_FALSE:
        return False
    raise UsageError(f"config key {key!r}: expected a boolean, got {text!r}")


def parse_size(text):
    """Parse 'WxH' into an integer pair."""
    try:
        w, h = str(text).lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise UsageError(f"bad size {text!r}; expected WxH, e.g. 512x512") from None


def load_config_file(path):
    """Flat key = value config file; '#' starts a comment."""
    cfg = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        cfg[key.strip().lower().replace("-", "_")] = value.strip()
    return cfg


class Settings:
    """Per-invocation option resolution: flags > config file > env > defaults."""

    _CASTS = {
        "trials": int,
        "seed": int,
        "alpha": float,
        "beta": float,
        "timeout": float,
        "backend_timeout": float,
    }
    _BOOLS = ("mock", "warmup")

    def __init__(self, args):
        self.args = args
        self.file = load_config_file(args.config) if getattr(args, "config", None) else {}

    def get(self, key):
        value = getattr(self.args, key, None)
        if value is None and key in self.file:
            raw = self.file[key]
            if key in self._BOOLS:
                value = _parse_bool(raw, key)
            else:
                cast = self._CASTS.get(key, str)
                try:
                    value = cast(raw)
                except ValueError:
                    raise UsageError(f"config key {key!r}: bad value {raw!r}") from None
        if value is None and key == "base_url":
            value = os.environ.get(ENV_BASE_URL)
        if value is None:
            value = _DEFAULTS.get(key)
        return value

    def client_config(self):
        return ClientConfig(
            base_url=self.get("base_url"),
            api_key_env=self.get("api_key_env"),
            timeout=self.get("timeout"),
        )

    def backend_options(self):
        opts = {}
        cmd = self.get("backend_cmd")
        url = self.get("backend_url")
        if cmd:
            opts["command"] = cmd
        if url:
            opts["endpoint"] = url
        opts["timeout"] = self.get("backend_timeout")
        return opts


def _print_json(doc):
    print(json.dumps(doc, sort_keys=True))


def _fmt_seconds(value):
    return f"{value:.3f} s"


def cmd_generate(args):
    settings = Settings(args)
    width, height = parse_size(settings.get("size"))
    request = GenRequest(
        prompt=args.prompt,
        width=width,
        height=height,
        model=settings.get("model"),
        seed=settings.get("seed"),
    )
    mock = bool(settings.get("mock"))
    source = StyleSource.mock(request) if mock else StyleSource.generated(request)
    result = acquire_style(source, settings.client_config())
    save_image(result.style_image, args.out, format="PNG")
    if args.json:
        _print_json(
            {
                "out": str(args.out),
                "acquisition_time": result.acquisition_time,
                "source_kind": result.source_kind,
                "width": result.style_image.width,
                "height": result.style_image.height,
            }
        )
    else:
        print(f"saved {args.out} ({result.source_kind}, {_fmt_seconds(result.acquisition_time)})")
    return 0


def cmd_stylize(args):
    settings = Settings(args)
    content = load_image(args.content)
    style = load_image(args.style)
    request = StylizeRequest(
        content=content,
        style=style,
        backend=args.backend,
        backend_options=settings.backend_options(),
    )
    result = stylize(request)
    save_image(result.stylized, args.out, format="PNG")
    if args.json:
        _print_json(
            {
                "out": str(args.out),
                "style_transfer_time": result.style_transfer_time,
                "backend_used": result.backend_used,
            }
        )
    else:
        print(
            f"saved {args.out} ({result.backend_used}, "
            f"{_fmt_seconds(result.style_transfer_time)})"
        )
    return 0


def cmd_evaluate(args):
    reference = load_image(args.reference)
    candidate = load_image(args.candidate)
    resized = False
    if (reference.width, reference.height) != (candidate.width, candidate.height):
        logger.warning(
            "resizing reference %dx%d to candidate %dx%d for metrics",
            reference.width,
            reference.height,
            candidate.width,
            candidate.height,
        )
        reference = resize_bilinear(reference, candidate.width, candidate.height)
        resized = True
    variant = "windowed" if args.windowed else "global"
    report = metric_report(to_luma(reference), to_luma(candidate), variant=variant)
    if args.json:
        _print_json(
            {
                "ssim": report.ssim,
                "ssim_variant": report.ssim_variant,
                "psnr": "inf" if report.psnr == float("inf") else report.psnr,
                "mse": report.mse,
                "reference_resized": resized,
            }
        )
    else:
        psnr_text = "inf" if report.psnr == float("inf") else f"{report.psnr:.4f} dB"
        print(f"ssim ({report.ssim_variant}): {report.ssim:.6f}")
        print(f"psnr: {psnr_text}")
        print(f"mse: {report.mse:.6f}")
    return 0


def _bench_arms(args, settings):
    content = load_image(args.content)
    prompt = settings.get("prompt")
    style_file = settings.get("style_file")
    if not prompt and not style_file:
        raise UsageError("bench needs --prompt (generation arm) and/or --style-file")
    size_text = args.size or settings.file.get("size") or BENCH_DEFAULT_SIZE
    width, height = parse_size(size_text)
    client_config = settings.client_config()
    common = dict(
        content=content,
        backend=settings.get("backend") or "statistical",
        backend_options=settings.backend_options(),
        metric_reference=settings.get("metric_reference"),
        client_config=client_config,
        ssim_variant="global",
        alpha=settings.get("alpha"),
        beta=settings.get("beta"),
        warmup=bool(settings.get("warmup")),
    )
    arms = []
    if prompt:
        request = GenRequest(
            prompt=prompt,
            width=width,
            height=height,
            model=settings.get("model"),
            seed=settings.get("seed"),
        )
        mock = bool(settings.get("mock"))
        source = StyleSource.mock(request) if mock else StyleSource.generated(request)
        arms.append(
            bench_mod.ArmConfig(
                arm=bench_mod.ARM_WITH_GENERATION,
                source=source,
                snapshot_extra={"content_path": str(args.content)},
                **common,
            )
        )
    if style_file:
        arms.append(
            bench_mod.ArmConfig(
                arm=bench_mod.ARM_WITHOUT_GENERATION,
                source=StyleSource.file(style_file),
                snapshot_extra={"content_path": str(args.content)},
                **common,
            )
        )
    return arms


def cmd_bench(args):
    settings = Settings(args)
    trials = settings.get("trials")
    if trials < 1:
        raise UsageError(f"--trials must be >= 1, got {trials}")
    arms = _bench_arms(args, settings)
    experiments = [bench_mod.run_experiment(arm, trials) for arm in arms]
    run_archive = archive_mod.new_archive(experiments)
    out_path = settings.get("out")
    archive_mod.write_archive(run_archive, out_path)
    by_arm = {e.arm: e for e in experiments}
    comparison = None
    if len(experiments) == 2 and set(by_arm) == {
        bench_mod.ARM_WITH_GENERATION,
        bench_mod.ARM_WITHOUT_GENERATION,
    }:
        try:
            comparison = bench_mod.compare(
                by_arm[bench_mod.ARM_WITH_GENERATION],
                by_arm[bench_mod.ARM_WITHOUT_GENERATION],
            )
        except ValueError as exc:
            logger.warning("skipping comparison: %s", exc)
    if args.json:
        doc = json.loads(archive_mod.dumps(run_archive))
        doc["archive_path"] = str(out_path)
        print(json.dumps(doc, sort_keys=True))
    else:
        tables = [report_mod.build_aggregate_table(experiments)]
        if comparison is not None:
            tables.append(report_mod.build_comparison_table(comparison))
        print(report_mod.render_markdown(tables, created_at=run_archive.created_at))
        print(f"archive written to {out_path}")
    return 0


def cmd_report(args):
    run_archive = archive_mod.read_archive(args.archive)
    if not run_archive.experiments:
        print("error: archive contains no experiments", file=sys.stderr)
        return 1
    experiments = run_archive.experiments
    by_arm = {e.arm: e for e in experiments}
    comparison = None
    if len(experiments) == 2 and set(by_arm) == {
        bench_mod.ARM_WITH_GENERATION,
        bench_mod.ARM_WITHOUT_GENERATION,
    }:
        try:
            comparison = bench_mod.compare(
                by_arm[bench_mod.ARM_WITH_GENERATION],
                by_arm[bench_mod.ARM_WITHOUT_GENERATION],
            )
        except ValueError as exc:
            logger.warning("skipping comparison: %s", exc)
    tables = report_mod.build_tables(experiments, comparison)
    fmt = "json" if args.json else args.format
    print(report_mod.render(tables, fmt, created_at=run_archive.created_at), end="")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="stylebench",
        description="Generate style images, stylize content, and benchmark the result.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value config file")
    common.add_argument("--json", action="store_true", help="machine-readable stdout")
    common.add_argument("--verbose", action="store_true", help="debug logging on stderr")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common], help="acquire a style image and save it")
    p.add_argument("--prompt", required=True, help="text prompt for the style image")
    p.add_argument("--out", required=True, help="output PNG path")
    p.add_argument("--mock", action="store_true", default=None, help="use the offline mock generator")
    p.add_argument("--seed", type=int, help="mock generator seed (default 0)")
    p.add_argument("--size", help="requested size WxH (default 1024x1024)")
    p.add_argument("--model", help=f"remote model identifier (default {DEFAULT_MODEL})")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("stylize", parents=[common], help="apply a style image to a content image")
    p.add_argument("--content", required=True, help="content image path")
    p.add_argument("--style", required=True, help="style image path")
    p.add_argument("--out", required=True, help="output PNG path")
    p.add_argument("--backend", choices=BACKENDS, default="statistical")
    p.add_argument("--backend-cmd", help="external backend command template "
                   "({content} {style} {out} placeholders)")
    p.add_argument("--backend-url", help="external backend HTTP endpoint")
    p.add_argument("--backend-timeout", type=float, help="external backend timeout in seconds")
    p.set_defaults(func=cmd_stylize)

    p = sub.add_parser("evaluate", parents=[common], help="SSIM/PSNR/MSE between two images")
    p.add_argument("reference", help="reference image path")
    p.add_argument("candidate", help="candidate image path")
    p.add_argument("--windowed", action="store_true", help="windowed SSIM instead of global")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("bench", parents=[common], help="run the timed experiment arms")
    p.add_argument("--content", required=True, help="content image path")
    p.add_argument("--prompt", help="prompt for the with-generation arm")
    p.add_argument("--style-file", dest="style_file", help="style image for the without arm")
    p.add_argument("--trials", type=int, help="trials per arm (default 5)")
    p.add_argument("--mock", action="store_true", default=None,
                   help="generation arm uses the offline mock generator")
    p.add_argument("--seed", type=int, help="base seed for mock styles (default 0)")
    p.add_argument("--backend", choices=BACKENDS, default=None)
    p.add_argument("--backend-cmd", help="external backend command template")
    p.add_argument("--backend-url", help="external backend HTTP endpoint")
    p.add_argument("--backend-timeout", type=float)
    p.add_argument("--size", help=f"generated style size WxH (default {BENCH_DEFAULT_SIZE})")
    p.add_argument("--alpha", type=float, help="content loss weight (default 1.0)")
    p.add_argument("--beta", type=float, help="style loss weight (default 1.0)")
    p.add_argument("--warmup", action="store_true", default=None,
                   help="run one unrecorded warm-up trial per arm")
    p.add_argument("--metric-reference", dest="metric_reference",
                   choices=(bench_mod.REFERENCE_CONTENT, bench_mod.REFERENCE_STYLE))
    p.add_argument("--out", help="archive output path (default stylebench-runs.json)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("report", parents=[common], help="render tables from a run archive")
    p.add_argument("archive", help="run archive path")
    p.add_argument("--format", choices=report_mod.FORMATS, default="md")
    p.set_defaults(func=cmd_report)

    return parser


def _setup_logging(verbose):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    _setup_logging(args.verbose)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except StylebenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
