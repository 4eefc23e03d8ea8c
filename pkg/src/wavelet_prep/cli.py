"""wavelet-prep: batch preprocessing, verification, statistics, benchmarks.

Exit codes are a stable contract: 0 success, 1 fatal error, 2 partial
(some files failed), 64 usage error. Reports go to stdout as text or
json-lines; all writing happens from the main thread so json-lines never
interleave.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bench import run_benchmarks
from .container import read_container
from .dwt import SUBBAND_ORDER, forward_2d
from .errors import WaveletPrepError
from .filters import filter_bank
from .image_io import decode_image
from .pipeline import (
    PipelineConfig,
    from_records,
    list_images,
    preprocess_batch,
    preprocess_image,
    reconstruct_planes,
    to_records,
    transform_input_planes,
)
from .resize import ResizeSpec, resize_bilinear

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_PARTIAL = 2
EXIT_USAGE = 64

_FORMATS = ("text", "jsonl", "json-lines")


class _Parser(argparse.ArgumentParser):
    """argparse with the usage exit code pinned to 64."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_USAGE)


def _size(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}") from exc


def _channels(text: str) -> tuple[str, ...]:
    return tuple(part.strip().upper() for part in text.split(",") if part.strip())


def _default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("WAVELET_PREP_JOBS", "1")))
    except ValueError:
        return 1


def _emit(records: list[dict], fmt: str, text_lines: list[str]) -> None:
    if fmt == "text":
        for line in text_lines:
            print(line)
    else:
        for record in records:
            print(json.dumps(record, sort_keys=True))


def _config_from_args(args) -> PipelineConfig:
    w, h = args.size
    return PipelineConfig(
        network_input_dims=(w, h),
        mode=args.mode,
        levels=getattr(args, "levels", 1),
        channel_mask=getattr(args, "channels", SUBBAND_ORDER),
        normalization={"raw": "raw", "unit": "unit_interval", "affine": "per_channel_affine"}[
            getattr(args, "normalize", "raw")
        ],
        color_policy={"gray": "grayscale_single_plane", "fanout": "per_channel_fanout"}[
            getattr(args, "color", "gray")
        ],
        scaling_convention=getattr(args, "convention", "paper"),
    )


def cmd_pipeline(args) -> int:
    config = _config_from_args(args)
    report = preprocess_batch(
        args.input, args.output, config, parallelism=args.jobs, baseline=args.baseline
    )
    records = [o.to_dict() for o in report.outcomes] + [dict(report.to_dict(), record="summary")]
    lines = []
    for o in report.outcomes:
        if o.ok:
            lines.append(f"ok    {o.source} -> {o.output}")
        else:
            lines.append(f"error {o.source}: {o.error}: {o.message}")
    summary = report.to_dict()
    lines.append(
        f"{summary['succeeded']}/{summary['files']} files in {summary['wall_seconds']:.3f}s "
        f"({summary['megapixels_per_second']:.1f} MP/s)"
    )
    _emit(records, args.format, lines)
    return EXIT_PARTIAL if report.failures else EXIT_OK


def cmd_verify(args) -> int:
    config = _config_from_args(args)
    files = list_images(args.input)
    records: list[dict] = []
    lines: list[str] = []
    failures = 0
    for path in files:
        try:
            image = decode_image(path.read_bytes())
            reference = transform_input_planes(image, config)
            if args.containers:
                tensors = from_records(read_container(Path(args.containers) / (path.stem + ".wvt")))
            elif config.mode == "reversible":
                # exercise the wire format: serialize and parse the container bytes
                from .container import decode_container, encode_container

                tensors = from_records(decode_container(encode_container(to_records(
                    preprocess_image(image, config, source=path.name)))))
            else:
                tensors = preprocess_image(image, config, source=path.name)
            recon = reconstruct_planes(tensors)
            if len(recon) != len(reference):
                raise ValueError(f"{len(recon)} reconstructed planes vs {len(reference)} source planes")
            if config.mode == "reversible":
                ok = all(np.array_equal(r, ref) for r, ref in zip(recon, reference))
                error = 0.0 if ok else float(
                    max(np.abs(np.asarray(r, np.int64) - ref).max() for r, ref in zip(recon, reference))
                )
            else:
                error = float(max(np.abs(r - ref).max() for r, ref in zip(recon, reference)))
                ok = error <= args.tolerance
            records.append({"source": str(path), "status": "PASS" if ok else "FAIL",
                            "max_abs_error": error})
            lines.append(f"{'PASS' if ok else 'FAIL'}  {path}  max_abs_error={error:g}")
            if not ok:
                failures += 1
        except (WaveletPrepError, OverflowError, OSError, ValueError) as exc:
            records.append({"source": str(path), "status": "FAIL", "error": type(exc).__name__,
                            "message": str(exc)})
            lines.append(f"FAIL  {path}  {type(exc).__name__}: {exc}")
            failures += 1
    summary = {"record": "summary", "files": len(files), "failed": failures,
               "mode": config.mode}
    records.append(summary)
    lines.append(f"{len(files) - failures}/{len(files)} files verified ({config.mode} mode)")
    _emit(records, args.format, lines)
    return EXIT_OK if failures == 0 else EXIT_PARTIAL


def _subband_stats(plane: np.ndarray, about_zero: bool) -> dict:
    data = plane.astype(np.float64, copy=False)
    mean = float(data.mean())
    var = float(data.var())
    # detail bands measure deviation from zero (zero == "no detail");
    # the LL band deviates about its own mean, which carries the DC
    deviation = float((data * data).mean()) if about_zero else var
    return {
        "mean": mean,
        "variance": var,
        "min": float(data.min()),
        "max": float(data.max()),
        "_deviation": deviation,
    }


def cmd_stats(args) -> int:
    bank = filter_bank(args.convention)
    files = list_images(args.input)
    records: list[dict] = []
    lines: list[str] = []
    exit_code = EXIT_OK
    for path in files:
        try:
            image = decode_image(path.read_bytes())
            plane = image.samples.astype(np.float64)
            if image.channels >= 3:
                plane = 0.299 * plane[0] + 0.587 * plane[1] + 0.114 * plane[2]
            else:
                plane = plane[0]
            if args.size:
                w, h = args.size
                plane = resize_bilinear(plane, ResizeSpec(2 * w, 2 * h))
            else:
                h2, w2 = (plane.shape[0] // 2) * 2, (plane.shape[1] // 2) * 2
                plane = plane[:h2, :w2]  # crop odd tails
            subbands = forward_2d(plane, mode="float", bank=bank)
            stats = {
                name: _subband_stats(subbands.planes[name], about_zero=name != "LL")
                for name in SUBBAND_ORDER
            }
            total = sum(s["_deviation"] for s in stats.values())
            for name, s in stats.items():
                s["variance_fraction"] = (
                    s.pop("_deviation") / total if total > 0 else (1.0 if name == "LL" else 0.0)
                )
            records.append({"source": str(path), "subbands": stats})
            lines.append(f"{path}")
            for name in SUBBAND_ORDER:
                s = stats[name]
                lines.append(
                    f"  {name}: mean={s['mean']:.4f} var={s['variance']:.4f} "
                    f"min={s['min']:.2f} max={s['max']:.2f} fraction={s['variance_fraction']:.4f}"
                )
        except (WaveletPrepError, OverflowError, OSError, ValueError) as exc:
            records.append({"source": str(path), "error": type(exc).__name__, "message": str(exc)})
            lines.append(f"error {path}: {type(exc).__name__}: {exc}")
            exit_code = EXIT_PARTIAL
    _emit(records, args.format, lines)
    return exit_code


def cmd_bench(args) -> int:
    modes = ("float", "reversible") if args.mode == "all" else (args.mode,)
    results = run_benchmarks(
        network_dims=args.size,
        modes=modes,
        iterations=args.iterations,
        jobs=args.jobs,
        input_dims=args.input_size,
    )
    lines = [
        f"{r['stage']:<10} {r['mode']:<10} jobs={r['jobs']} "
        f"{r['megapixels_per_second']:>10.1f} MP/s  ({r['seconds'] * 1e3:.2f} ms median)"
        for r in results
    ]
    _emit(results, args.format, lines)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="wavelet-prep", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_common(p, size_required=True, size_default=None):
        p.add_argument("--size", type=_size, required=size_required, default=size_default,
                       help="network input dims as WxH (transforms run at 2Wx2H)")
        p.add_argument("--format", choices=_FORMATS, default="text", help="report format")

    p = sub.add_parser("pipeline", help="convert an image directory to .wvt containers")
    p.add_argument("--input", required=True, help="directory of .pgm/.png images")
    p.add_argument("--output", required=True, help="directory for .wvt containers")
    add_common(p)
    p.add_argument("--mode", choices=("float", "reversible"), default="reversible")
    p.add_argument("--levels", type=int, default=1)
    p.add_argument("--channels", type=_channels, default=SUBBAND_ORDER,
                   help="comma-separated subset of LL,HL,LH,HH")
    p.add_argument("--normalize", choices=("raw", "unit", "affine"), default="raw")
    p.add_argument("--color", choices=("gray", "fanout"), default="gray")
    p.add_argument("--convention", choices=("paper", "jpeg2000"), default="paper")
    p.add_argument("--jobs", type=int, default=_default_jobs())
    p.add_argument("--baseline", action="store_true",
                   help="plain bilinear downsample, no subband decomposition")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("verify", help="check that containers reproduce the resized source")
    p.add_argument("--input", required=True)
    add_common(p, size_required=False, size_default=(256, 256))
    p.add_argument("--mode", choices=("float", "reversible"), default="reversible")
    p.add_argument("--levels", type=int, default=1)
    p.add_argument("--convention", choices=("paper", "jpeg2000"), default="paper")
    p.add_argument("--color", choices=("gray", "fanout"), default="gray")
    p.add_argument("--tolerance", type=float, default=1e-8,
                   help="max abs reconstruction error accepted in float mode")
    p.add_argument("--containers", default=None,
                   help="read .wvt files from this directory instead of recomputing")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("stats", help="per-subband coefficient statistics")
    p.add_argument("--input", required=True)
    add_common(p, size_required=False)
    p.add_argument("--convention", choices=("paper", "jpeg2000"), default="paper")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("bench", help="throughput of resize, forward transform, and pipeline")
    add_common(p, size_required=True)
    p.add_argument("--mode", choices=("float", "reversible", "all"), default="reversible")
    p.add_argument("--iterations", type=int, default=5)
    p.add_argument("--jobs", type=int, default=_default_jobs())
    p.add_argument("--input-size", type=_size, default=(1024, 1024),
                   help="synthetic source image dims as WxH")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except WaveletPrepError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FATAL
    except (FileNotFoundError, NotADirectoryError, PermissionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
