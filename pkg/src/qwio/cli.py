"""Command line harness: optimize, compress, compare, selftest.

Exit codes: 0 success, 1 I/O or decode failure, 2 invalid configuration
or table schema/range problem, 3 selftest failure. Every output file is
written atomically (temp sibling plus rename) and embeds the seed,
lambda, and config needed to reproduce it.
"""

import argparse
import json
import math
import os
import sys
from pathlib import Path

from .codec import codec_roundtrip
from .errors import (
    ConfigError,
    CorruptImageError,
    EntryRangeError,
    SchemaError,
    UnsupportedFormatError,
)
from .image_io import load_grayscale, resize_to_proxy, write_grayscale
from .metrics import error_heatmap, export_heatmap
from .objective import DEFAULT_LAMBDA, rd_cost
from .optimizer import QwioConfig, optimize
from .selftest import run_selftest
from .tables import baseline_table, load_table, save_table, table_to_dict
from .util import atomic_write_text

THREADS_ENV = "QWIO_THREADS"
DEFAULT_PROXY = 256


def worker_count() -> int:
    """Parallelism cap from QWIO_THREADS; defaults to serial."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if value < 1:
        raise ConfigError(f"{THREADS_ENV} must be >= 1, got {value}")
    return value


def _fmt(value: float) -> str:
    # repr of a Python float round-trips exactly and spells the
    # sentinels 'inf' and 'nan' (the documented CSV forms).
    return repr(float(value))


def _config_comment(config_dict: dict) -> str:
    return "# config: " + json.dumps(config_dict, sort_keys=True)


def _write_trace(path, history, config_dict: dict) -> None:
    lines = [_config_comment(config_dict), "iteration,best_cost,mean_cost"]
    for point in history:
        lines.append(f"{point.iteration},{_fmt(point.best_cost)},{_fmt(point.mean_cost)}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qwio",
        description="Learn and evaluate adaptive JPEG luminance quantization tables.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    opt = sub.add_parser("optimize", help="learn a table for the given images")
    opt.add_argument("images", nargs="+", help="training images (PGM/PPM/PNG)")
    opt.add_argument("--out", default=".", help="output directory")
    opt.add_argument("--seed", type=int, default=0)
    opt.add_argument("--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA,
                     help="rate weight in J = MSE + lambda * BPP")
    opt.add_argument("--population", type=int, default=32)
    opt.add_argument("--iters", type=int, default=100)
    opt.add_argument("--stall", type=int, default=15)
    opt.add_argument("--gamma", type=float, default=math.pi / 2)
    opt.add_argument("--proxy", type=int, default=DEFAULT_PROXY,
                     help="long edge used during the search")
    opt.add_argument("--trace", default=None, help="trace CSV path "
                     "(default <out>/trace.csv)")

    cmp_ = sub.add_parser("compress", help="round trip one image with a table")
    cmp_.add_argument("image")
    cmp_.add_argument("--table", required=True, help="table JSON path")
    cmp_.add_argument("--out", default=".", help="output directory")

    cpr = sub.add_parser("compare", help="score a table against the baseline")
    cpr.add_argument("images", nargs="+")
    cpr.add_argument("--table", required=True, help="table JSON path")
    cpr.add_argument("--out", default=".", help="output directory")
    cpr.add_argument("--lambda", dest="lam", type=float, default=None,
                     help="cost weight; defaults to the table's recorded lambda")
    cpr.add_argument("--heatmaps", action="store_true",
                     help="also write normalized error heatmaps")

    sub.add_parser("selftest", help="run the embedded invariant checks")
    return parser


def cmd_optimize(args) -> int:
    config = QwioConfig(
        population_n=args.population,
        max_iters=args.iters,
        stall_limit=args.stall,
        gamma=args.gamma,
        lam=args.lam,
        seed=args.seed,
    )
    config.validate()
    if args.proxy < 8:
        raise ConfigError(f"--proxy must be at least 8, got {args.proxy}")

    # Load and downscale everything before writing anything, so an
    # unreadable input cannot leave partial outputs behind.
    planes = [resize_to_proxy(load_grayscale(p), args.proxy) for p in args.images]

    table, history = optimize(
        planes, baseline_table(), config, max_workers=worker_count()
    )

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    config_dict = config.to_dict() | {"proxy": args.proxy}
    save_table(table, out_dir / "qtable.json")
    trace_path = Path(args.trace) if args.trace else out_dir / "trace.csv"
    _write_trace(trace_path, history, config_dict)
    print(f"best cost {history[-1].best_cost:.6g} after {history[-1].iteration} "
          f"iterations; table written to {out_dir / 'qtable.json'}")
    return 0


def cmd_compress(args) -> int:
    table = load_table(args.table)
    plane = load_grayscale(args.image)
    lam = table.lam if table.lam is not None else DEFAULT_LAMBDA
    _, report = rd_cost(plane, table, lam)
    rec, _ = codec_roundtrip(plane, table)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = Path(args.image).stem
    write_grayscale(rec, out_dir / f"{stem}_reconstructed.pgm")
    doc = report.to_dict() | {"table": table_to_dict(table)}
    atomic_write_text(out_dir / f"{stem}_metrics.json",
                      json.dumps(doc, indent=2) + "\n")
    print(f"psnr {report.psnr:.4f} dB, bpp {report.bpp:.4f}; outputs in {out_dir}")
    return 0


def cmd_compare(args) -> int:
    table = load_table(args.table)
    base = baseline_table()
    if args.lam is not None:
        lam = args.lam
    elif table.lam is not None:
        lam = table.lam
    else:
        lam = DEFAULT_LAMBDA
    if lam < 0:
        raise ConfigError(f"lambda must be non-negative, got {lam}")

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    kinds = (("baseline", base), ("optimized", table))
    rows = []
    sums = {kind: [0.0, 0.0, 0.0, 0.0] for kind, _ in kinds}
    n_ok = 0
    for path in args.images:
        try:
            plane = load_grayscale(path)
            per_kind = []
            for kind, tbl in kinds:
                cost, report = rd_cost(plane, tbl, lam)
                per_kind.append((kind, report))
            if args.heatmaps:
                for kind, tbl in kinds:
                    rec, _ = codec_roundtrip(plane, tbl)
                    export_heatmap(
                        error_heatmap(plane, rec),
                        out_dir / f"{Path(path).stem}_{kind}.norm.pgm",
                        normalize=True,
                    )
        except (OSError, UnsupportedFormatError, CorruptImageError, ValueError) as exc:
            print(f"skipping {path}: {exc}", file=sys.stderr)
            continue
        n_ok += 1
        for kind, report in per_kind:
            rows.append((Path(path).stem, kind, report))
            acc = sums[kind]
            acc[0] += report.psnr
            acc[1] += report.ssim
            acc[2] += report.bpp
            acc[3] += report.cost_j

    if n_ok == 0:
        print("no image could be processed", file=sys.stderr)
        return 1

    lines = [
        _config_comment({"lambda": lam, "table": table_to_dict(table)}),
        "image_id,table_kind,psnr_db,ssim,bpp,cost_j",
    ]
    for image_id, kind, report in rows:
        lines.append(
            f"{image_id},{kind},{_fmt(report.psnr)},{_fmt(report.ssim)},"
            f"{_fmt(report.bpp)},{_fmt(report.cost_j)}"
        )
    for kind, _ in kinds:
        acc = sums[kind]
        lines.append(
            f"mean,{kind},{_fmt(acc[0] / n_ok)},{_fmt(acc[1] / n_ok)},"
            f"{_fmt(acc[2] / n_ok)},{_fmt(acc[3] / n_ok)}"
        )
    atomic_write_text(out_dir / "compare.csv", "\n".join(lines) + "\n")
    print(f"compared {n_ok} image(s); report at {out_dir / 'compare.csv'}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "optimize": cmd_optimize,
        "compress": cmd_compress,
        "compare": cmd_compare,
        "selftest": lambda a: run_selftest(),
    }
    try:
        return handlers[args.command](args)
    except (ConfigError, SchemaError, EntryRangeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (UnsupportedFormatError, CorruptImageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
