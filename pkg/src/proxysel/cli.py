"""Command-line surface: entropy, histogram, select, split, report.

All diagnostics go to stderr prefixed with ``error:``; the exit status is 0
iff no error occurred (argparse usage problems exit 2).  Commands never
mutate their inputs, and identical inputs, flags and seeds always reproduce
byte-identical output files.

The default seed is 0; setting the PROXYSEL_SEED environment variable
overrides that default for every command (an explicit --seed still wins).
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Sequence

from . import formats
from .entropy import compute_entropy_table
from .errors import ToolkitError, ValidationError
from .histogram import DEFAULT_BIN_WIDTH, DEFAULT_FLOOR, build_histogram
from .report import build_report, render_figures
from .selectors import (
    DEFAULT_BETA,
    attach_forget_counts,
    run_method,
    select_class_balanced,
)
from .splitter import split_allshuffle, split_disjoint
from .types import MethodSpec, format_real

SEED_ENV_VAR = "PROXYSEL_SEED"

METHODS = ("random", "entropy-top", "entropy-bottom", "forgetting", "kcenter", "tail", "prob")


def _resolve_seed(flag_value: int | None) -> int:
    if flag_value is not None:
        return flag_value
    env = os.environ.get(SEED_ENV_VAR)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise ValidationError(f"{SEED_ENV_VAR} must be an integer, got {env!r}") from None


def cmd_entropy(args) -> int:
    logits = formats.read_logits(args.logits)
    stats = compute_entropy_table(logits)
    formats.write_stats(stats, args.out)
    print(f"rows: {len(stats)}")
    print(f"entropy min: {format_real(stats.entropies.min())}")
    print(f"entropy mean: {format_real(stats.entropies.mean())}")
    print(f"entropy max: {format_real(stats.entropies.max())}")
    return 0


def cmd_histogram(args) -> int:
    stats = formats.read_stats(args.stats)
    hist = build_histogram(stats, bin_width=args.bin_width, floor=args.floor)
    formats.write_histogram(hist, args.out)
    print(f"bins: {hist.n_bins}")
    print(f"total: {hist.total}")
    return 0


def cmd_select(args) -> int:
    stats = formats.read_stats(args.stats)
    if args.correctness:
        stats = attach_forget_counts(stats, formats.read_correctness(args.correctness))
    if args.features:
        stats = stats.with_features(formats.read_features(args.features))

    if args.method == "kcenter" and not args.features:
        args.parser.error("--features is required for --method kcenter")
    if args.method == "forgetting" and stats.forget_counts is None:
        args.parser.error(
            "--method forgetting needs forget counts: pass --correctness or a stats "
            "file with a forget_count column"
        )

    seed = _resolve_seed(args.seed)
    if args.method == "tail":
        spec = MethodSpec.make("tail", beta=args.beta)
    elif args.method == "prob":
        spec = MethodSpec.make(
            "prob", weight=args.weight, bin_width=args.bin_width, floor=args.floor
        )
    else:
        spec = MethodSpec.make(args.method)

    if args.class_balanced:
        sel = select_class_balanced(spec, stats, args.k, seed)
    else:
        sel = run_method(spec, stats, args.k, seed)
    formats.write_selection(sel, args.out)
    print(f"selected: {sel.k}")
    print(f"method: {sel.method.describe()}")
    return 0


def cmd_split(args) -> int:
    sel = formats.read_selection(args.selection)
    stats = formats.read_stats(args.stats)
    if args.mode == "allshuffle":
        seed = _resolve_seed(args.seed)
        split = split_allshuffle(sel, stats, ratio=args.ratio, seed=seed)
        used_seed = seed
    else:
        split = split_disjoint(sel, stats, ratio=args.ratio, low_to_train=args.low_to_train)
        used_seed = None
    train_path = f"{args.out_prefix}.train.txt"
    val_path = f"{args.out_prefix}.val.txt"
    formats.write_split_half(split, "train", used_seed, train_path)
    formats.write_split_half(split, "val", used_seed, val_path)
    print(f"train: {len(split.train)} -> {train_path}")
    print(f"val: {len(split.val)} -> {val_path}")
    return 0


def cmd_report(args) -> int:
    sel = formats.read_selection(args.selection)
    stats = formats.read_stats(args.stats)
    report = build_report(stats, sel, bin_width=args.bin_width, floor=args.floor)

    summary = [
        f"subset size: {report.subset_size}",
        f"tail low fraction: {format_real(report.tail_low_fraction)}",
        f"tail high fraction: {format_real(report.tail_high_fraction)}",
        f"tail mass: {format_real(report.tail_mass)}",
    ]
    for line in summary:
        print(line)

    if args.out_prefix:
        hist_path = f"{args.out_prefix}.hist.csv"
        classes_path = f"{args.out_prefix}.classes.csv"
        summary_path = f"{args.out_prefix}.summary.txt"
        formats.write_histogram(report.subset_hist, hist_path)
        _write_classes(report, classes_path)
        with open(summary_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(summary) + "\n")
        written = [hist_path, classes_path, summary_path]
        if not args.no_figures:
            written.extend(render_figures(report, args.out_prefix))
        for path in written:
            print(f"wrote: {path}")
    else:
        print("# subset histogram")
        print("bin_index,left_edge_log10,right_edge_log10,height")
        sub = report.subset_hist
        for b in range(sub.n_bins):
            print(
                f"{b},{format_real(sub.left_edge(b))},"
                f"{format_real(sub.right_edge(b))},{sub.heights[b]}"
            )
        print("# class distribution")
        print("label,count,ratio")
        for label, (count, ratio) in enumerate(zip(report.class_counts, report.class_ratios)):
            print(f"{label},{count},{format_real(ratio)}")
    return 0


def _write_classes(report, path) -> None:
    lines = ["label,count,ratio"]
    for label, (count, ratio) in enumerate(zip(report.class_counts, report.class_ratios)):
        lines.append(f"{label},{count},{format_real(ratio)}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="proxysel",
        description="Construct proxy datasets from per-example classifier statistics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", help="compute per-example entropy from a logits file")
    p.add_argument("--logits", required=True, help="input logits file")
    p.add_argument("--out", required=True, help="output stats file")
    p.set_defaults(handler=cmd_entropy)

    p = sub.add_parser("histogram", help="bin a stats file into a log-scale entropy histogram")
    p.add_argument("--stats", required=True, help="input stats file")
    p.add_argument("--bin-width", type=float, default=DEFAULT_BIN_WIDTH)
    p.add_argument("--floor", type=float, default=DEFAULT_FLOOR)
    p.add_argument("--out", required=True, help="output histogram file")
    p.set_defaults(handler=cmd_histogram)

    p = sub.add_parser("select", help="select k example ids from a stats file")
    p.add_argument("--stats", required=True, help="input stats file")
    p.add_argument("--method", required=True, choices=METHODS)
    p.add_argument("--k", type=int, required=True, help="number of ids to select")
    p.add_argument("--seed", type=int, default=None, help="random seed (default 0)")
    p.add_argument("--beta", type=float, default=DEFAULT_BETA, help="low-entropy share for tail")
    p.add_argument("--weight", choices=("w1", "w2", "w3"), default="w1")
    p.add_argument("--bin-width", type=float, default=DEFAULT_BIN_WIDTH)
    p.add_argument("--floor", type=float, default=DEFAULT_FLOOR)
    p.add_argument("--class-balanced", action="store_true", help="apply the method per class")
    p.add_argument("--features", default=None, help="features file (kcenter)")
    p.add_argument("--correctness", default=None, help="correctness log (forgetting)")
    p.add_argument("--out", required=True, help="output selection file")
    p.set_defaults(handler=cmd_select, parser=p)

    p = sub.add_parser("split", help="split a selection into train/val halves")
    p.add_argument("--selection", required=True, help="input selection file")
    p.add_argument("--stats", required=True, help="stats file the selection came from")
    p.add_argument("--mode", choices=("allshuffle", "disjoint"), default="allshuffle")
    p.add_argument("--ratio", type=float, default=0.5, help="train share (default 0.5)")
    p.add_argument("--seed", type=int, default=None, help="random seed (allshuffle only)")
    p.add_argument(
        "--low-to-train",
        action="store_true",
        help="disjoint mode: send the low-entropy end to train",
    )
    p.add_argument("--out-prefix", required=True, help="prefix for .train.txt/.val.txt")
    p.set_defaults(handler=cmd_split)

    p = sub.add_parser("report", help="composition diagnostics for a selection")
    p.add_argument("--selection", required=True, help="input selection file")
    p.add_argument("--stats", required=True, help="stats file the selection came from")
    p.add_argument("--bin-width", type=float, default=DEFAULT_BIN_WIDTH)
    p.add_argument("--floor", type=float, default=DEFAULT_FLOOR)
    p.add_argument("--out-prefix", default=None, help="write tables and figures with this prefix")
    p.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    p.set_defaults(handler=cmd_report)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ToolkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
