"""Command-line interface.

Subcommands:
  tune     scan motion data and write a per-channel parameter file
  bench    run the joined-clip benchmark and write reports, traces, figures
  filter   stream one channel through a filter and write a trace CSV
  compare  diff two benchmark reports

Exit codes: 0 success, 2 usage/configuration error, 3 input parse error,
4 runtime failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .bench import (
    DEFAULT_BLEND_DURATION,
    DEFAULT_WINDOW_FRAMES,
    ROSTER_LABELS,
    BenchConfig,
    BenchResult,
    activation_columns,
    run_benchmark,
    trace_columns,
    tune_from_sources,
)
from .bvh import extract_channel, parse_bvh
from .channel import Channel
from .clips import synth_benchmark
from .csvio import read_columns, write_columns
from .errors import BvhParseError, DegenerateChannel, HalfPoundError, InvalidSample
from .filters import HpfState, OneEuroParams, OneEuroState, hpf_step, one_euro_step
from .paramfile import ChannelParams, read_params, write_params
from .policy import AutoState, auto_hpf_step, extract_bounds
from .tuning import gain_blend_params, gb_hpf_defaults, scan_extrema

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_RUNTIME = 4


def _load_bvh_channels(path: Path, selector: str) -> list[Channel]:
    skeleton = parse_bvh(path.read_text())
    if selector == "all":
        names = skeleton.channel_names()
    else:
        names = [selector]
    channels = []
    for name in names:
        joint, _, label = name.rpartition(":")
        if not joint:
            raise InvalidSample(f"channel selector {name!r} must look like Joint:Label")
        try:
            channels.append(extract_channel(skeleton, joint, label))
        except KeyError as err:
            raise InvalidSample(f"{path}: {err.args[0]}") from None
    return channels


def _read_csv_channel(path: Path, column: str | None) -> Channel:
    data = read_columns(path)
    if "time" not in data:
        raise InvalidSample(f"{path}: need a 'time' column")
    value_cols = [name for name in data if name != "time"]
    if not value_cols:
        raise InvalidSample(f"{path}: no value column")
    if column is None or column == "all":
        column = value_cols[0]
    if column not in data:
        raise InvalidSample(f"{path}: no column {column!r} (have {value_cols})")
    times = data["time"]
    rate = 1.0 / float(np.median(np.diff(times))) if len(times) > 1 else 30.0
    return Channel(times=times, values=data[column], name=column, rate_hint=rate)


def _load_input_channel(path: Path, selector: str | None) -> Channel:
    if path.suffix.lower() == ".bvh":
        channels = _load_bvh_channels(path, selector or "all")
        return channels[0]
    return _read_csv_channel(path, selector)


# ---------------------------------------------------------------- tune


def cmd_tune(args) -> int:
    groups: dict[str, list[Channel]] = {}
    if args.seed is not None:
        a, b = synth_benchmark(args.seed)
        groups["synth"] = [a, b]
    for path in args.input:
        for ch in _load_bvh_channels(Path(path), args.channel):
            groups.setdefault(ch.name, []).append(ch)
    if not groups:
        print("tune: no inputs; pass --input file.bvh or --seed N", file=sys.stderr)
        return EXIT_USAGE

    entries: dict[str, ChannelParams] = {}
    skipped = []
    for name, clips in sorted(groups.items()):
        try:
            params, _ = tune_from_sources(clips, gain=args.gain)
            bounds = extract_bounds(clips, safety_margin=args.margin)
        except (DegenerateChannel, InvalidSample):
            skipped.append(name)
            continue
        entries[name] = ChannelParams(hpf=params, bounds=bounds)
    if not entries:
        print("tune: every channel was flat; nothing to write", file=sys.stderr)
        return EXIT_RUNTIME

    write_params(args.out, entries)
    name_w = max(len(n) for n in entries)
    print(f"{'channel':<{name_w}}  {'f_c_min':>9}  {'f_c_max':>9}  {'max|dx|':>10}")
    for name, entry in entries.items():
        print(
            f"{name:<{name_w}}  {entry.hpf.f_c_min:>9.4f}  {entry.hpf.f_c_max:>9.4f}"
            f"  {entry.hpf.max_abs_dx:>10.4f}"
        )
    for name in skipped:
        print(f"skipped flat channel: {name}", file=sys.stderr)
    print(f"wrote {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------- bench


def _slug(name: str) -> str:
    return name.lower().replace(" ", "-")


def write_bench_outputs(result: BenchResult, out_dir: Path, figures: bool = True) -> None:
    from .plots import save_comparison_figure, save_derivative_figure

    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.txt").write_text(result.report.to_text())
    (out_dir / "report.csv").write_text(result.report.to_csv())
    for run in result.runs:
        write_columns(out_dir / f"trace_{_slug(run.name)}.csv", trace_columns(result, run))
        if run.name.endswith("Auto"):
            write_columns(out_dir / f"activation_{_slug(run.name)}.csv", activation_columns(run))
    if figures:
        save_derivative_figure(result, out_dir / "derivatives.png")
        save_comparison_figure(result, out_dir / "comparison.png")


def cmd_bench(args) -> int:
    source_a = source_b = None
    if args.input:
        if len(args.input) != 2:
            print("bench: --input takes exactly two clip files", file=sys.stderr)
            return EXIT_USAGE
        source_a = _load_input_channel(Path(args.input[0]), args.channel)
        source_b = _load_input_channel(Path(args.input[1]), args.channel)
    if args.filters:
        roster = tuple(tok.strip() for tok in args.filters.split(",") if tok.strip())
    else:
        roster = BenchConfig.roster
    config = BenchConfig(
        seed=args.seed,
        source_a=source_a,
        source_b=source_b,
        cut_a=args.join_frame,
        cut_b=args.join_frame,
        roster=roster,
        include_fixed=args.auto in ("both", "off"),
        include_auto=args.auto in ("both", "only"),
        window_frames=args.window_frames,
        blend_duration=args.blend_duration,
        gain=args.gain,
    )
    try:
        config.validate()
    except InvalidSample as err:
        print(f"bench: {err}", file=sys.stderr)
        return EXIT_USAGE
    result = run_benchmark(config)
    out_dir = Path(args.out)
    write_bench_outputs(result, out_dir, figures=not args.no_figures)
    print(result.report.to_text(), end="")
    print(f"\nwrote report, traces and figures to {out_dir}/")
    return EXIT_OK


# ---------------------------------------------------------------- filter


def _stream_filter(channel: Channel, mode: str, entry: ChannelParams | None,
                   blend_duration: float):
    """Run one filter over a whole channel; yields (filtered, active) arrays."""
    values = channel.values
    times = channel.times
    n = len(values)
    out = np.empty(n)
    active = np.ones(n, dtype=np.int64)
    nominal_dt = 1.0 / channel.rate_hint

    if mode == "gb-hpf":
        extrema = scan_extrema(channel)
        if extrema.max_abs_dx <= 0.0:
            raise DegenerateChannel(f"channel {channel.name!r} never moves")
        schedule = gb_hpf_defaults(extrema.max_abs_dx, duration=blend_duration)
        state = HpfState()
        elapsed = 0.0
        for i in range(n):
            dt = float(times[i] - times[i - 1]) if i > 0 else nominal_dt
            progress = min(elapsed / schedule.duration, 1.0)
            out[i] = hpf_step(state, gain_blend_params(schedule, progress), float(values[i]), dt)
            elapsed += dt
        return out, active

    if mode == "1ef":
        state = OneEuroState()
        params = OneEuroParams()
        for i in range(n):
            dt = float(times[i] - times[i - 1]) if i > 0 else nominal_dt
            out[i] = one_euro_step(state, params, float(values[i]), dt)
        return out, active

    if entry is None:
        raise InvalidSample(f"mode {mode!r} needs --params with channel {channel.name!r}")

    if mode == "hpf":
        state = HpfState()
        for i in range(n):
            dt = float(times[i] - times[i - 1]) if i > 0 else nominal_dt
            out[i] = hpf_step(state, entry.hpf, float(values[i]), dt)
        return out, active

    if mode == "auto":
        if entry.bounds is None:
            raise InvalidSample(
                f"parameter file has no derivative bounds for {channel.name!r}; re-run tune"
            )
        state = AutoState()
        for i in range(n):
            dt = float(times[i] - times[i - 1]) if i > 0 else nominal_dt
            out[i], act = auto_hpf_step(state, entry.bounds, entry.hpf, float(values[i]), dt)
            active[i] = int(act)
        return out, active

    raise InvalidSample(f"unknown mode {mode!r}")


def cmd_filter(args) -> int:
    channel = _load_input_channel(Path(args.input), args.channel)
    entry = None
    if args.params:
        table = read_params(args.params)
        if channel.name not in table:
            print(
                f"filter: parameter file {args.params} has no section for "
                f"channel {channel.name!r}",
                file=sys.stderr,
            )
            return EXIT_PARSE
        entry = table[channel.name]
    filtered, active = _stream_filter(channel, args.mode, entry, args.blend_duration)
    write_columns(
        args.out,
        {
            "time": channel.times,
            "raw": channel.values,
            "filtered": filtered,
            "active": active.astype(np.float64),
        },
    )
    print(f"wrote {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------- compare


def cmd_compare(args) -> int:
    def load(path):
        rows = {}
        for line in Path(path).read_text().splitlines()[1:]:
            if not line.strip():
                continue
            name, mse_s, npss_s = line.split(",")
            rows[name] = (float(mse_s), float(npss_s))
        return rows

    rows_a = load(args.report_a)
    rows_b = load(args.report_b)
    names = list(rows_a)
    names.extend(n for n in rows_b if n not in rows_a)
    name_w = max(len(n) for n in names)
    print(f"{'Name':<{name_w}}  {'dMSE':>12}  {'dNPSS':>12}")
    for name in names:
        if name not in rows_a or name not in rows_b:
            print(f"{name:<{name_w}}  {'(only in one report)':>27}")
            continue
        d_mse = rows_b[name][0] - rows_a[name][0]
        d_npss = rows_b[name][1] - rows_a[name][1]
        print(f"{name:<{name_w}}  {d_mse:>+12.6f}  {d_npss:>+12.6f}")
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="halfpound",
        description="Adaptive filtering of animation-clip discontinuities: "
        "tuning, benchmarking and streaming filters.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_tune = sub.add_parser("tune", help="estimate per-channel filter parameters")
    p_tune.add_argument("--input", action="append", default=[], help="BVH file (repeatable)")
    p_tune.add_argument("--seed", type=int, default=None, help="use the synthetic clip pair")
    p_tune.add_argument("--channel", default="all", help="Joint:Label selector or 'all'")
    p_tune.add_argument("--gain", type=float, default=1.0, help="tuning gain on both cutoffs")
    p_tune.add_argument("--margin", type=float, default=1.05, help="bounds safety margin")
    p_tune.add_argument("--out", default="halfpound-params.ini", help="parameter file path")
    p_tune.set_defaults(func=cmd_tune)

    p_bench = sub.add_parser("bench", help="run the joined-clip benchmark")
    p_bench.add_argument("--seed", type=int, default=0, help="synthetic benchmark seed")
    p_bench.add_argument("--input", nargs=2, metavar=("CLIP_A", "CLIP_B"),
                         help="two source clips (BVH or CSV) instead of the synthetic pair")
    p_bench.add_argument("--channel", default=None, help="channel selector for clip inputs")
    p_bench.add_argument("--join-frame", type=int, default=None,
                         help="cut frame in both clips (default: auto-picked near the middle)")
    p_bench.add_argument("--filters", default=None,
                         help=f"comma list from {sorted(ROSTER_LABELS)}")
    p_bench.add_argument("--auto", choices=("both", "only", "off"), default="both",
                         help="run automatic modes, fixed windows, or both")
    p_bench.add_argument("--window-frames", type=int, default=DEFAULT_WINDOW_FRAMES,
                         help="MSE evaluation window length")
    p_bench.add_argument("--blend-duration", type=float, default=DEFAULT_BLEND_DURATION,
                         help="fixed-window blend length in seconds")
    p_bench.add_argument("--gain", type=float, default=1.0, help="tuning gain")
    p_bench.add_argument("--out", default="bench-out", help="output directory")
    p_bench.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    p_bench.set_defaults(func=cmd_bench)

    p_filter = sub.add_parser("filter", help="stream a channel through one filter")
    p_filter.add_argument("--input", required=True, help="CSV (time + value columns) or BVH")
    p_filter.add_argument("--channel", default=None, help="column name or Joint:Label")
    p_filter.add_argument("--mode", required=True, choices=("hpf", "gb-hpf", "1ef", "auto"))
    p_filter.add_argument("--params", default=None, help="parameter file from tune")
    p_filter.add_argument("--blend-duration", type=float, default=DEFAULT_BLEND_DURATION)
    p_filter.add_argument("--out", default="filtered.csv", help="output CSV path")
    p_filter.set_defaults(func=cmd_filter)

    p_cmp = sub.add_parser("compare", help="diff two bench reports (CSV)")
    p_cmp.add_argument("report_a")
    p_cmp.add_argument("report_b")
    p_cmp.set_defaults(func=cmd_compare)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BvhParseError as err:
        print(f"{args.command}: parse error: {err}", file=sys.stderr)
        return EXIT_PARSE
    except FileNotFoundError as err:
        print(f"{args.command}: {err}", file=sys.stderr)
        return EXIT_PARSE
    except HalfPoundError as err:
        print(f"{args.command}: {err}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
