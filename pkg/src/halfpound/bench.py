"""Benchmark engine: run a roster of filters over a joined-clip scenario.

Builds (or accepts) two source clips, splices them into a discontinuous
stream, tunes the adaptive filter and the trigger envelopes from the
sources, runs every requested configuration in fixed-window and/or
automatic mode, and scores each output with windowed MSE against the
ground truth plus NPSS against the max-combined source spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .baselines import TransitionSpec, crossfade, deadblend, inertialize
from .channel import Channel
from .clips import JoinedBenchmark, join_clips, synth_benchmark
from .errors import CoverageError, InvalidSample
from .filters import (
    HpfParams,
    HpfState,
    OneEuroParams,
    OneEuroState,
    hpf_step,
    one_euro_step,
)
from .metrics import EvalReport, EvalRow, PowerSpectrum, mse, npss, reference_spectrum
from .policy import (
    VIOLATION_NONE,
    AutoState,
    DerivativeBounds,
    auto_hpf_step,
    extract_bounds,
    trigger_decision,
    update_history,
)
from .tuning import (
    GainBlendSchedule,
    apply_tuning_gain,
    estimate_fc_max,
    estimate_fc_min,
    gain_blend_params,
    gb_hpf_defaults,
    scan_extrema_many,
)

ROSTER_LABELS = {
    "xfade": "XFade",
    "deadman": "DeadMan",
    "bollo": "Bollo",
    "hpf": "HPF",
    "gb-hpf": "GB-HPF",
    "1ef": "1EF",
}
DEFAULT_ROSTER = ("xfade", "deadman", "bollo", "hpf", "gb-hpf")
DEFAULT_WINDOW_FRAMES = 60
DEFAULT_BLEND_DURATION = 0.3
DEFAULT_SAFETY_MARGIN = 1.05
GB_HOLD_GAP_FACTOR = 0.01
GB_HOLD_VEL_FACTOR = 0.1
_CUT_SEARCH_SPAN = 150


@dataclass
class BenchConfig:
    """Everything a benchmark run depends on.

    Either `seed` (synthetic sources) or both `source_a`/`source_b`
    channels must be provided.

    `velocity_hold` arms the velocity-proximity exit guard for the
    Gain-Blend-driven automatic mode: deactivation additionally requires
    the filtered stream to move with the raw one. The guard pairs with
    Gain Blend specifically because a clean exit needs the cutoff raised
    toward Nyquist first; with fixed bounds the residual tracking lag
    would pin the filter on indefinitely, so fixed-parameter and baseline
    automatic modes run the plain trigger-and-recover policy.
    """

    seed: int | None = 0
    source_a: Channel | None = None
    source_b: Channel | None = None
    cut_a: int | None = None
    cut_b: int | None = None
    roster: tuple[str, ...] = DEFAULT_ROSTER
    include_fixed: bool = True
    include_auto: bool = True
    window_frames: int = DEFAULT_WINDOW_FRAMES
    blend_duration: float = DEFAULT_BLEND_DURATION
    safety_margin: float = DEFAULT_SAFETY_MARGIN
    gain: float = 1.0
    velocity_hold: bool = True

    def validate(self):
        if not self.roster:
            raise InvalidSample("roster: must name at least one filter")
        unknown = [k for k in self.roster if k not in ROSTER_LABELS]
        if unknown:
            raise InvalidSample(
                f"roster: unknown filter(s) {unknown}; choose from {sorted(ROSTER_LABELS)}"
            )
        if not (self.include_fixed or self.include_auto):
            raise InvalidSample("include_fixed/include_auto: at least one mode required")
        if self.window_frames <= 0:
            raise InvalidSample(f"window_frames: must be positive, got {self.window_frames}")
        if self.blend_duration <= 0.0:
            raise InvalidSample(f"blend_duration: must be positive, got {self.blend_duration}")
        if (self.source_a is None) != (self.source_b is None):
            raise InvalidSample("source_a/source_b: provide both clips or neither")
        if self.source_a is None and self.seed is None:
            raise InvalidSample("seed: required when no source clips are given")


@dataclass
class ConfigRun:
    """One roster entry's output stream and bookkeeping."""

    name: str
    output: Channel
    active: np.ndarray
    violations: np.ndarray | None = None


@dataclass
class BenchResult:
    benchmark: JoinedBenchmark
    bounds: DerivativeBounds
    hpf_params: HpfParams
    gb_schedule: GainBlendSchedule
    reference: PowerSpectrum
    report: EvalReport
    runs: list[ConfigRun] = field(default_factory=list)


def tune_from_sources(
    sources: list[Channel], gain: float = 1.0,
    gb_duration: float = DEFAULT_BLEND_DURATION,
) -> tuple[HpfParams, GainBlendSchedule]:
    """Tune cutoff bounds and peak speed from a set of source clips."""
    extrema = scan_extrema_many(sources)
    f_min = estimate_fc_min(extrema)
    f_max = max(estimate_fc_max(ch) for ch in sources)
    f_min = apply_tuning_gain(f_min, gain)
    f_max = apply_tuning_gain(f_max, gain)
    if f_min <= 0.0 or extrema.max_abs_dx <= 0.0:
        raise InvalidSample("sources carry no motion; nothing to tune")
    params = HpfParams(
        f_c_min=f_min, f_c_max=max(f_max, f_min), max_abs_dx=extrema.max_abs_dx
    )
    schedule = gb_hpf_defaults(extrema.max_abs_dx, duration=gb_duration)
    return params, schedule


def default_cut(a: Channel, b: Channel) -> int:
    """Pick the joint frame near the clips' middle.

    A useful cut resembles a state-machine switch: poses roughly agree (a
    hard pose snap would be trivially visible) while velocities disagree,
    so the discontinuity lives in the derivatives. Cutting blindly at the
    midpoint occasionally lands where the clips fully agree and nothing is
    there to detect or hide. Among frames whose pose gap falls in a
    moderate band, the largest velocity mismatch wins; if no frame hits
    the band, the closest to it is used.
    """
    n = min(len(a), len(b))
    lo = max(4, n // 2 - _CUT_SEARCH_SPAN)
    hi = min(n - 4, n // 2 + _CUT_SEARCH_SPAN)
    idx = np.arange(lo, hi)
    gap = np.abs(a.values[idx] - b.values[idx])
    dv = np.abs(
        (a.values[idx] - a.values[idx - 1]) - (b.values[idx] - b.values[idx - 1])
    ) / float(a.dts[0])
    scale = max(np.median(np.abs(a.values - np.mean(a.values))), 1e-12)
    band_lo, band_hi = 0.8 * scale, 1.6 * scale
    eligible = (gap >= band_lo) & (gap <= band_hi)
    if not np.any(eligible):
        return int(idx[np.argmin(np.abs(gap - 0.5 * (band_lo + band_hi)))])
    cand = idx[eligible]
    return int(cand[np.argmax(dv[eligible])])


def build_benchmark(config: BenchConfig) -> JoinedBenchmark:
    if config.source_a is not None:
        a, b = config.source_a, config.source_b
    else:
        a, b = synth_benchmark(config.seed)
    if config.cut_a is None and config.cut_b is None:
        cut_a = cut_b = default_cut(a, b)
    else:
        cut_a = config.cut_a if config.cut_a is not None else len(a) // 2
        cut_b = config.cut_b if config.cut_b is not None else len(b) // 2
    return join_clips(a, b, cut_a, cut_b)


def _source_continuation(bm: JoinedBenchmark) -> Channel:
    """Clip A playing on past the joint, on the combined timeline.

    If A runs out before the combined stream ends, its last pose is held.
    """
    n = len(bm.combined)
    take = min(n, len(bm.source_a))
    values = np.empty(n)
    values[:take] = bm.source_a.values[:take]
    if take < n:
        values[take:] = bm.source_a.values[take - 1]
    return bm.combined.with_values(values, name="source-continuation")


def _window_frames(duration: float, dt: float) -> int:
    return max(1, int(round(duration / dt)))


def _run_windowed_filter(bm: JoinedBenchmark, trigger: int, duration: float, make_step):
    """Apply a streaming filter over [trigger, trigger + window)."""
    combined = bm.combined
    dt = float(combined.dts[0])
    n = _window_frames(duration, dt)
    if trigger < 1 or trigger + n > len(combined):
        raise CoverageError(
            f"filter window [{trigger}, {trigger + n}) does not fit the clip"
        )
    out = combined.values.copy()
    active = np.zeros(len(combined), dtype=np.int64)
    step = make_step()
    step(combined.values[trigger - 1], dt, -1)  # seed from the last played pose
    for k in range(n):
        i = trigger + k
        out[i] = step(combined.values[i], dt, k)
        active[i] = 1
    return out, active


def _hpf_step_factory(params: HpfParams):
    def make():
        state = HpfState()

        def step(x, dt, k):
            return hpf_step(state, params, x, dt)

        return step

    return make


def _gb_step_factory(schedule: GainBlendSchedule):
    def make():
        state = HpfState()

        def step(x, dt, k):
            progress = min(max(k, 0) * dt / schedule.duration, 1.0)
            return hpf_step(state, gain_blend_params(schedule, progress), x, dt)

        return step

    return make


def _one_euro_step_factory(params: OneEuroParams):
    def make():
        state = OneEuroState()

        def step(x, dt, k):
            return one_euro_step(state, params, x, dt)

        return step

    return make


def _baseline_channel(kind: str, source: Channel, target: Channel, spec: TransitionSpec) -> Channel:
    if kind == "xfade":
        return crossfade(source, target, spec)
    if kind == "deadman":
        return deadblend(source, target, spec)
    if kind == "bollo":
        return inertialize(source, target, spec)
    raise InvalidSample(f"not a transition baseline: {kind}")


def _run_fixed(config: BenchConfig, bm: JoinedBenchmark, kind: str,
               params: HpfParams, schedule: GainBlendSchedule,
               one_euro: OneEuroParams, source_cont: Channel) -> ConfigRun:
    combined = bm.combined
    dt = float(combined.dts[0])
    name = ROSTER_LABELS[kind]
    if kind in ("xfade", "deadman", "bollo"):
        spec = TransitionSpec(trigger_frame=bm.joint_frame, blend_duration=config.blend_duration)
        out_channel = _baseline_channel(kind, source_cont, combined, spec)
        n = _window_frames(config.blend_duration, dt)
        active = np.zeros(len(combined), dtype=np.int64)
        active[bm.joint_frame : bm.joint_frame + n] = 1
        return ConfigRun(name=name, output=out_channel.with_values(out_channel.values, name=name), active=active)
    factories = {
        "hpf": _hpf_step_factory(params),
        "gb-hpf": _gb_step_factory(schedule),
        "1ef": _one_euro_step_factory(one_euro),
    }
    out, active = _run_windowed_filter(
        bm, bm.joint_frame, config.blend_duration, factories[kind]
    )
    return ConfigRun(name=name, output=combined.with_values(out, name=name), active=active)


def _run_auto_hpf(config: BenchConfig, bm: JoinedBenchmark, bounds: DerivativeBounds,
                  params: HpfParams | GainBlendSchedule, name: str,
                  hold_gap: float | None = None,
                  hold_vel: float | None = None) -> ConfigRun:
    combined = bm.combined
    values = combined.values
    dts = combined.dts
    nominal_dt = 1.0 / combined.rate_hint
    state = AutoState()
    out = np.empty_like(values)
    active = np.zeros(len(values), dtype=np.int64)
    violations = np.full(len(values), VIOLATION_NONE, dtype=np.int64)
    for i, x in enumerate(values):
        dt = float(dts[i - 1]) if i > 0 else nominal_dt
        out[i], act = auto_hpf_step(
            state, bounds, params, float(x), dt, hold_gap=hold_gap, hold_vel=hold_vel
        )
        active[i] = int(act)
        violations[i] = state.last_violation
    return ConfigRun(
        name=name,
        output=combined.with_values(out, name=name),
        active=active,
        violations=violations,
    )


def _run_auto_transition(config: BenchConfig, bm: JoinedBenchmark, bounds: DerivativeBounds,
                         kind: str, source_cont: Channel) -> ConfigRun:
    """Alg.-2 style loop where the active source is a transition baseline.

    On activation the baseline is anchored at the activation frame; while
    active its per-frame values are returned (and recorded into the policy
    history); once the boundary check clears and the recovery check passes,
    playback snaps back to the raw stream.

    Transitions blend away from the clip that was playing. Only the first
    activation corresponds to the actual clip switch, so it blends from
    the old clip's continuation; a later re-trigger has no switch behind
    it and the outgoing stream is the current clip itself.
    """
    combined = bm.combined
    values = combined.values
    dts = combined.dts
    nominal_dt = 1.0 / combined.rate_hint
    name = f"{ROSTER_LABELS[kind]} Auto"
    state = AutoState()
    out = np.empty_like(values)
    active_arr = np.zeros(len(values), dtype=np.int64)
    violations = np.full(len(values), VIOLATION_NONE, dtype=np.int64)
    transition: Channel | None = None
    switched = False

    for i, x in enumerate(values):
        dt = float(dts[i - 1]) if i > 0 else nominal_dt
        x = float(x)
        if state.sample_count < 3:
            out[i] = x
            state.active = False
            update_history(state, x, x, dt)
            continue
        active, violation = trigger_decision(state, bounds, x, dt)
        violations[i] = violation
        if active:
            if not state.active:
                outgoing = combined if switched else source_cont
                transition = _anchor_transition(config, bm, kind, i, outgoing)
                switched = True
            value = float(transition.values[i]) if transition is not None else x
        else:
            transition = None
            value = x
        out[i] = value
        active_arr[i] = int(active)
        state.active = active
        update_history(state, value, x, dt)
    return ConfigRun(
        name=name,
        output=combined.with_values(out, name=name),
        active=active_arr,
        violations=violations,
    )


def _anchor_transition(config: BenchConfig, bm: JoinedBenchmark, kind: str,
                       frame: int, source_cont: Channel) -> Channel | None:
    spec = TransitionSpec(trigger_frame=frame, blend_duration=config.blend_duration)
    try:
        return _baseline_channel(kind, source_cont, bm.combined, spec)
    except CoverageError:
        # activation too close to the clip edge to fit a blend: pass through
        return None



def run_benchmark(config: BenchConfig) -> BenchResult:
    """Execute every configured roster entry and score it."""
    config.validate()
    bm = build_benchmark(config)
    sources = [bm.source_a, bm.source_b]
    params, schedule = tune_from_sources(
        sources, gain=config.gain, gb_duration=config.blend_duration
    )
    one_euro = OneEuroParams()
    bounds = extract_bounds(sources, safety_margin=config.safety_margin)
    reference = reference_spectrum(*_common_grid(bm.source_a, bm.source_b))
    source_cont = _source_continuation(bm)
    if config.velocity_hold:
        gb_hold_gap = GB_HOLD_GAP_FACTOR * params.max_abs_dx
        gb_hold_vel = GB_HOLD_VEL_FACTOR * params.max_abs_dx
    else:
        gb_hold_gap = gb_hold_vel = None

    runs: list[ConfigRun] = [
        ConfigRun(
            name="Raw Combined",
            output=bm.combined.with_values(bm.combined.values.copy(), name="Raw Combined"),
            active=np.zeros(len(bm.combined), dtype=np.int64),
        )
    ]
    if config.include_fixed:
        for kind in config.roster:
            runs.append(_run_fixed(config, bm, kind, params, schedule, one_euro, source_cont))
    if config.include_auto:
        for kind in config.roster:
            if kind in ("xfade", "deadman", "bollo"):
                runs.append(_run_auto_transition(config, bm, bounds, kind, source_cont))
            elif kind == "hpf":
                runs.append(_run_auto_hpf(config, bm, bounds, params, "HPF Auto"))
            elif kind == "gb-hpf":
                runs.append(
                    _run_auto_hpf(
                        config, bm, bounds, schedule, "GB-HPF Auto",
                        hold_gap=gb_hold_gap, hold_vel=gb_hold_vel,
                    )
                )
            elif kind == "1ef":
                runs.append(_run_auto_one_euro(config, bm, bounds, one_euro))

    rows = []
    for run in runs:
        rows.append(
            EvalRow(
                config_name=run.name,
                mse=mse(run.output, bm.target, config.window_frames, start=bm.joint_frame),
                npss=npss(run.output, reference),
            )
        )
    return BenchResult(
        benchmark=bm,
        bounds=bounds,
        hpf_params=params,
        gb_schedule=schedule,
        reference=reference,
        report=EvalReport(rows=rows),
        runs=runs,
    )


def _run_auto_one_euro(config: BenchConfig, bm: JoinedBenchmark, bounds: DerivativeBounds,
                       params: OneEuroParams) -> ConfigRun:
    combined = bm.combined
    values = combined.values
    dts = combined.dts
    nominal_dt = 1.0 / combined.rate_hint
    state = AutoState()
    filt = OneEuroState()
    out = np.empty_like(values)
    active_arr = np.zeros(len(values), dtype=np.int64)
    for i, x in enumerate(values):
        dt = float(dts[i - 1]) if i > 0 else nominal_dt
        x = float(x)
        if state.sample_count < 3:
            out[i] = x
            state.active = False
            filt.reset()
            one_euro_step(filt, params, x, dt)
            update_history(state, x, x, dt)
            continue
        active, _ = trigger_decision(state, bounds, x, dt)
        if active:
            value = one_euro_step(filt, params, x, dt)
        else:
            filt.reset()
            one_euro_step(filt, params, x, dt)
            value = x
        out[i] = value
        active_arr[i] = int(active)
        state.active = active
        update_history(state, value, x, dt)
    return ConfigRun(
        name="1EF Auto",
        output=combined.with_values(out, name="1EF Auto"),
        active=active_arr,
    )


def _common_grid(a: Channel, b: Channel) -> tuple[Channel, Channel]:
    """Truncate two uniform clips to a shared length for the reference spectrum."""
    if len(a) == len(b):
        return a, b
    n = min(len(a), len(b))
    return (
        Channel(times=a.times[:n], values=a.values[:n], name=a.name, rate_hint=a.rate_hint),
        Channel(times=b.times[:n], values=b.values[:n], name=b.name, rate_hint=b.rate_hint),
    )


def trace_columns(result: BenchResult, run: ConfigRun) -> dict[str, np.ndarray]:
    """Per-frame trace of one configuration: time, raw, target, filtered, active."""
    bm = result.benchmark
    return {
        "time": bm.combined.times,
        "raw": bm.combined.values,
        "target": bm.target.values,
        "filtered": run.output.values,
        "active": run.active.astype(np.float64),
    }


def activation_columns(run: ConfigRun) -> dict[str, np.ndarray]:
    """Activation trace of an automatic run: frame, active, violated_order."""
    frames = np.arange(len(run.active), dtype=np.float64)
    violations = (
        run.violations.astype(np.float64)
        if run.violations is not None
        else np.full(len(run.active), float(VIOLATION_NONE))
    )
    return {
        "frame": frames,
        "active": run.active.astype(np.float64),
        "violated_order": violations,
    }
