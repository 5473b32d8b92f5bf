"""Acceptance gate: every release criterion, one test each, one printed
PASS/FAIL line each (run with `pytest tests/test_acceptance.py -v -s`).

Expensive shared artifacts (the 20-seed benchmark sweep) are computed once
per session.
"""

import math
import time

import numpy as np
import pytest

from halfpound.baselines import InertializerState
from halfpound.bench import (
    GB_HOLD_GAP_FACTOR,
    GB_HOLD_VEL_FACTOR,
    BenchConfig,
    run_benchmark,
)
from halfpound.bvh import parse_bvh, serialize_bvh
from halfpound.channel import Channel
from halfpound.errors import BvhParseError
from halfpound.filters import HpfParams, HpfState, hpf_step
from halfpound.metrics import normalized_power_spectrum, npss
from halfpound.policy import AutoState, auto_hpf_step
from halfpound.tuning import estimate_fc_max, estimate_fc_min, scan_extrema

N_SEEDS = 20


def report(criterion: int, passed: bool, detail: str):
    status = "PASS" if passed else "FAIL"
    print(f"[acceptance {criterion:2d}] {status}  {detail}")
    assert passed, f"criterion {criterion}: {detail}"


@pytest.fixture(scope="session")
def sweep():
    """Full default-roster benchmark for seeds 0..19."""
    return [run_benchmark(BenchConfig(seed=seed)) for seed in range(N_SEEDS)]


def activation_events(active):
    act = np.asarray(active, dtype=bool)
    return (np.flatnonzero(act[1:] & ~act[:-1]) + 1).tolist()


def test_01_kernel_oracle_equivalence():
    rng = np.random.default_rng(1001)
    n_cases = 10_000
    prevs = rng.uniform(-100, 100, n_cases)
    xs = rng.uniform(-100, 100, n_cases)
    f_mins = rng.uniform(0.05, 10.0, n_cases)
    spreads = rng.uniform(0.0, 10.0, n_cases)
    max_dxs = rng.uniform(0.1, 200.0, n_cases)
    dts = rng.uniform(1e-3, 0.2, n_cases)
    start = time.perf_counter()
    worst = 0.0
    for k in range(n_cases):
        prev, x, dt = float(prevs[k]), float(xs[k]), float(dts[k])
        f_min = float(f_mins[k])
        f_max = f_min + float(spreads[k])
        max_dx = float(max_dxs[k])
        state = HpfState(prev_estimate=prev)
        got = hpf_step(state, HpfParams(f_min, f_max, max_dx), x, dt)
        # independent line-by-line scalar evaluation of the update
        dx = (x - prev) / dt
        a_f = min(max(abs(dx) / max_dx, 0.0), 1.0)
        f_c = (1.0 - a_f) * f_min + a_f * f_max
        alpha = 1.0 / (1.0 + 1.0 / (2.0 * math.pi * f_c * dt))
        want = (1.0 - alpha) * prev + alpha * x
        scale = max(abs(got), abs(want), 1e-9)
        worst = max(worst, abs(got - want) / scale)
    elapsed = time.perf_counter() - start
    report(
        1,
        worst <= 1e-12 and elapsed < 1.0,
        f"{n_cases} randomized kernel cases, worst rel err {worst:.2e}, {elapsed:.2f}s",
    )


def test_02_no_overshoot():
    rng = np.random.default_rng(1002)
    n_cases = 100_000
    prevs = rng.uniform(-1e4, 1e4, n_cases)
    xs = rng.uniform(-1e4, 1e4, n_cases)
    f_mins = rng.uniform(0.01, 14.0, n_cases)
    spreads = rng.uniform(0.0, 14.0, n_cases)
    max_dxs = rng.uniform(0.01, 1e4, n_cases)
    dts = rng.uniform(1e-4, 0.5, n_cases)
    violations = 0
    for k in range(n_cases):
        prev, x = float(prevs[k]), float(xs[k])
        state = HpfState(prev_estimate=prev)
        params = HpfParams(float(f_mins[k]), float(f_mins[k]) + float(spreads[k]),
                           float(max_dxs[k]))
        out = hpf_step(state, params, x, float(dts[k]))
        if not (min(prev, x) <= out <= max(prev, x)):
            violations += 1
    report(2, violations == 0, f"{n_cases} randomized steps, {violations} hull violations")


def test_03_frequency_response():
    f_c, fs = 1.0, 1000.0
    params = HpfParams(f_c, f_c, 1.0)
    state = HpfState()
    n = int(fs * 6)
    t = np.arange(n) / fs
    x = np.sin(2 * np.pi * f_c * t)
    start = time.perf_counter()
    y = np.empty(n)
    for i in range(n):
        y[i] = hpf_step(state, params, float(x[i]), 1.0 / fs)
    elapsed = time.perf_counter() - start
    tail = slice(n // 2, n)
    phase = np.exp(-2j * np.pi * f_c * t[tail])
    gain = abs(np.sum(y[tail] * phase)) / abs(np.sum(x[tail] * phase))
    target = 1.0 / math.sqrt(2.0)
    report(
        3,
        abs(gain - target) <= 0.10 and elapsed < 1.0,
        f"steady-state gain at cutoff {gain:.4f} (target {target:.4f} +- 0.10), {elapsed:.2f}s",
    )


def test_04_tuner_tone():
    # lower bound: 2 Hz tone at 60 Hz, slope-derivative estimate within 2%
    rate = 60.0
    t = np.arange(int(rate * 20)) / rate
    ch = Channel.from_values(np.sin(2 * np.pi * 2.0 * t), rate)
    fc_min = estimate_fc_min(scan_extrema(ch))
    ok_min = abs(fc_min - 2.0) <= 0.02 * 2.0
    # upper bound: 512-sample window with the tone on the analysis grid
    rate2 = 64.0
    t2 = np.arange(512) / rate2
    ch2 = Channel.from_values(np.sin(2 * np.pi * 2.0 * t2), rate2)
    bin_hz = rate2 / 512
    fc_max = estimate_fc_max(ch2)
    ok_max = abs(fc_max - 2.0) <= bin_hz + 1e-12
    report(
        4,
        ok_min and ok_max,
        f"fc_min {fc_min:.4f} Hz (2 +- 2%), fc_max {fc_max:.4f} Hz (2 +- {bin_hz:.4f})",
    )


def test_05_trigger_localization(sweep):
    bad = []
    for seed, result in enumerate(sweep):
        joint = result.benchmark.joint_frame
        run = next(r for r in result.runs if r.name == "GB-HPF Auto")
        events = activation_events(run.active)
        if not events or any(abs(e - joint) > 1 for e in events):
            bad.append((seed, joint, events[:4]))
    report(
        5,
        not bad,
        f"{N_SEEDS} seeds, activations within +-1 frame of the joint; offenders: {bad}",
    )


def test_06_no_false_trigger(sweep):
    bad = []
    for seed, result in enumerate(sweep):
        hold_gap = GB_HOLD_GAP_FACTOR * result.hpf_params.max_abs_dx
        hold_vel = GB_HOLD_VEL_FACTOR * result.hpf_params.max_abs_dx
        for src in (result.benchmark.source_a, result.benchmark.source_b):
            state = AutoState()
            dt = 1.0 / src.rate_hint
            for x in src.values:
                out, active = auto_hpf_step(
                    state, result.bounds, result.gb_schedule, float(x), dt,
                    hold_gap=hold_gap, hold_vel=hold_vel,
                )
                if active or out != float(x):
                    bad.append((seed, src.name))
                    break
            else:
                continue
            break
    report(6, not bad, f"{N_SEEDS} seeds x 2 sources replayed bit-exact; offenders: {bad}")


def test_07_table_orderings(sweep):
    auto_le_fixed = 0
    gb_le_hpf = 0
    xfade_max = 0
    raw_zero = 0
    for result in sweep:
        rows = {r.config_name: r for r in result.report.rows}
        if rows["HPF Auto"].mse <= rows["HPF"].mse:
            auto_le_fixed += 1
        if rows["GB-HPF"].mse <= rows["HPF"].mse:
            gb_le_hpf += 1
        fixed = [rows[n].mse for n in ("XFade", "DeadMan", "Bollo", "HPF", "GB-HPF")]
        if rows["XFade"].mse >= max(fixed):
            xfade_max += 1
        if rows["Raw Combined"].mse == 0.0:
            raw_zero += 1
    majority = N_SEEDS // 2 + 1
    passed = (
        auto_le_fixed >= majority
        and gb_le_hpf >= majority
        and xfade_max >= majority
        and raw_zero == N_SEEDS
    )
    report(
        7,
        passed,
        f"HPF Auto<=HPF {auto_le_fixed}/{N_SEEDS}, GB<=HPF {gb_le_hpf}/{N_SEEDS}, "
        f"XFade largest {xfade_max}/{N_SEEDS}, raw zero {raw_zero}/{N_SEEDS}",
    )


def test_08_npss_sanity(sweep):
    ratios = []
    for result in sweep:
        rows = {r.config_name: r for r in result.report.rows}
        raw = rows["Raw Combined"].npss
        ratios.append(abs(rows["HPF Auto"].npss - raw) / raw)
    med = float(np.median(ratios))
    report(8, med <= 0.25, f"median |NPSS(HPF Auto)-NPSS(raw)|/NPSS(raw) = {med:.4f} (<= 0.25)")


def test_09_npss_brute_force():
    rng = np.random.default_rng(1009)
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(18, 63))  # <= 32 spectral bins
        test = Channel.from_values(rng.normal(0, 1, n), 30.0)
        ref = normalized_power_spectrum(Channel.from_values(rng.normal(0, 1, n), 30.0))
        got = npss(test, ref)
        spec = normalized_power_spectrum(test)
        total = cum_t = cum_r = 0.0
        for a, b in zip(spec.power, ref.power):
            cum_t += a
            cum_r += b
            total += abs(cum_t - cum_r)
        want = total / len(ref.power)
        worst = max(worst, abs(got - want))
    report(9, worst <= 1e-12, f"200 spectra <= 32 bins, worst |npss - brute force| = {worst:.2e}")


def test_10_inertialization_boundary():
    rng = np.random.default_rng(1010)
    worst_val = worst_vel = worst_acc = 0.0
    clamp_ok = True
    for _ in range(100):
        x0 = float(rng.uniform(-2, 2))
        v0 = float(rng.uniform(-10, 10))
        t1 = float(rng.uniform(0.1, 1.0))
        state = InertializerState.capture(x0, v0, t1)
        t_end = state.blend_time_t1
        h = t_end * 1e-11
        f0 = state.offset_at(t_end)
        f1 = state.offset_at(t_end - h)
        f2 = state.offset_at(t_end - 2 * h)
        worst_val = max(worst_val, abs(f0))
        worst_vel = max(worst_vel, abs((f0 - f1) / h))
        worst_acc = max(worst_acc, abs((f0 - 2 * f1 + f2) / h**2))
        if v0 * x0 > 0.0:  # outward velocity: the guard must cap the excursion
            ts = np.linspace(0.0, t_end, 200)
            if max(abs(state.offset_at(float(t))) for t in ts) > abs(x0) + 1e-12:
                clamp_ok = False
    passed = worst_val <= 1e-6 and worst_vel <= 1e-6 and worst_acc <= 1e-6 and clamp_ok
    report(
        10,
        passed,
        f"end-of-blend residuals: value {worst_val:.1e}, vel {worst_vel:.1e}, "
        f"acc {worst_acc:.1e} (<= 1e-6); clamp bound {'held' if clamp_ok else 'BROKEN'}",
    )


def test_11_bvh_round_trip():
    from test_bvh import FOUR_JOINT, MINIMAL

    fixtures = {"minimal": MINIMAL, "four-joint": FOUR_JOINT}
    round_trip_ok = True
    for text in fixtures.values():
        first = parse_bvh(text)
        second = parse_bvh(serialize_bvh(first))
        if serialize_bvh(first) != serialize_bvh(second):
            round_trip_ok = False
    errors_ok = True
    cases = [
        ("ROOT Hips\n{\n}", "malformed hierarchy"),
        (MINIMAL.split("MOTION")[0], "missing MOTION"),
        (MINIMAL.replace("CHANNELS 3 Zrotation Xrotation Yrotation",
                         "CHANNELS 3 Zrotation"), "channel-count mismatch"),
        (MINIMAL.replace("Frames: 3", "Frames: 7"), "frame-count mismatch"),
    ]
    for text, needle in cases:
        try:
            parse_bvh(text)
            errors_ok = False
        except BvhParseError as err:
            if needle not in str(err):
                errors_ok = False
    report(
        11,
        round_trip_ok and errors_ok,
        f"round-trip identity on {len(fixtures)} fixtures; 4 malformed fixtures "
        f"raise their distinct errors",
    )


def test_12_bench_determinism(tmp_path):
    from halfpound.cli import main

    out1 = tmp_path / "run1"
    out2 = tmp_path / "run2"
    assert main(["bench", "--seed", "11", "--out", str(out1)]) == 0
    assert main(["bench", "--seed", "11", "--out", str(out2)]) == 0
    identical = True
    compared = 0
    for f1 in sorted(out1.iterdir()):
        if f1.suffix not in (".txt", ".csv"):
            continue
        compared += 1
        if f1.read_bytes() != (out2 / f1.name).read_bytes():
            identical = False
    report(
        12,
        identical and compared >= 2,
        f"two identical-seed bench runs: {compared} report/trace files byte-identical",
    )
