"""Kernel tests: the adaptive low-pass, the 1 Euro baseline, stacked filters.

The reference for the adaptive kernel is an independent line-by-line
scalar oracle written directly from the update's definition; the 1 Euro
oracle follows the classic two-low-pass formulation.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from halfpound.errors import InvalidSample, InvalidTimestep
from halfpound.filters import (
    HpfParams,
    HpfState,
    OneEuroParams,
    OneEuroState,
    StackedParams,
    StackedState,
    clamp01,
    hpf_step,
    lowpass_alpha,
    one_euro_step,
    stacked_step,
)


def oracle_alpha(f_c, dt):
    return 1.0 / (1.0 + 1.0 / (2.0 * math.pi * f_c * dt))


def oracle_hpf(prev, f_min, f_max, max_dx, x, dt):
    """Line-by-line scalar reference for one adaptive update."""
    if prev is None:
        return x, x
    dx = (x - prev) / dt
    a_f = abs(dx) / max_dx
    a_f = min(max(a_f, 0.0), 1.0)
    f_c = (1.0 - a_f) * f_min + a_f * f_max
    alpha = oracle_alpha(f_c, dt)
    out = (1.0 - alpha) * prev + alpha * x
    return out, out


class TestLowpassAlpha:
    def test_reference_value(self):
        # 5 Hz at 30 fps, evaluated independently: 1 / (1 + 30 / (10*pi))
        expected = 1.0 / (1.0 + 30.0 / (10.0 * math.pi))
        assert lowpass_alpha(5.0, 1.0 / 30.0) == pytest.approx(expected, rel=1e-15)
        assert lowpass_alpha(5.0, 1.0 / 30.0) == pytest.approx(0.511528, abs=1e-6)

    def test_zero_cutoff_blocks_all_change(self):
        assert lowpass_alpha(0.0, 1.0 / 30.0) == 0.0

    def test_large_cutoff_approaches_one(self):
        a = lowpass_alpha(1e9, 1.0 / 30.0)
        assert 1.0 - 1e-6 < a < 1.0

    def test_invalid_timestep(self):
        with pytest.raises(InvalidTimestep):
            lowpass_alpha(1.0, 0.0)
        with pytest.raises(InvalidTimestep):
            lowpass_alpha(1.0, -0.1)

    @given(
        f1=st.floats(0.01, 100.0),
        f2=st.floats(0.01, 100.0),
        dt=st.floats(1e-4, 1.0),
    )
    def test_monotone_in_cutoff(self, f1, f2, dt):
        lo, hi = sorted((f1, f2))
        assert lowpass_alpha(lo, dt) <= lowpass_alpha(hi, dt)

    @given(f=st.floats(0.01, 100.0), dt=st.floats(1e-4, 1.0))
    def test_range(self, f, dt):
        a = lowpass_alpha(f, dt)
        assert 0.0 < a < 1.0


class TestHpfStep:
    def test_first_call_seeds(self):
        state = HpfState()
        params = HpfParams(1.0, 5.0, 10.0)
        assert hpf_step(state, params, 7.3, 1.0 / 30.0) == 7.3
        assert state.prev_estimate == 7.3

    def test_spec_worked_example(self):
        # state 0, sample 1 at 30 fps: speed 30 saturates a_f, cutoff 5 Hz
        state = HpfState(prev_estimate=0.0)
        params = HpfParams(1.0, 5.0, 10.0)
        out = hpf_step(state, params, 1.0, 1.0 / 30.0)
        expected, _ = oracle_hpf(0.0, 1.0, 5.0, 10.0, 1.0, 1.0 / 30.0)
        assert out == pytest.approx(expected, rel=1e-12)
        assert out == pytest.approx(0.511528, abs=1e-6)

    def test_repeated_sample_is_fixed_point(self):
        state = HpfState(prev_estimate=2.5)
        params = HpfParams(1.0, 5.0, 10.0)
        assert hpf_step(state, params, 2.5, 1.0 / 30.0) == 2.5

    def test_constant_stream_exact(self):
        state = HpfState()
        params = HpfParams(0.5, 8.0, 3.0)
        for _ in range(100):
            assert hpf_step(state, params, -4.25, 1.0 / 30.0) == -4.25

    def test_errors(self):
        params = HpfParams(1.0, 5.0, 10.0)
        with pytest.raises(InvalidTimestep):
            hpf_step(HpfState(), params, 1.0, 0.0)
        with pytest.raises(InvalidSample):
            hpf_step(HpfState(), params, float("nan"), 1.0 / 30.0)
        with pytest.raises(InvalidSample):
            hpf_step(HpfState(), params, float("inf"), 1.0 / 30.0)

    def test_oracle_equivalence_randomized(self):
        rng = np.random.default_rng(7)
        for _ in range(2000):
            prev = float(rng.uniform(-50, 50))
            f_min = float(rng.uniform(0.05, 10))
            f_max = f_min + float(rng.uniform(0, 10))
            max_dx = float(rng.uniform(0.1, 100))
            x = float(rng.uniform(-50, 50))
            dt = float(rng.uniform(1e-3, 0.2))
            state = HpfState(prev_estimate=prev)
            got = hpf_step(state, HpfParams(f_min, f_max, max_dx), x, dt)
            want, _ = oracle_hpf(prev, f_min, f_max, max_dx, x, dt)
            assert got == pytest.approx(want, rel=1e-12, abs=1e-12)

    @given(
        prev=st.floats(-1e6, 1e6),
        x=st.floats(-1e6, 1e6),
        f_min=st.floats(0.01, 14.0),
        spread=st.floats(0.0, 10.0),
        max_dx=st.floats(0.01, 1e4),
        dt=st.floats(1e-4, 0.5),
    )
    @settings(max_examples=500)
    def test_never_overshoots(self, prev, x, f_min, spread, max_dx, dt):
        state = HpfState(prev_estimate=prev)
        out = hpf_step(state, HpfParams(f_min, f_min + spread, max_dx), x, dt)
        assert min(prev, x) <= out <= max(prev, x)

    def test_shift_equivariance(self):
        rng = np.random.default_rng(3)
        xs = rng.normal(0.0, 2.0, 200)
        params = HpfParams(1.0, 5.0, 20.0)
        for k in (-37.5, 0.25, 1e3):
            s1, s2 = HpfState(), HpfState()
            for x in xs:
                a = hpf_step(s1, params, float(x), 1.0 / 30.0)
                b = hpf_step(s2, params, float(x) + k, 1.0 / 30.0)
                assert b == pytest.approx(a + k, rel=1e-9, abs=1e-9 * max(1.0, abs(k)))

    def test_scale_equivariance(self):
        rng = np.random.default_rng(4)
        xs = rng.normal(0.0, 2.0, 200)
        for c in (-3.0, 0.5, 12.0):
            p1 = HpfParams(1.0, 5.0, 20.0)
            p2 = HpfParams(1.0, 5.0, 20.0 * abs(c))
            s1, s2 = HpfState(), HpfState()
            for x in xs:
                a = hpf_step(s1, p1, float(x), 1.0 / 30.0)
                b = hpf_step(s2, p2, c * float(x), 1.0 / 30.0)
                assert b == pytest.approx(c * a, rel=1e-9, abs=1e-12)

    def test_output_bracketed_by_pinned_cutoffs(self):
        # the interpolated cutoff stays within its bounds, so the update
        # must land between the two pinned-cutoff updates
        rng = np.random.default_rng(5)
        params = HpfParams(0.8, 6.0, 15.0)
        lo_p = HpfParams(0.8, 0.8, 15.0)
        hi_p = HpfParams(6.0, 6.0, 15.0)
        prev = 0.0
        for _ in range(500):
            x = float(rng.uniform(-5, 5))
            mid = hpf_step(HpfState(prev_estimate=prev), params, x, 1.0 / 30.0)
            lo = hpf_step(HpfState(prev_estimate=prev), lo_p, x, 1.0 / 30.0)
            hi = hpf_step(HpfState(prev_estimate=prev), hi_p, x, 1.0 / 30.0)
            assert min(lo, hi) - 1e-12 <= mid <= max(lo, hi) + 1e-12
            prev = mid

    def test_monotone_step_response(self):
        params = HpfParams(2.0, 2.0, 1.0)
        state = HpfState(prev_estimate=0.0)
        prev_out = 0.0
        for k in range(400):
            out = hpf_step(state, params, 1.0, 1.0 / 30.0)
            if k < 80:  # strictly increasing until float saturation at 1.0
                assert out > prev_out
            else:
                assert out >= prev_out
            assert out <= 1.0
            prev_out = out
        assert prev_out == pytest.approx(1.0, abs=1e-9)

    def test_sinusoid_gain_at_cutoff(self):
        # pinned cutoff: the filter is a discretized RC low-pass, so the
        # steady-state gain at the cutoff frequency must be close to 1/sqrt(2)
        f_c, fs = 1.0, 1000.0
        params = HpfParams(f_c, f_c, 1.0)
        state = HpfState()
        n = int(fs * 6)
        t = np.arange(n) / fs
        x = np.sin(2 * np.pi * f_c * t)
        y = np.empty(n)
        for i in range(n):
            y[i] = hpf_step(state, params, float(x[i]), 1.0 / fs)
        tail = slice(n // 2, n)
        phase = np.exp(-2j * np.pi * f_c * t[tail])
        gain = abs(np.sum(y[tail] * phase)) / abs(np.sum(x[tail] * phase))
        assert gain == pytest.approx(1.0 / math.sqrt(2.0), abs=0.10)


class TestHpfParams:
    def test_rejects_bad_bounds(self):
        with pytest.raises(InvalidSample):
            HpfParams(0.0, 5.0, 1.0)
        with pytest.raises(InvalidSample):
            HpfParams(6.0, 5.0, 1.0)
        with pytest.raises(InvalidSample):
            HpfParams(1.0, 5.0, 0.0)
        with pytest.raises(InvalidSample):
            HpfParams(1.0, 5.0, -2.0)

    def test_clamp01(self):
        assert clamp01(-0.5) == 0.0
        assert clamp01(0.0) == 0.0
        assert clamp01(0.3) == 0.3
        assert clamp01(1.0) == 1.0
        assert clamp01(7.0) == 1.0


class OneEuroOracle:
    """Classic formulation: two chained low-passes, derivative first."""

    def __init__(self, min_cutoff, beta, d_cutoff):
        self.min_cutoff = min_cutoff
        self.beta = beta
        self.d_cutoff = d_cutoff
        self.x_hat = None
        self.dx_hat = 0.0

    def __call__(self, x, dt):
        if self.x_hat is None:
            self.x_hat = x
            self.dx_hat = 0.0
            return x
        dx = (x - self.x_hat) / dt
        a_d = oracle_alpha(self.d_cutoff, dt)
        self.dx_hat = a_d * dx + (1.0 - a_d) * self.dx_hat
        cutoff = self.min_cutoff + self.beta * abs(self.dx_hat)
        a = oracle_alpha(cutoff, dt)
        self.x_hat = a * x + (1.0 - a) * self.x_hat
        return self.x_hat


class TestOneEuro:
    def test_step_response_matches_oracle(self):
        params = OneEuroParams(min_cutoff=1.0, beta=0.007, d_cutoff=1.0)
        state = OneEuroState()
        oracle = OneEuroOracle(1.0, 0.007, 1.0)
        xs = [0.0] * 5 + [1.0] * 60
        for x in xs:
            got = one_euro_step(state, params, x, 1.0 / 30.0)
            want = oracle(x, 1.0 / 30.0)
            assert got == pytest.approx(want, rel=1e-12, abs=1e-15)

    def test_zero_beta_is_fixed_lowpass(self):
        params = OneEuroParams(min_cutoff=2.0, beta=0.0, d_cutoff=1.0)
        fixed = HpfParams(2.0, 2.0, 1.0)
        s_euro, s_fixed = OneEuroState(), HpfState()
        rng = np.random.default_rng(11)
        for x in rng.normal(0, 1, 300):
            a = one_euro_step(s_euro, params, float(x), 1.0 / 30.0)
            b = hpf_step(s_fixed, fixed, float(x), 1.0 / 30.0)
            assert a == pytest.approx(b, rel=1e-12)

    def test_constant_input(self):
        params = OneEuroParams()
        state = OneEuroState()
        for _ in range(50):
            assert one_euro_step(state, params, 3.5, 1.0 / 30.0) == 3.5

    def test_param_validation(self):
        with pytest.raises(InvalidSample):
            OneEuroParams(min_cutoff=0.0)
        with pytest.raises(InvalidSample):
            OneEuroParams(beta=-1.0)
        with pytest.raises(InvalidSample):
            OneEuroParams(d_cutoff=0.0)


class TestStacked:
    def test_single_level_equals_hpf(self):
        p = HpfParams(1.0, 5.0, 10.0)
        stacked = StackedParams(levels=[p])
        s_stack = StackedState.for_params(stacked)
        s_hpf = HpfState()
        rng = np.random.default_rng(12)
        for x in rng.normal(0, 3, 500):
            a = stacked_step(s_stack, stacked, float(x), 1.0 / 30.0)
            b = hpf_step(s_hpf, p, float(x), 1.0 / 30.0)
            assert a == b  # bit-identical, same arithmetic

    def test_constant_input_any_depth(self):
        for depth in (1, 2, 3):
            params = StackedParams(levels=[HpfParams(1.0, 5.0, 10.0)] * depth)
            state = StackedState.for_params(params)
            for _ in range(20):
                assert stacked_step(state, params, 1.25, 1.0 / 30.0) == 1.25

    def test_level1_velocity_smoother_than_raw(self):
        # noisy ramp: the level-1 estimate (smoothed derivative) must vary
        # less than the raw finite differences it consumes
        rng = np.random.default_rng(13)
        dt = 1.0 / 30.0
        xs = np.arange(600) * dt * 2.0 + rng.normal(0, 0.05, 600)
        params = StackedParams(
            levels=[HpfParams(1.0, 5.0, 10.0), HpfParams(1.0, 3.0, 50.0)]
        )
        state = StackedState.for_params(params)
        smoothed_v = []
        prev_out = None
        raw_v = []
        for x in xs:
            out = stacked_step(state, params, float(x), dt)
            if state.levels[1].prev_estimate is not None:
                smoothed_v.append(state.levels[1].prev_estimate)
            if prev_out is not None:
                raw_v.append((float(x) - prev_out) / dt)
            prev_out = out
        assert np.var(np.diff(smoothed_v)) < np.var(np.diff(raw_v))

    def test_empty_levels_rejected(self):
        with pytest.raises(InvalidSample):
            StackedParams(levels=[])
