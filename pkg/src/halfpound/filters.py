"""Per-sample filter kernels.

The adaptive low-pass family implemented here drives an exponential
smoother whose cutoff frequency is interpolated between a minimum and a
maximum bound according to how fast the incoming signal is moving:

    v      = (x_i - prev) / dt
    a_f    = clamp01(|v| / max_abs_dx)
    f_c    = lerp(f_c_min, f_c_max, a_f)
    alpha  = 1 / (1 + 1 / (2*pi*f_c*dt))
    out    = prev + alpha * (x_i - prev)

Slow motion gets heavy smoothing (f_c_min), fast motion passes almost
unfiltered (f_c_max). Because each update is a convex blend between the
previous estimate and the new sample, the output can never overshoot
either of them. The 1 Euro filter is included as the classic baseline
with a speed-proportional (rather than bounded) cutoff.

All step functions mutate their state argument in place and return the
new estimate. States are plain values with single-writer semantics;
distinct channels can be filtered in parallel with no shared state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import InvalidSample, InvalidTimestep

TWO_PI = 2.0 * math.pi
_ALPHA_MAX = math.nextafter(1.0, 0.0)


def clamp01(value: float) -> float:
    """Inclusive saturation to [0, 1]."""
    if value < 0.0:
        return 0.0
    if value > 1.0:
        return 1.0
    return value


def lowpass_alpha(f_c: float, dt: float) -> float:
    """Blend factor of a discretized RC low-pass at cutoff `f_c` for step `dt`.

    Returns a value in [0, 1): 0 blocks all change (f_c = 0), values near 1
    track the input almost exactly. Strictly increasing in both arguments.

    Raises:
        InvalidTimestep: if dt <= 0.
    """
    if dt <= 0.0:
        raise InvalidTimestep(f"dt must be positive, got {dt}")
    if f_c < 0.0:
        raise InvalidSample(f"cutoff must be non-negative, got {f_c}")
    if f_c == 0.0:
        return 0.0
    alpha = 1.0 / (1.0 + 1.0 / (TWO_PI * f_c * dt))
    # guard against rounding up to 1.0 for extreme f_c * dt
    return min(alpha, _ALPHA_MAX)


@dataclass
class HpfParams:
    """Offline-tuned parameters: cutoff bounds plus the speed that maps to
    the upper bound.

    Attributes:
        f_c_min: cutoff used when the signal is still, Hz.
        f_c_max: cutoff used at or above max_abs_dx, Hz.
        max_abs_dx: largest expected |velocity| in channel units per second.
    """

    f_c_min: float
    f_c_max: float
    max_abs_dx: float

    def __post_init__(self):
        if not (0.0 < self.f_c_min <= self.f_c_max):
            raise InvalidSample(
                f"need 0 < f_c_min <= f_c_max, got ({self.f_c_min}, {self.f_c_max})"
            )
        if not (self.max_abs_dx > 0.0) or not math.isfinite(self.max_abs_dx):
            raise InvalidSample(f"max_abs_dx must be positive and finite, got {self.max_abs_dx}")


@dataclass
class HpfState:
    """Single retained previous estimate; None means uninitialized."""

    prev_estimate: float | None = None

    def reset(self, value: float | None = None):
        self.prev_estimate = value


def _check_sample(x_i: float, dt: float):
    if dt <= 0.0:
        raise InvalidTimestep(f"dt must be positive, got {dt}")
    if not math.isfinite(x_i):
        raise InvalidSample(f"sample must be finite, got {x_i}")


def _adaptive_blend(prev: float, params: HpfParams, x_i: float, dt: float, speed: float) -> float:
    """Shared cutoff-interpolation update used by hpf_step and stacked_step."""
    a_f = clamp01(abs(speed) / params.max_abs_dx)
    f_c = (1.0 - a_f) * params.f_c_min + a_f * params.f_c_max
    f_c = min(max(f_c, params.f_c_min), params.f_c_max)
    alpha = lowpass_alpha(f_c, dt)
    return prev + alpha * (x_i - prev)


def hpf_step(state: HpfState, params: HpfParams, x_i: float, dt: float) -> float:
    """Advance the adaptive filter by one sample and return the new estimate.

    The first call seeds the state with x_i and returns it unchanged. Every
    later output lies in the closed interval between the previous estimate
    and x_i (the update is a convex blend), so the filter never overshoots.
    """
    _check_sample(x_i, dt)
    prev = state.prev_estimate
    if prev is None:
        state.prev_estimate = x_i
        return x_i
    speed = (x_i - prev) / dt
    out = _adaptive_blend(prev, params, x_i, dt, speed)
    state.prev_estimate = out
    return out


@dataclass
class OneEuroParams:
    """1 Euro filter baseline parameters.

    cutoff = min_cutoff + beta * |smoothed velocity|; the velocity estimate
    itself is smoothed by a fixed low-pass at d_cutoff.
    """

    min_cutoff: float = 1.0
    beta: float = 0.0
    d_cutoff: float = 1.0

    def __post_init__(self):
        if self.min_cutoff <= 0.0 or self.d_cutoff <= 0.0 or self.beta < 0.0:
            raise InvalidSample(
                f"need min_cutoff > 0, d_cutoff > 0, beta >= 0, got "
                f"({self.min_cutoff}, {self.beta}, {self.d_cutoff})"
            )


@dataclass
class OneEuroState:
    prev_estimate: float | None = None
    prev_deriv: float = 0.0

    def reset(self):
        self.prev_estimate = None
        self.prev_deriv = 0.0


def one_euro_step(state: OneEuroState, params: OneEuroParams, x_i: float, dt: float) -> float:
    """One step of the 1 Euro filter; seeds and returns x_i on the first call."""
    _check_sample(x_i, dt)
    prev = state.prev_estimate
    if prev is None:
        state.prev_estimate = x_i
        state.prev_deriv = 0.0
        return x_i
    dx = (x_i - prev) / dt
    a_d = lowpass_alpha(params.d_cutoff, dt)
    edx = state.prev_deriv + a_d * (dx - state.prev_deriv)
    state.prev_deriv = edx
    cutoff = params.min_cutoff + params.beta * abs(edx)
    alpha = lowpass_alpha(cutoff, dt)
    out = prev + alpha * (x_i - prev)
    state.prev_estimate = out
    return out


@dataclass
class StackedParams:
    """Parameter sets for a stack of adaptive filters, one per derivative
    order: level 0 smooths the signal, level 1 smooths the velocity used as
    level 0's speed measure, and so on."""

    levels: list[HpfParams] = field(default_factory=list)

    def __post_init__(self):
        if not self.levels:
            raise InvalidSample("stacked filter needs at least one level")


@dataclass
class StackedState:
    """One HpfState per level; index 0 tracks the signal."""

    levels: list[HpfState] = field(default_factory=list)

    @classmethod
    def for_params(cls, params: StackedParams) -> "StackedState":
        return cls(levels=[HpfState() for _ in params.levels])

    def reset(self):
        for st in self.levels:
            st.reset()


def stacked_step(state: StackedState, params: StackedParams, x_i: float, dt: float) -> float:
    """Advance a derivative-smoothing stack by one sample.

    Each level low-passes its own input; the smoothed finite difference of
    level j feeds level j-1 as the speed that drives its cutoff. Only the
    level-0 estimate is returned; higher levels never re-enter the
    reconstruction. With a single level this is exactly hpf_step.
    """
    _check_sample(x_i, dt)
    if len(state.levels) != len(params.levels):
        raise InvalidSample(
            f"state has {len(state.levels)} levels, params {len(params.levels)}"
        )
    return _stacked_level(state, params, 0, x_i, dt)


def _stacked_level(state: StackedState, params: StackedParams, j: int, value: float, dt: float) -> float:
    st = state.levels[j]
    prev = st.prev_estimate
    if prev is None:
        st.prev_estimate = value
        return value
    raw_speed = (value - prev) / dt
    if j + 1 < len(params.levels):
        speed = _stacked_level(state, params, j + 1, raw_speed, dt)
    else:
        speed = raw_speed
    out = _adaptive_blend(prev, params.levels[j], value, dt, speed)
    st.prev_estimate = out
    return out


class HalfPoundFilter:
    """Stateful convenience wrapper around hpf_step for streaming use."""

    def __init__(self, params: HpfParams):
        self.params = params
        self.state = HpfState()

    def step(self, x_i: float, dt: float) -> float:
        return hpf_step(self.state, self.params, x_i, dt)

    def reset(self):
        self.state.reset()


class OneEuroFilter:
    """Stateful convenience wrapper around one_euro_step."""

    def __init__(self, params: OneEuroParams | None = None):
        self.params = params if params is not None else OneEuroParams()
        self.state = OneEuroState()

    def step(self, x_i: float, dt: float) -> float:
        return one_euro_step(self.state, self.params, x_i, dt)

    def reset(self):
        self.state.reset()
