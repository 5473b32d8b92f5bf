"""Automatic trigger and recovery policy for discontinuity filtering.

Instead of filtering on a fixed window at every clip change, the policy
watches the incoming samples' value, velocity, acceleration and jerk
against per-channel envelopes extracted offline from the source clips.
Human perception is most sensitive to acceleration/jerk spikes, and a
clip join violates those envelopes exactly at the joint, so filtering is
engaged only where needed.

While the filter is active, the derivative history tracks the *filtered*
output. Before deactivating, a recovery check estimates the acceleration
that snapping back to the raw stream would cause; if that snap would
itself break the acceleration envelope the filter stays active. An
optional stricter hold keeps the filter active while the filtered and raw
velocities disagree by more than a threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import Channel, derivative_tracks
from .errors import InsufficientSamples, InvalidSample, InvalidTimestep
from .filters import HpfParams, HpfState, hpf_step
from .tuning import GainBlendSchedule, gain_blend_params

# violation codes reported in activation traces
VIOLATION_NONE = -1
VIOLATION_VALUE = 0
VIOLATION_VELOCITY = 1
VIOLATION_ACCEL = 2
VIOLATION_JERK = 3
VIOLATION_RECOVERY = 4
VIOLATION_HOLD = 5


@dataclass
class DerivativeBounds:
    """Closed per-order envelopes plus the recovery acceleration envelope."""

    x_min: float
    x_max: float
    v_min: float
    v_max: float
    a_min: float
    a_max: float
    j_min: float
    j_max: float
    rec_a_min: float
    rec_a_max: float

    def __post_init__(self):
        pairs = [
            (self.x_min, self.x_max),
            (self.v_min, self.v_max),
            (self.a_min, self.a_max),
            (self.j_min, self.j_max),
            (self.rec_a_min, self.rec_a_max),
        ]
        for lo, hi in pairs:
            if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
                raise InvalidSample(f"invalid bound pair ({lo}, {hi})")


def _widen(lo: float, hi: float, margin: float) -> tuple[float, float]:
    if margin == 1.0:
        return lo, hi
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo) * margin
    # never shrink below the raw extrema, whatever rounding does
    return min(mid - half, lo), max(mid + half, hi)


def extract_bounds(channels: list[Channel], safety_margin: float = 1.05) -> DerivativeBounds:
    """Derivative envelopes over a set of source clips.

    Each order's min/max is taken across every clip and widened
    symmetrically about its midpoint by `safety_margin` (1 = raw extrema).
    The recovery acceleration envelope is a copy of the widened order-2
    envelope. A clip replayed through the policy with these bounds never
    triggers, because the offline scan uses the same difference cascade as
    the online check.
    """
    if safety_margin < 1.0:
        raise InvalidSample(f"safety_margin must be >= 1, got {safety_margin}")
    if not channels:
        raise InsufficientSamples("no channels given")
    lows = [math.inf] * 4
    highs = [-math.inf] * 4
    for ch in channels:
        if len(ch) < 4:
            raise InsufficientSamples(
                f"channel {ch.name!r} has {len(ch)} samples, need >= 4"
            )
        v, a, j = derivative_tracks(ch)
        for k, track in enumerate((ch.values, v, a, j)):
            lows[k] = min(lows[k], float(np.min(track)))
            highs[k] = max(highs[k], float(np.max(track)))
    (x_lo, x_hi) = _widen(lows[0], highs[0], safety_margin)
    (v_lo, v_hi) = _widen(lows[1], highs[1], safety_margin)
    (a_lo, a_hi) = _widen(lows[2], highs[2], safety_margin)
    (j_lo, j_hi) = _widen(lows[3], highs[3], safety_margin)
    return DerivativeBounds(
        x_min=x_lo, x_max=x_hi,
        v_min=v_lo, v_max=v_hi,
        a_min=a_lo, a_max=a_hi,
        j_min=j_lo, j_max=j_hi,
        rec_a_min=a_lo, rec_a_max=a_hi,
    )


def first_violation(x: float, v: float, a: float, j: float, bounds: DerivativeBounds) -> int:
    """Lowest violated order, or VIOLATION_NONE if everything is in range."""
    if not (bounds.x_min <= x <= bounds.x_max):
        return VIOLATION_VALUE
    if not (bounds.v_min <= v <= bounds.v_max):
        return VIOLATION_VELOCITY
    if not (bounds.a_min <= a <= bounds.a_max):
        return VIOLATION_ACCEL
    if not (bounds.j_min <= j <= bounds.j_max):
        return VIOLATION_JERK
    return VIOLATION_NONE


def are_in_range(x: float, v: float, a: float, j: float, bounds: DerivativeBounds) -> bool:
    """True iff every quantity lies inside its closed interval."""
    return first_violation(x, v, a, j, bounds) == VIOLATION_NONE


@dataclass
class AutoState:
    """History buffer of the trigger policy for one channel.

    est1..est3 hold the three previous returned values (filtered while
    active, raw while passing through); dt1/dt2 the two previous steps;
    prev_raw always the previous raw input.
    """

    prev_raw: float = 0.0
    est1: float = 0.0
    est2: float = 0.0
    est3: float = 0.0
    dt1: float = 0.0
    dt2: float = 0.0
    active: bool = False
    sample_count: int = 0
    inner: HpfState = field(default_factory=HpfState)
    active_elapsed: float = 0.0
    last_violation: int = VIOLATION_NONE


def update_history(state: AutoState, value: float, x_raw: float, dt: float):
    """Shift the history one slot: est3 <- est2 <- est1 <- value.

    `value` is whatever the step returned (raw while inactive, filtered
    while active); the previous raw input is kept separately for the
    recovery check.
    """
    state.est3 = state.est2
    state.est2 = state.est1
    state.est1 = value
    state.dt2 = state.dt1
    state.dt1 = dt
    state.prev_raw = x_raw
    state.sample_count += 1


def trigger_decision(
    state: AutoState,
    bounds: DerivativeBounds,
    x_i: float,
    dt: float,
    hold_gap: float | None = None,
    hold_vel: float | None = None,
) -> tuple[bool, int]:
    """Evaluate the boundary check and recovery condition for one sample.

    Requires at least 3 committed samples. Returns (active, violation
    code); does not modify the state.

    The optional velocity-proximity hold keeps the filter active when the
    resulting signal still moves too differently from the target stream.
    Two readings of "the resulting signal's velocity" are compared to the
    target velocity v0t: the displacement rate v0 (estimate toward the new
    sample; `hold_gap` caps |v0 - v0t|, which equals the previous value
    gap over dt) and the history rate v1 (the filtered stream's own
    velocity; `hold_vel` caps |v1 - v0t|). The first guards against
    snapping back across a residual offset, the second against handing a
    mismatched velocity to the derivative checks.
    """
    v0 = (x_i - state.est1) / dt
    v1 = (state.est1 - state.est2) / state.dt1
    v2 = (state.est2 - state.est3) / state.dt2
    a0 = (v0 - v1) / dt
    a1 = (v1 - v2) / state.dt1
    j = (a0 - a1) / dt
    violation = first_violation(x_i, v0, a0, j, bounds)
    active = violation != VIOLATION_NONE
    if not active and state.active:
        v0t = (x_i - state.prev_raw) / dt
        a0t = (v0 - v0t) / dt
        if a0t > bounds.rec_a_max or a0t < bounds.rec_a_min:
            active = True
            violation = VIOLATION_RECOVERY
        elif hold_gap is not None and abs(v0 - v0t) > hold_gap:
            active = True
            violation = VIOLATION_HOLD
        elif hold_vel is not None and abs(v1 - v0t) > hold_vel:
            active = True
            violation = VIOLATION_HOLD
    return active, violation


def _params_now(params: HpfParams | GainBlendSchedule, elapsed: float) -> HpfParams:
    if isinstance(params, GainBlendSchedule):
        progress = min(elapsed / params.duration, 1.0)
        return gain_blend_params(params, progress)
    return params


DEFAULT_HOLD_FACTOR = 0.1


def auto_hpf_step(
    state: AutoState,
    bounds: DerivativeBounds,
    params: HpfParams | GainBlendSchedule,
    x_i: float,
    dt: float,
    velocity_hold: bool = False,
    hold_gap: float | None = None,
    hold_vel: float | None = None,
) -> tuple[float, bool]:
    """One sample through the trigger-and-recover policy.

    While the derivative envelopes hold, the raw sample passes through
    bit-exact and the inner filter is reseeded with it, so a later
    activation starts from the latest pose. On a violation the inner
    adaptive filter produces the output until the boundary check clears
    and the recovery check deems the snap back to the raw stream benign.

    `params` may be fixed cutoff bounds or a Gain Blend schedule; with a
    schedule, blend progress is measured from the activation time and
    resets on each new activation. `velocity_hold` additionally keeps the
    filter active while its displacement rate differs from the raw
    stream's velocity by more than 0.1 * max_abs_dx; pass explicit
    `hold_gap`/`hold_vel` thresholds for finer control (see
    trigger_decision).

    Returns (estimate, active).
    """
    if dt <= 0.0:
        raise InvalidTimestep(f"dt must be positive, got {dt}")
    if not math.isfinite(x_i):
        raise InvalidSample(f"sample must be finite, got {x_i}")

    if state.sample_count < 3:
        state.last_violation = VIOLATION_NONE
        state.active = False
        state.inner.reset(x_i)
        update_history(state, x_i, x_i, dt)
        return x_i, False

    if hold_gap is None and hold_vel is None and velocity_hold:
        base = params.base if isinstance(params, GainBlendSchedule) else params
        hold_gap = DEFAULT_HOLD_FACTOR * base.max_abs_dx
    active, violation = trigger_decision(
        state, bounds, x_i, dt, hold_gap=hold_gap, hold_vel=hold_vel
    )
    state.last_violation = violation

    if not active:
        state.active = False
        state.active_elapsed = 0.0
        state.inner.reset(x_i)
        update_history(state, x_i, x_i, dt)
        return x_i, False

    if not state.active:
        state.active_elapsed = 0.0
    out = hpf_step(state.inner, _params_now(params, state.active_elapsed), x_i, dt)
    state.active_elapsed += dt
    state.active = True
    update_history(state, out, x_i, dt)
    return out, True
