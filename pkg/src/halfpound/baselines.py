"""Fixed-window transition baselines: cross-fade, dead-blend, inertialization.

All three take a `source` channel (the outgoing clip, continuing past the
switch) and a `target` channel (the stream that should be playing) on the
same uniform sample grid, and return a new channel that equals the target
everywhere outside the blend window. They differ in what happens inside:

  * crossfade      - linear interpolation source -> target over the window.
  * deadblend      - the source is dropped at the switch and replaced by a
                     velocity extrapolation with exponentially decaying
                     velocity, then cross-faded into the target.
  * inertialize    - the source-minus-target offset (value and velocity) is
                     captured at the switch and decayed to zero value,
                     velocity and acceleration by a quintic polynomial;
                     only the target is sampled afterwards.

The inertializer clamps a captured velocity that points away from zero
offset (it would overshoot before decaying) and shortens the blend time
when the offset would cross zero and come back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import Channel
from .errors import CoverageError, InvalidSample


@dataclass
class TransitionSpec:
    """Where a transition starts and how long it blends.

    trigger_frame is the first sample index of the incoming clip;
    blend_duration is in seconds.
    """

    trigger_frame: int
    blend_duration: float

    def __post_init__(self):
        if self.blend_duration <= 0.0:
            raise InvalidSample(f"blend_duration must be positive, got {self.blend_duration}")
        if self.trigger_frame < 0:
            raise InvalidSample(f"trigger_frame must be >= 0, got {self.trigger_frame}")


def _window(source: Channel, target: Channel, spec: TransitionSpec) -> tuple[int, int, float]:
    """Validate coverage and return (trigger, window_frames, dt)."""
    if len(source) != len(target):
        raise CoverageError(
            f"source ({len(source)}) and target ({len(target)}) lengths differ"
        )
    n_total = len(target)
    if spec.trigger_frame >= n_total:
        raise CoverageError(
            f"trigger_frame {spec.trigger_frame} outside signal of {n_total} frames"
        )
    dt = float(target.dts[0]) if n_total > 1 else 1.0 / target.rate_hint
    frames = max(1, int(round(spec.blend_duration / dt)))
    if spec.trigger_frame + frames > n_total:
        raise CoverageError(
            f"blend window [{spec.trigger_frame}, {spec.trigger_frame + frames}) "
            f"exceeds the {n_total}-frame clip"
        )
    return spec.trigger_frame, frames, dt


def crossfade(source: Channel, target: Channel, spec: TransitionSpec) -> Channel:
    """Linear blend from source to target over a fixed window.

    Window frame k (k = 0 .. n-1) uses weight w = k/n, so the trigger frame
    plays the source and the first frame past the window plays the target.
    """
    trig, n, _ = _window(source, target, spec)
    out = target.values.copy()
    k = np.arange(n)
    w = k / n
    idx = trig + k
    out[idx] = source.values[idx] + w * (target.values[idx] - source.values[idx])
    return target.with_values(out, name=f"{target.name}:xfade")


def deadblend(
    source: Channel,
    target: Channel,
    spec: TransitionSpec,
    half_life: float | None = None,
) -> Channel:
    """Velocity extrapolation of the dropped source, cross-faded into target.

    The source's last pre-trigger value and backward-difference velocity are
    captured; past the trigger the source is replaced by
    x0 + v0 * (1 - exp(-lambda*t)) / lambda, with lambda set from
    `half_life` (default blend_duration / 4). That extrapolation is then
    linearly faded into the target exactly like crossfade.
    """
    trig, n, dt = _window(source, target, spec)
    if trig < 2:
        raise CoverageError("deadblend needs >= 2 source samples before the trigger")
    if half_life is None:
        half_life = spec.blend_duration / 4.0
    if half_life <= 0.0:
        raise InvalidSample(f"half_life must be positive, got {half_life}")
    x0 = source.values[trig - 1]
    v0 = (source.values[trig - 1] - source.values[trig - 2]) / dt
    lam = 0.0 if math.isinf(half_life) else math.log(2.0) / half_life

    out = target.values.copy()
    k = np.arange(n)
    tau = (k + 1) * dt  # time since the last real source sample
    if lam == 0.0:
        ext = x0 + v0 * tau
    else:
        ext = x0 + v0 * (1.0 - np.exp(-lam * tau)) / lam
    w = k / n
    idx = trig + k
    out[idx] = ext + w * (target.values[idx] - ext)
    return target.with_values(out, name=f"{target.name}:deadblend")


@dataclass
class InertializerState:
    """A captured source-minus-target offset decaying along a quintic.

    The decay curve is stored factored as (t1 - t)^3 * (a*t^2 + b*t + c),
    which hits zero value, velocity and acceleration at t1 by construction
    and stays numerically exact near the endpoint.
    """

    offset_x0: float
    offset_v0: float
    blend_time_t1: float
    coeff_a: float
    coeff_b: float
    coeff_c: float
    elapsed: float = 0.0

    @classmethod
    def capture(
        cls,
        x0: float,
        v0: float,
        t1: float,
        a0: float = 0.0,
    ) -> "InertializerState":
        """Capture an offset and derive the decay polynomial.

        Applies two guards before solving: a velocity that drives the
        offset further from zero (v0*x0 > 0) is zeroed, and a velocity
        heading toward zero fast enough to overshoot shortens the blend
        time to t1 = min(t1, -5*x0/v0).
        """
        if t1 <= 0.0:
            raise InvalidSample(f"blend time must be positive, got {t1}")
        if v0 * x0 > 0.0:
            v0 = 0.0
        elif v0 * x0 < 0.0:
            t1 = min(t1, -5.0 * x0 / v0)
        c = x0 / t1**3
        b = (v0 + 3.0 * x0 / t1) / t1**3
        a = (a0 - 6.0 * t1 * c + 6.0 * t1**2 * b) / (2.0 * t1**3)
        return cls(
            offset_x0=x0,
            offset_v0=v0,
            blend_time_t1=t1,
            coeff_a=a,
            coeff_b=b,
            coeff_c=c,
        )

    def offset_at(self, t: float) -> float:
        """Remaining offset `t` seconds after the capture; 0 from t1 onward."""
        if t <= 0.0:
            return self.offset_x0
        if t >= self.blend_time_t1:
            return 0.0
        u = self.blend_time_t1 - t
        q = (self.coeff_a * t + self.coeff_b) * t + self.coeff_c
        return u * u * u * q


def inertialize(
    source: Channel,
    target: Channel,
    spec: TransitionSpec,
    capture_accel: bool = False,
) -> Channel:
    """Additive quintic decay of the source-minus-target offset.

    At the trigger the offset value and velocity are captured with forward
    differences on both streams (the source is the old clip's smooth
    continuation and the target is smooth from the switch onward, so
    neither difference crosses a discontinuity, and identical inputs give
    an exactly zero offset); `capture_accel` additionally captures the
    offset acceleration instead of assuming zero. Output is
    target + offset(t), which lands exactly on the target at the end of
    the blend.
    """
    trig, n, dt = _window(source, target, spec)
    if trig < 2:
        raise CoverageError("inertialize needs >= 2 source samples before the trigger")
    if trig + 2 >= len(target):
        raise CoverageError("inertialize needs >= 2 target samples after the trigger")

    sv = source.values
    tv = target.values
    x0 = sv[trig] - tv[trig]
    v0 = (sv[trig + 1] - sv[trig]) / dt - (tv[trig + 1] - tv[trig]) / dt
    a0 = 0.0
    if capture_accel:
        a_src = (sv[trig + 2] - 2.0 * sv[trig + 1] + sv[trig]) / dt**2
        a_tgt = (tv[trig + 2] - 2.0 * tv[trig + 1] + tv[trig]) / dt**2
        a0 = a_src - a_tgt

    state = InertializerState.capture(x0, v0, spec.blend_duration, a0=a0)
    out = tv.copy()
    for k in range(n):
        out[trig + k] = tv[trig + k] + state.offset_at(k * dt)
    return target.with_values(out, name=f"{target.name}:inertialize")
