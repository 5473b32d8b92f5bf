"""Data-driven estimation of the adaptive filter's parameters.

Scanning a motion library (or a representative "dance card" clip) yields
per-channel derivative extrema and a power spectrum, from which both
cutoff bounds follow:

  * f_c_min comes from the slope-derivative relation of band-limited
    signals, max|v| / (2*pi*max|x|) -- the lowest tone that could have
    produced the observed peak slope.
  * f_c_max is the frequency below which almost all (default 99.99%) of
    the clip's spectral power lives.

A tuning gain can push both bounds up, clamped strictly below the 15 Hz
Nyquist limit of 30 fps animation. The Gain Blend schedule raises both
bounds toward that limit over the course of a blend, starting conservative
and finishing snappy; paired with the fixed 1-5 Hz defaults it gives a
usable filter with no tuning pass at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import Channel, derivative_tracks
from .errors import DegenerateChannel, InsufficientSamples, InvalidSample
from .filters import HpfParams

NYQUIST_30FPS = 15.0
NYQUIST_MARGIN = 0.01

GB_DEFAULT_F_C_MIN = 1.0
GB_DEFAULT_F_C_MAX = 5.0
GB_DEFAULT_DURATION = 0.3


@dataclass
class ChannelExtrema:
    """Largest absolute value and derivative magnitudes seen in a scan."""

    max_abs_x: float = 0.0
    max_abs_dx: float = 0.0
    max_abs_ddx: float = 0.0
    max_abs_jerk: float = 0.0

    def merged(self, other: "ChannelExtrema") -> "ChannelExtrema":
        """Combine scans of several clips of the same channel (elementwise max)."""
        return ChannelExtrema(
            max_abs_x=max(self.max_abs_x, other.max_abs_x),
            max_abs_dx=max(self.max_abs_dx, other.max_abs_dx),
            max_abs_ddx=max(self.max_abs_ddx, other.max_abs_ddx),
            max_abs_jerk=max(self.max_abs_jerk, other.max_abs_jerk),
        )


def scan_extrema(channel: Channel) -> ChannelExtrema:
    """Extrema of |x| and its first three finite-difference derivatives.

    Raises:
        InsufficientSamples: fewer than 4 samples (jerk needs three
            successive differences).
    """
    if len(channel) < 4:
        raise InsufficientSamples(
            f"channel {channel.name!r} has {len(channel)} samples, need >= 4"
        )
    v, a, j = derivative_tracks(channel)
    return ChannelExtrema(
        max_abs_x=float(np.max(np.abs(channel.values))),
        max_abs_dx=float(np.max(np.abs(v))),
        max_abs_ddx=float(np.max(np.abs(a))),
        max_abs_jerk=float(np.max(np.abs(j))),
    )


def scan_extrema_many(channels: list[Channel]) -> ChannelExtrema:
    """Scan a clip library; per-field max across all clips."""
    if not channels:
        raise InsufficientSamples("no channels to scan")
    result = scan_extrema(channels[0])
    for ch in channels[1:]:
        result = result.merged(scan_extrema(ch))
    return result


def estimate_fc_min(extrema: ChannelExtrema) -> float:
    """Lower cutoff bound from the slope-derivative relation.

    For a pure tone A*sin(2*pi*f*t) this recovers f exactly; for general
    band-limited motion it is a conservative floor.

    Raises:
        DegenerateChannel: max_abs_x == 0 (a flat channel needs no filter).
    """
    if extrema.max_abs_x <= 0.0:
        raise DegenerateChannel("max |x| is zero; flat channel needs no filtering")
    return extrema.max_abs_dx / (2.0 * math.pi * extrema.max_abs_x)


def power_spectrum(channel: Channel) -> tuple[np.ndarray, np.ndarray]:
    """Mean-removed magnitude-squared spectrum on a uniform grid.

    Non-uniform channels are linearly resampled to rate_hint first.
    Returns (bin_freqs, power); bins run from 0 to Nyquist.
    """
    ch = channel if channel.is_uniform() else channel.resampled()
    if len(ch) < 2:
        raise InsufficientSamples(f"channel {channel.name!r} too short for a spectrum")
    dt = float(ch.dts[0])
    x = ch.values - np.mean(ch.values)
    spec = np.fft.rfft(x)
    power = (spec.real ** 2 + spec.imag ** 2)
    freqs = np.fft.rfftfreq(len(x), d=dt)
    return freqs, power


def estimate_fc_max(channel: Channel, power_fraction: float = 0.9999) -> float:
    """Smallest frequency containing `power_fraction` of the total power.

    Raises:
        DegenerateChannel: constant channel (no spectral power).
        InvalidSample: power_fraction outside (0, 1].
    """
    if not (0.0 < power_fraction <= 1.0):
        raise InvalidSample(f"power_fraction must be in (0, 1], got {power_fraction}")
    if np.ptp(channel.values) == 0.0:
        raise DegenerateChannel(f"channel {channel.name!r} is constant; no spectrum")
    freqs, power = power_spectrum(channel)
    cum = np.cumsum(power)
    total = cum[-1]
    if total <= 0.0:
        raise DegenerateChannel(f"channel {channel.name!r} has zero spectral power")
    idx = int(np.searchsorted(cum, power_fraction * total, side="left"))
    idx = min(idx, len(freqs) - 1)
    return float(freqs[idx])


def apply_tuning_gain(f: float, gain: float, nyquist: float = NYQUIST_30FPS) -> float:
    """Scale a tuned frequency, clamped strictly below the Nyquist limit.

    The clamp leaves a fixed NYQUIST_MARGIN (0.01 Hz) so the result is
    never >= nyquist.
    """
    if gain <= 0.0:
        raise InvalidSample(f"gain must be positive, got {gain}")
    return min(f * gain, nyquist - NYQUIST_MARGIN)


@dataclass
class GainBlendSchedule:
    """Progressive cutoff-raising schedule for use during a blend.

    Both cutoff bounds interpolate linearly from `base` to `terminal_freq`
    as blend progress goes 0 -> 1 over `duration` seconds: conservative at
    the start (avoids injecting jerk), convergent at the end (avoids an
    end-of-blend pop).
    """

    base: HpfParams
    terminal_freq: float = NYQUIST_30FPS
    duration: float = GB_DEFAULT_DURATION

    def __post_init__(self):
        if self.terminal_freq < self.base.f_c_max:
            raise InvalidSample(
                f"terminal_freq {self.terminal_freq} below base f_c_max {self.base.f_c_max}"
            )
        if self.duration <= 0.0:
            raise InvalidSample(f"duration must be positive, got {self.duration}")


def gain_blend_params(schedule: GainBlendSchedule, progress: float) -> HpfParams:
    """Cutoff bounds at a given blend progress in [0, 1].

    progress 0 returns the base parameters unchanged; progress 1 pins both
    bounds to terminal_freq. max_abs_dx passes through untouched.
    """
    if not (0.0 <= progress <= 1.0):
        raise InvalidSample(f"progress must be in [0, 1], got {progress}")
    base = schedule.base
    term = schedule.terminal_freq
    f_min = (1.0 - progress) * base.f_c_min + progress * term
    f_max = (1.0 - progress) * base.f_c_max + progress * term
    # rounding can tie the two a hair out of order when base bounds coincide
    return HpfParams(f_c_min=f_min, f_c_max=max(f_max, f_min), max_abs_dx=base.max_abs_dx)


def gb_hpf_defaults(max_abs_dx: float, duration: float = GB_DEFAULT_DURATION) -> GainBlendSchedule:
    """Ready-to-use schedule: 1-5 Hz bounds blending to 15 Hz.

    Only the channel's peak speed is required, which a plain data scan
    provides; no per-channel frequency tuning is needed.
    """
    base = HpfParams(
        f_c_min=GB_DEFAULT_F_C_MIN,
        f_c_max=GB_DEFAULT_F_C_MAX,
        max_abs_dx=max_abs_dx,
    )
    return GainBlendSchedule(base=base, duration=duration)
