"""Benchmark clip construction: synthetic sources and clip joining.

The evaluation scenario is a hard cut between two animation clips. Since
suitable mocap pairs cannot be redistributed, `synth_benchmark` generates
two deterministic stand-ins: ~5000 frames at 30 fps, each a sum of sub-5 Hz
tones (natural human movement concentrates its power below 5 Hz) with a
per-clip level offset, distinct spectral signatures and a dab of noise.
Tone frequencies sit exactly on the clip's DFT bin grid so spectral
estimates on the full clip are leakage-free.

`join_clips` then splices two sources into one continuous-timestamp channel
whose derivatives are clean everywhere except the joint frame.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import Channel
from .errors import InvalidSample

SYNTH_FRAMES = 5000
SYNTH_RATE = 30.0
SYNTH_NOISE_STD = 0.004
_TONES_PER_CLIP = 4
_BASE_AMPLITUDES = (1.0, 0.6, 0.35, 0.2)
_TREMOR_AMPLITUDE = 0.2
_TREMOR_BAND_HZ = (4.2, 4.97)


@dataclass
class SynthComponents:
    """The exact recipe behind one synthetic clip (for oracles and docs)."""

    freqs_hz: np.ndarray
    amplitudes: np.ndarray
    phases: np.ndarray
    offset: float
    noise_std: float


def synth_components(seed: int) -> tuple[SynthComponents, SynthComponents]:
    """Deterministic tone tables for the two clips of `synth_benchmark`."""
    rng = np.random.default_rng(seed)
    bin_hz = SYNTH_RATE / SYNTH_FRAMES

    def draw(lo_hz: float, hi_hz: float, offset_lo: float, offset_hi: float) -> SynthComponents:
        lo_bin = int(np.ceil(lo_hz / bin_hz))
        hi_bin = int(np.floor(hi_hz / bin_hz))
        bins = rng.choice(np.arange(lo_bin, hi_bin + 1), size=_TONES_PER_CLIP, replace=False)
        freqs = np.sort(bins) * bin_hz
        amps = np.array(_BASE_AMPLITUDES) * rng.uniform(0.8, 1.2, size=_TONES_PER_CLIP)
        phases = rng.uniform(0.0, 2.0 * np.pi, size=_TONES_PER_CLIP)
        offset = rng.uniform(offset_lo, offset_hi)
        # a faint near-5 Hz tremor: real motion carries high-order texture,
        # and without it the clips' jerk envelopes are unrealistically tight
        tremor_bin = rng.integers(
            int(np.ceil(_TREMOR_BAND_HZ[0] / bin_hz)),
            int(np.floor(_TREMOR_BAND_HZ[1] / bin_hz)) + 1,
        )
        freqs = np.append(freqs, tremor_bin * bin_hz)
        amps = np.append(amps, _TREMOR_AMPLITUDE * rng.uniform(0.8, 1.2))
        phases = np.append(phases, rng.uniform(0.0, 2.0 * np.pi))
        return SynthComponents(
            freqs_hz=freqs,
            amplitudes=amps,
            phases=phases,
            offset=float(offset),
            noise_std=SYNTH_NOISE_STD,
        )

    # clip A: slow, low-band content; clip B: faster content on another level
    comp_a = draw(0.5, 2.4, -1.0, 0.0)
    comp_b = draw(1.8, 4.5, 1.5, 2.5)
    return comp_a, comp_b


def _render(comp: SynthComponents, rng: np.random.Generator, name: str) -> Channel:
    t = np.arange(SYNTH_FRAMES, dtype=np.float64) / SYNTH_RATE
    x = np.full(SYNTH_FRAMES, comp.offset)
    for f, a, p in zip(comp.freqs_hz, comp.amplitudes, comp.phases):
        x += a * np.sin(2.0 * np.pi * f * t + p)
    x += rng.normal(0.0, comp.noise_std, size=SYNTH_FRAMES)
    return Channel(times=t, values=x, name=name, rate_hint=SYNTH_RATE)


def synth_benchmark(seed: int) -> tuple[Channel, Channel]:
    """Two deterministic 5000-frame, 30 fps channels with distinct spectra.

    The same seed always yields bit-identical channels (PCG64 generator,
    fixed draw order).
    """
    comp_a, comp_b = synth_components(seed)
    noise_rng = np.random.default_rng(seed + 1_000_003)
    a = _render(comp_a, noise_rng, name=f"synth-a-{seed}")
    b = _render(comp_b, noise_rng, name=f"synth-b-{seed}")
    return a, b


@dataclass
class JoinedBenchmark:
    """A hard cut between two source clips plus its ground truth.

    `combined` is source_a up to (not including) joint_frame, then source_b
    from its cut onward, on one continuous uniform timeline. `target` is
    the same signal under its ground-truth role: the ideal output of any
    discontinuity filter is the combined stream itself everywhere it is
    smooth.
    """

    combined: Channel
    target: Channel
    joint_frame: int
    source_a: Channel
    source_b: Channel


def join_clips(a: Channel, b: Channel, cut_a: int, cut_b: int) -> JoinedBenchmark:
    """Concatenate a[..cut_a] with b[cut_b..] on a continuous timeline."""
    if not (0 < cut_a <= len(a)):
        raise InvalidSample(f"cut_a {cut_a} out of range for {len(a)}-frame clip")
    if not (0 <= cut_b < len(b)):
        raise InvalidSample(f"cut_b {cut_b} out of range for {len(b)}-frame clip")
    if not (a.is_uniform() and b.is_uniform()):
        raise InvalidSample("join_clips expects uniformly sampled clips")
    dt_a = float(a.dts[0])
    dt_b = float(b.dts[0])
    if abs(dt_a - dt_b) > 1e-9 * dt_a:
        raise InvalidSample(f"clip rates differ: dt {dt_a} vs {dt_b}")

    values = np.concatenate([a.values[:cut_a], b.values[cut_b:]])
    times = np.arange(len(values), dtype=np.float64) * dt_a
    combined = Channel(times=times, values=values, name="combined", rate_hint=a.rate_hint)
    target = Channel(times=times.copy(), values=values.copy(), name="target", rate_hint=a.rate_hint)
    return JoinedBenchmark(
        combined=combined,
        target=target,
        joint_frame=cut_a,
        source_a=a,
        source_b=b,
    )
