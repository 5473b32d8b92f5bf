"""Evaluation metrics: windowed MSE and power-spectrum similarity.

MSE measures how far a filtered stream lands from the ground-truth target
over a fixed-length window (fixed so runs are comparable). NPSS asks a
different question: did filtering preserve the *frequency content* of the
motion? It is the earth-mover distance between the cumulative normalized
power spectra of the test signal and a reference spectrum; the reference
for a benchmark is built from both source clips by keeping the per-bin
maximum of their raw spectra before normalizing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import Channel
from .errors import DegenerateChannel, InsufficientSamples, InvalidSample
from .tuning import power_spectrum


@dataclass
class PowerSpectrum:
    """Normalized spectral mass per frequency bin.

    power sums to 1; total_power keeps the raw (unnormalized) magnitude-
    squared sum around for power-weighted aggregation across channels.
    """

    bin_freqs: np.ndarray
    power: np.ndarray
    resolution: float
    total_power: float = 0.0

    def __post_init__(self):
        self.bin_freqs = np.asarray(self.bin_freqs, dtype=np.float64)
        self.power = np.asarray(self.power, dtype=np.float64)
        if len(self.bin_freqs) != len(self.power):
            raise InvalidSample("bin_freqs and power lengths differ")
        if np.any(self.power < 0.0):
            raise InvalidSample("spectral power must be non-negative")
        if len(self.bin_freqs) > 1 and not np.all(np.diff(self.bin_freqs) > 0.0):
            raise InvalidSample("bin_freqs must strictly increase")

    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.power)


def mse(filtered: Channel, target: Channel, window_frames: int, start: int = 0) -> float:
    """Mean squared difference over a fixed-length window.

    The window starts at `start` (the transition frame in benchmark use)
    and spans `window_frames` samples.
    """
    if len(filtered) != len(target):
        raise InvalidSample(
            f"length mismatch: filtered {len(filtered)} vs target {len(target)}"
        )
    if window_frames <= 0:
        raise InvalidSample(f"window_frames must be positive, got {window_frames}")
    if start < 0 or start + window_frames > len(target):
        raise InvalidSample(
            f"window [{start}, {start + window_frames}) outside {len(target)} frames"
        )
    d = filtered.values[start : start + window_frames] - target.values[start : start + window_frames]
    return float(np.mean(d * d))


def _raw_spectrum(channel: Channel) -> tuple[np.ndarray, np.ndarray]:
    if len(channel) < 16:
        raise InsufficientSamples(
            f"channel {channel.name!r} has {len(channel)} samples, need >= 16 for a spectrum"
        )
    if np.ptp(channel.values) == 0.0:
        raise DegenerateChannel(f"channel {channel.name!r} is constant; no spectral power")
    return power_spectrum(channel)


def normalized_power_spectrum(channel: Channel) -> PowerSpectrum:
    """Mean-removed magnitude-squared spectrum scaled to unit total mass."""
    freqs, power = _raw_spectrum(channel)
    total = float(np.sum(power))
    if total <= 0.0:
        raise DegenerateChannel(f"channel {channel.name!r} has zero spectral power")
    res = float(freqs[1] - freqs[0]) if len(freqs) > 1 else 0.0
    return PowerSpectrum(
        bin_freqs=freqs, power=power / total, resolution=res, total_power=total
    )


def reference_spectrum(clip_a: Channel, clip_b: Channel) -> PowerSpectrum:
    """Per-bin maximum of two raw spectra, normalized to unit mass.

    Keeping the max before normalizing preserves every frequency feature
    either source exhibits. The clips must share a bin grid (same length
    and rate); resample first if they do not.
    """
    fa, pa = _raw_spectrum(clip_a)
    fb, pb = _raw_spectrum(clip_b)
    if len(fa) != len(fb) or not np.allclose(fa, fb, rtol=1e-12, atol=0.0):
        raise InvalidSample(
            "incompatible spectral grids; resample the clips to a common length and rate"
        )
    merged = np.maximum(pa, pb)
    total = float(np.sum(merged))
    res = float(fa[1] - fa[0]) if len(fa) > 1 else 0.0
    return PowerSpectrum(
        bin_freqs=fa, power=merged / total, resolution=res, total_power=total
    )


def npss(test: Channel, reference: PowerSpectrum) -> float:
    """Earth-mover distance between cumulative normalized power spectra.

    The cumulative distributions are compared bin by bin and the L1 sum is
    divided by the bin count, i.e. the EMD is taken over the frequency
    support normalized to unit length (two equal tones one bin apart are
    1/n_bins apart). Zero iff the normalized spectra match; invariant to
    amplitude scaling of the test channel. When the test grid differs from
    the reference grid, the test's cumulative spectrum is linearly
    interpolated onto the reference bins.
    """
    spec = normalized_power_spectrum(test)
    cdf_test = spec.cumulative()
    cdf_ref = reference.cumulative()
    if len(spec.bin_freqs) == len(reference.bin_freqs) and np.allclose(
        spec.bin_freqs, reference.bin_freqs, rtol=1e-12, atol=0.0
    ):
        return float(np.sum(np.abs(cdf_test - cdf_ref))) / len(cdf_ref)
    aligned = np.interp(reference.bin_freqs, spec.bin_freqs, cdf_test)
    return float(np.sum(np.abs(aligned - cdf_ref))) / len(cdf_ref)


def npss_aggregate(pairs: list[tuple[Channel, PowerSpectrum]]) -> float:
    """Power-weighted average of per-channel NPSS values.

    Weights are the references' raw total power, so energetic channels
    dominate the aggregate, matching how the metric is used for full poses.
    """
    if not pairs:
        raise InvalidSample("nothing to aggregate")
    values = []
    weights = []
    for test, ref in pairs:
        values.append(npss(test, ref))
        weights.append(ref.total_power)
    total = float(np.sum(weights))
    if total <= 0.0:
        raise DegenerateChannel("aggregate weights sum to zero")
    return float(np.dot(values, weights) / total)


@dataclass
class EvalRow:
    config_name: str
    mse: float
    npss: float

    def __post_init__(self):
        if self.mse < 0.0 or self.npss < 0.0:
            raise InvalidSample(f"metrics must be non-negative: {self}")


@dataclass
class EvalReport:
    """Per-configuration metric rows, rendered as an aligned table or CSV."""

    rows: list[EvalRow]

    def to_text(self) -> str:
        name_w = max([len("Name")] + [len(r.config_name) for r in self.rows])
        lines = [f"{'Name':<{name_w}}  {'MSE':>8}  {'NPSS':>8}"]
        for r in self.rows:
            lines.append(f"{r.config_name:<{name_w}}  {r.mse:>8.4f}  {r.npss:>8.4f}")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        lines = ["name,mse,npss"]
        for r in self.rows:
            lines.append(f"{r.config_name},{r.mse!r},{r.npss!r}")
        return "\n".join(lines) + "\n"
