"""Scalar animation curves: one named time series with explicit timestamps.

A Channel is the unit every filter, tuner and metric in this package works
on. Timestamps must be strictly increasing and all values finite; Euler
angle channels are expected to be unwrapped (see :func:`unwrap_degrees`)
before filtering so finite differences stay meaningful across +-180 flips.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidSample, InvalidTimestep


@dataclass
class Channel:
    """A scalar time series sampled at (possibly non-uniform) timestamps.

    Attributes:
        times: seconds, strictly increasing.
        values: channel units (degrees for Euler rotations, length units
            for translations).
        name: identifier, e.g. "LeftLeg:Zrotation".
        rate_hint: nominal samples per second, used when a uniform grid is
            needed (spectral estimation, resampling).
    """

    times: np.ndarray
    values: np.ndarray
    name: str = ""
    rate_hint: float = 30.0

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=np.float64)
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.times.ndim != 1 or self.values.ndim != 1:
            raise InvalidSample("times and values must be 1D")
        if len(self.times) != len(self.values):
            raise InvalidSample(
                f"times ({len(self.times)}) and values ({len(self.values)}) differ in length"
            )
        if not np.all(np.isfinite(self.times)) or not np.all(np.isfinite(self.values)):
            raise InvalidSample(f"channel {self.name!r} contains NaN/Inf")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0.0):
            raise InvalidTimestep(f"channel {self.name!r} timestamps must strictly increase")
        if self.rate_hint <= 0.0:
            raise InvalidTimestep("rate_hint must be positive")

    def __len__(self) -> int:
        return len(self.values)

    @classmethod
    def from_values(cls, values, rate: float = 30.0, name: str = "") -> "Channel":
        """Build a uniformly sampled channel at `rate` Hz starting at t=0."""
        values = np.asarray(values, dtype=np.float64)
        times = np.arange(len(values), dtype=np.float64) / float(rate)
        return cls(times=times, values=values, name=name, rate_hint=float(rate))

    @property
    def dts(self) -> np.ndarray:
        """Per-step time deltas, length len(self) - 1."""
        return np.diff(self.times)

    def is_uniform(self, rel_tol: float = 1e-9) -> bool:
        if len(self) < 3:
            return True
        d = self.dts
        return bool(np.all(np.abs(d - d[0]) <= rel_tol * d[0]))

    def resampled(self, rate: float | None = None) -> "Channel":
        """Linearly resample onto a uniform grid (defaults to rate_hint).

        Returns self unchanged when already uniform at the requested rate.
        """
        rate = float(rate if rate is not None else self.rate_hint)
        if self.is_uniform() and len(self) > 1:
            current = 1.0 / self.dts[0]
            if abs(current - rate) <= 1e-9 * rate:
                return self
        span = self.times[-1] - self.times[0]
        n = int(round(span * rate)) + 1
        grid = self.times[0] + np.arange(n, dtype=np.float64) / rate
        grid = grid[grid <= self.times[-1] + 1e-12]
        vals = np.interp(grid, self.times, self.values)
        return Channel(times=grid, values=vals, name=self.name, rate_hint=rate)

    def with_values(self, values, name: str | None = None) -> "Channel":
        """Same timestamps, new values (and optionally a new name)."""
        return Channel(
            times=self.times.copy(),
            values=values,
            name=self.name if name is None else name,
            rate_hint=self.rate_hint,
        )


def unwrap_degrees(values: np.ndarray) -> np.ndarray:
    """Unwrap a degree-valued sequence so successive differences stay < 180.

    Each output value equals the input modulo 360; a step like
    179 -> -179 becomes 179 -> 181.
    """
    return np.unwrap(np.asarray(values, dtype=np.float64), period=360.0)


def derivative_tracks(channel: Channel) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Backward-difference velocity, acceleration and jerk tracks.

    Uses the same cascade as the online trigger policy: each higher-order
    difference at sample i is divided by that sample's own dt, so an offline
    scan of a clip sees exactly the values the policy would compute while
    passing the clip through unchanged.

    Returns (v, a, j) where v[k] belongs to sample k+1, a[k] to sample k+2
    and j[k] to sample k+3.
    """
    if len(channel) < 4:
        raise InvalidSample(
            f"need at least 4 samples for jerk, channel {channel.name!r} has {len(channel)}"
        )
    dt = channel.dts
    v = np.diff(channel.values) / dt
    a = np.diff(v) / dt[1:]
    j = np.diff(a) / dt[2:]
    return v, a, j
