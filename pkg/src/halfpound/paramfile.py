"""Human-readable parameter files.

One INI section per channel holding the tuned filter parameters and,
when extracted, the derivative envelopes used by the trigger policy:

    [LeftLeg:Zrotation]
    f_c_min = 0.81
    f_c_max = 4.2
    max_abs_dx = 51.0
    x_min = -10.0
    x_max = 80.0
    ... v/a/j min-max pairs ...
    rec_a_min = -900.0
    rec_a_max = 900.0

Floats are stored with shortest round-trip precision.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from pathlib import Path

from .errors import InvalidSample
from .filters import HpfParams
from .policy import DerivativeBounds

_BOUND_KEYS = (
    "x_min", "x_max",
    "v_min", "v_max",
    "a_min", "a_max",
    "j_min", "j_max",
    "rec_a_min", "rec_a_max",
)


@dataclass
class ChannelParams:
    """Everything tuned for one channel."""

    hpf: HpfParams
    bounds: DerivativeBounds | None = None


def write_params(path: str | Path, entries: dict[str, ChannelParams]):
    cfg = configparser.ConfigParser()
    for name, entry in entries.items():
        section = {
            "f_c_min": repr(entry.hpf.f_c_min),
            "f_c_max": repr(entry.hpf.f_c_max),
            "max_abs_dx": repr(entry.hpf.max_abs_dx),
        }
        if entry.bounds is not None:
            for key in _BOUND_KEYS:
                section[key] = repr(getattr(entry.bounds, key))
        cfg[name] = section
    with open(path, "w") as fh:
        cfg.write(fh)


def read_params(path: str | Path) -> dict[str, ChannelParams]:
    cfg = configparser.ConfigParser()
    read = cfg.read(path)
    if not read:
        raise InvalidSample(f"parameter file {path} not found or unreadable")
    entries: dict[str, ChannelParams] = {}
    for name in cfg.sections():
        sec = cfg[name]
        try:
            hpf = HpfParams(
                f_c_min=float(sec["f_c_min"]),
                f_c_max=float(sec["f_c_max"]),
                max_abs_dx=float(sec["max_abs_dx"]),
            )
        except KeyError as missing:
            raise InvalidSample(f"section [{name}] missing key {missing}") from None
        bounds = None
        if all(key in sec for key in _BOUND_KEYS):
            bounds = DerivativeBounds(**{key: float(sec[key]) for key in _BOUND_KEYS})
        entries[name] = ChannelParams(hpf=hpf, bounds=bounds)
    return entries
