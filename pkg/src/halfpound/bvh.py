"""BVH motion-capture text format: parsing, serialization, channel extraction.

Only what the filtering pipeline needs: the joint hierarchy with its
declared channel ordering, the frame matrix, and per-channel extraction
into scalar Channels. End sites and offsets are parsed and round-tripped
but otherwise ignored.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import Channel, unwrap_degrees
from .errors import BvhParseError


@dataclass
class BvhJoint:
    name: str
    offset: tuple[float, float, float]
    channels: list[str]
    children: list["BvhJoint"] = field(default_factory=list)
    end_offset: tuple[float, float, float] | None = None


@dataclass
class Skeleton:
    """Joint tree plus the motion block of a BVH file."""

    root: BvhJoint
    frame_time: float
    frames: np.ndarray  # (n_frames, n_channels), declared channel order

    def joints(self):
        """Depth-first iteration in declaration order."""
        stack = [self.root]
        while stack:
            j = stack.pop()
            yield j
            stack.extend(reversed(j.children))

    def channel_names(self) -> list[str]:
        names = []
        for j in self.joints():
            names.extend(f"{j.name}:{label}" for label in j.channels)
        return names

    def channel_column(self, joint_name: str, label: str) -> int:
        col = 0
        for j in self.joints():
            for ch in j.channels:
                if j.name == joint_name and ch == label:
                    return col
                col += 1
        raise KeyError(f"no channel {label!r} on joint {joint_name!r}")


class _Cursor:
    """Non-blank line iterator that remembers 1-based line numbers."""

    def __init__(self, text: str):
        self.items = [
            (i + 1, line.split())
            for i, line in enumerate(text.splitlines())
            if line.strip()
        ]
        self.pos = 0
        self.last_line = self.items[-1][0] if self.items else 1

    def exhausted(self) -> bool:
        return self.pos >= len(self.items)

    def peek(self) -> tuple[int, list[str]]:
        return self.items[self.pos]

    def take(self, what: str) -> tuple[int, list[str]]:
        if self.exhausted():
            raise BvhParseError(f"unexpected end of file, expected {what}", self.last_line)
        item = self.items[self.pos]
        self.pos += 1
        return item


def _floats(tokens: list[str], line: int, what: str) -> list[float]:
    try:
        return [float(t) for t in tokens]
    except ValueError:
        raise BvhParseError(f"non-numeric value in {what}", line) from None


def _parse_block_open(cur: _Cursor):
    line, toks = cur.take("'{'")
    if toks != ["{"]:
        raise BvhParseError(f"malformed hierarchy: expected '{{', got {' '.join(toks)!r}", line)


def _parse_offset(cur: _Cursor) -> tuple[float, float, float]:
    line, toks = cur.take("OFFSET")
    if toks[0] != "OFFSET" or len(toks) != 4:
        raise BvhParseError("malformed hierarchy: expected 'OFFSET x y z'", line)
    x, y, z = _floats(toks[1:], line, "OFFSET")
    return (x, y, z)


def _parse_joint(cur: _Cursor, name: str) -> BvhJoint:
    _parse_block_open(cur)
    offset = _parse_offset(cur)

    line, toks = cur.take("CHANNELS")
    if toks[0] != "CHANNELS" or len(toks) < 2:
        raise BvhParseError("malformed hierarchy: expected CHANNELS declaration", line)
    try:
        declared = int(toks[1])
    except ValueError:
        raise BvhParseError("malformed hierarchy: CHANNELS count not an integer", line) from None
    labels = toks[2:]
    if len(labels) != declared:
        raise BvhParseError(
            f"channel-count mismatch: CHANNELS declares {declared} but lists {len(labels)}",
            line,
        )
    joint = BvhJoint(name=name, offset=offset, channels=labels)

    while True:
        line, toks = cur.take("joint body or '}'")
        if toks == ["}"]:
            return joint
        if toks[0] == "JOINT":
            if len(toks) < 2:
                raise BvhParseError("malformed hierarchy: JOINT without a name", line)
            joint.children.append(_parse_joint(cur, " ".join(toks[1:])))
        elif toks[:2] == ["End", "Site"]:
            _parse_block_open(cur)
            joint.end_offset = _parse_offset(cur)
            line, toks = cur.take("'}' closing End Site")
            if toks != ["}"]:
                raise BvhParseError("malformed hierarchy: End Site not closed", line)
        else:
            raise BvhParseError(
                f"malformed hierarchy: unexpected {' '.join(toks)!r} in joint body", line
            )


def parse_bvh(text: str) -> Skeleton:
    """Parse BVH text into a Skeleton.

    Raises BvhParseError (carrying the offending line number) for a
    malformed hierarchy, a channel-count mismatch between declarations and
    motion rows, a missing MOTION section, or a frame-count discrepancy.
    """
    cur = _Cursor(text)
    line, toks = cur.take("HIERARCHY header")
    if toks != ["HIERARCHY"]:
        raise BvhParseError("malformed hierarchy: file must start with HIERARCHY", line)
    line, toks = cur.take("ROOT joint")
    if toks[0] != "ROOT" or len(toks) < 2:
        raise BvhParseError("malformed hierarchy: expected 'ROOT <name>'", line)
    root = _parse_joint(cur, " ".join(toks[1:]))

    if cur.exhausted():
        raise BvhParseError("missing MOTION section", cur.last_line)
    line, toks = cur.take("MOTION")
    if toks != ["MOTION"]:
        raise BvhParseError("missing MOTION section", line)

    line, toks = cur.take("'Frames:'")
    if toks[0] != "Frames:" or len(toks) != 2:
        raise BvhParseError("expected 'Frames: <count>'", line)
    try:
        n_frames = int(toks[1])
    except ValueError:
        raise BvhParseError("frame count not an integer", line) from None

    line, toks = cur.take("'Frame Time:'")
    if toks[:2] != ["Frame", "Time:"] or len(toks) != 3:
        raise BvhParseError("expected 'Frame Time: <seconds>'", line)
    frame_time = _floats(toks[2:], line, "Frame Time")[0]
    if frame_time <= 0.0:
        raise BvhParseError("Frame Time must be positive", line)

    n_channels = sum(len(j.channels) for j in _iter_joints(root))
    rows = []
    last_row_line = line
    while not cur.exhausted():
        line, toks = cur.take("motion row")
        last_row_line = line
        values = _floats(toks, line, "motion row")
        if len(values) != n_channels:
            raise BvhParseError(
                f"channel-count mismatch: row has {len(values)} values, "
                f"hierarchy declares {n_channels} channels",
                line,
            )
        rows.append(values)
    if len(rows) != n_frames:
        raise BvhParseError(
            f"frame-count mismatch: declared {n_frames} frames but found {len(rows)} rows",
            last_row_line,
        )
    frames = np.asarray(rows, dtype=np.float64).reshape(n_frames, n_channels)
    return Skeleton(root=root, frame_time=frame_time, frames=frames)


def _iter_joints(root: BvhJoint):
    stack = [root]
    while stack:
        j = stack.pop()
        yield j
        stack.extend(reversed(j.children))


def _fmt(v: float) -> str:
    return repr(float(v))


def _write_joint(out: list[str], joint: BvhJoint, depth: int, kind: str):
    pad = "\t" * depth
    out.append(f"{pad}{kind} {joint.name}")
    out.append(f"{pad}{{")
    inner = "\t" * (depth + 1)
    out.append(f"{inner}OFFSET {' '.join(_fmt(v) for v in joint.offset)}")
    out.append(f"{inner}CHANNELS {len(joint.channels)} {' '.join(joint.channels)}".rstrip())
    if joint.end_offset is not None:
        out.append(f"{inner}End Site")
        out.append(f"{inner}{{")
        out.append(f"{inner}\tOFFSET {' '.join(_fmt(v) for v in joint.end_offset)}")
        out.append(f"{inner}}}")
    for child in joint.children:
        _write_joint(out, child, depth + 1, "JOINT")
    out.append(f"{pad}}}")


def serialize_bvh(skeleton: Skeleton) -> str:
    """Render a Skeleton back to BVH text.

    Floats are written with shortest round-trip precision, so
    parse(serialize(parse(text))) reproduces parse(text) exactly.
    """
    out: list[str] = ["HIERARCHY"]
    _write_joint(out, skeleton.root, 0, "ROOT")
    out.append("MOTION")
    out.append(f"Frames: {skeleton.frames.shape[0]}")
    out.append(f"Frame Time: {_fmt(skeleton.frame_time)}")
    for row in skeleton.frames:
        out.append(" ".join(_fmt(v) for v in row))
    return "\n".join(out) + "\n"


def extract_channel(skeleton: Skeleton, joint: str, channel_label: str) -> Channel:
    """Pull one scalar curve out of the frame matrix.

    Timestamps are k * frame_time; rotation channels are unwrapped across
    +-360 degree jumps so downstream finite differences stay meaningful.

    Raises KeyError for an unknown joint/label combination.
    """
    col = skeleton.channel_column(joint, channel_label)
    values = skeleton.frames[:, col]
    if channel_label.lower().endswith("rotation"):
        values = unwrap_degrees(values)
    rate = 1.0 / skeleton.frame_time
    times = np.arange(len(values), dtype=np.float64) * skeleton.frame_time
    return Channel(
        times=times,
        values=values,
        name=f"{joint}:{channel_label}",
        rate_hint=rate,
    )
