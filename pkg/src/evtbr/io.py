"""Bit-exact file I/O for event streams and encoded frames.

Event formats
  text-csv   header line ``t_us,x,y,p``, one event per line as decimal
             integers, LF endings. Carries no geometry: the reader takes it
             from the caller.
  binary-v1  magic ``EVS1``, little-endian u32 width and u32 height
             (12-byte header), then 13-byte records of little-endian
             u64 t_us, u16 x, u16 y, signed 8-bit p. Record k starts at
             byte 12 + 13*k.

Frame format
  PGM (P5) with maxval 2**N - 1. One byte per pixel for maxval <= 255,
  otherwise two bytes big-endian. Pixels hold the exact integer codes, so
  a write/read round trip is the identity.

All parse errors carry the offending byte or line offset in the message.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .encoder import EncodedFrame
from .events import EVENT_DTYPE, EventStream, SensorGeometry

BINARY_MAGIC = b"EVS1"
BINARY_HEADER_LEN = 12
BINARY_RECORD_LEN = 13
CSV_HEADER = "t_us,x,y,p"

# On-disk record layout for binary-v1 (packed, 13 bytes).
_FILE_RECORD_DTYPE = np.dtype(
    [("t", "<u8"), ("x", "<u2"), ("y", "<u2"), ("p", "i1")]
)

_INT64_MAX = np.iinfo(np.int64).max
_U16_MAX = np.iinfo(np.uint16).max
_U32_MAX = np.iinfo(np.uint32).max


class EventFileFormat(str, Enum):
    TEXT_CSV = "csv"
    BINARY_V1 = "binary"


class EventFileError(ValueError):
    """Malformed or inconsistent event file."""


class FrameFormatError(ValueError):
    """Malformed PGM frame file or unsupported frame shape."""


def read_events(
    path: str | Path,
    fmt: EventFileFormat,
    geometry: SensorGeometry | None = None,
) -> EventStream:
    """Read an event stream, validating polarity and geometry bounds.

    ``geometry`` is required for text-csv (the format has no header for
    it) and ignored for binary-v1, which carries its own.
    """
    path = Path(path)
    if fmt is EventFileFormat.TEXT_CSV:
        if geometry is None:
            raise ValueError("text-csv input requires an explicit geometry")
        return _read_csv(path, geometry)
    return _read_binary(path)


def write_events(stream: EventStream, path: str | Path, fmt: EventFileFormat) -> None:
    """Write a stream so that reading it back reproduces it exactly."""
    path = Path(path)
    if fmt is EventFileFormat.TEXT_CSV:
        lines = [CSV_HEADER]
        lines.extend(f"{e['t']},{e['x']},{e['y']},{e['p']}" for e in stream.events)
        path.write_bytes(("\n".join(lines) + "\n").encode("ascii"))
        return

    g = stream.geometry
    if g.width > _U32_MAX or g.height > _U32_MAX:
        raise EventFileError(f"geometry {g.width}x{g.height} exceeds binary-v1 header range")
    if len(stream) and (int(stream.x.max()) > _U16_MAX or int(stream.y.max()) > _U16_MAX):
        raise EventFileError("event coordinates exceed binary-v1 u16 range")
    if len(stream) and int(stream.t.min()) < 0:
        raise EventFileError("negative timestamps are not representable in binary-v1")

    records = np.empty(len(stream), dtype=_FILE_RECORD_DTYPE)
    records["t"] = stream.t.astype(np.uint64)
    records["x"] = stream.x.astype(np.uint16)
    records["y"] = stream.y.astype(np.uint16)
    records["p"] = stream.p
    header = BINARY_MAGIC + struct.pack("<II", g.width, g.height)
    path.write_bytes(header + records.tobytes())


def _read_csv(path: Path, geometry: SensorGeometry) -> EventStream:
    text = path.read_bytes()
    lines = text.split(b"\n")
    if not lines or lines[0].decode("ascii", errors="replace").strip() != CSV_HEADER:
        raise EventFileError(f"{path}: line 1: expected header '{CSV_HEADER}'")

    rows = []
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        parts = raw.decode("ascii", errors="replace").split(",")
        if len(parts) != 4:
            raise EventFileError(f"{path}: line {lineno}: expected 4 fields, got {len(parts)}")
        try:
            t, x, y, p = (int(s) for s in parts)
        except ValueError:
            raise EventFileError(f"{path}: line {lineno}: non-integer field") from None
        if p not in (-1, 1):
            raise EventFileError(f"{path}: line {lineno}: polarity must be -1 or 1, got {p}")
        if not (0 <= x < geometry.width and 0 <= y < geometry.height):
            raise EventFileError(
                f"{path}: line {lineno}: event ({x}, {y}) outside {geometry.width}x{geometry.height}"
            )
        if t < 0:
            raise EventFileError(f"{path}: line {lineno}: negative timestamp {t}")
        rows.append((t, x, y, p))

    arr = np.array(rows, dtype=EVENT_DTYPE) if rows else np.empty(0, dtype=EVENT_DTYPE)
    return EventStream(geometry, arr)


def _read_binary(path: Path) -> EventStream:
    data = path.read_bytes()
    if len(data) < BINARY_HEADER_LEN:
        raise EventFileError(f"{path}: byte 0: truncated header ({len(data)} of {BINARY_HEADER_LEN} bytes)")
    if data[:4] != BINARY_MAGIC:
        raise EventFileError(f"{path}: byte 0: bad magic {data[:4]!r}, expected {BINARY_MAGIC!r}")
    width, height = struct.unpack("<II", data[4:BINARY_HEADER_LEN])
    if width < 1 or height < 1:
        raise EventFileError(f"{path}: byte 4: invalid geometry {width}x{height}")
    geometry = SensorGeometry(width, height)

    body = data[BINARY_HEADER_LEN:]
    n_full, leftover = divmod(len(body), BINARY_RECORD_LEN)
    if leftover:
        raise EventFileError(
            f"{path}: byte {BINARY_HEADER_LEN + n_full * BINARY_RECORD_LEN}: truncated record "
            f"({leftover} of {BINARY_RECORD_LEN} bytes)"
        )
    records = np.frombuffer(body, dtype=_FILE_RECORD_DTYPE)

    def record_offset(idx: int) -> int:
        return BINARY_HEADER_LEN + idx * BINARY_RECORD_LEN

    bad_p = np.nonzero((records["p"] != 1) & (records["p"] != -1))[0]
    if bad_p.size:
        k = int(bad_p[0])
        raise EventFileError(
            f"{path}: byte {record_offset(k)}: polarity must be -1 or 1, got {int(records['p'][k])}"
        )
    oob = np.nonzero((records["x"] >= width) | (records["y"] >= height))[0]
    if oob.size:
        k = int(oob[0])
        raise EventFileError(
            f"{path}: byte {record_offset(k)}: event ({int(records['x'][k])}, {int(records['y'][k])}) "
            f"outside {width}x{height}"
        )
    too_big = np.nonzero(records["t"] > np.uint64(_INT64_MAX))[0]
    if too_big.size:
        k = int(too_big[0])
        raise EventFileError(f"{path}: byte {record_offset(k)}: timestamp exceeds 2^63 - 1 microseconds")

    arr = np.empty(len(records), dtype=EVENT_DTYPE)
    arr["t"] = records["t"].astype(np.int64)
    arr["x"] = records["x"]
    arr["y"] = records["y"]
    arr["p"] = records["p"]
    return EventStream(geometry, arr)


def write_frame(frame: EncodedFrame, path: str | Path) -> None:
    """Write an encoded frame as binary PGM with maxval 2**N - 1."""
    if frame.n_bits > 16:
        raise FrameFormatError(
            f"PGM caps pixels at 16 bits; cannot persist a {frame.n_bits}-bit frame"
        )
    maxval = frame.max_code
    if int(frame.codes.max(initial=0)) > maxval:
        raise FrameFormatError(f"frame contains codes above maxval {maxval}")
    g = frame.geometry
    header = f"P5\n{g.width} {g.height}\n{maxval}\n".encode("ascii")
    if maxval <= 255:
        payload = frame.codes.astype(np.uint8).tobytes()
    else:
        payload = frame.codes.astype(">u2").tobytes()
    Path(path).write_bytes(header + payload)


def read_frame(path: str | Path) -> EncodedFrame:
    """Read a PGM frame written by :func:`write_frame`.

    The maxval must be of the form 2**N - 1; N is recovered from it. The
    window-start offset is not stored in PGM and comes back as 0.
    """
    path = Path(path)
    data = path.read_bytes()
    pos = 0

    def next_token() -> bytes:
        nonlocal pos
        while pos < len(data):
            c = data[pos : pos + 1]
            if c == b"#":
                while pos < len(data) and data[pos : pos + 1] != b"\n":
                    pos += 1
            elif c.isspace():
                pos += 1
            else:
                break
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FrameFormatError(f"{path}: byte {start}: unexpected end of header")
        return data[start:pos]

    magic = next_token()
    if magic != b"P5":
        raise FrameFormatError(f"{path}: byte 0: expected P5, got {magic!r}")
    try:
        width = int(next_token())
        height = int(next_token())
        maxval = int(next_token())
    except ValueError:
        raise FrameFormatError(f"{path}: byte {pos}: non-integer header field") from None
    if width < 1 or height < 1:
        raise FrameFormatError(f"{path}: invalid dimensions {width}x{height}")
    if maxval < 1 or (maxval & (maxval + 1)) != 0:
        raise FrameFormatError(f"{path}: maxval {maxval} is not of the form 2^N - 1")
    n_bits = maxval.bit_length()
    if n_bits > 16:
        raise FrameFormatError(f"{path}: maxval {maxval} exceeds the PGM 16-bit limit")

    pos += 1  # exactly one whitespace byte separates the header from the raster
    bytes_per_pixel = 1 if maxval <= 255 else 2
    expected = width * height * bytes_per_pixel
    raster = data[pos:]
    if len(raster) != expected:
        raise FrameFormatError(
            f"{path}: byte {pos}: raster holds {len(raster)} bytes, expected {expected}"
        )
    dtype = np.uint8 if bytes_per_pixel == 1 else np.dtype(">u2")
    codes = np.frombuffer(raster, dtype=dtype).reshape(height, width).astype(np.uint32)
    return EncodedFrame(SensorGeometry(width, height), n_bits, codes)


@dataclass(frozen=True)
class StreamStats:
    """Summary statistics of one event stream."""

    event_count: int
    duration_us: int
    events_per_second: float
    positive_count: int
    negative_count: int
    active_pixel_count: int

    def summary(self) -> str:
        return (
            f"events={self.event_count} duration_us={self.duration_us} "
            f"rate_eps={self.events_per_second:.6g} pos={self.positive_count} "
            f"neg={self.negative_count} active_pixels={self.active_pixel_count}"
        )


def stream_info(stream: EventStream) -> StreamStats:
    """Count events, span, mean rate, polarity split and touched pixels.

    Duration is last minus first timestamp; the rate is 0 for streams
    shorter than a microsecond.
    """
    n = len(stream)
    if n == 0:
        return StreamStats(0, 0, 0.0, 0, 0, 0)
    duration = int(stream.t[-1]) - int(stream.t[0])
    rate = n / (duration / 1e6) if duration > 0 else 0.0
    pos = int(np.count_nonzero(stream.p > 0))
    flat = stream.y.astype(np.int64) * stream.geometry.width + stream.x.astype(np.int64)
    return StreamStats(
        event_count=n,
        duration_us=duration,
        events_per_second=rate,
        positive_count=pos,
        negative_count=n - pos,
        active_pixel_count=int(np.unique(flat).size),
    )


__all__ = [
    "EventFileFormat",
    "EventFileError",
    "FrameFormatError",
    "StreamStats",
    "read_events",
    "write_events",
    "write_frame",
    "read_frame",
    "stream_info",
    "BINARY_MAGIC",
    "BINARY_HEADER_LEN",
    "BINARY_RECORD_LEN",
    "CSV_HEADER",
]
