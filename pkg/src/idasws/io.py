"""File formats and phasor extraction.

RWF1 (complex field), little-endian::

    offset  size  content
    0       4     b"RWF1"
    4       4     uint32 version = 1
    8       4     uint32 nx
    12      4     uint32 nz
    16      8     float64 dx   (m)
    24      8     float64 dz   (m)
    32      8     float64 freq (Hz)
    40      16*nx*nz  float64 (re, im) pairs, x fastest then z

RFS1 (real frame stack) follows the same idea::

    0 b"RFS1", 4 uint32 version = 1, 8 uint32 nx, 12 uint32 nz, 16 uint32 nt,
    20 float64 dx, 28 float64 dz, 36 float64 frame_rate,
    44 float64 samples, x fastest, then z, then frame

Phasor convention: a field phasor ``P`` stands for the real motion
``Re{P exp(-i 2 pi f t)}``; :func:`extract_phasor` inverts exactly that.
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .estimator import AutocorrProfile
from .synth import ComplexField, GridSpec

__all__ = [
    "FieldFormatError",
    "BadMagicError",
    "VersionMismatchError",
    "TruncatedPayloadError",
    "PhasorError",
    "FrameStack",
    "write_field",
    "read_field",
    "field_to_bytes",
    "field_from_bytes",
    "write_frames",
    "read_frames",
    "extract_phasor",
    "synthesize_frames",
    "export_profile_csv",
    "read_profile_csv",
    "export_map_csv",
    "export_map_pgm",
    "map_to_pgm_bytes",
]

FIELD_MAGIC = b"RWF1"
FRAMES_MAGIC = b"RFS1"
VERSION = 1
_FIELD_HEADER = struct.Struct("<4sIIIddd")
_FRAMES_HEADER = struct.Struct("<4sIIIIddd")


class FieldFormatError(ValueError):
    code = "format_error"


class BadMagicError(FieldFormatError):
    code = "bad_magic"


class VersionMismatchError(FieldFormatError):
    code = "version_mismatch"


class TruncatedPayloadError(FieldFormatError):
    code = "truncated_payload"


class PhasorError(ValueError):
    code = "phasor_error"


@dataclass(frozen=True, eq=False)
class FrameStack:
    """Real-valued frames ``frames[t, ix, iz]`` sampled at ``frame_rate``."""

    grid: GridSpec
    frame_rate: float
    frames: np.ndarray

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=float)
        if frames.ndim != 3 or frames.shape[1:] != self.grid.shape:
            raise ValueError(f"frames shape {frames.shape} does not match grid {self.grid.shape}")
        if frames.shape[0] < 4:
            raise ValueError("need at least 4 frames")
        if not self.frame_rate > 0:
            raise ValueError("frame_rate must be positive")
        object.__setattr__(self, "frames", frames)

    @property
    def nt(self) -> int:
        return self.frames.shape[0]


def field_to_bytes(f: ComplexField) -> bytes:
    g = f.grid
    head = _FIELD_HEADER.pack(FIELD_MAGIC, VERSION, g.nx, g.nz, g.dx, g.dz, f.freq)
    # (nx, nz) -> (nz, nx) C order puts x fastest
    payload = np.ascontiguousarray(f.values.T).astype("<c16").tobytes()
    return head + payload


def field_from_bytes(data: bytes) -> ComplexField:
    if len(data) < _FIELD_HEADER.size:
        if data[:4] != FIELD_MAGIC[:len(data[:4])]:
            raise BadMagicError("bad magic")
        raise TruncatedPayloadError("truncated header")
    magic, version, nx, nz, dx, dz, freq = _FIELD_HEADER.unpack_from(data)
    if magic != FIELD_MAGIC:
        raise BadMagicError(f"bad magic {magic!r}")
    if version != VERSION:
        raise VersionMismatchError(f"unsupported version {version}")
    need = nx * nz * 16
    payload = data[_FIELD_HEADER.size:]
    if len(payload) < need:
        raise TruncatedPayloadError(f"truncated payload: {len(payload)} of {need} bytes")
    if len(payload) > need:
        raise FieldFormatError(f"{len(payload) - need} trailing bytes after payload")
    values = np.frombuffer(payload, dtype="<c16").reshape(nz, nx).T.astype(complex)
    return ComplexField(GridSpec(nx, nz, dx, dz), freq, values)


def write_field(path, f: ComplexField) -> None:
    Path(path).write_bytes(field_to_bytes(f))


def read_field(path) -> ComplexField:
    return field_from_bytes(Path(path).read_bytes())


def write_frames(path, stack: FrameStack) -> None:
    g = stack.grid
    head = _FRAMES_HEADER.pack(FRAMES_MAGIC, VERSION, g.nx, g.nz, stack.nt, g.dx, g.dz,
                               stack.frame_rate)
    payload = np.ascontiguousarray(stack.frames.transpose(0, 2, 1)).astype("<f8").tobytes()
    Path(path).write_bytes(head + payload)


def read_frames(path) -> FrameStack:
    data = Path(path).read_bytes()
    if len(data) < _FRAMES_HEADER.size:
        raise TruncatedPayloadError("truncated header")
    magic, version, nx, nz, nt, dx, dz, rate = _FRAMES_HEADER.unpack_from(data)
    if magic != FRAMES_MAGIC:
        raise BadMagicError(f"bad magic {magic!r}")
    if version != VERSION:
        raise VersionMismatchError(f"unsupported version {version}")
    need = nt * nx * nz * 8
    payload = data[_FRAMES_HEADER.size:]
    if len(payload) != need:
        raise TruncatedPayloadError(f"payload has {len(payload)} bytes, expected {need}")
    frames = np.frombuffer(payload, dtype="<f8").reshape(nt, nz, nx).transpose(0, 2, 1)
    return FrameStack(GridSpec(nx, nz, dx, dz), rate, frames.astype(float))


def extract_phasor(stack: FrameStack, freq: float) -> ComplexField:
    """Lock-in estimate ``(2/nt) sum_n v(t_n) exp(+i 2 pi f t_n)`` per pixel.

    The record must hold a whole number of cycles of ``freq`` and ``freq``
    must be below Nyquist; no nearest-bin snapping is done.
    """
    if not freq > 0:
        raise PhasorError("freq must be positive")
    if freq >= stack.frame_rate / 2:
        raise PhasorError(f"freq {freq:g} Hz aliases at frame rate {stack.frame_rate:g} Hz")
    cycles = freq * stack.nt / stack.frame_rate
    if cycles < 1 - 1e-9 or abs(cycles - round(cycles)) > 1e-9 * max(1.0, cycles):
        raise PhasorError(f"record holds {cycles:.6g} cycles; need a whole number >= 1")
    t = np.arange(stack.nt) / stack.frame_rate
    ref = np.exp(1j * 2 * np.pi * freq * t)
    values = np.tensordot(ref, stack.frames, axes=(0, 0)) * (2.0 / stack.nt)
    return ComplexField(stack.grid, freq, values)


def synthesize_frames(f: ComplexField, frame_rate: float, nt: int) -> FrameStack:
    """Real motion ``Re{P exp(-i 2 pi f t)}`` sampled at ``nt`` frames."""
    t = np.arange(nt) / frame_rate
    carrier = np.exp(-1j * 2 * np.pi * f.freq * t)
    frames = np.real(carrier[:, None, None] * f.values[None, :, :])
    return FrameStack(f.grid, frame_rate, frames)


def _g(v) -> str:
    v = float(v)
    return "nan" if math.isnan(v) else f"{v:.17g}"


def export_profile_csv(path, profile: AutocorrProfile) -> None:
    lines = [f"# kind={profile.kind}", "lag_m,value,count"]
    lines += [f"{_g(r)},{_g(v)},{_g(c)}" for r, v, c in
              zip(profile.lags, profile.values, profile.counts)]
    Path(path).write_text("\n".join(lines) + "\n")


def read_profile_csv(path, kind: str | None = None) -> AutocorrProfile:
    """Parse a profile CSV; ``kind`` overrides the ``# kind=`` comment."""
    found = None
    rows = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line[1:].strip().startswith("kind="):
                found = line.split("=", 1)[1].strip()
            continue
        if line.startswith("lag_m"):
            continue
        rows.append([float(c) for c in line.split(",")[:3]])
    kind = kind or found
    if kind is None:
        raise ValueError("profile kind unknown; pass kind explicitly")
    arr = np.asarray(rows, dtype=float).reshape(-1, 3)
    return AutocorrProfile(kind.upper(), arr[:, 0], arr[:, 1], arr[:, 2])


def export_map_csv(path, m) -> None:
    lines = ["x_m,z_m,sws_mps,valid,nrmse"]
    for b, z in enumerate(m.z):
        for a, x in enumerate(m.x):
            lines.append(f"{_g(x)},{_g(z)},{_g(m.sws[a, b])},{int(m.valid[a, b])},"
                         f"{_g(m.nrmse[a, b])}")
    Path(path).write_text("\n".join(lines) + "\n")


def map_to_pgm_bytes(m) -> bytes:
    """16-bit binary PGM: rows are z, columns are x; invalid cells are 0.

    Valid cells map linearly from the valid min/max onto 1..65535 (all
    65535 if min == max).  The range is recorded in a comment line.
    """
    nx, nz = m.sws.shape
    img = np.zeros((nz, nx), dtype=">u2")
    if m.valid.any():
        vals = m.sws[m.valid]
        lo, hi = float(vals.min()), float(vals.max())
        scaled = np.full(m.sws.shape, 65535.0)
        if hi > lo:
            scaled = 1.0 + np.round((m.sws - lo) / (hi - lo) * 65534.0)
        img[:] = np.where(m.valid, scaled, 0).T.astype(">u2")
    else:
        lo = hi = math.nan
    head = f"P5\n# sws_min={_g(lo)} sws_max={_g(hi)} invalid=0\n{nx} {nz}\n65535\n"
    return head.encode("ascii") + img.tobytes()


def export_map_pgm(path, m) -> None:
    Path(path).write_bytes(map_to_pgm_bytes(m))
