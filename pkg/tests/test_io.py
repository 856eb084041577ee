import math
import struct

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from idasws.estimator import AutocorrProfile, WindowView, ida_profile_direct
from idasws.io import (BadMagicError, FieldFormatError, FrameStack, PhasorError,
                       TruncatedPayloadError, VersionMismatchError, export_map_csv,
                       export_map_pgm, export_profile_csv, extract_phasor, field_from_bytes,
                       field_to_bytes, map_to_pgm_bytes, read_field, read_frames, read_profile_csv,
                       synthesize_frames, write_field, write_frames)
from idasws.mapping import SWSMap
from idasws.synth import ComplexField, GridSpec, ReverbSpec, synth_reverberant

FREQ = 200.0
G = GridSpec(24, 20, 0.5e-3, 0.4e-3)


@pytest.fixture
def field():
    return synth_reverberant(G, ReverbSpec(1.0, FREQ, 200, 3))


def two_cell_map(valid=(True, True)):
    valid = np.array([[valid[0]], [valid[1]]])
    sws = np.where(valid, np.array([[1.0], [2.0]]), np.nan)
    return SWSMap(x=np.array([0.0, 1e-3]), z=np.array([0.0]), sws=sws, valid=valid,
                  nrmse=np.array([[0.1], [0.2]]), ix=np.array([0, 2]), iz=np.array([0]),
                  window=(8, 8), stride=(2, 2), estimator="IDA", freq=FREQ)


# -- RWF1 --------------------------------------------------------------------------------

def test_field_round_trip_bit_identical(tmp_path, field):
    p = tmp_path / "f.rwf"
    write_field(p, field)
    back = read_field(p)
    assert back.values.tobytes() == field.values.tobytes()
    assert back.grid == field.grid and back.freq == field.freq
    write_field(tmp_path / "g.rwf", back)
    assert (tmp_path / "g.rwf").read_bytes() == p.read_bytes()


def test_field_layout_matches_documented_format():
    g = GridSpec(8, 9, 1e-3, 2e-3)
    vals = (np.arange(72) + 1j * np.arange(72)[::-1]).reshape(8, 9)
    data = field_to_bytes(ComplexField(g, 50.0, vals))
    assert data[:4] == b"RWF1"
    assert struct.unpack_from("<III", data, 4) == (1, 8, 9)
    assert struct.unpack_from("<ddd", data, 16) == (1e-3, 2e-3, 50.0)
    assert len(data) == 40 + 72 * 16
    # second stored sample is (ix=1, iz=0): x runs fastest
    re, im = struct.unpack_from("<dd", data, 40 + 16)
    assert complex(re, im) == vals[1, 0]


@settings(max_examples=25, deadline=None)
@given(st.integers(8, 16), st.integers(8, 16), st.integers(0, 2 ** 31))
def test_round_trip_any_finite_field(nx, nz, seed):
    rng = np.random.default_rng(seed)
    vals = rng.standard_normal((nx, nz)) * 1e3 + 1j * rng.standard_normal((nx, nz)) * 1e-6
    f = ComplexField(GridSpec(nx, nz, 3e-4, 7e-4), 123.25, vals)
    assert field_from_bytes(field_to_bytes(f)).values.tobytes() == f.values.tobytes()


def test_truncated_payload(field):
    data = field_to_bytes(field)
    with pytest.raises(TruncatedPayloadError) as e:
        field_from_bytes(data[:-1])
    assert e.value.code == "truncated_payload"
    with pytest.raises(TruncatedPayloadError):
        field_from_bytes(data[:20])


def test_bad_magic_byte_swapped(field):
    data = bytearray(field_to_bytes(field))
    data[:4] = data[:4][::-1]
    with pytest.raises(BadMagicError) as e:
        field_from_bytes(bytes(data))
    assert e.value.code == "bad_magic"


def test_version_mismatch(field):
    data = bytearray(field_to_bytes(field))
    struct.pack_into("<I", data, 4, 2)
    with pytest.raises(VersionMismatchError) as e:
        field_from_bytes(bytes(data))
    assert e.value.code == "version_mismatch"


def test_error_codes_distinct_and_trailing_bytes(field):
    codes = {BadMagicError.code, VersionMismatchError.code, TruncatedPayloadError.code}
    assert len(codes) == 3
    with pytest.raises(FieldFormatError):
        field_from_bytes(field_to_bytes(field) + b"\0")


# -- frames and phasors ------------------------------------------------------------------

def sinusoid_stack(amp, phi, f0=FREQ, rate=1600.0, nt=64, grid=GridSpec(8, 8, 1e-3, 1e-3)):
    t = np.arange(nt) / rate
    a = np.broadcast_to(amp, grid.shape)
    p = np.broadcast_to(phi, grid.shape)
    frames = a[None] * np.cos(2 * np.pi * f0 * t[:, None, None] - p[None])
    return FrameStack(grid, rate, frames)


def test_pure_sinusoid_phasor():
    rng = np.random.default_rng(0)
    amp = rng.uniform(0.1, 3, (8, 8))
    phi = rng.uniform(-math.pi, math.pi, (8, 8))
    stack = sinusoid_stack(amp, phi)            # 64 frames, 8 cycles
    out = extract_phasor(stack, FREQ)
    np.testing.assert_allclose(out.values, amp * np.exp(1j * phi), rtol=0, atol=1e-12)
    assert out.freq == FREQ


def test_two_tone_rejection():
    a = sinusoid_stack(1.3, 0.4)
    b = sinusoid_stack(2.0, -1.0, f0=300.0)     # 12 cycles in the same record
    mixed = FrameStack(a.grid, a.frame_rate, a.frames + b.frames)
    out = extract_phasor(mixed, FREQ)
    np.testing.assert_allclose(out.values, 1.3 * np.exp(0.4j), atol=1e-12)


def test_synthesize_extract_round_trip(field):
    stack = synthesize_frames(field, 2000.0, 40)
    out = extract_phasor(stack, FREQ)
    assert np.max(np.abs(out.values - field.values)) <= 1e-10 * np.max(np.abs(field.values))


def test_phasor_linearity():
    rng = np.random.default_rng(1)
    g = GridSpec(8, 8, 1e-3, 1e-3)
    s1 = FrameStack(g, 1600.0, rng.standard_normal((64, 8, 8)))
    s2 = FrameStack(g, 1600.0, rng.standard_normal((64, 8, 8)))
    comb = FrameStack(g, 1600.0, 2.5 * s1.frames - 0.5 * s2.frames)
    lhs = extract_phasor(comb, FREQ).values
    rhs = 2.5 * extract_phasor(s1, FREQ).values - 0.5 * extract_phasor(s2, FREQ).values
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_phasor_errors():
    with pytest.raises(PhasorError, match="cycles"):
        extract_phasor(sinusoid_stack(1.0, 0.0, nt=60), FREQ)      # 7.5 cycles
    with pytest.raises(PhasorError, match="alias"):
        extract_phasor(sinusoid_stack(1.0, 0.0, rate=400.0), FREQ)
    with pytest.raises(PhasorError):
        extract_phasor(sinusoid_stack(1.0, 0.0), 0.0)
    with pytest.raises(ValueError):
        FrameStack(GridSpec(8, 8, 1e-3, 1e-3), 100.0, np.zeros((3, 8, 8)))


def test_frames_round_trip(tmp_path):
    stack = sinusoid_stack(1.0, 0.3, grid=GridSpec(8, 10, 1e-3, 5e-4))
    p = tmp_path / "s.rfs"
    write_frames(p, stack)
    back = read_frames(p)
    assert back.frames.tobytes() == stack.frames.tobytes()
    assert back.frame_rate == stack.frame_rate and back.grid == stack.grid
    data = p.read_bytes()
    p.write_bytes(data[:-8])
    with pytest.raises(TruncatedPayloadError):
        read_frames(p)
    p.write_bytes(b"XXXX" + data[4:])
    with pytest.raises(BadMagicError):
        read_frames(p)


# -- CSV and PGM exports -----------------------------------------------------------------

def test_profile_csv_round_trip(tmp_path, field):
    prof = ida_profile_direct(WindowView(field, 0, 0, 20, 20))
    p = tmp_path / "p.csv"
    export_profile_csv(p, prof)
    lines = p.read_text().splitlines()
    assert lines[0] == "# kind=IDA" and lines[1] == "lag_m,value,count"
    back = read_profile_csv(p)
    assert back.kind == "IDA"
    assert back.lags.tobytes() == prof.lags.tobytes()
    assert back.values.tobytes() == prof.values.tobytes()
    np.testing.assert_array_equal(back.counts, prof.counts)


def test_profile_csv_kind_override(tmp_path):
    p = tmp_path / "p.csv"
    p.write_text("lag_m,value,count\n0,1,4\n0.001,0.5,4\n")
    with pytest.raises(ValueError, match="kind"):
        read_profile_csv(p)
    assert read_profile_csv(p, "aia").kind == "AIA"


def test_golden_two_cell_exports(tmp_path):
    m = two_cell_map()
    export_map_csv(tmp_path / "m.csv", m)
    assert (tmp_path / "m.csv").read_text() == (
        "x_m,z_m,sws_mps,valid,nrmse\n"
        "0,0,1,1,0.10000000000000001\n"
        "0.001,0,2,1,0.20000000000000001\n")
    export_map_pgm(tmp_path / "m.pgm", m)
    assert (tmp_path / "m.pgm").read_bytes() == (
        b"P5\n# sws_min=1 sws_max=2 invalid=0\n2 1\n65535\n" + b"\x00\x01\xff\xff")


def test_all_invalid_map_exports(tmp_path):
    m = two_cell_map((False, False))
    export_map_csv(tmp_path / "m.csv", m)
    rows = (tmp_path / "m.csv").read_text().splitlines()[1:]
    assert len(rows) == 2 and all(r.split(",")[3] == "0" for r in rows)
    assert all(r.split(",")[2] == "nan" for r in rows)
    data = map_to_pgm_bytes(m)
    assert data.endswith(b"\x00" * 4)
    assert b"sws_min=nan" in data


def test_pgm_constant_valid_map():
    m = two_cell_map()
    m.sws[:] = 1.5
    assert map_to_pgm_bytes(m).endswith(b"\xff\xff\xff\xff")
