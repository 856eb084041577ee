import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from idasws.prefilter import BandpassSpec, bandpass_2d, bandpass_mask, cutoffs, radial_wavenumber
from idasws.synth import ComplexField, GridSpec, ReverbSpec, rms, synth_reverberant

FREQ = 200.0
SPEC = BandpassSpec(0.54, 3.89)


def plane_wave(grid, mx, mz):
    """Plane wave sitting exactly on FFT bin (mx, mz)."""
    x, z = grid.axes()
    kx = 2 * math.pi * mx / (grid.nx * grid.dx)
    kz = 2 * math.pi * mz / (grid.nz * grid.dz)
    return ComplexField(grid, FREQ, np.exp(1j * (kx * x[:, None] + kz * z[None, :])))


def test_spec_validation():
    with pytest.raises(ValueError):
        BandpassSpec(2.0, 1.0)
    with pytest.raises(ValueError):
        BandpassSpec(0.0, 1.0)
    with pytest.raises(ValueError):
        BandpassSpec(1.0, 2.0, taper_frac=0.5)


def test_cutoffs_for_reference_band():
    k_l, k_h = cutoffs(SPEC, FREQ)
    assert k_l == pytest.approx(2 * math.pi * 200 / 3.89, rel=1e-15)
    assert k_h == pytest.approx(2 * math.pi * 200 / 0.54, rel=1e-15)
    # quoted to one decimal as ~323.1 and ~2327.1
    assert k_l == pytest.approx(323.1, abs=0.1)
    assert k_h == pytest.approx(2327.1, abs=0.1)


def test_radial_wavenumber_layout():
    g = GridSpec(16, 10, 1e-3, 2e-3)
    k = radial_wavenumber(g)
    assert k.shape == (16, 10) and k[0, 0] == 0.0
    assert k[1, 0] == pytest.approx(2 * math.pi / 16e-3)
    assert k[0, 1] == pytest.approx(2 * math.pi / 20e-3)


def test_mask_profile_regions():
    g = GridSpec(256, 256, 0.5e-3, 0.5e-3)
    k = radial_wavenumber(g)
    m = bandpass_mask(g, FREQ, SPEC)
    k_l, k_h = cutoffs(SPEC, FREQ)
    assert np.all((m >= 0) & (m <= 1))
    assert np.all(m[k <= k_l * 0.95] == 0)
    assert np.all(m[k >= k_h * 1.05] == 0)
    assert np.all(m[(k >= k_l * 1.05) & (k <= k_h * 0.95)] == 1)
    edge = (k > k_l * 0.95) & (k < k_l * 1.05)
    assert np.any((m[edge] > 0) & (m[edge] < 1))


def test_hard_edges_with_zero_taper():
    g = GridSpec(128, 128, 0.5e-3, 0.5e-3)
    m = bandpass_mask(g, FREQ, BandpassSpec(0.54, 3.89, taper_frac=0.0))
    assert set(np.unique(m)) <= {0.0, 1.0}


def test_dc_removed():
    g = GridSpec(64, 64, 0.5e-3, 0.5e-3)
    for spec in (BandpassSpec(0.5, 1e9, taper_frac=0.0), BandpassSpec(0.5, 1e9, zero_dc=False),
                 SPEC):
        assert bandpass_mask(g, FREQ, spec)[0, 0] == 0.0
    f = ComplexField(g, FREQ, np.full(g.shape, 3 - 1j))
    assert np.max(np.abs(bandpass_2d(f, SPEC).values)) < 1e-12


def test_empty_passband_rejected():
    g = GridSpec(32, 32, 0.5e-3, 0.5e-3)
    with pytest.raises(ValueError, match="empty passband"):
        bandpass_mask(g, FREQ, BandpassSpec(1.0, 1.05, taper_frac=0.2))


def test_mid_passband_plane_wave_preserved():
    g = GridSpec(128, 128, 0.5e-3, 0.5e-3)
    f = plane_wave(g, 10, 0)        # |k| ~ 982 rad/m
    out = bandpass_2d(f, SPEC)
    assert np.max(np.abs(out.values - f.values)) < 1e-6
    np.testing.assert_allclose(np.abs(out.values), 1.0, atol=1e-6)


def test_compression_wave_removed():
    g = GridSpec(200, 200, 0.5e-3, 0.5e-3)
    f = plane_wave(g, 0, 1)         # one cycle over 0.1 m, |k| ~ 62.8 rad/m
    kz = 2 * math.pi / 0.1
    assert kz < cutoffs(SPEC, FREQ)[0]
    out = bandpass_2d(f, SPEC)
    assert rms(out.values) < 1e-6 * rms(f.values)


def test_idempotent_on_flat_top():
    g = GridSpec(128, 128, 0.5e-3, 0.5e-3)
    f = plane_wave(g, 7, 6)
    once = bandpass_2d(f, SPEC)
    twice = bandpass_2d(once, SPEC)
    assert np.max(np.abs(twice.values - once.values)) <= 1e-12 * np.max(np.abs(once.values))


def test_energy_never_increases():
    g = GridSpec(96, 96, 0.5e-3, 0.5e-3)
    f = synth_reverberant(g, ReverbSpec(1.0, FREQ, 200, 4))
    out = bandpass_2d(f, SPEC)
    pin = np.abs(np.fft.fft2(f.values)) ** 2
    pout = np.abs(np.fft.fft2(out.values)) ** 2
    assert np.all(pout <= pin * (1 + 1e-10) + 1e-20)


@settings(max_examples=20, deadline=None)
@given(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
       st.integers(0, 1000))
def test_linearity(a, b, seed):
    g = GridSpec(32, 32, 0.5e-3, 0.5e-3)
    rng = np.random.default_rng(seed)
    f = ComplexField(g, FREQ, rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape))
    h = ComplexField(g, FREQ, rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape))
    lhs = bandpass_2d(f.replace(a * f.values + b * h.values), SPEC).values
    rhs = a * bandpass_2d(f, SPEC).values + b * bandpass_2d(h, SPEC).values
    scale = max(1.0, np.max(np.abs(lhs)))
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * scale
