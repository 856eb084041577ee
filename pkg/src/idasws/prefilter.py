"""Radially symmetric 2D Fourier-domain bandpass on physical wavenumbers.

The passband is set from a speed band: ``k_low = 2 pi f / c_high`` and
``k_high = 2 pi f / c_low``.  Edges roll off with a raised cosine over
``k_edge * (1 -+ taper_frac)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .synth import ComplexField, GridSpec

__all__ = ["BandpassSpec", "cutoffs", "bandpass_mask", "bandpass_2d", "radial_wavenumber"]


@dataclass(frozen=True)
class BandpassSpec:
    c_low: float
    c_high: float
    taper_frac: float = 0.05
    zero_dc: bool = True

    def __post_init__(self):
        if not (0 < self.c_low < self.c_high):
            raise ValueError("need 0 < c_low < c_high")
        if not (0 <= self.taper_frac < 0.5):
            raise ValueError("taper_frac must be in [0, 0.5)")


def cutoffs(spec: BandpassSpec, freq: float):
    """``(k_low, k_high)`` in rad/m."""
    return 2 * math.pi * freq / spec.c_high, 2 * math.pi * freq / spec.c_low


def radial_wavenumber(grid: GridSpec) -> np.ndarray:
    """|k| in rad/m on the unshifted FFT grid, shape ``(nx, nz)``."""
    kx = 2 * np.pi * np.fft.fftfreq(grid.nx, grid.dx)
    kz = 2 * np.pi * np.fft.fftfreq(grid.nz, grid.dz)
    return np.hypot(kx[:, None], kz[None, :])


def _rise(k, start, stop):
    # raised cosine 0 -> 1 over [start, stop]; hard step when the interval is empty
    if stop <= start:
        return (k >= start).astype(float)
    t = np.clip((k - start) / (stop - start), 0.0, 1.0)
    return 0.5 - 0.5 * np.cos(np.pi * t)


def bandpass_mask(grid: GridSpec, freq: float, spec: BandpassSpec) -> np.ndarray:
    k_l, k_h = cutoffs(spec, freq)
    t = spec.taper_frac
    if k_l * (1 + t) >= k_h * (1 - t):
        raise ValueError(f"empty passband: k_low={k_l:g}, k_high={k_h:g}, taper={t:g}")
    k = radial_wavenumber(grid)
    if t == 0:
        mask = ((k > k_l) & (k < k_h)).astype(float)
    else:
        mask = _rise(k, k_l * (1 - t), k_l * (1 + t)) * (1.0 - _rise(k, k_h * (1 - t), k_h * (1 + t)))
    if spec.zero_dc:
        mask[0, 0] = 0.0
    return mask


def bandpass_2d(f: ComplexField, spec: BandpassSpec) -> ComplexField:
    """Apply the bandpass to a whole field (no spatial windowing)."""
    mask = bandpass_mask(f.grid, f.freq, spec)
    return f.replace(np.fft.ifft2(np.fft.fft2(f.values) * mask))
