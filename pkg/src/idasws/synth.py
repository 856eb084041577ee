"""Synthetic single-frequency phasor fields.

Reverberant shear fields are superpositions of plane waves with propagation
directions uniform on the sphere and particle motion orthogonal to them; only
the z velocity component on the y = 0 imaging plane is kept.  Compression
waves and bulk motion are added as contaminants.

Array layout: ``ComplexField.values[ix, iz]``, shape ``(nx, nz)``; sample
``(ix, iz)`` sits at ``x = ix * dx``, ``z = iz * dz``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "GridSpec",
    "ComplexField",
    "ReverbSpec",
    "CompressionSpec",
    "Disk",
    "Rectangle",
    "Region",
    "PhantomSpec",
    "synth_reverberant",
    "synth_compression",
    "synth_bulk",
    "compose_phantom",
    "region_seed",
    "mix",
    "add_noise",
    "rms",
]


@dataclass(frozen=True)
class GridSpec:
    nx: int
    nz: int
    dx: float
    dz: float

    def __post_init__(self):
        if int(self.nx) != self.nx or int(self.nz) != self.nz:
            raise ValueError("nx, nz must be integers")
        if self.nx < 8 or self.nz < 8:
            raise ValueError(f"grid must be at least 8x8, got {self.nx}x{self.nz}")
        if not (self.dx > 0 and self.dz > 0 and math.isfinite(self.dx) and math.isfinite(self.dz)):
            raise ValueError("dx, dz must be positive")

    @property
    def shape(self):
        return (self.nx, self.nz)

    def axes(self):
        """Sample coordinates ``(x, z)`` in meters."""
        return np.arange(self.nx) * self.dx, np.arange(self.nz) * self.dz


@dataclass(frozen=True, eq=False)
class ComplexField:
    grid: GridSpec
    freq: float
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != self.grid.shape:
            raise ValueError(f"values shape {values.shape} does not match grid {self.grid.shape}")
        if not (self.freq > 0 and math.isfinite(self.freq)):
            raise ValueError("freq must be positive")
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", values)

    @property
    def msv(self) -> float:
        return float(np.mean(np.abs(self.values) ** 2))

    def replace(self, values) -> "ComplexField":
        return ComplexField(self.grid, self.freq, values)

    def __add__(self, other):
        return mix(self, other)


@dataclass(frozen=True)
class ReverbSpec:
    """Reverberant field parameters; wavenumber is ``2*pi*freq/sws``."""

    sws: float
    freq: float
    num_waves: int = 1000
    seed: int = 0
    target_rms: float = 1.0

    def __post_init__(self):
        if not self.sws > 0 or not self.freq > 0:
            raise ValueError("sws and freq must be positive")
        if self.num_waves < 1:
            raise ValueError("num_waves must be >= 1")
        if not self.target_rms >= 0:
            raise ValueError("target_rms must be >= 0")

    @property
    def k(self) -> float:
        return 2 * math.pi * self.freq / self.sws


@dataclass(frozen=True)
class CompressionSpec:
    """In-plane compression plane wave.

    ``direction_angle`` is measured from the z axis towards x.  Particle
    motion is along the propagation direction, so only ``cos(angle)`` of it
    reaches the z-sensitive measurement.
    """

    speed: float = 20.0
    direction_angle: float = math.pi / 6
    amplitude_ratio: float = 1.0
    phase: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not self.speed > 0:
            raise ValueError("compression speed must be positive")
        if not self.amplitude_ratio >= 0:
            raise ValueError("amplitude_ratio must be >= 0")


@dataclass(frozen=True)
class Disk:
    center_x: float
    center_z: float
    radius: float

    def contains(self, x, z):
        return (x - self.center_x) ** 2 + (z - self.center_z) ** 2 <= self.radius ** 2

    def bounds(self):
        r = self.radius
        return self.center_x - r, self.center_z - r, self.center_x + r, self.center_z + r


@dataclass(frozen=True)
class Rectangle:
    x0: float
    z0: float
    x1: float
    z1: float

    def contains(self, x, z):
        return (x >= self.x0) & (x <= self.x1) & (z >= self.z0) & (z <= self.z1)

    def bounds(self):
        return self.x0, self.z0, self.x1, self.z1


@dataclass(frozen=True)
class Region:
    shape: Disk | Rectangle
    sws: float
    label: int


@dataclass(frozen=True)
class PhantomSpec:
    background_sws: float
    regions: Sequence[Region] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "regions", tuple(self.regions))
        if not self.background_sws > 0:
            raise ValueError("background_sws must be positive")
        labels = [r.label for r in self.regions]
        if any(lab == 0 for lab in labels):
            raise ValueError("label 0 is reserved for the background")
        if len(set(labels)) != len(labels):
            raise ValueError("region labels must be unique")
        if any(not r.sws > 0 for r in self.regions):
            raise ValueError("region sws must be positive")

    def label_map(self, grid: GridSpec) -> np.ndarray:
        x, z = grid.axes()
        X, Z = np.meshgrid(x, z, indexing="ij")
        labels = np.zeros(grid.shape, dtype=np.int32)
        for region in self.regions:
            inside = region.shape.contains(X, Z)
            if np.any(labels[inside] != 0):
                raise ValueError(f"region {region.label} overlaps another region")
            labels[inside] = region.label
        return labels


def rms(values) -> float:
    return float(np.sqrt(np.mean(np.abs(values) ** 2)))


def _plane_wave_sum(grid: GridSpec, kx, kz, amps) -> np.ndarray:
    # separable exponentials; fixed summation order keeps output bit-stable
    x, z = grid.axes()
    ex = np.exp(1j * np.outer(kx, x))
    ez = np.exp(1j * np.outer(kz, z))
    out = np.zeros(grid.shape, dtype=complex)
    for a, rx, rz in zip(amps, ex, ez):
        out += a * np.outer(rx, rz)
    return out


def synth_reverberant(grid: GridSpec, spec: ReverbSpec) -> ComplexField:
    """z velocity of a fully reverberant shear field on the y = 0 plane.

    Each of ``num_waves`` plane waves gets a propagation direction uniform on
    the unit sphere, a polarization uniform on the circle orthogonal to it,
    and a unit-magnitude velocity with uniform random phase.  The result is
    rescaled to ``spec.target_rms``.
    """
    rng = np.random.default_rng(spec.seed)
    q = spec.num_waves
    n = rng.standard_normal((q, 3))
    n /= np.linalg.norm(n, axis=1, keepdims=True)
    # any vector not parallel to n completes an orthonormal basis
    helper = np.zeros_like(n)
    use_z = np.abs(n[:, 0]) > 0.9
    helper[~use_z, 0] = 1.0
    helper[use_z, 2] = 1.0
    e1 = np.cross(n, helper)
    e1 /= np.linalg.norm(e1, axis=1, keepdims=True)
    e2 = np.cross(n, e1)
    psi = rng.uniform(0.0, 2 * np.pi, q)
    pol_z = np.cos(psi) * e1[:, 2] + np.sin(psi) * e2[:, 2]
    phase = rng.uniform(0.0, 2 * np.pi, q)
    amps = pol_z * np.exp(1j * phase)

    k = spec.k
    values = _plane_wave_sum(grid, k * n[:, 0], k * n[:, 2], amps)
    r = rms(values)
    if r == 0.0:
        raise ValueError("degenerate realization with zero z velocity")
    return ComplexField(grid, spec.freq, values * (spec.target_rms / r))


def synth_compression(grid: GridSpec, freq: float, spec: CompressionSpec,
                      shear_rms: float) -> ComplexField:
    """Long-wavelength compression plane wave scaled to ``amplitude_ratio * shear_rms``."""
    if spec.amplitude_ratio == 0 or shear_rms == 0:
        return ComplexField(grid, freq, np.zeros(grid.shape, dtype=complex))
    proj = math.cos(spec.direction_angle)
    if abs(proj) < 1e-12:
        raise ValueError("compression wave has no z component at this direction_angle")
    kp = 2 * math.pi * freq / spec.speed
    kx = kp * math.sin(spec.direction_angle)
    kz = kp * proj
    x, z = grid.axes()
    wave = np.exp(1j * (kx * x[:, None] + kz * z[None, :] + spec.phase))
    # |wave| == 1 everywhere, so the RMS of proj * a * wave is |proj| * a
    a = spec.amplitude_ratio * shear_rms / abs(proj)
    return ComplexField(grid, freq, proj * a * wave)


def synth_bulk(grid: GridSpec, freq: float, amplitude: float, phase: float = 0.0) -> ComplexField:
    """Spatially constant phasor, the zero-wavenumber limit of bulk motion."""
    if amplitude < 0:
        raise ValueError("amplitude must be >= 0")
    c = amplitude * complex(math.cos(phase), math.sin(phase))
    return ComplexField(grid, freq, np.full(grid.shape, c, dtype=complex))


def region_seed(base_seed: int, label: int) -> int:
    """Deterministic 64-bit seed for a phantom region (label 0 keeps ``base_seed``)."""
    if label == 0:
        return int(base_seed)
    state = np.random.SeedSequence([int(base_seed), int(label)]).generate_state(2, np.uint32)
    return int(state[0]) | (int(state[1]) << 32)


def compose_phantom(grid: GridSpec, phantom: PhantomSpec, base: ReverbSpec):
    """Patchwork of independent homogeneous reverberant fields.

    One field is synthesized per distinct SWS (seeded from ``base.seed`` and
    the smallest label carrying that SWS) and each sample takes the value of
    the field belonging to its region.

    Returns
    -------
    field : ComplexField
    labels : ndarray of int32, shape ``(nx, nz)``
    """
    extent_x = (grid.nx - 1) * grid.dx
    extent_z = (grid.nz - 1) * grid.dz
    for region in phantom.regions:
        x0, z0, x1, z1 = region.shape.bounds()
        if x0 < 0 or z0 < 0 or x1 > extent_x or z1 > extent_z:
            raise ValueError(f"region {region.label} extends outside the grid")
    labels = phantom.label_map(grid)

    speeds = {0: phantom.background_sws}
    speeds.update({r.label: r.sws for r in phantom.regions})
    owner = {}
    for label in sorted(speeds):
        owner.setdefault(speeds[label], label)

    values = np.zeros(grid.shape, dtype=complex)
    for sws, label in owner.items():
        spec = ReverbSpec(sws=sws, freq=base.freq, num_waves=base.num_waves,
                          seed=region_seed(base.seed, label), target_rms=base.target_rms)
        f = synth_reverberant(grid, spec)
        members = [lab for lab, s in speeds.items() if s == sws]
        sel = np.isin(labels, members)
        values[sel] = f.values[sel]
    return ComplexField(grid, base.freq, values), labels


def _check_compatible(a: ComplexField, b: ComplexField):
    if a.grid != b.grid:
        raise ValueError("fields live on different grids")
    if a.freq != b.freq:
        raise ValueError(f"fields have different frequencies ({a.freq} vs {b.freq})")


def mix(a: ComplexField, b: ComplexField) -> ComplexField:
    _check_compatible(a, b)
    return ComplexField(a.grid, a.freq, a.values + b.values)


def add_noise(f: ComplexField, snr_db: float, seed: int = 0) -> ComplexField:
    """Add circular complex white Gaussian noise at ``snr_db`` below the field msv.

    ``snr_db = inf`` leaves the field untouched.
    """
    if math.isinf(snr_db) and snr_db > 0:
        return f
    if math.isnan(snr_db):
        raise ValueError("snr_db is NaN")
    var = f.msv / 10.0 ** (snr_db / 10.0)
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(f.grid.shape) + 1j * rng.standard_normal(f.grid.shape)
    return f.replace(f.values + noise * math.sqrt(var / 2.0))
