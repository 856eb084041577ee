"""Desk-scale contamination scenarios: a 1 m/s reverberant background at
200 Hz, a 20 m/s compression wave at 30 degrees with equal RMS, a bulk
phasor at half the RMS, and optionally a 2 m/s disk inclusion."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .prefilter import BandpassSpec
from .synth import (ComplexField, CompressionSpec, Disk, GridSpec, PhantomSpec, Region,
                    ReverbSpec, compose_phantom, mix, synth_bulk, synth_compression,
                    synth_reverberant)

GRID = GridSpec(192, 192, 0.5e-3, 0.5e-3)
FREQ = 200.0
BACKGROUND_SWS = 1.0
INCLUSION_SWS = 2.0
NUM_WAVES = 1000
WINDOW = 15e-3
COMPRESSION = CompressionSpec(speed=20.0, direction_angle=math.radians(30), amplitude_ratio=1.0)
BULK_RATIO = 0.5
BANDPASS = BandpassSpec(c_low=0.5, c_high=4.0)
DISK_RADIUS = 7.5e-3


def disk_center(grid: GridSpec = GRID):
    return (grid.nx - 1) * grid.dx / 2, (grid.nz - 1) * grid.dz / 2


@dataclass(frozen=True, eq=False)
class Scenario:
    clean: ComplexField
    contaminated: ComplexField
    labels: np.ndarray


def contaminate(f: ComplexField, compression: CompressionSpec = COMPRESSION,
                bulk_ratio: float = BULK_RATIO, bulk_phase: float = 0.0) -> ComplexField:
    shear_rms = math.sqrt(f.msv)
    out = mix(f, synth_compression(f.grid, f.freq, compression, shear_rms))
    return mix(out, synth_bulk(f.grid, f.freq, bulk_ratio * shear_rms, bulk_phase))


def homogeneous(seed: int, grid: GridSpec = GRID) -> Scenario:
    clean = synth_reverberant(grid, ReverbSpec(BACKGROUND_SWS, FREQ, NUM_WAVES, seed))
    return Scenario(clean, contaminate(clean), np.zeros(grid.shape, dtype=np.int32))


def lesion_phantom(grid: GridSpec = GRID) -> PhantomSpec:
    cx, cz = disk_center(grid)
    return PhantomSpec(BACKGROUND_SWS, [Region(Disk(cx, cz, DISK_RADIUS), INCLUSION_SWS, 1)])


def lesion(seed: int, grid: GridSpec = GRID) -> Scenario:
    clean, labels = compose_phantom(grid, lesion_phantom(grid),
                                    ReverbSpec(BACKGROUND_SWS, FREQ, NUM_WAVES, seed))
    return Scenario(clean, contaminate(clean), labels)


def lesion_regions(grid: GridSpec = GRID, window: float = WINDOW):
    """Cell predicates: centers inside the disk, and centers whose window
    cannot reach the disk."""
    cx, cz = disk_center(grid)
    clear = DISK_RADIUS + window / math.sqrt(2)

    def inside(X, Z):
        return np.hypot(X - cx, Z - cz) <= DISK_RADIUS

    def outside(X, Z):
        return np.hypot(X - cx, Z - cz) > clear

    return {"inside": inside, "outside": outside}
