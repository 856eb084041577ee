"""Measured autocorrelation and difference-autocorrelation profiles.

Lag convention: ``B(d) = mean_a V(a) * conj(V(a + d))`` over every sample
pair inside the window, so each lag is normalized by its own pair count.
A plane wave ``exp(i k.r)`` therefore has ``B(d) = exp(-i k.d)``.

Radial profiles bin the real part of the lag values by ``|d|`` into rings of
width ``min(dx, dz)`` (ring ``i`` collects ``round(|d| / w) == i``).  Each
ring reports the pair-count-weighted mean value and the pair-count-weighted
mean radius of its members as its lag coordinate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .synth import ComplexField

__all__ = [
    "MIN_WINDOW",
    "WindowView",
    "Autocorr2D",
    "AutocorrProfile",
    "autocorr_2d",
    "radial_profile",
    "ida_profile_direct",
    "ida_profile_identity",
    "aia_profile",
    "profile",
]

MIN_WINDOW = 8


@dataclass(frozen=True, eq=False)
class WindowView:
    """A rectangular window ``[ix, ix + wx) x [iz, iz + wz)`` of a field."""

    parent: ComplexField
    ix: int = 0
    iz: int = 0
    wx: int | None = None
    wz: int | None = None

    def __post_init__(self):
        g = self.parent.grid
        wx = g.nx - self.ix if self.wx is None else self.wx
        wz = g.nz - self.iz if self.wz is None else self.wz
        object.__setattr__(self, "wx", int(wx))
        object.__setattr__(self, "wz", int(wz))
        if self.wx < MIN_WINDOW or self.wz < MIN_WINDOW:
            raise ValueError(f"window {self.wx}x{self.wz} smaller than {MIN_WINDOW}x{MIN_WINDOW}")
        if self.ix < 0 or self.iz < 0 or self.ix + self.wx > g.nx or self.iz + self.wz > g.nz:
            raise ValueError("window extends outside the parent grid")

    @classmethod
    def centered(cls, parent: ComplexField, cx: float, cz: float, size: float):
        """Square window of physical ``size`` centered at ``(cx, cz)`` meters."""
        g = parent.grid
        wx = int(round(size / g.dx))
        wz = int(round(size / g.dz))
        ix = int(round(cx / g.dx - (wx - 1) / 2))
        iz = int(round(cz / g.dz - (wz - 1) / 2))
        return cls(parent, ix, iz, wx, wz)

    @property
    def values(self) -> np.ndarray:
        return self.parent.values[self.ix:self.ix + self.wx, self.iz:self.iz + self.wz]

    @property
    def dx(self) -> float:
        return self.parent.grid.dx

    @property
    def dz(self) -> float:
        return self.parent.grid.dz

    @property
    def extent(self) -> float:
        """Smaller physical side length of the window."""
        return min(self.wx * self.dx, self.wz * self.dz)


@dataclass(frozen=True, eq=False)
class Autocorr2D:
    """Lag values ``values[m + wx - 1, n + wz - 1] = B(m dx, n dz)``."""

    values: np.ndarray
    counts: np.ndarray
    dx: float
    dz: float

    @property
    def wx(self) -> int:
        return (self.values.shape[0] + 1) // 2

    @property
    def wz(self) -> int:
        return (self.values.shape[1] + 1) // 2

    def lag_offsets(self):
        m = np.arange(-(self.wx - 1), self.wx)
        n = np.arange(-(self.wz - 1), self.wz)
        return m, n

    def at(self, m: int, n: int) -> complex:
        return self.values[m + self.wx - 1, n + self.wz - 1]


@dataclass(frozen=True, eq=False)
class AutocorrProfile:
    kind: str
    lags: np.ndarray
    values: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        if self.kind not in ("AIA", "IDA"):
            raise ValueError(f"profile kind must be AIA or IDA, got {self.kind!r}")
        lags = np.asarray(self.lags, dtype=float)
        values = np.asarray(self.values, dtype=float)
        counts = np.asarray(self.counts, dtype=float)
        if not (lags.shape == values.shape == counts.shape) or lags.ndim != 1:
            raise ValueError("lags, values and counts must be 1-d arrays of equal length")
        if lags.size and (lags[0] != 0.0 or np.any(np.diff(lags) <= 0)):
            raise ValueError("lags must start at 0 and increase strictly")
        object.__setattr__(self, "lags", lags)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "counts", counts)

    def __len__(self):
        return self.lags.size

    def scaled(self, c: float) -> "AutocorrProfile":
        return AutocorrProfile(self.kind, self.lags, self.values * c, self.counts)


def autocorr_2d(w: WindowView) -> Autocorr2D:
    """Unbiased spatial autocorrelation of a window via zero-padded FFTs."""
    v = w.values
    wx, wz = v.shape
    px, pz = 2 * wx - 1, 2 * wz - 1
    spec = np.fft.fft2(v, s=(px, pz))
    # circular cross-correlation sum_a conj(V(a)) V(a + d); no wrap with this padding
    corr = np.fft.ifft2(np.conj(spec) * spec)
    corr = np.fft.fftshift(corr)
    # fftshift of odd length puts lag 0 at index (px - 1) // 2 == wx - 1
    m = np.arange(-(wx - 1), wx)
    n = np.arange(-(wz - 1), wz)
    counts = np.outer(wx - np.abs(m), wz - np.abs(n)).astype(float)
    values = np.conj(corr) / counts
    # lag 0 is the window mean power exactly
    values[wx - 1, wz - 1] = np.mean(np.abs(v) ** 2)
    return Autocorr2D(values, counts, w.dx, w.dz)


def _ring_width(dx, dz):
    return min(dx, dz)


def _bin_rings(radius, value, weight, width, kind):
    ring = np.floor(radius / width + 0.5).astype(np.int64)
    nbins = int(ring.max()) + 1 if ring.size else 0
    wsum = np.bincount(ring, weights=weight, minlength=nbins)
    vsum = np.bincount(ring, weights=weight * value, minlength=nbins)
    rsum = np.bincount(ring, weights=weight * radius, minlength=nbins)
    keep = wsum > 0
    return AutocorrProfile(kind, rsum[keep] / wsum[keep], vsum[keep] / wsum[keep], wsum[keep])


def _lag_grid(dx, dz, mmax, nmax):
    m = np.arange(-mmax, mmax + 1)
    n = np.arange(-nmax, nmax + 1)
    M, N = np.meshgrid(m, n, indexing="ij")
    return M, N, np.hypot(M * dx, N * dz)


def radial_profile(ac: Autocorr2D, max_lag: float | None = None) -> AutocorrProfile:
    """Angular integral of ``Re B`` as a function of scalar lag (AIA profile).

    ``max_lag`` defaults to half the window extent and may not exceed it.
    """
    half = min(ac.wx * ac.dx, ac.wz * ac.dz) / 2
    if max_lag is None:
        max_lag = half
    if max_lag > half * (1 + 1e-12):
        raise ValueError(f"max_lag {max_lag:g} m exceeds half the window extent {half:g} m")
    mmax = min(ac.wx - 1, int(math.floor(max_lag / ac.dx + 1e-9)))
    nmax = min(ac.wz - 1, int(math.floor(max_lag / ac.dz + 1e-9)))
    M, N, r = _lag_grid(ac.dx, ac.dz, mmax, nmax)
    sel = r <= max_lag * (1 + 1e-12)
    vals = ac.values[M[sel] + ac.wx - 1, N[sel] + ac.wz - 1].real
    cnts = ac.counts[M[sel] + ac.wx - 1, N[sel] + ac.wz - 1]
    return _bin_rings(r[sel], vals, cnts, _ring_width(ac.dx, ac.dz), "AIA")


def _half_plane_lags(w: WindowView, max_lag: float):
    """Lag vectors (m, n) with |d| <= max_lag, one of each +-pair, zero included."""
    mmax = int(math.floor(max_lag / w.dx + 1e-9))
    nmax = int(math.floor(max_lag / w.dz + 1e-9))
    M, N, r = _lag_grid(w.dx, w.dz, mmax, nmax)
    sel = (r <= max_lag * (1 + 1e-12)) & ((M > 0) | ((M == 0) & (N >= 0)))
    return M[sel], N[sel], r[sel]


def _ida_limit(w: WindowView, max_lag, fraction):
    limit = w.extent * fraction
    if max_lag is None:
        max_lag = limit
    if max_lag > limit * (1 + 1e-12):
        raise ValueError(f"max_lag {max_lag:g} m too large for a {w.extent:g} m window "
                         f"(limit {limit:g} m)")
    return max_lag


def _pair_slices(size, shift):
    """Slices (first, second) so that second index = first index + shift."""
    if shift >= 0:
        return slice(0, size - shift), slice(shift, size)
    return slice(-shift, size), slice(0, size + shift)


def _symmetric(M, N, r, vals, cnts):
    # each half-plane lag stands for itself and its negative (zero lag only once)
    zero = (M == 0) & (N == 0)
    weight = np.where(zero, 1.0, 2.0) * cnts
    return r, vals, weight


def ida_profile_direct(w: WindowView, max_lag: float | None = None) -> AutocorrProfile:
    """IDA profile from explicit velocity differences ``V(e - d) - V(e + d)``.

    For each lag vector ``d`` the mean of ``|V(e - d) - V(e + d)|**2`` is
    taken over every ``e`` whose two samples lie inside the window, then the
    lags are ring-binned.  ``max_lag`` defaults to a quarter of the window.
    """
    max_lag = _ida_limit(w, max_lag, 0.25)
    v = w.values
    M, N, r = _half_plane_lags(w, max_lag)
    vals = np.empty(M.size)
    cnts = np.empty(M.size)
    for i, (m, n) in enumerate(zip(M, N)):
        a_x, b_x = _pair_slices(w.wx, 2 * m)
        a_z, b_z = _pair_slices(w.wz, 2 * n)
        d = v[a_x, a_z] - v[b_x, b_z]
        vals[i] = np.mean(d.real ** 2 + d.imag ** 2)
        cnts[i] = d.size
    return _bin_rings(*_symmetric(M, N, r, vals, cnts), _ring_width(w.dx, w.dz), "IDA")


def ida_profile_identity(w: WindowView, max_lag: float | None = None,
                         ac: Autocorr2D | None = None) -> AutocorrProfile:
    """IDA profile via ``M-(d) + M+(d) - 2 Re B(2d)``.

    ``M-`` and ``M+`` are the mean powers of the two sample subsets that the
    direct path pairs up at lag ``d``, which makes the result equal to
    :func:`ida_profile_direct` up to rounding on any window.
    """
    max_lag = _ida_limit(w, max_lag, 0.25)
    if ac is None:
        ac = autocorr_2d(w)
    p = np.abs(w.values) ** 2
    # 2-d prefix sums give subset mean powers in O(1) per lag
    cs = np.zeros((w.wx + 1, w.wz + 1))
    cs[1:, 1:] = p.cumsum(0).cumsum(1)

    def box_mean(sx, sz):
        tot = cs[sx.stop, sz.stop] - cs[sx.start, sz.stop] - cs[sx.stop, sz.start] + cs[sx.start, sz.start]
        return tot / ((sx.stop - sx.start) * (sz.stop - sz.start))

    M, N, r = _half_plane_lags(w, max_lag)
    vals = np.empty(M.size)
    cnts = np.empty(M.size)
    for i, (m, n) in enumerate(zip(M, N)):
        a_x, b_x = _pair_slices(w.wx, 2 * m)
        a_z, b_z = _pair_slices(w.wz, 2 * n)
        b2 = ac.at(2 * m, 2 * n).real
        vals[i] = box_mean(a_x, a_z) + box_mean(b_x, b_z) - 2.0 * b2
        cnts[i] = (a_x.stop - a_x.start) * (a_z.stop - a_z.start)
    vals[(M == 0) & (N == 0)] = 0.0
    return _bin_rings(*_symmetric(M, N, r, vals, cnts), _ring_width(w.dx, w.dz), "IDA")


def aia_profile(w: WindowView, max_lag: float | None = None) -> AutocorrProfile:
    return radial_profile(autocorr_2d(w), max_lag)


def profile(w: WindowView, kind: str, max_lag: float | None = None) -> AutocorrProfile:
    """Measured profile of the given family (``'AIA'`` or ``'IDA'``)."""
    kind = kind.upper()
    if kind == "AIA":
        return aia_profile(w, max_lag)
    if kind == "IDA":
        return ida_profile_direct(w, max_lag)
    raise ValueError(f"unknown profile kind {kind!r}")
