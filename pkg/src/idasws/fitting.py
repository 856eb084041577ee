"""Wavenumber estimation by least-squares fitting of model curves.

For a candidate ``k`` the best amplitude is linear and solved in closed form,
so the search is one-dimensional.  ``SSE(k)`` oscillates with the Bessel
lobes and is multi-modal, so a global log-spaced scan picks the basin and a
golden-section search polishes it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .estimator import AutocorrProfile
from .models import model_kind, eval_model

__all__ = ["FitConfig", "FitResult", "sws_from_k", "k_from_sws", "fit_wavenumber",
           "brute_force_fit", "sse_curve", "MIN_BINS"]

MIN_BINS = 8
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class FitConfig:
    sws_min: float = 0.3
    sws_max: float = 10.0
    coarse_points: int = 200
    refine_rel_tol: float = 1e-4
    lag_range: tuple[float, float] | None = None
    weights: str = "count"

    def __post_init__(self):
        if not (0 < self.sws_min < self.sws_max):
            raise ValueError("need 0 < sws_min < sws_max")
        if self.coarse_points < 16:
            raise ValueError("coarse_points must be >= 16")
        if not self.refine_rel_tol > 0:
            raise ValueError("refine_rel_tol must be positive")
        if self.weights not in ("count", "uniform"):
            raise ValueError("weights must be 'count' or 'uniform'")

    def k_bounds(self, freq: float):
        return k_from_sws(self.sws_max, freq), k_from_sws(self.sws_min, freq)

    def with_(self, **kw) -> "FitConfig":
        return replace(self, **kw)


@dataclass(frozen=True)
class FitResult:
    k: float
    sws: float
    amplitude: float
    sse: float
    nrmse: float
    at_bound: bool
    ok: bool

    @property
    def valid(self) -> bool:
        return self.ok and not self.at_bound


def sws_from_k(k: float, freq: float) -> float:
    if not k > 0:
        raise ValueError(f"k must be positive, got {k}")
    return 2 * math.pi * freq / k


def k_from_sws(sws: float, freq: float) -> float:
    if not sws > 0:
        raise ValueError(f"sws must be positive, got {sws}")
    return 2 * math.pi * freq / sws


def _prepare(profile: AutocorrProfile, kind, lag_range, weights):
    kind = model_kind(kind)
    if kind.family != profile.kind:
        raise ValueError(f"model {kind} does not match a {profile.kind} profile")
    lags, y, counts = profile.lags, profile.values, profile.counts
    if not (np.all(np.isfinite(lags)) and np.all(np.isfinite(y))):
        raise ValueError("profile contains non-finite values")
    if lag_range is not None:
        lo, hi = lag_range
        sel = (lags >= lo) & (lags <= hi)
        lags, y, counts = lags[sel], y[sel], counts[sel]
    if lags.size < MIN_BINS:
        raise ValueError(f"profile has {lags.size} bins in range, need at least {MIN_BINS}")
    if not np.any(y != 0):
        raise ValueError("profile is identically zero")
    w = counts.astype(float) if weights == "count" else np.ones_like(y)
    return kind, lags, y, w


def _sse(kind, lags, y, w, ks):
    """SSE and optimal amplitude for each candidate wavenumber (vectorized over ks)."""
    ks = np.atleast_1d(np.asarray(ks, dtype=float))
    # curves depend on k only through k * lag
    m = eval_model(kind, 1.0, np.outer(ks, lags))
    mm = (w * m * m).sum(axis=1)
    my = (w * m * y).sum(axis=1)
    amp = np.where(mm > 0, my / np.where(mm > 0, mm, 1.0), 0.0)
    resid = y[None, :] - amp[:, None] * m
    return (w * resid * resid).sum(axis=1), amp


def sse_curve(profile: AutocorrProfile, kind, ks, lag_range=None, weights="count"):
    """SSE(k) and amplitude(k) on arbitrary candidate wavenumbers."""
    kind, lags, y, w = _prepare(profile, kind, lag_range, weights)
    return _sse(kind, lags, y, w, ks)


def _golden(f, a, b, rel_tol):
    """Golden-section minimum of ``f`` on ``[a, b]``; returns ``(x, f(x))``."""
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > rel_tol * 0.5 * (a + b):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc < fd else (d, fd)


def _result(k, sse, amp, y, w, freq, at_bound):
    denom = float((w * y * y).sum())
    nrmse = math.sqrt(sse / denom) if denom > 0 else math.inf
    ok = bool(math.isfinite(k) and k > 0 and math.isfinite(sse) and amp > 0)
    return FitResult(k=float(k), sws=sws_from_k(k, freq), amplitude=float(amp), sse=float(sse),
                     nrmse=nrmse, at_bound=bool(at_bound), ok=ok)


def fit_wavenumber(profile: AutocorrProfile, kind, freq: float,
                   cfg: FitConfig | None = None) -> FitResult:
    """Best-fit wavenumber of ``kind``'s curve to a measured profile.

    Parameters
    ----------
    profile : AutocorrProfile
        Measured AIA or IDA profile; its family must match ``kind``.
    kind : ModelKind or str
    freq : float
        Temporal frequency in Hz, used to map the SWS search band to
        wavenumbers and the result back to SWS.
    cfg : FitConfig, optional

    Returns
    -------
    FitResult
        ``at_bound`` is set when the estimate lies within one coarse grid
        step of either end of the search band; such estimates are unreliable.
    """
    cfg = cfg or FitConfig()
    kind, lags, y, w = _prepare(profile, kind, cfg.lag_range, cfg.weights)
    kmin, kmax = cfg.k_bounds(freq)
    grid = np.geomspace(kmin, kmax, cfg.coarse_points)
    sse, amp = _sse(kind, lags, y, w, grid)
    i = int(np.argmin(sse))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid.size - 1)]

    def f(k):
        return float(_sse(kind, lags, y, w, [k])[0][0])

    k, s = _golden(f, lo, hi, cfg.refine_rel_tol)
    if not s <= sse[i]:
        k, s = grid[i], sse[i]
    a = float(_sse(kind, lags, y, w, [k])[1][0])
    at_bound = k <= grid[1] or k >= grid[-2]
    return _result(k, s, a, y, w, freq, at_bound)


def brute_force_fit(profile: AutocorrProfile, kind, freq: float, fine_points: int = 10_000,
                    cfg: FitConfig | None = None) -> FitResult:
    """Exhaustive SSE scan on a fine linear wavenumber grid (verification oracle)."""
    cfg = cfg or FitConfig()
    kind, lags, y, w = _prepare(profile, kind, cfg.lag_range, cfg.weights)
    kmin, kmax = cfg.k_bounds(freq)
    grid = np.linspace(kmin, kmax, fine_points)
    best_k, best_s, best_a = math.nan, math.inf, 0.0
    for chunk in np.array_split(grid, max(1, fine_points // 500)):
        s, a = _sse(kind, lags, y, w, chunk)
        j = int(np.argmin(s))
        if s[j] < best_s:
            best_k, best_s, best_a = chunk[j], s[j], a[j]
    coarse = np.geomspace(kmin, kmax, cfg.coarse_points)
    at_bound = best_k <= coarse[1] or best_k >= coarse[-2]
    return _result(best_k, best_s, best_a, y, w, freq, at_bound)
