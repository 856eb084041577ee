"""Sliding-window SWS maps, region statistics and estimator comparison."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Sequence

import numpy as np

from .estimator import WindowView, aia_profile, ida_profile_direct
from .fitting import FitConfig, FitResult, fit_wavenumber
from .models import AIA_XY, AIA_XZ, IDA_XY, IDA_XZ
from .prefilter import BandpassSpec, bandpass_2d
from .synth import ComplexField

__all__ = [
    "MapConfig",
    "SWSMap",
    "RegionStats",
    "ReportRow",
    "Report",
    "sws_map",
    "fit_window",
    "region_stats",
    "compare_report",
    "region_mask_from_labels",
]

_KINDS = {("IDA", "xz"): IDA_XZ, ("IDA", "xy"): IDA_XY,
          ("AIA", "xz"): AIA_XZ, ("AIA", "xy"): AIA_XY}


@dataclass(frozen=True)
class MapConfig:
    """Sliding-window settings.

    ``stride`` defaults to a quarter window.  ``plane`` picks the model
    family: ``xz`` for imaging-plane data, ``xy`` for slices orthogonal to
    the sensitivity axis.  ``max_lag`` defaults to a quarter window for IDA
    and half a window for AIA.
    """

    window_size: float
    stride: float | None = None
    estimator: str = "IDA"
    prefilter: BandpassSpec | None = None
    fit: FitConfig = field(default_factory=FitConfig)
    freq: float | None = None
    plane: str = "xz"
    max_lag: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "estimator", self.estimator.upper())
        if self.estimator not in ("IDA", "AIA"):
            raise ValueError(f"estimator must be IDA or AIA, got {self.estimator!r}")
        if self.plane not in ("xz", "xy"):
            raise ValueError("plane must be 'xz' or 'xy'")
        if not self.window_size > 0:
            raise ValueError("window_size must be positive")
        if self.stride is not None and not self.stride > 0:
            raise ValueError("stride must be positive")

    @property
    def kind(self):
        return _KINDS[(self.estimator, self.plane)]

    @property
    def effective_stride(self) -> float:
        return self.window_size / 4 if self.stride is None else self.stride

    def with_(self, **kw) -> "MapConfig":
        return replace(self, **kw)


@dataclass(frozen=True, eq=False)
class SWSMap:
    """Per-window estimates; arrays are indexed ``[cell_x, cell_z]``.

    ``sws`` is NaN wherever ``valid`` is False.
    """

    x: np.ndarray
    z: np.ndarray
    sws: np.ndarray
    valid: np.ndarray
    nrmse: np.ndarray
    ix: np.ndarray
    iz: np.ndarray
    window: tuple[int, int]
    stride: tuple[int, int]
    estimator: str
    freq: float

    @property
    def shape(self):
        return self.sws.shape

    def valid_fraction(self) -> float:
        return float(self.valid.mean()) if self.valid.size else 0.0

    def mean(self) -> float:
        return float(np.mean(self.sws[self.valid])) if self.valid.any() else math.nan

    def centers(self):
        """Cell-center coordinate grids ``(X, Z)`` in meters."""
        return np.meshgrid(self.x, self.z, indexing="ij")


@dataclass(frozen=True)
class RegionStats:
    mean: float
    std: float
    n: int


def _window_samples(cfg: MapConfig, grid):
    wx = int(round(cfg.window_size / grid.dx))
    wz = int(round(cfg.window_size / grid.dz))
    sx = max(1, int(round(cfg.effective_stride / grid.dx)))
    sz = max(1, int(round(cfg.effective_stride / grid.dz)))
    return wx, wz, sx, sz


def fit_window(f: ComplexField, ix: int, iz: int, wx: int, wz: int, cfg: MapConfig,
               freq: float | None = None) -> FitResult:
    """Profile and fit one window of an (already prefiltered) field."""
    freq = freq or cfg.freq or f.freq
    w = WindowView(f, ix, iz, wx, wz)
    if cfg.estimator == "IDA":
        prof = ida_profile_direct(w, cfg.max_lag)
    else:
        prof = aia_profile(w, cfg.max_lag)
    return fit_wavenumber(prof, cfg.kind, freq, cfg.fit)


def _fit_rows(args):
    f, ixs, izs, wx, wz, cfg, freq = args
    out = np.empty((len(ixs), len(izs), 4))
    for a, ix in enumerate(ixs):
        for b, iz in enumerate(izs):
            try:
                r = fit_window(f, int(ix), int(iz), wx, wz, cfg, freq)
            except ValueError:
                out[a, b] = (math.nan, math.nan, 0.0, 0.0)
                continue
            out[a, b] = (r.sws, r.nrmse, float(r.ok), float(r.at_bound))
    return out


def sws_map(f: ComplexField, cfg: MapConfig, workers: int = 1) -> SWSMap:
    """Slide a square window over every fully interior position and fit each.

    Cells whose fit failed or landed within a coarse step of the search
    bounds are marked invalid.  ``workers > 1`` spreads rows of windows over
    processes; the result does not depend on the worker count.
    """
    g = f.grid
    wx, wz, sx, sz = _window_samples(cfg, g)
    if wx > g.nx or wz > g.nz:
        raise ValueError(f"field {g.nx}x{g.nz} smaller than a {wx}x{wz} window")
    freq = cfg.freq or f.freq
    if cfg.prefilter is not None:
        f = bandpass_2d(f, cfg.prefilter)
    ixs = np.arange(0, g.nx - wx + 1, sx)
    izs = np.arange(0, g.nz - wz + 1, sz)

    if workers <= 1 or len(ixs) < 2:
        res = _fit_rows((f, ixs, izs, wx, wz, cfg, freq))
    else:
        chunks = [c for c in np.array_split(ixs, min(workers * 4, len(ixs))) if len(c)]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_fit_rows, [(f, c, izs, wx, wz, cfg, freq) for c in chunks]))
        res = np.concatenate(parts, axis=0)

    ok = res[..., 2] > 0
    at_bound = res[..., 3] > 0
    valid = ok & ~at_bound & np.isfinite(res[..., 0])
    sws = np.where(valid, res[..., 0], np.nan)
    x = (ixs + (wx - 1) / 2) * g.dx
    z = (izs + (wz - 1) / 2) * g.dz
    return SWSMap(x=x, z=z, sws=sws, valid=valid, nrmse=res[..., 1], ix=ixs, iz=izs,
                  window=(wx, wz), stride=(sx, sz), estimator=cfg.estimator, freq=freq)


def _resolve_mask(m: SWSMap, mask) -> np.ndarray:
    if callable(mask):
        X, Z = m.centers()
        sel = np.asarray(mask(X, Z), dtype=bool)
    else:
        sel = np.asarray(mask, dtype=bool)
    if sel.shape != m.shape:
        raise ValueError(f"mask shape {sel.shape} does not match map {m.shape}")
    return sel


def region_stats(m: SWSMap, mask) -> RegionStats:
    """Mean and population std of valid cells selected by ``mask``.

    ``mask`` is a boolean array shaped like the map or a callable
    ``mask(X, Z) -> bool array`` of cell-center coordinates.
    """
    sel = _resolve_mask(m, mask) & m.valid
    n = int(sel.sum())
    if n == 0:
        raise ValueError("region contains no valid cells")
    vals = m.sws[sel]
    return RegionStats(float(vals.mean()), float(vals.std()), n)


def region_mask_from_labels(labels: np.ndarray, value: int, grid=None):
    """Predicate selecting map cells whose center sample carries ``value``.

    ``grid`` supplies the sample spacing used to look up the label of a cell
    center; pass the field's ``GridSpec``.
    """
    def pred(X, Z):
        ix = np.clip(np.rint(X / grid.dx).astype(int), 0, labels.shape[0] - 1)
        iz = np.clip(np.rint(Z / grid.dz).astype(int), 0, labels.shape[1] - 1)
        return labels[ix, iz] == value
    return pred


@dataclass(frozen=True)
class ReportRow:
    method: str
    region: str
    mean: float
    std: float
    n: int
    truth: float | None = None

    @property
    def error_pct(self) -> float | None:
        if self.truth is None:
            return None
        return 100.0 * (self.mean - self.truth) / self.truth


@dataclass(frozen=True)
class RatioRow:
    method: str
    numerator: str
    denominator: str
    ratio: float


@dataclass(frozen=True, eq=False)
class Report:
    rows: list
    ratios: list
    maps: dict

    @property
    def has_truth(self) -> bool:
        return any(r.truth is not None for r in self.rows)

    def row(self, method: str, region: str) -> ReportRow:
        for r in self.rows:
            if r.method == method and r.region == region:
                return r
        raise KeyError((method, region))

    def table(self):
        """Header and string cells; error columns appear only with ground truth."""
        header = ["method", "region", "mean_mps", "std_mps", "n"]
        if self.has_truth:
            header += ["truth_mps", "error_pct"]
        body = []
        for r in self.rows:
            cells = [r.method, r.region, _fmt(r.mean), _fmt(r.std), str(r.n)]
            if self.has_truth:
                cells += ["" if r.truth is None else _fmt(r.truth),
                          "" if r.truth is None else _fmt(r.error_pct, 2)]
            body.append(cells)
        return header, body

    def ratio_table(self):
        header = ["method", "numerator", "denominator", "ratio"]
        return header, [[r.method, r.numerator, r.denominator, _fmt(r.ratio)] for r in self.ratios]

    def to_csv(self) -> str:
        lines = []
        for header, body in (self.table(), self.ratio_table()):
            if not body:
                continue
            lines.append(",".join(header))
            lines.extend(",".join(c) for c in body)
            lines.append("")
        return "\n".join(lines)

    def to_text(self) -> str:
        blocks = []
        for header, body in (self.table(), self.ratio_table()):
            if not body:
                continue
            rows = [header] + body
            widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
            blocks.append("\n".join("  ".join(c.rjust(wd) for c, wd in zip(r, widths)).rstrip()
                                    for r in rows))
        return "\n\n".join(blocks) + "\n"


def _fmt(v, digits=4):
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return "nan"
    return f"{v:.{digits}f}"


METHODS = ("IDA", "AIA", "AIA+bandpass")


def compare_report(f: ComplexField, base_cfg: MapConfig,
                   regions: Mapping[str, object] | Sequence[tuple[str, object]],
                   bandpass: BandpassSpec | None = None,
                   truth: Mapping[str, float] | None = None,
                   ratios: Sequence[tuple[str, str]] = (),
                   workers: int = 1) -> Report:
    """IDA, AIA and bandpassed AIA maps of one field, summarized per region.

    Parameters
    ----------
    regions
        Ordered ``name -> mask`` pairs (boolean arrays or predicates, see
        :func:`region_stats`).
    bandpass
        Filter for the third method; defaults to ``base_cfg.prefilter`` and is
        required one way or the other.
    truth
        Optional ground-truth SWS per region name.
    ratios
        ``(numerator, denominator)`` region pairs to report for each method.
    """
    bandpass = bandpass or base_cfg.prefilter
    if bandpass is None:
        raise ValueError("compare_report needs a bandpass spec for the filtered AIA run")
    regions = list(regions.items()) if isinstance(regions, Mapping) else list(regions)
    truth = dict(truth or {})
    cfgs = {
        "IDA": base_cfg.with_(estimator="IDA", prefilter=None, max_lag=None),
        "AIA": base_cfg.with_(estimator="AIA", prefilter=None, max_lag=None),
        "AIA+bandpass": base_cfg.with_(estimator="AIA", prefilter=bandpass, max_lag=None),
    }
    rows, ratio_rows, maps = [], [], {}
    for method in METHODS:
        m = sws_map(f, cfgs[method], workers=workers)
        maps[method] = m
        means = {}
        for name, mask in regions:
            try:
                st = region_stats(m, mask)
            except ValueError:
                st = RegionStats(math.nan, math.nan, 0)
            means[name] = st.mean
            rows.append(ReportRow(method, name, st.mean, st.std, st.n, truth.get(name)))
        for num, den in ratios:
            ratio_rows.append(RatioRow(method, num, den, means[num] / means[den]))
    return Report(rows, ratio_rows, maps)
