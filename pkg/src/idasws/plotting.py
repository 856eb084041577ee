"""Figures written to files next to the CSV/text outputs."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .models import eval_model  # noqa: E402

__all__ = ["plot_phase", "plot_sws_map", "plot_compare", "plot_profile_fit"]

_RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 9,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "image.cmap": "viridis",
    "savefig.dpi": 150,
    "figure.dpi": 100,
}
# fixed metadata keeps PNG output byte-stable across runs
_META = {"Software": None}


def _save(fig, path):
    fig.savefig(path, bbox_inches="tight", metadata=_META)
    plt.close(fig)


def _extent_mm(x, z):
    dx = x[1] - x[0] if len(x) > 1 else 1.0
    dz = z[1] - z[0] if len(z) > 1 else 1.0
    return [1e3 * (x[0] - dx / 2), 1e3 * (x[-1] + dx / 2),
            1e3 * (z[-1] + dz / 2), 1e3 * (z[0] - dz / 2)]


def plot_phase(field, path, title="phase"):
    """Phase map of a phasor field, x across and z (depth) down."""
    x, z = field.grid.axes()
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(3.6, 3.2))
        im = ax.imshow(np.angle(field.values).T, extent=_extent_mm(x, z), cmap="twilight",
                       vmin=-np.pi, vmax=np.pi)
        fig.colorbar(im, ax=ax, label="rad")
        ax.set_xlabel("x (mm)")
        ax.set_ylabel("z (mm)")
        ax.set_title(title)
        _save(fig, path)


def _draw_map(ax, m, vmin, vmax):
    data = np.ma.masked_invalid(m.sws.T)
    return ax.imshow(data, extent=_extent_mm(m.x, m.z), vmin=vmin, vmax=vmax,
                     interpolation="nearest")


def plot_sws_map(m, path, title=None, vmin=None, vmax=None):
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(3.6, 3.2))
        im = _draw_map(ax, m, vmin, vmax)
        fig.colorbar(im, ax=ax, label="SWS (m/s)")
        ax.set_xlabel("x (mm)")
        ax.set_ylabel("z (mm)")
        ax.set_title(title or f"{m.estimator} SWS map, {m.freq:g} Hz")
        _save(fig, path)


def plot_compare(report, path, vmin=0.0, vmax=None):
    """Side-by-side maps of every method in a comparison report."""
    maps = report.maps
    if vmax is None:
        finite = [np.nanmax(m.sws) for m in maps.values() if m.valid.any()]
        vmax = max(finite) if finite else 1.0
    with plt.rc_context(_RC):
        fig, axes = plt.subplots(1, len(maps), figsize=(3.2 * len(maps), 3.0), squeeze=False)
        for ax, (name, m) in zip(axes[0], maps.items()):
            im = _draw_map(ax, m, vmin, vmax)
            ax.set_title(f"{name} (mean {m.mean():.2f} m/s)")
            ax.set_xlabel("x (mm)")
        axes[0][0].set_ylabel("z (mm)")
        fig.colorbar(im, ax=list(axes[0]), label="SWS (m/s)", shrink=0.8)
        _save(fig, path)


def plot_profile_fit(profile, fit, kind, path, title=None):
    """Measured profile with the fitted model curve."""
    lags = np.linspace(0.0, profile.lags[-1], 200)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(3.6, 2.8))
        ax.plot(1e3 * profile.lags, profile.values, "o", ms=3, label="measured")
        if fit.ok:
            ax.plot(1e3 * lags, eval_model(kind, fit.k, lags, fit.amplitude), "-",
                    label=f"fit, {fit.sws:.3f} m/s")
        ax.set_xlabel("lag (mm)")
        ax.set_ylabel(profile.kind)
        ax.legend(frameon=False)
        ax.set_title(title or f"{kind} fit")
        _save(fig, path)
