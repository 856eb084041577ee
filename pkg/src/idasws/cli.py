"""Command line interface.

Results go to stdout or the named files; diagnostics go to stderr as
``error: code=<code> message=<text>``.

Exit codes: 0 success, 1 invalid input, 2 fit at search bound, 3 fit
failed, 64 usage error, 65 malformed input file, 74 I/O error.
"""
from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import io, scenarios
from .estimator import WindowView, aia_profile, ida_profile_direct
from .fitting import FitConfig, fit_wavenumber
from .mapping import MapConfig, compare_report, sws_map
from .models import model_kind
from .prefilter import BandpassSpec, bandpass_2d
from .synth import (CompressionSpec, Disk, GridSpec, PhantomSpec, Rectangle, Region, ReverbSpec,
                    add_noise, compose_phantom, mix, synth_bulk, synth_compression)

EXIT_OK, EXIT_INVALID, EXIT_AT_BOUND, EXIT_FIT_FAILED = 0, 1, 2, 3
EXIT_USAGE, EXIT_DATA, EXIT_IO = 64, 65, 74
MM = 1e-3


class UsageError(Exception):
    code = "usage"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _floats(text, n=None, name="value"):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"{name}: expected comma-separated numbers, got {text!r}")
    if n is not None and len(vals) != n:
        raise UsageError(f"{name}: expected {n} numbers, got {len(vals)}")
    return vals


def _fit_cfg(args) -> FitConfig:
    return FitConfig(sws_min=args.sws_min, sws_max=args.sws_max)


def _bandpass(text, taper=0.05, keep_dc=False):
    lo, hi = _floats(text, 2, "--prefilter")
    return BandpassSpec(lo, hi, taper, not keep_dc)


# -- subcommands ----------------------------------------------------------------------------

def cmd_synth(args):
    dz = args.dz_mm if args.dz_mm is not None else args.dx_mm
    grid = GridSpec(args.nx, args.nz, args.dx_mm * MM, dz * MM)
    base = ReverbSpec(args.sws, args.freq, args.waves, args.seed, args.rms)
    regions = []
    for i, text in enumerate(args.disk or [], start=1):
        x, z, r, s = _floats(text, 4, "--disk")
        regions.append(Region(Disk(x * MM, z * MM, r * MM), s, i))
    for i, text in enumerate(args.rect or [], start=len(regions) + 1):
        x0, z0, x1, z1, s = _floats(text, 5, "--rect")
        regions.append(Region(Rectangle(x0 * MM, z0 * MM, x1 * MM, z1 * MM), s, i))
    f, labels = compose_phantom(grid, PhantomSpec(args.sws, regions), base)
    shear_rms = math.sqrt(f.msv)
    if args.comp_ratio > 0:
        comp = CompressionSpec(args.comp_speed, math.radians(args.comp_angle_deg),
                               args.comp_ratio, args.comp_phase)
        f = mix(f, synth_compression(grid, args.freq, comp, shear_rms))
    if args.bulk > 0:
        f = mix(f, synth_bulk(grid, args.freq, args.bulk * shear_rms, args.bulk_phase))
    if args.snr_db is not None:
        f = add_noise(f, args.snr_db, args.noise_seed)
    io.write_field(args.out, f)
    if args.labels_out:
        np.save(args.labels_out, labels)
    if args.figure:
        from .plotting import plot_phase
        plot_phase(f, args.figure, title=f"phase, {args.freq:g} Hz")
    print(f"wrote {args.out} nx={grid.nx} nz={grid.nz} rms={math.sqrt(f.msv):.6g}")
    return EXIT_OK


def cmd_filter(args):
    f = io.read_field(args.input)
    spec = BandpassSpec(args.clow, args.chigh, args.taper, not args.keep_dc)
    io.write_field(args.out, bandpass_2d(f, spec))
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_profile(args):
    f = io.read_field(args.input)
    cx, cz = _floats(args.center, 2, "--center")
    w = WindowView.centered(f, cx * MM, cz * MM, args.window_mm * MM)
    max_lag = None if args.max_lag_mm is None else args.max_lag_mm * MM
    prof = ida_profile_direct(w, max_lag) if args.kind == "ida" else aia_profile(w, max_lag)
    if args.out:
        io.export_profile_csv(args.out, prof)
    else:
        sys.stdout.write(f"# kind={prof.kind}\nlag_m,value,count\n")
        for r, v, c in zip(prof.lags, prof.values, prof.counts):
            sys.stdout.write(f"{r:.17g},{v:.17g},{c:.17g}\n")
    return EXIT_OK


def cmd_fit(args):
    prof = io.read_profile_csv(args.input)
    kind = model_kind(args.model or ("ida_xz" if prof.kind == "IDA" else "aia_xz"))
    res = fit_wavenumber(prof, kind, args.freq, _fit_cfg(args))
    print(f"k={res.k:.10g} sws={res.sws:.10g} amplitude={res.amplitude:.10g} "
          f"nrmse={res.nrmse:.6g} at_bound={int(res.at_bound)} ok={int(res.ok)}")
    if args.figure:
        from .plotting import plot_profile_fit
        plot_profile_fit(prof, res, kind, args.figure)
    if not res.ok:
        return EXIT_FIT_FAILED
    return EXIT_AT_BOUND if res.at_bound else EXIT_OK


def _map_cfg(args, estimator):
    stride = None if args.stride_mm is None else args.stride_mm * MM
    pre = _bandpass(args.prefilter) if getattr(args, "prefilter", None) else None
    return MapConfig(window_size=args.window_mm * MM, stride=stride, estimator=estimator,
                     prefilter=pre, fit=_fit_cfg(args), plane=args.plane)


def cmd_map(args):
    f = io.read_field(args.input)
    m = sws_map(f, _map_cfg(args, args.estimator.upper()), workers=args.workers)
    if args.csv:
        io.export_map_csv(args.csv, m)
    if args.pgm:
        io.export_map_pgm(args.pgm, m)
    if args.figure:
        from .plotting import plot_sws_map
        plot_sws_map(m, args.figure)
    print(f"estimator={m.estimator} cells={m.sws.size} valid={int(m.valid.sum())} "
          f"mean_sws={m.mean():.6f}")
    return EXIT_OK


def _parse_region(text):
    """``name=disk:x,z,r`` | ``name=rect:x0,z0,x1,z1`` | ``name=outside:x,z,r`` (mm)."""
    try:
        name, rest = text.split("=", 1)
        shape, nums = rest.split(":", 1)
    except ValueError:
        raise UsageError(f"--region: cannot parse {text!r}")
    v = [n * MM for n in _floats(nums, None, "--region")]
    if shape == "disk" and len(v) == 3:
        return name, lambda X, Z: np.hypot(X - v[0], Z - v[1]) <= v[2]
    if shape == "outside" and len(v) == 3:
        return name, lambda X, Z: np.hypot(X - v[0], Z - v[1]) > v[2]
    if shape == "rect" and len(v) == 4:
        return name, lambda X, Z: (X >= v[0]) & (X <= v[2]) & (Z >= v[1]) & (Z <= v[3])
    raise UsageError(f"--region: bad shape spec {rest!r}")


def cmd_compare(args):
    f = io.read_field(args.input)
    regions = [_parse_region(t) for t in args.region or []]
    if not regions:
        regions = [("all", lambda X, Z: np.ones(X.shape, dtype=bool))]
    names = [n for n, _ in regions]
    truth = {}
    for t in args.truth or []:
        name, val = t.split("=", 1)
        if name not in names:
            raise UsageError(f"--truth for unknown region {name!r}")
        truth[name] = float(val)
    ratios = []
    for t in args.ratio or []:
        num, den = t.split("/", 1)
        if num not in names or den not in names:
            raise UsageError(f"--ratio refers to unknown region in {t!r}")
        ratios.append((num, den))
    bp = BandpassSpec(args.clow, args.chigh, args.taper)
    rep = compare_report(f, _map_cfg(args, "IDA"), regions, bandpass=bp, truth=truth,
                         ratios=ratios, workers=args.workers)
    text = rep.to_text()
    sys.stdout.write(text)
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(rep.to_csv())
    if args.text:
        with open(args.text, "w") as fh:
            fh.write(text)
    if args.figure:
        from .plotting import plot_compare
        plot_compare(rep, args.figure)
    return EXIT_OK


def cmd_phasor(args):
    stack = io.read_frames(args.input)
    io.write_field(args.out, io.extract_phasor(stack, args.freq))
    print(f"wrote {args.out}")
    return EXIT_OK


# -- parser ---------------------------------------------------------------------------------

def _add_fit_flags(p):
    p.add_argument("--sws-min", type=float, default=0.3)
    p.add_argument("--sws-max", type=float, default=10.0)


def _add_map_flags(p):
    p.add_argument("--window-mm", type=float, default=scenarios.WINDOW / MM)
    p.add_argument("--stride-mm", type=float, default=None)
    p.add_argument("--plane", choices=["xz", "xy"], default="xz")
    p.add_argument("--workers", type=int, default=1)
    _add_fit_flags(p)


def build_parser():
    parser = _Parser(prog="idasws", description="Difference-autocorrelation SWS estimation")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", help="synthesize a reverberant (optionally contaminated) field")
    p.add_argument("--out", required=True)
    p.add_argument("--nx", type=int, default=scenarios.GRID.nx)
    p.add_argument("--nz", type=int, default=scenarios.GRID.nz)
    p.add_argument("--dx-mm", type=float, default=scenarios.GRID.dx / MM)
    p.add_argument("--dz-mm", type=float, default=None)
    p.add_argument("--freq", type=float, default=scenarios.FREQ)
    p.add_argument("--sws", type=float, default=scenarios.BACKGROUND_SWS,
                   help="background shear wave speed (m/s)")
    p.add_argument("--waves", type=int, default=scenarios.NUM_WAVES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rms", type=float, default=1.0)
    p.add_argument("--disk", action="append", metavar="X,Z,R,SWS", help="mm, mm, mm, m/s")
    p.add_argument("--rect", action="append", metavar="X0,Z0,X1,Z1,SWS")
    p.add_argument("--comp-speed", type=float, default=20.0)
    p.add_argument("--comp-angle-deg", type=float, default=30.0)
    p.add_argument("--comp-ratio", type=float, default=0.0)
    p.add_argument("--comp-phase", type=float, default=0.0)
    p.add_argument("--bulk", type=float, default=0.0, help="bulk phasor amplitude / shear RMS")
    p.add_argument("--bulk-phase", type=float, default=0.0)
    p.add_argument("--snr-db", type=float, default=None)
    p.add_argument("--noise-seed", type=int, default=0)
    p.add_argument("--labels-out", default=None, help="write the label map as .npy")
    p.add_argument("--figure", default=None, help="write a phase-map PNG")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("filter", help="2D Fourier bandpass")
    p.add_argument("input")
    p.add_argument("--out", required=True)
    p.add_argument("--clow", type=float, required=True)
    p.add_argument("--chigh", type=float, required=True)
    p.add_argument("--taper", type=float, default=0.05)
    p.add_argument("--keep-dc", action="store_true")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("profile", help="one window's AIA or IDA profile as CSV")
    p.add_argument("input")
    p.add_argument("--center", required=True, metavar="X_MM,Z_MM")
    p.add_argument("--window-mm", type=float, default=scenarios.WINDOW / MM)
    p.add_argument("--kind", choices=["ida", "aia"], default="ida")
    p.add_argument("--max-lag-mm", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("fit", help="fit a profile CSV")
    p.add_argument("input")
    p.add_argument("--freq", type=float, required=True)
    p.add_argument("--model", default=None, help="model kind, e.g. ida_xz, aia_xy")
    p.add_argument("--figure", default=None)
    _add_fit_flags(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("map", help="sliding-window SWS map")
    p.add_argument("input")
    p.add_argument("--estimator", choices=["ida", "aia"], default="ida")
    p.add_argument("--prefilter", default=None, metavar="CLOW,CHIGH")
    p.add_argument("--csv", default=None)
    p.add_argument("--pgm", default=None)
    p.add_argument("--figure", default=None)
    _add_map_flags(p)
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("compare", help="IDA vs AIA vs bandpassed AIA report")
    p.add_argument("input")
    p.add_argument("--clow", type=float, default=scenarios.BANDPASS.c_low)
    p.add_argument("--chigh", type=float, default=scenarios.BANDPASS.c_high)
    p.add_argument("--taper", type=float, default=0.05)
    p.add_argument("--region", action="append",
                   help="name=disk:x,z,r | name=outside:x,z,r | name=rect:x0,z0,x1,z1 (mm)")
    p.add_argument("--truth", action="append", metavar="NAME=SWS")
    p.add_argument("--ratio", action="append", metavar="NUM/DEN")
    p.add_argument("--csv", default=None)
    p.add_argument("--text", default=None)
    p.add_argument("--figure", default=None)
    _add_map_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("phasor", help="frame stack (RFS1) to phasor field (RWF1)")
    p.add_argument("input")
    p.add_argument("--freq", type=float, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_phasor)
    return parser


def _fail(code, message, status):
    print(f"error: code={code} message={message}", file=sys.stderr)
    return status


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as e:
        return _fail("usage", e, EXIT_USAGE)
    except io.FieldFormatError as e:
        return _fail(e.code, e, EXIT_DATA)
    except OSError as e:
        return _fail("io", e, EXIT_IO)
    except ValueError as e:
        return _fail(getattr(e, "code", "invalid_input"), e, EXIT_INVALID)


if __name__ == "__main__":
    sys.exit(main())
