"""Closed-form autocorrelation curves of reverberant shear wave fields.

All curves are evaluated at zero time lag and are real.  The plain
autocorrelation family (``AXIS_*``, ``GENERAL``, ``AIA_*``) equals ``msv`` at
zero lag and decays towards zero; the difference family (``DA_*``, ``IDA_*``)
is zero at zero lag and tends to ``2 * msv``.

Arguments of the spherical Bessel functions are ``k * lag`` for the plain
family and ``2 * k * lag`` for the difference family, because the difference
of the samples at ``-lag`` and ``+lag`` is separated by twice the lag.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ModelKind",
    "ModelParams",
    "AXIS_X",
    "AXIS_Y",
    "AXIS_Z",
    "AIA_XZ",
    "AIA_XY",
    "DA_X",
    "DA_Y",
    "DA_Z",
    "IDA_XZ",
    "IDA_XY",
    "general",
    "model_kind",
    "sph_j0",
    "j1_over_x",
    "eval_autocorr_model",
    "eval_difference_model",
    "eval_model",
]

_PLAIN = ("axis_x", "axis_y", "axis_z", "general", "aia_xz", "aia_xy")
_DIFFERENCE = ("da_x", "da_y", "da_z", "ida_xz", "ida_xy")


@dataclass(frozen=True)
class ModelKind:
    """Which theoretical curve to evaluate.

    ``theta_s`` is only meaningful for ``general`` and is the angle between
    the z-directed sensitivity axis and the lag direction.
    """

    name: str
    theta_s: float | None = None

    def __post_init__(self):
        if self.name not in _PLAIN + _DIFFERENCE:
            raise ValueError(f"unknown model kind {self.name!r}")
        if self.name == "general":
            if self.theta_s is None or not (0.0 <= self.theta_s <= math.pi / 2):
                raise ValueError("general model needs theta_s in [0, pi/2]")
        elif self.theta_s is not None:
            raise ValueError(f"{self.name} takes no theta_s")

    @property
    def is_difference(self) -> bool:
        return self.name in _DIFFERENCE

    @property
    def family(self) -> str:
        """'IDA' for difference curves, 'AIA' for plain autocorrelation curves."""
        return "IDA" if self.is_difference else "AIA"

    def __str__(self):
        if self.name == "general":
            return f"general({self.theta_s:g})"
        return self.name


AXIS_X = ModelKind("axis_x")
AXIS_Y = ModelKind("axis_y")
AXIS_Z = ModelKind("axis_z")
AIA_XZ = ModelKind("aia_xz")
AIA_XY = ModelKind("aia_xy")
DA_X = ModelKind("da_x")
DA_Y = ModelKind("da_y")
DA_Z = ModelKind("da_z")
IDA_XZ = ModelKind("ida_xz")
IDA_XY = ModelKind("ida_xy")


def general(theta_s: float) -> ModelKind:
    return ModelKind("general", float(theta_s))


def model_kind(kind) -> ModelKind:
    """Coerce a ``ModelKind`` or its lower/upper-case name to a ``ModelKind``."""
    if isinstance(kind, ModelKind):
        return kind
    return ModelKind(str(kind).lower())


@dataclass(frozen=True)
class ModelParams:
    """Wavenumber ``k`` (rad/m) and mean-square z velocity ``msv`` ((m/s)^2)."""

    k: float
    msv: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.k) and self.k > 0):
            raise ValueError(f"k must be positive and finite, got {self.k}")
        if not (math.isfinite(self.msv) and self.msv >= 0):
            raise ValueError(f"msv must be non-negative and finite, got {self.msv}")


# Taylor coefficients of j1(x)/x = sum_n c_n x^(2n); c_n = (-1)^n (2n+2) / (2n+3)!
_J1X_SERIES = tuple(
    (-1) ** n * (2 * n + 2) / math.factorial(2 * n + 3) for n in range(9)
)
# below this |x| the series is used; above it the closed form has lost
# fewer than ~3 digits to cancellation
_J1X_SWITCH = 0.5


def sph_j0(x):
    """Spherical Bessel function j0(x) = sin(x)/x, with j0(0) = 1."""
    x = np.asarray(x, dtype=float)
    safe = np.where(x == 0.0, 1.0, x)
    out = np.where(x == 0.0, 1.0, np.sin(safe) / safe)
    return out[()] if out.ndim == 0 else out


def j1_over_x(x):
    """j1(x)/x with the removable singularity at zero (value 1/3).

    The closed form ``(sin(x)/x - cos(x)) / x**2`` cancels catastrophically
    for small ``x``, so a truncated Taylor series is used for
    ``|x| < 0.5``; both branches are accurate to a few ulp.
    """
    x = np.asarray(x, dtype=float)
    x2 = x * x
    series = np.zeros_like(x)
    for c in reversed(_J1X_SERIES):
        series = series * x2 + c
    big = np.abs(x) >= _J1X_SWITCH
    safe = np.where(big, x, 1.0)
    closed = (np.sin(safe) / safe - np.cos(safe)) / (safe * safe)
    out = np.where(big, closed, series)
    return out[()] if out.ndim == 0 else out


def _check_lag(lag):
    lag = np.asarray(lag, dtype=float)
    if np.any(lag < 0) or not np.all(np.isfinite(lag)):
        raise ValueError("lag must be finite and non-negative")
    return lag


def _params(params, msv):
    if isinstance(params, ModelParams):
        return params
    return ModelParams(float(params), msv)


def eval_autocorr_model(kind, params, lag, msv: float = 1.0):
    """Plain autocorrelation curve at zero time lag.

    Parameters
    ----------
    kind : ModelKind or str
        One of ``axis_x``, ``axis_y``, ``axis_z``, ``general(theta)``,
        ``aia_xz``, ``aia_xy``.
    params : ModelParams or float
        Model parameters, or a bare wavenumber in which case ``msv`` is used.
    lag : float or array
        Scalar lag distance in meters, ``>= 0``.
    """
    kind = model_kind(kind)
    if kind.is_difference:
        raise ValueError(f"{kind} is a difference model; use eval_difference_model")
    p = _params(params, msv)
    x = p.k * _check_lag(lag)
    j0 = sph_j0(x)
    jx = j1_over_x(x)
    if kind.name in ("axis_x", "axis_y", "aia_xy"):
        shape = 1.5 * (j0 - jx)
    elif kind.name == "axis_z":
        shape = 3.0 * jx
    elif kind.name == "aia_xz":
        shape = 0.75 * (j0 + jx)
    else:
        s2 = math.sin(kind.theta_s) ** 2
        c2 = math.cos(kind.theta_s) ** 2
        shape = 3.0 * (0.5 * s2 * (j0 - jx) + c2 * jx)
    # pin the zero-lag normalization against rounding in the coefficients
    return _pin(x, p.msv * shape, p.msv)


def _pin(x, values, at_zero):
    out = np.where(x == 0.0, at_zero, values)
    return out[()] if out.ndim == 0 else out


def eval_difference_model(kind, params, lag, msv: float = 1.0):
    """Difference autocorrelation curve ``DA_*`` or integrated ``IDA_*``.

    Zero at zero lag with asymptote ``2 * msv``.  The ``DA_Z`` curve is taken
    at zero time lag, so no residual time-phasor factor appears.
    """
    kind = model_kind(kind)
    if not kind.is_difference:
        raise ValueError(f"{kind} is not a difference model; use eval_autocorr_model")
    p = _params(params, msv)
    x = 2.0 * p.k * _check_lag(lag)
    j0 = sph_j0(x)
    jx = j1_over_x(x)
    v = p.msv
    if kind.name in ("da_x", "da_y", "ida_xy"):
        out = 2.0 * (v - 1.5 * v * (j0 - jx))
    elif kind.name == "da_z":
        out = 2.0 * (v - 3.0 * v * jx)
    else:
        out = 2.0 * (v - 0.75 * v * (j0 + jx))
    return _pin(x, out, 0.0)


def eval_model(kind, params, lag, msv: float = 1.0):
    """Dispatch to the plain or difference evaluator according to ``kind``."""
    kind = model_kind(kind)
    if kind.is_difference:
        return eval_difference_model(kind, params, lag, msv)
    return eval_autocorr_model(kind, params, lag, msv)
