"""Shear wave speed from difference autocorrelation of reverberant fields."""
from .models import (AIA_XY, AIA_XZ, AXIS_X, AXIS_Y, AXIS_Z, DA_X, DA_Y, DA_Z, IDA_XY, IDA_XZ,
                     ModelKind, ModelParams, eval_autocorr_model, eval_difference_model,
                     eval_model, general, j1_over_x, sph_j0)
from .synth import (ComplexField, CompressionSpec, Disk, GridSpec, PhantomSpec, Rectangle,
                    Region, ReverbSpec, add_noise, compose_phantom, mix, synth_bulk,
                    synth_compression, synth_reverberant)
from .estimator import (Autocorr2D, AutocorrProfile, WindowView, aia_profile, autocorr_2d,
                        ida_profile_direct, ida_profile_identity, radial_profile)
from .fitting import FitConfig, FitResult, brute_force_fit, fit_wavenumber, sws_from_k
from .prefilter import BandpassSpec, bandpass_2d
from .mapping import MapConfig, RegionStats, SWSMap, compare_report, region_stats, sws_map

__version__ = "0.1.0"
