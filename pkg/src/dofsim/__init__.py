"""Degrees-of-freedom simulation for the two-user interference channel with
delayed and imperfect current CSIT.

Modules
-------
matkit     small dense complex linear algebra
channel    fading links, CSIT estimates and seeded random streams
quantizer  quantization of overheard interference
schemes    transmission schemes and their achievable rates
doffit     power sweeps and DoF slope fits
region     exact DoF region polygons
bounds     log-det expectation bounds
cli        command-line front end
"""

from .bounds import BoundInstance, BoundReport, check_sandwich, digamma_int, zeta_const
from .channel import ChannelSample, CsitQuality, RngStream, draw_sample, sigma2_of
from .doffit import DofFit, RateCurve, fit_dof, sweep
from .quantizer import QuantSpec, quantize
from .region import RegionPolygon, contains, reference_regions, theorem1_region, theorem2_region
from .schemes import (
    SCHEMES,
    RatePair,
    SchemeConfig,
    run_enhanced_miso,
    run_hk_corner,
    run_mat_ic,
    run_mimo_enhanced,
    run_scheme,
    run_zf_only,
)

__version__ = "0.1.0"
