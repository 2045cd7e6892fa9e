"""Field concentration between two nearly touching perfectly conducting spheres."""

from .blowup import (
    BlowupResult,
    Radii,
    average_field_compare,
    blowup,
    blowup_curve,
    c_min_max,
    potential_gap_series,
    psi_cubic_closed,
    psi_factor,
    psi_linear_closed,
)
from .constants import SeriesConstants, closed_constants, m_asymptotic, m_series, q_closed, q_series, series_constants
from .errors import *  # noqa: F401,F403
from .fieldasym import AsymptoticField, GridSpec, field_grid, grad_u_main, grad_u_singular
from .geometry import ImageChargeSystem, SpherePair, build_images, diagnostics, fixed_points, reflect
from .harmonic import HarmonicBackground, laplacian_check, parse_polynomial
from .singular import QuadratureSpec, flux, grad_h, grad_h_asymptotic, h_eval, h_gap, image_setup
from .specfun import digamma, euler_gamma, polygamma, psi

__version__ = "0.1.0"
