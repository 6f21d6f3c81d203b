"""Spectral curve, amoeba, genus-1 period, theta functions and discrete Gaussians."""

from .amoeba import AmoebaRaster, GenusAssumptionError, amoeba_raster, check_genus, count_compact_ovals
from .curve import (InterpolationError, PoleError, characteristic_polynomial, curve_residual,
                    magnetic_kasteleyn, transition_matrices)
from .discrete_gaussian import (DiscreteGaussianParams, centred_variance, discrete_gaussian_moments,
                                discrete_gaussian_pmf, discrete_gaussian_sample, normalising_constant,
                                summed_moments)
from .genus1 import (DegenerateCurveError, Genus1CurveData, branch_points_genus1, period_genus1,
                     predicted_Z_distribution)
from .laurent import LaurentPoly2
from .theta import ThetaParams, log_theta_derivatives, modular_transform_check, quasi_periodicity_residual, theta

__all__ = [name for name in dir() if not name.startswith("_")]
