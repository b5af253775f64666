"""Nested subsimplices, barycentric subdivision and mean values of convex
functions over simplices, with numerical checks of the refined left-hand
Hermite-Hadamard chain."""

__version__ = "0.1.0"

from .geometry import (DegenerateSimplexError, GeometryError, Simplex, SubsetIndex,
                       barycenter, build_delta_k, delta_l_via_homothety, face_opposite,
                       homothety_apply, proper_subsets, random_simplex, volume)
from .subdivision import (LevelCapError, SubdivisionLevel, barycenter_average,
                          barycentric_split, cone_over, dr_level)
from .quadrature import (MeanValueEstimate, QuadratureConfig, exact_mean_poly, mc_mean,
                         mean_value, sample_uniform)
from .convexfns import TestFunction, catalog, midpoint_convexity_check
from .polynomial import Polynomial
from .verify import (ChainReport, Comparison, corollary_avg_k, corollary_avg_monotone,
                     corollary_chain, dr_convergence_report, hh_bounds, theorem_main_check,
                     verify_instance)
