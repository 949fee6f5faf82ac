"""
blockdelta - exact distributions of differences of binary block-counting functions
"""

__version__ = "0.1.0"
__author__ = "Your Name"

from .words import Pattern, DigitString, occ, blocks01
from .intdist import IntDist
from .direct import d, empirical_dist, exact_lambda
from .cfengine import dist, dist_conditional, eval_cf, gamma
from .moments import mean_vec, variance, var_vec
from .gauss import compare, cusick_density, gaussian_main

__all__ = [
    "Pattern",
    "DigitString",
    "occ",
    "blocks01",
    "IntDist",
    "d",
    "empirical_dist",
    "exact_lambda",
    "dist",
    "dist_conditional",
    "eval_cf",
    "gamma",
    "mean_vec",
    "variance",
    "var_vec",
    "compare",
    "cusick_density",
    "gaussian_main",
]
