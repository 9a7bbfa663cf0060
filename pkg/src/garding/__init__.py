"""Hyperbolic polynomials: eigenvalues, Garding cones, inequalities and Dirichlet solves."""
from .errors import GardingError
from .poly_core import MonomialPoly, evaluate, load, loads
from .spectra import eigenvalues, is_hyperbolic
from .matrix_models import SpectralModel

__version__ = "0.1.0"

__all__ = ["GardingError", "MonomialPoly", "SpectralModel", "eigenvalues", "evaluate",
           "is_hyperbolic", "load", "loads", "__version__"]
