"""Spherical mean transforms, common nodal sets and ruled-surface singularities.

Submodules: ``polynomials`` (exact rational polynomials), ``series``
(truncated power series), ``generators`` (compactly supported witnesses and
eigenfunctions), ``spherical_means``, ``moments``, ``ruled`` and ``symmetry``.
"""

__version__ = "0.1.0"

from .polynomials import LinearForm, Poly, divisible_by_square_linear, laplacian
from .spherical_means import sphere_rule, spherical_mean

__all__ = ["LinearForm", "Poly", "divisible_by_square_linear", "laplacian", "sphere_rule", "spherical_mean",
           "__version__"]
