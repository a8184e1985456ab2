"""Exact Hochschild cohomology engine for preprojective algebras of type L.

The package builds the finite-dimensional algebra P(L_n) over the rationals
or an odd prime field, constructs its period-6 projective bimodule
resolution, computes the cohomology ring by Yoneda chain-map lifting, and
cross-checks every quantitative statement against independent computations
(an explicit cochain complex, a tensor homology complex and a reduced bar
complex).
"""

__version__ = "0.1.0"

from .exactla import ExactMatrix, FieldSpec

__all__ = ["ExactMatrix", "FieldSpec", "build_algebra", "associated_form",
           "build_resolution", "build_complex", "YonedaEngine", "__version__"]

from .algebra import build_algebra
from .nakayama import associated_form
from .resolution import build_resolution
from .cochain import build_complex
from .yoneda import YonedaEngine
