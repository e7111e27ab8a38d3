"""Symbolic-numeric integral calculus on finite-generator Grassmann algebras.

Subpackages cover exterior-algebra arithmetic, even supermatrices and
superdeterminants, supersmooth functions and maps, odd-variable (Berezin)
integration, even-variable contour integration, and integration over
foliated singular manifolds with its change-of-variables machinery.
"""

from ._backend import KERNEL_IMPLEMENTATION
from .algebra import DEFAULT_LEVEL, GrassmannElement, IndexSet, Parity

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_LEVEL",
    "GrassmannElement",
    "IndexSet",
    "KERNEL_IMPLEMENTATION",
    "Parity",
    "__version__",
]
