"""Wintgen ideal submanifolds of codimension two from isotropic holomorphic
curves: construction, invariants, and numerical verification."""

from ._backend import BACKEND, HAVE_COMPILED

__version__ = "0.1.0"

__all__ = ["BACKEND", "HAVE_COMPILED", "__version__"]
