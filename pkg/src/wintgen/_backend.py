"""Kernel backend selection: compiled extension when built, numpy otherwise."""
from __future__ import annotations

from . import _kernels_py

try:  # pragma: no cover - exercised indirectly via the selected backend
    from . import _kernels as _impl

    HAVE_COMPILED = True
except ImportError:  # pragma: no cover
    _impl = _kernels_py
    HAVE_COMPILED = False

BACKEND = "compiled" if HAVE_COMPILED else "python"

horner_many = _impl.horner_many
rotation_scan = _impl.rotation_scan


def backends() -> dict:
    """All available kernel implementations, keyed by name (for benchmarks)."""
    out = {"python": _kernels_py}
    if HAVE_COMPILED:
        out["compiled"] = _impl
    return out
