"""Kernel backend selection.

The compiled core (tamperlab._kernels, built from _kernels.pyx) is used
when importable; otherwise the NumPy fallback takes over. Both produce
bit-identical results. Set TAMPERLAB_KERNELS=python or =ext to force a
backend ("ext" raises if the extension is missing).
"""

import os

from tamperlab import _kernels_py

_choice = os.environ.get("TAMPERLAB_KERNELS", "auto").lower()
if _choice not in ("auto", "ext", "python"):
    raise ValueError(f"TAMPERLAB_KERNELS must be auto, ext or python, got {_choice!r}")

kernels = None
if _choice in ("auto", "ext"):
    try:
        from tamperlab import _kernels as kernels
    except ImportError:
        if _choice == "ext":
            raise
        kernels = None
if kernels is None:
    kernels = _kernels_py


def backend_name() -> str:
    """Name of the active kernel backend ("ext" or "python")."""
    return kernels.BACKEND
