"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when importable, unless
``MULTICORR_BACKEND=python`` is set in the environment. Both backends
export ``jacobi_eigh``, ``singular_values``, ``concurrence_batch`` and
``correlation_core`` with identical signatures.
"""
import os

from multicorr import _pykernels

_requested = os.environ.get("MULTICORR_BACKEND", "auto").lower()

if _requested not in ("auto", "cython", "python"):
    raise ImportError(f"MULTICORR_BACKEND must be auto, cython or python, not {_requested!r}")

kernels = _pykernels
BACKEND = "python"
if _requested != "python":
    try:
        from multicorr import _ckernels
    except ImportError:
        if _requested == "cython":
            raise
    else:
        kernels = _ckernels
        BACKEND = "cython"

jacobi_eigh = kernels.jacobi_eigh
singular_values = kernels.singular_values
concurrence_batch = kernels.concurrence_batch
correlation_core = kernels.correlation_core
