"""Backend selection for the hot loops.

The compiled extension is used when it imports; otherwise (or when the
environment variable ``FALSETATE_PURE`` is set to a non-empty value other
than ``0``) the numpy implementation is used.  ``BACKEND`` names the choice.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _fallback


def _select() -> tuple[ModuleType, str]:
    if os.environ.get("FALSETATE_PURE", "0") not in ("", "0"):
        return _fallback, "python"
    try:
        from . import _kernels  # type: ignore[attr-defined]
    except ImportError:
        return _fallback, "python"
    return _kernels, "cython"


_impl, BACKEND = _select()

ap_array = _impl.ap_array
build_coeffs = _impl.build_coeffs
kernel_sum = _impl.kernel_sum
FAILED = _fallback.FAILED


def backend_module(name: str) -> ModuleType:
    """Return the implementation named ``"cython"`` or ``"python"``."""
    if name == "python":
        return _fallback
    from . import _kernels  # type: ignore[attr-defined]

    return _kernels


def set_backend(name: str) -> str:
    """Route the kernels through ``"cython"`` or ``"python"``; returns the previous name.

    Callers look the kernels up as module attributes, so the switch takes
    effect immediately for all subsequent computations.
    """
    global ap_array, build_coeffs, kernel_sum, BACKEND
    mod = backend_module(name)
    previous = BACKEND
    ap_array, build_coeffs, kernel_sum = mod.ap_array, mod.build_coeffs, mod.kernel_sum
    BACKEND = name
    return previous
