"""Kernel backend selection.

The compiled extension is used when it imports; set
``INC_ANNEAL_PURE_PYTHON=1`` to force the numpy fallback.
"""

import os

from . import _fallback

fallback = _fallback

if os.environ.get("INC_ANNEAL_PURE_PYTHON", "") not in ("", "0"):
    kernels = _fallback
    BACKEND = "python"
    compiled = None
else:
    try:
        from . import _kernels as compiled
    except ImportError:
        compiled = None
        kernels = _fallback
        BACKEND = "python"
    else:
        kernels = compiled
        BACKEND = "cython"


def get(name: str | None = None):
    """Return the kernel module for ``name`` ('cython', 'python' or None for the default)."""
    if name is None:
        return kernels
    if name == "python":
        return _fallback
    if name == "cython":
        if compiled is None:
            raise RuntimeError("compiled kernels are not available")
        return compiled
    raise ValueError(f"unknown backend {name!r}")
