"""Kernel selection for the series product.

The compiled extension is preferred when importable; otherwise the numpy
fallback is used. Set LIE_KAM_BACKEND=python to force the fallback (useful
for benchmarking and for debugging kernel parity).
"""
import os

_forced = os.environ.get("LIE_KAM_BACKEND", "").strip().lower()

if _forced == "python":
    from . import _convpy as _impl
    BACKEND_NAME = "python"
elif _forced in ("", "cython"):
    try:
        from . import _convkernel as _impl
        BACKEND_NAME = "cython"
    except ImportError:
        if _forced == "cython":
            raise
        from . import _convpy as _impl
        BACKEND_NAME = "python"
else:
    raise ValueError(f"unknown LIE_KAM_BACKEND value: {_forced!r}")

convolve_nonzeros = _impl.convolve_nonzeros
