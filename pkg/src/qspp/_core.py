"""Selects the compiled coupling kernel, falling back to numpy.

Set ``QSPP_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernel_py

BACKEND = "python"
coupling_kernel = _kernel_py.coupling_kernel

if not os.environ.get("QSPP_PURE_PYTHON"):
    try:
        from . import _kernel
    except ImportError:
        pass
    else:
        coupling_kernel = _kernel.coupling_kernel
        BACKEND = "cython"

OTTO = _kernel_py.OTTO
KRETSCHMANN = _kernel_py.KRETSCHMANN
