"""Kernel selection: the compiled extension when importable, else the Python twin.

Set ``PLANAR_ORACLE_PURE=1`` to force the fallback.
"""

import os

from . import _pykernels as python_kernels

compiled_kernels = None
if not os.environ.get("PLANAR_ORACLE_PURE"):
    try:
        from . import _ckernels as compiled_kernels
    except ImportError:  # extension not built
        compiled_kernels = None

kernels = compiled_kernels if compiled_kernels is not None else python_kernels
BACKEND = kernels.BACKEND


def available():
    """Names of the importable kernel backends."""
    names = ["python"]
    if compiled_kernels is not None:
        names.insert(0, "cython")
    return names


def get(name=None):
    if name is None:
        return kernels
    if name == "python":
        return python_kernels
    if name == "cython" and compiled_kernels is not None:
        return compiled_kernels
    raise ValueError(f"kernel backend {name!r} is not available")
