"""Kernel selection: the Cython extension when importable, numpy otherwise.

Set ``BERGMAN_PURE_PYTHON=1`` to force the numpy kernels.
"""
import os

import numpy as np

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py
if not os.environ.get("BERGMAN_PURE_PYTHON"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py

_ACTIVE = {"mobius_columns": _impl.mobius_columns, "horner": _impl.horner}


def use_backend(name):
    """Switch kernels at runtime (``"cython"`` or ``"python"``); returns the previous name."""
    global BACKEND
    previous = BACKEND
    if name == "python":
        _ACTIVE.update(mobius_columns=_kernels_py.mobius_columns, horner=_kernels_py.horner)
    elif name == "cython":
        from . import _kernels

        _ACTIVE.update(mobius_columns=_kernels.mobius_columns, horner=_kernels.horner)
    else:
        raise ValueError(f"unknown backend {name!r}")
    BACKEND = name
    return previous


def mobius_columns(z, degree, ncols):
    """First ``ncols`` columns of U_z truncated to rows 0..degree (needs ncols <= degree + 1)."""
    if not 0 < ncols <= degree + 1:
        raise ValueError(f"ncols must lie in 1..degree+1, got {ncols} for degree {degree}")
    return _ACTIVE["mobius_columns"](complex(z), int(degree), int(ncols))


def horner(coeffs, points):
    pts = np.ascontiguousarray(points, dtype=complex)
    shape = pts.shape
    vals = _ACTIVE["horner"](np.ascontiguousarray(coeffs, dtype=complex), pts.ravel())
    return np.asarray(vals).reshape(shape)
