"""Backend selection for the numerical kernels.

The compiled extension is used when it was built; otherwise the NumPy
implementation is imported. Setting ``SLCURV_PURE_PYTHON=1`` forces the
fallback.
"""
import os

if os.environ.get("SLCURV_PURE_PYTHON", "") not in ("", "0"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        from . import _kernels_py as _impl

BACKEND = _impl.BACKEND
jacobi_eigh = _impl.jacobi_eigh
eigvalsh = _impl.eigvalsh
jacobi_eigh_batch = _impl.jacobi_eigh_batch
elem_sym = _impl.elem_sym
sl_angle = _impl.sl_angle
sl_angle_batch = _impl.sl_angle_batch
invert_angle = _impl.invert_angle
invert_angle_batch = _impl.invert_angle_batch

__all__ = [
    "BACKEND",
    "jacobi_eigh",
    "eigvalsh",
    "jacobi_eigh_batch",
    "elem_sym",
    "sl_angle",
    "sl_angle_batch",
    "invert_angle",
    "invert_angle_batch",
]
