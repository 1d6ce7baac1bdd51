"""Backend selection for the hot kernels.

The compiled ``_ckernels`` extension is used when importable; otherwise
(or when the ``ANETF_PURE_PYTHON`` environment variable is set) the NumPy
implementation in ``_pykernels`` takes over.  ``BACKEND`` names the
active one.
"""

import os

from . import _pykernels

if os.environ.get("ANETF_PURE_PYTHON"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

simulate = _impl.simulate
lu_factor = _impl.lu_factor
lu_solve = _impl.lu_solve


def available_backends():
    """Mapping of backend name to kernel module for every importable backend."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        out["cython"] = _ckernels
    return out
