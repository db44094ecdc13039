"""Kernel backend selection.

The hot pointwise loops of the split-step integrator (cubic phase
rotation, spectral multiplier, norm reductions) exist twice: a compiled
Cython extension and a plain numpy fallback. Import-time rules:

  NLSLAB_KERNELS=cy   require the extension, raise if missing
  NLSLAB_KERNELS=py   force the numpy fallback
  unset               use the extension when importable, else numpy

The chosen backend's functions are re-exported here; everything else in
the package imports from this module only.
"""

import os

from . import _kernels_np

_choice = os.environ.get("NLSLAB_KERNELS", "").strip().lower()

if _choice == "py":
    _impl = _kernels_np
elif _choice == "cy":
    from . import _kernels_cy as _impl
elif _choice == "":
    try:
        from . import _kernels_cy as _impl
    except ImportError:
        _impl = _kernels_np
else:
    raise RuntimeError(f"NLSLAB_KERNELS must be 'py' or 'cy', got {_choice!r}")

BACKEND = _impl.NAME

abs2 = _impl.abs2
nonlinear_phase_inplace = _impl.nonlinear_phase_inplace
multiply_inplace = _impl.multiply_inplace
sum_abs2 = _impl.sum_abs2
sum_abs4 = _impl.sum_abs4
weighted_sum_abs2 = _impl.weighted_sum_abs2
