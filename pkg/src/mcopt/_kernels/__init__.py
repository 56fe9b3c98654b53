"""Hot loops over the Boolean cube.

Every kernel exists twice: a numba ``@njit`` version and a pure-numpy
version with identical signatures. The numba path is used unless
``MCOPT_NUMBA=0`` is set or numba cannot be imported. ``BACKEND`` names the
active one; both modules stay importable so they can be compared directly.

Conventions shared by all kernels:

* ``bits`` is a ``(N, m)`` uint8 array with 1 for a +1 coordinate and 0 for -1.
* A cell index over coordinates ``S = (s_0 < s_1 < ...)`` reads the bits of
  ``S`` as a binary number, ``s_0`` being the most significant bit.
"""
from .. import _config
from . import numpy_impl

BACKEND = "numpy"
_impl = numpy_impl

if _config.USE_NUMBA:
    try:
        from . import numba_impl
    except ImportError:  # pragma: no cover - numba is a declared dependency
        numba_impl = None
    else:
        _impl = numba_impl
        BACKEND = "numba"

cell_index = _impl.cell_index
subset_sse = _impl.subset_sse
subset_abs_mass = _impl.subset_abs_mass
fwht = _impl.fwht

__all__ = ["BACKEND", "cell_index", "subset_sse", "subset_abs_mass", "fwht"]
