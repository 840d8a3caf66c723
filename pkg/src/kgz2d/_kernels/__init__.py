"""Kernel backend selection.

The compiled Cython core is preferred; the pure-numpy fallback is selected
when the extension is missing or when KGZ2D_PURE_PYTHON=1 is set. Both
expose the same functions with identical numerics.
"""

import os

from . import numpy_impl

if os.environ.get("KGZ2D_PURE_PYTHON", "0") == "1":
    _impl = numpy_impl
    BACKEND = "numpy"
else:
    try:
        from . import _core as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = numpy_impl
        BACKEND = "numpy"

rotate_pair = _impl.rotate_pair
lowmode_sum = _impl.lowmode_sum
j0_array = _impl.j0_array
