"""kgz2d: pseudo-spectral simulation and scattering diagnostics for the
two-dimensional Klein-Gordon-Zakharov system

    -box n = Laplacian |E|^2,        -box E + E = -n E,

with data at t0 = 1 on a periodic box standing in for the plane.
"""

from ._kernels import BACKEND as kernel_backend
from .spectral import SpectralGrid

__version__ = "0.1.0"

__all__ = ["SpectralGrid", "kernel_backend", "__version__"]
