"""Periodic spectral grid with continuum-matching transform conventions.

The discrete transform is scaled so that continuum formulas transcribe
verbatim:

    fourier coefficients   u_hat(xi_j) = dx^2 sum_x u(x) exp(-i x.xi_j)
    inversion              u(x) = (dxi^2 / 4 pi^2) sum_j u_hat(xi_j) exp(i x.xi_j)
    Plancherel             ||u|| = (1/2pi) ||u_hat||      (Riemann-sum norms)
    products               fg  <->  (dxi^2 / 4 pi^2) circular convolution

Physical coordinates run over [-L, L) with N samples per axis; the frequency
lattice is xi_j = pi j / L, j in [-N/2, N/2), stored in FFT order. Spectra
are plain complex ndarrays; the grid object carries all lattice metadata.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft as sfft

__all__ = [
    "SpectralGrid",
    "smooth_bump",
    "band_cutoff",
    "band_cutoff_le",
]


def _bump_transition(s):
    """Smooth decreasing transition: 1 at s<=1, 0 at s>=2, C-infinity."""
    s = np.asarray(s, dtype=np.float64)
    out = np.zeros_like(s)
    out[s <= 1.0] = 1.0
    mid = (s > 1.0) & (s < 2.0)
    sm = s[mid]
    a = np.exp(-1.0 / (2.0 - sm))  # h(2-s)
    b = np.exp(-1.0 / (sm - 1.0))  # h(s-1)
    out[mid] = a / (a + b)
    return out


def smooth_bump(x):
    """Radial cutoff psi: 1 on |x|<=1, 0 on |x|>=2, smooth in between."""
    return _bump_transition(np.abs(np.asarray(x, dtype=np.float64)))


def band_cutoff(x, k):
    """Dyadic annulus cutoff phi_k(x) = psi(x/2^k) - psi(x/2^(k-1))."""
    x = np.abs(np.asarray(x, dtype=np.float64))
    return smooth_bump(x / 2.0**k) - smooth_bump(x / 2.0 ** (k - 1))


def band_cutoff_le(x, k):
    """Low cutoff phi_{<=k}(x) = psi(x/2^k)."""
    return smooth_bump(np.abs(np.asarray(x, dtype=np.float64)) / 2.0**k)


@dataclass(frozen=True)
class SpectralGrid:
    """Square periodic grid on [-L, L)^2 with N points per axis.

    N must be even and at least 16. dealias_fraction is the default mask
    fraction used by :meth:`dealias` when none is given.
    """

    L: float
    N: int
    dealias_fraction: float = 2.0 / 3.0

    def __post_init__(self):
        if self.N % 2 != 0 or self.N < 16:
            raise ValueError(f"N must be even and >= 16, got {self.N}")
        if self.L <= 0:
            raise ValueError(f"L must be positive, got {self.L}")
        if not 0.0 < self.dealias_fraction <= 1.0:
            raise ValueError("dealias_fraction must lie in (0, 1]")

    @property
    def dx(self):
        return 2.0 * self.L / self.N

    @property
    def dxi(self):
        return np.pi / self.L

    @cached_property
    def x(self):
        """1-d physical coordinates, -L .. L - dx."""
        return -self.L + self.dx * np.arange(self.N)

    @cached_property
    def X1(self):
        return np.broadcast_to(self.x[:, None], (self.N, self.N))

    @cached_property
    def X2(self):
        return np.broadcast_to(self.x[None, :], (self.N, self.N))

    @cached_property
    def r(self):
        """Radius |x| on the grid."""
        return np.hypot(self.X1, self.X2)

    @cached_property
    def xi(self):
        """1-d frequency lattice in FFT order, xi_j = pi j / L."""
        return 2.0 * np.pi * sfft.fftfreq(self.N, d=self.dx)

    @cached_property
    def XI1(self):
        return np.broadcast_to(self.xi[:, None], (self.N, self.N))

    @cached_property
    def XI2(self):
        return np.broadcast_to(self.xi[None, :], (self.N, self.N))

    @cached_property
    def xi_abs(self):
        """|xi| on the lattice."""
        return np.hypot(self.XI1, self.XI2)

    @cached_property
    def xi_bracket(self):
        """Japanese bracket <xi> = sqrt(1 + |xi|^2)."""
        return np.sqrt(1.0 + self.xi_abs**2)

    @cached_property
    def _origin_phase(self):
        # (-1)^(j1+j2): accounts for the box origin at -L so that
        # coefficients approximate the continuum transform over [-L, L)^2
        sign = np.where(np.arange(self.N) % 2 == 0, 1.0, -1.0)
        return np.outer(sign, sign)

    @cached_property
    def nyquist_mask(self):
        """False on the Nyquist row/column (j = -N/2)."""
        keep = np.ones(self.N, dtype=bool)
        keep[self.N // 2] = False
        return np.outer(keep, keep)

    # -- transforms ------------------------------------------------------

    def forward(self, u):
        """Continuum-scaled Fourier coefficients of a physical field."""
        u = np.asarray(u)
        if u.shape != (self.N, self.N):
            raise ValueError(f"field shape {u.shape} does not match grid {(self.N, self.N)}")
        return (self.dx**2) * self._origin_phase * sfft.fft2(u, workers=1)

    def inverse(self, spec):
        """Physical field from coefficients (real part; use inverse_c for complex)."""
        return self.inverse_c(spec).real

    def inverse_c(self, spec):
        spec = np.asarray(spec)
        if spec.shape != (self.N, self.N):
            raise ValueError(f"spectrum shape {spec.shape} does not match grid {(self.N, self.N)}")
        return sfft.ifft2(spec * self._origin_phase, workers=1) / self.dx**2

    # -- norms -----------------------------------------------------------

    def norm_phys(self, u):
        """L^2(dx) norm as a Riemann sum."""
        return float(np.sqrt(self.dx**2 * np.sum(np.abs(u) ** 2)))

    def norm_spec(self, spec):
        """L^2(dxi) norm of coefficients as a Riemann sum."""
        return float(np.sqrt(self.dxi**2 * np.sum(np.abs(spec) ** 2)))

    def inner_phys(self, u, v):
        return complex(self.dx**2 * np.sum(np.conj(u) * v))

    def integral(self, u):
        """Box integral dx^2 sum u; equals u_hat(0) for real fields."""
        return float(self.dx**2 * np.sum(u))

    # -- multipliers -----------------------------------------------------

    _SYMBOLS = ("abs", "bracket", "inv_bracket", "abs2", "i_xi1", "i_xi2")

    def symbol(self, name):
        """Named multiplier symbol evaluated on the lattice."""
        if name == "abs":
            return self.xi_abs
        if name == "bracket":
            return self.xi_bracket
        if name == "inv_bracket":
            return 1.0 / self.xi_bracket
        if name == "abs2":
            return self.xi_abs**2
        if name == "i_xi1":
            return 1j * self.XI1
        if name == "i_xi2":
            return 1j * self.XI2
        raise ValueError(f"unknown symbol {name!r}; expected one of {self._SYMBOLS}")

    def multiplier(self, spec, symbol):
        """Apply a Fourier multiplier; Nyquist row zeroed afterwards.

        symbol is a name from :attr:`_SYMBOLS` or a lattice-shaped array.
        Unbounded symbols (non-finite anywhere on the lattice) are rejected.
        """
        sym = self.symbol(symbol) if isinstance(symbol, str) else np.asarray(symbol)
        if not np.all(np.isfinite(sym)):
            raise ValueError("multiplier symbol is unbounded on the lattice")
        return np.where(self.nyquist_mask, sym * spec, 0.0)

    def derivative(self, u, axis):
        """Spectral partial derivative of a physical field along axis 0 or 1."""
        name = "i_xi1" if axis == 0 else "i_xi2"
        out = self.inverse_c(self.multiplier(self.forward_any(u), name))
        return out.real if np.isrealobj(u) else out

    def laplacian(self, u):
        out = self.inverse_c(self.multiplier(self.forward_any(u), -self.xi_abs**2))
        return out.real if np.isrealobj(u) else out

    def forward_any(self, u):
        """forward() that also accepts complex physical fields."""
        u = np.asarray(u)
        if np.isrealobj(u):
            return self.forward(u)
        return (self.dx**2) * self._origin_phase * sfft.fft2(u, workers=1)

    # -- Littlewood-Paley ------------------------------------------------

    def lp_project(self, spec, k):
        """P_k: restrict to the dyadic band |xi| ~ 2^k."""
        return band_cutoff(self.xi_abs, k) * spec

    def lp_project_le(self, spec, k):
        """P_{<=k}: smooth restriction to |xi| <= 2^(k+1)."""
        return band_cutoff_le(self.xi_abs, k) * spec

    def lp_band_range(self):
        """Dyadic indices k with phi_k not identically zero on the lattice."""
        ximin = self.dxi
        ximax = float(np.max(self.xi_abs))
        klo = int(np.floor(np.log2(ximin))) - 1
        khi = int(np.ceil(np.log2(ximax))) + 1
        return range(klo, khi + 1)

    def lowfreq_split(self, spec, t, p):
        """Time-dependent split u_L + u_H with u_L = psi(xi <t>^p) u.

        The low part is supported in |xi| <= 2 <t>^-p, the high part
        vanishes for |xi| <= <t>^-p, and low + high == spec exactly.
        """
        if p <= 0.0 or p >= 1.0:
            raise ValueError("p must lie in (0, 1)")
        bracket_t = np.sqrt(1.0 + t * t)
        low = smooth_bump(self.xi_abs * bracket_t**p) * spec
        return low, spec - low

    # -- dealiasing ------------------------------------------------------

    def dealias_mask(self, fraction=None):
        frac = self.dealias_fraction if fraction is None else fraction
        cut = frac * (np.pi / self.L) * (self.N // 2)
        keep1 = np.abs(self.xi) <= cut + 1e-12
        return np.outer(keep1, keep1)

    def dealias(self, spec, fraction=None):
        """Zero modes with max(|xi1|,|xi2|) above fraction x Nyquist."""
        return np.where(self.dealias_mask(fraction), spec, 0.0)
