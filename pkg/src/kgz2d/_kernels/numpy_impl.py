"""Pure-numpy implementations of the hot kernels.

Mirrors kgz2d._kernels._core function by function; used when the compiled
extension is unavailable or disabled via KGZ2D_PURE_PYTHON=1.
"""

import numpy as np

_J0_SPLIT = 14.0


def rotate_pair(u, v, omega, dt):
    """Exact flow of u'' + omega^2 u = 0 over time dt, in place."""
    c = np.cos(omega * dt)
    s = np.sin(omega * dt)
    with np.errstate(invalid="ignore", divide="ignore"):
        k = np.where(omega > 0.0, s / np.where(omega > 0.0, omega, 1.0), dt)
    a = u.copy()
    u[...] = c * a + k * v
    v[...] = -omega * s * a + c * v


def lowmode_sum(eta1, eta2, amp_re, amp_im, x1, x2, out):
    """out[k] = sum_i Re((amp_re_i + i amp_im_i) exp(i x_k . eta_i))."""
    # chunk over points to bound the K x M temporary
    npts = x1.shape[0]
    step = max(1, int(4e6 // max(1, eta1.shape[0])))
    for lo in range(0, npts, step):
        hi = min(npts, lo + step)
        ph = np.outer(x1[lo:hi], eta1) + np.outer(x2[lo:hi], eta2)
        out[lo:hi] = np.cos(ph) @ amp_re - np.sin(ph) @ amp_im
    return out


def _j0_series(s):
    s = np.asarray(s, dtype=np.longdouble)
    q = -0.25 * s * s
    term = np.ones_like(s)
    acc = np.ones_like(s)
    for k in range(1, 200):
        term = term * q / np.longdouble(k * k)
        acc = acc + term
        if np.all(np.abs(term) < 1e-22 * (1.0 + np.abs(acc))):
            break
    return acc.astype(np.float64)


def _j0_hankel(s):
    z = 1.0 / (8.0 * s)
    z2 = z * z
    term = np.ones_like(s)
    p = np.ones_like(s)
    for k in range(1, 13):
        num = (4.0 * k - 3.0) * (4.0 * k - 1.0)
        term = term * (-(num * num) * z2 / ((2.0 * k - 1.0) * (2.0 * k)))
        p += term
    term = -z
    q = -z.copy()
    for k in range(1, 13):
        num = (4.0 * k - 1.0) * (4.0 * k + 1.0)
        term = term * (-(num * num) * z2 / ((2.0 * k) * (2.0 * k + 1.0)))
        q += term
    chi = s - np.pi / 4.0
    return np.sqrt(2.0 / (np.pi * s)) * (p * np.cos(chi) - q * np.sin(chi))


def j0_array(s, out):
    """Bessel J0 elementwise; series for s <= 14, Hankel expansion beyond."""
    s = np.asarray(s, dtype=np.float64)
    low = s <= _J0_SPLIT
    if low.any():
        out[low] = _j0_series(s[low])
    if (~low).any():
        out[~low] = _j0_hankel(s[~low])
    return out
