# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled hot kernels: propagator rotations, low-mode trig sums, J0.

Semantics must match kgz2d._kernels.numpy_impl exactly (same formulas,
same branch points); tests compare the two backends to ~1e-13.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, sqrt, cosl, sinl, fabsl

cnp.import_array()


def rotate_pair(cnp.complex128_t[:, ::1] u, cnp.complex128_t[:, ::1] v,
                double[:, ::1] omega, double dt):
    """Exact flow of u'' + omega^2 u = 0 over time dt, in place.

    u <- cos(omega dt) u + sin(omega dt)/omega v   (dt v at omega = 0)
    v <- -omega sin(omega dt) u + cos(omega dt) v
    """
    cdef Py_ssize_t i, j, n0 = u.shape[0], n1 = u.shape[1]
    cdef double w, c, s, k
    cdef double complex a, b
    for i in range(n0):
        for j in range(n1):
            w = omega[i, j]
            if w == 0.0:
                c = 1.0
                s = 0.0
                k = dt
            else:
                c = cos(w * dt)
                s = sin(w * dt)
                k = s / w
            a = u[i, j]
            b = v[i, j]
            u[i, j] = c * a + k * b
            v[i, j] = -w * s * a + c * b


def lowmode_sum(double[::1] eta1, double[::1] eta2,
                double[::1] amp_re, double[::1] amp_im,
                double[::1] x1, double[::1] x2,
                double[::1] out):
    """out[k] = sum_i Re( (amp_re_i + i amp_im_i) exp(i x_k . eta_i) )."""
    cdef Py_ssize_t k, i, npts = x1.shape[0], nmod = eta1.shape[0]
    cdef double acc, ph, a, b
    for k in range(npts):
        a = x1[k]
        b = x2[k]
        acc = 0.0
        for i in range(nmod):
            ph = a * eta1[i] + b * eta2[i]
            acc += amp_re[i] * cos(ph) - amp_im[i] * sin(ph)
        out[k] = acc


cdef long double _j0_series(long double s) noexcept nogil:
    # sum_k (-(s^2/4))^k / (k!)^2 in extended precision; usable for s <= 14
    cdef long double q = <long double> (-0.25) * s * s
    cdef long double term = 1.0, acc = 1.0
    cdef long double tol = 1e-22
    cdef int k
    for k in range(1, 200):
        term *= q / (<long double> k * <long double> k)
        acc += term
        if fabsl(term) < tol * (1.0 + fabsl(acc)):
            break
    return acc


cdef double _j0_hankel(double s) noexcept nogil:
    # Hankel asymptotic expansion; truncation error < 2e-13 for s >= 14
    cdef double z = 1.0 / (8.0 * s)
    cdef double z2 = z * z
    cdef double p, q, term, num
    cdef int k
    # P: sum_k (-1)^k [prod_{j<=2k}(2j-1)^2] / (2k)! (8s)^{-2k}
    # Q: -sum_k (-1)^k [prod_{j<=2k+1}(2j-1)^2] / (2k+1)! (8s)^{-2k-1}
    term = 1.0
    p = 1.0
    for k in range(1, 13):
        num = (4.0 * k - 3.0) * (4.0 * k - 1.0)
        term *= -(num * num) * z2 / ((2.0 * k - 1.0) * (2.0 * k))
        p += term
    term = -z
    q = -z
    for k in range(1, 13):
        num = (4.0 * k - 1.0) * (4.0 * k + 1.0)
        term *= -(num * num) * z2 / ((2.0 * k) * (2.0 * k + 1.0))
        q += term
    cdef double chi = s - 0.78539816339744830961  # pi/4
    return sqrt(2.0 / (3.14159265358979323846 * s)) * (p * cos(chi) - q * sin(chi))


def j0_array(double[::1] s, double[::1] out):
    """Bessel J0 elementwise; series for s <= 14, Hankel expansion beyond."""
    cdef Py_ssize_t i, n = s.shape[0]
    for i in range(n):
        if s[i] <= 14.0:
            out[i] = <double> _j0_series(<long double> s[i])
        else:
            out[i] = _j0_hankel(s[i])
