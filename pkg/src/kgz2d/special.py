"""Bessel J0, its large-argument asymptotics, the regularized sine-Bessel
integral, and the oscillatory phase functions with closed-form derivatives.
"""

from dataclasses import dataclass, field

import numpy as np

from ._kernels import j0_array

__all__ = ["bessel_j0", "bessel_j0_ode_residual", "first_j0_zero",
           "asymptotic_gap", "QuadratureSpec", "sine_bessel_integral",
           "phase_eval", "PHASE_KINDS"]


def bessel_j0(s):
    """Bessel function of the first kind of order zero, s >= 0.

    Power series below 14, Hankel asymptotic expansion beyond; accurate to
    about 1e-13 absolute throughout.
    """
    arr = np.atleast_1d(np.asarray(s, dtype=np.float64))
    if np.any(arr < 0.0):
        raise ValueError("bessel_j0 requires s >= 0")
    flat = np.ascontiguousarray(arr.ravel())
    out = np.empty_like(flat)
    j0_array(flat, out)
    out = out.reshape(arr.shape)
    return float(out[0]) if np.isscalar(s) or np.ndim(s) == 0 else out


def _j0_series_derivatives(s):
    """(J0, J0', J0'') by the power series; valid for moderate s."""
    s = np.asarray(s, dtype=np.longdouble)
    q = -0.25 * s * s
    term = np.ones_like(s)
    f = np.ones_like(s)
    fp = np.zeros_like(s)
    fpp = np.zeros_like(s)
    # J0 = sum c_k s^(2k);  c_k = (-1/4)^k / (k!)^2
    ck = np.longdouble(1.0)
    s2 = s * s
    pow_s = np.ones_like(s)
    for k in range(1, 120):
        ck = ck * np.longdouble(-0.25) / np.longdouble(k * k)
        pow_s = pow_s * s2
        f += ck * pow_s
        fp += ck * (2 * k) * pow_s / np.where(s != 0, s, 1.0)
        fpp += ck * (2 * k) * (2 * k - 1) * pow_s / np.where(s != 0, s2, 1.0)
        if np.all(np.abs(ck * pow_s) < 1e-24):
            break
    return f.astype(float), fp.astype(float), fpp.astype(float)


def bessel_j0_ode_residual(s):
    """Residual of s^2 J0'' + s J0' + s^2 J0 with derivatives by the series."""
    s = np.asarray(s, dtype=np.float64)
    f, fp, fpp = _j0_series_derivatives(s)
    return s**2 * fpp + s * fp + s**2 * f


def first_j0_zero(tol=1e-12):
    """First positive zero of the implemented J0, by bisection."""
    lo, hi = 2.0, 3.0
    flo = bessel_j0(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = bessel_j0(mid)
        if flo * fm <= 0.0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def asymptotic_gap(s):
    """|J0(s) - sqrt(2/(pi s)) cos(s - pi/4)| * s^(3/2) for s >= 4."""
    s = np.asarray(s, dtype=np.float64)
    if np.any(s < 4.0):
        raise ValueError("asymptotic_gap requires s >= 4")
    lead = np.sqrt(2.0 / (np.pi * s)) * np.cos(s - np.pi / 4.0)
    return np.abs(bessel_j0(s) - lead) * s**1.5


@dataclass(frozen=True)
class QuadratureSpec:
    """Abel-regularized improper-integral quadrature description."""

    step: float = 2e-3
    tail_cut: float = 40.0                      # truncate at tail_cut / eps
    eps_schedule: tuple = (0.02, 0.01, 0.005)   # strictly decreasing to 0

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("step must be positive")
        eps = self.eps_schedule
        if len(eps) < 3 or any(b >= a for a, b in zip(eps, eps[1:])):
            raise ValueError("eps schedule must strictly decrease over >= 3 values")


def _abel_integral(a, b, eps, spec):
    """Simpson quadrature of int_0^S sin(as) J0(bs) exp(-eps s) ds."""
    S = spec.tail_cut / eps
    nsub = int(np.ceil(S / spec.step / 2.0)) * 2
    s = np.linspace(0.0, S, nsub + 1)
    f = np.sin(a * s) * bessel_j0(b * s) * np.exp(-eps * s)
    w = np.ones(nsub + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return float(np.dot(w, f) * (s[1] - s[0]) / 3.0)


def sine_bessel_integral(a, b, spec: QuadratureSpec = QuadratureSpec(),
                         return_extrapolants=False):
    """int_0^inf sin(as) J0(bs) ds = (a^2 - b^2)^(-1/2) for a > b > 0.

    The conditionally convergent integral is summed with an exp(-eps s)
    regularizer and Richardson-extrapolated along the eps schedule (the
    regularized value is analytic in eps near 0).
    """
    if not a > b:
        raise ValueError(f"identity requires a > b > 0, got a={a}, b={b}")
    if b < 0:
        raise ValueError("b must be nonnegative")
    vals = [_abel_integral(a, b, eps, spec) for eps in spec.eps_schedule]
    # Richardson on the (here: halving) eps ladder, eliminating eps, eps^2, ...
    table = [list(vals)]
    eps = list(spec.eps_schedule)
    for lvl in range(1, len(vals)):
        prev = table[-1]
        row = []
        for i in range(len(prev) - 1):
            r = eps[i] / eps[i + lvl]
            row.append((r * prev[i + 1] - prev[i]) / (r - 1.0))
        table.append(row)
    result = table[-1][0]
    if return_extrapolants:
        return result, table
    return result


PHASE_KINDS = ("phi1+", "phi1-", "phi2+", "phi2-")


def _bracket(w1, w2):
    return np.sqrt(1.0 + w1 * w1 + w2 * w2)


def phase_eval(kind, xi, eta, derivatives=0):
    """Oscillatory phase Phi and, optionally, its eta-derivatives.

    phi1(+/-) = <xi> + <xi-eta> +/- |eta|
    phi2(+/-) = <xi> - <xi-eta> +/- |eta|

    derivatives=1 adds the eta-gradient (shape (2,)), derivatives=2 the
    Hessian ((2,2)), derivatives=3 the third-derivative tensor ((2,2,2)).
    All in closed form; eta = 0 is rejected when derivatives are requested.
    """
    if kind not in PHASE_KINDS:
        raise ValueError(f"kind must be one of {PHASE_KINDS}")
    xi = np.asarray(xi, dtype=np.float64)
    eta = np.asarray(eta, dtype=np.float64)
    sgn_kg = +1.0 if kind.startswith("phi1") else -1.0
    sgn_eta = +1.0 if kind.endswith("+") else -1.0

    w = xi - eta
    bw = _bracket(w[0], w[1])
    bxi = _bracket(xi[0], xi[1])
    r = np.hypot(eta[0], eta[1])
    value = bxi + sgn_kg * bw + sgn_eta * r
    if derivatives == 0:
        return value
    if r == 0.0:
        raise ValueError("eta-derivatives are singular at eta = 0")

    ehat = eta / r
    grad = sgn_kg * (-w / bw) + sgn_eta * ehat
    if derivatives == 1:
        return value, grad

    eye = np.eye(2)
    hess_bw = eye / bw - np.outer(w, w) / bw**3
    hess_r = (eye - np.outer(ehat, ehat)) / r
    hess = sgn_kg * hess_bw + sgn_eta * hess_r
    if derivatives == 2:
        return value, grad, hess

    # third derivatives: d3/deta^3 of <xi-eta> = -(d3/dw^3 <w>), plus |eta| part
    d3_bw = np.zeros((2, 2, 2))
    d3_r = np.zeros((2, 2, 2))
    for A in range(2):
        for B in range(2):
            for C in range(2):
                d3_bw[A, B, C] = (
                    -(eye[A, B] * w[C] + eye[A, C] * w[B] + eye[B, C] * w[A]) / bw**3
                    + 3.0 * w[A] * w[B] * w[C] / bw**5)
                d3_r[A, B, C] = (
                    -(eye[A, B] * ehat[C] + eye[A, C] * ehat[B] + eye[B, C] * ehat[A])
                    + 3.0 * ehat[A] * ehat[B] * ehat[C]) / r**2
    third = sgn_kg * (-d3_bw) + sgn_eta * d3_r
    return value, grad, hess, third
