"""Legendre elliptic integrals, Jacobi elliptic functions, and a cosine moment
integral with half-integer weight.

Only the parameter range 0 < m < 1 is supported.  Conventions follow
DLMF chapter 19/22 with the *parameter* m (not the modulus k = sqrt(m)):

    F(x; m) = int_0^x dtheta / sqrt(1 - m sin^2 theta)
    K(m)    = F(pi/2; m)
    am      = inverse of F in its first argument
    cn = cos(am), sn = sin(am), dn = sqrt(1 - m sn^2)

The amplitude is computed by the descending Landen/AGM recursion
(https://dlmf.nist.gov/22.20#ii) while F is evaluated by adaptive
Gauss-Kronrod quadrature of its defining integral.  The two independent
routes let the test suite verify the round trip F(am(u)) = u.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad

__all__ = [
    "complete_K",
    "incomplete_F",
    "jacobi_am",
    "jacobi_cn_sn_dn",
    "closure_integral",
]

# Absolute working tolerance for the special functions.
_TOL = 1e-12
# Quadrature tolerance for the cosine moment integral.
_QUAD_TOL = 1e-10


def _check_parameter(m: float) -> float:
    m = float(m)
    if not (0.0 < m < 1.0):
        raise ValueError(f"parameter m must lie in (0, 1), got {m}")
    return m


def complete_K(m: float) -> float:
    """Complete elliptic integral of the first kind, K(m) = F(pi/2; m).

    Evaluated through the arithmetic-geometric mean,
    K(m) = pi / (2 AGM(1, sqrt(1-m))).
    """
    m = _check_parameter(m)
    a, b = 1.0, math.sqrt(1.0 - m)
    for _ in range(64):
        if abs(a - b) <= 4e-16 * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (2.0 * a)


def incomplete_F(x: float, m: float) -> float:
    """Incomplete elliptic integral of the first kind F(x; m).

    Defined for all real x through the quasi-periodicity
    F(x + pi; m) = F(x; m) + 2 K(m); strictly increasing and odd in x.
    """
    m = _check_parameter(m)
    x = float(x)
    # reduce to x0 in [-pi/2, pi/2]
    n = math.floor((x + math.pi / 2.0) / math.pi)
    x0 = x - n * math.pi
    val, _ = quad(
        lambda th: 1.0 / math.sqrt(1.0 - m * math.sin(th) ** 2),
        0.0,
        x0,
        epsabs=_TOL,
        epsrel=_TOL,
    )
    if n == 0:
        return val
    return val + 2.0 * n * complete_K(m)


def jacobi_am(u, m: float):
    """Jacobi amplitude am(u; m), the inverse of F(.; m).

    Accepts a scalar or an ndarray for ``u`` and is valid for all real
    arguments.  Descending Landen/AGM recursion; ~quadratic convergence,
    at most a dozen levels at double precision.
    """
    m = _check_parameter(m)
    u_arr = np.asarray(u, dtype=float)
    a = [1.0]
    b = [math.sqrt(1.0 - m)]
    c = [math.sqrt(m)]
    while abs(c[-1]) > 1e-15 * a[-1] and len(a) < 64:
        an, bn = a[-1], b[-1]
        a.append(0.5 * (an + bn))
        b.append(math.sqrt(an * bn))
        c.append(0.5 * (an - bn))
    n = len(a) - 1
    phi = (2.0**n) * a[n] * u_arr
    for i in range(n, 0, -1):
        s = np.clip(c[i] / a[i] * np.sin(phi), -1.0, 1.0)
        phi = 0.5 * (phi + np.arcsin(s))
    if np.isscalar(u) or np.ndim(u) == 0:
        return float(phi)
    return phi


def jacobi_cn_sn_dn(u, m: float):
    """Jacobi elliptic functions (cn, sn, dn) at argument u, parameter m."""
    m = _check_parameter(m)
    phi = jacobi_am(u, m)
    sn = np.sin(phi)
    cn = np.cos(phi)
    dn = np.sqrt(1.0 - m * sn**2)
    if np.isscalar(u) or np.ndim(u) == 0:
        return float(cn), float(sn), float(dn)
    return cn, sn, dn


def _closure_integrand(v: float, t: float) -> float:
    # after cos x = u^2 and u = 1 - v^2 the integrand is analytic on [0, 1]
    u = 1.0 - v * v
    w = u * u
    return 4.0 * math.cos(t * math.acos(w)) / math.sqrt((2.0 - v * v) * (1.0 + w))


def closure_integral(t: float) -> float:
    """The even function int_0^{pi/2} cos(t x) / sqrt(cos x) dx.

    The raw integrand has an inverse-square-root singularity at x = pi/2;
    the substitutions cos x = u^2 followed by u = 1 - v^2 produce an
    analytic integrand on [0, 1] which plain adaptive quadrature resolves
    to near machine precision.

    Satisfies the recursion  f(t) = -((2t-3)/(2t-1)) f(t-2)  for t > 1 and
    vanishes exactly at |t| = (4j-1)/2 for positive integers j.
    """
    t = abs(float(t))
    val, _ = quad(
        _closure_integrand,
        0.0,
        1.0,
        args=(t,),
        epsabs=_QUAD_TOL * 1e-2,
        epsrel=_QUAD_TOL * 1e-2,
        limit=500,
    )
    return val
