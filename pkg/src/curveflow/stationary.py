"""Stationary curves of the flow family: circles and the super-lemniscates.

For parameter c > 0 the curvature of a non-circular stationary curve is, up
to scaling and shifts, k(s) = cn(s; 1/2) / sqrt(c), with tangential angle

    theta(s) = sqrt(2/c) * arcsin( sn(s; 1/2) / sqrt(2) ).

Such a profile closes up after one curvature period 4 K(1/2) exactly when
the closure integral below vanishes, which happens precisely at the
countable parameter family c_j = 2 / (4j - 1)^2.  The j = 1 member is the
lemniscate of Bernoulli; all members have turning number zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .elliptic import closure_integral, complete_K, jacobi_cn_sn_dn
from .geometry import (
    ClosedCurve,
    curvature_derivatives,
    metrics,
    tangent_normal_curvature,
)

__all__ = [
    "SuperLemniscateSpec",
    "OdeSolutionParams",
    "HomotheticCheck",
    "c_parameter",
    "build_super_lemniscate",
    "closure_residual",
    "solve_curvature_ode",
    "curvature_profile",
    "homothetic_identity_check",
]


def c_parameter(j: int) -> float:
    """Parameter value c_j = 2 / (4j - 1)^2 of the j-th closed profile."""
    if j < 1:
        raise ValueError("j must be a positive integer")
    return 2.0 / (4.0 * j - 1.0) ** 2


@dataclass(frozen=True)
class SuperLemniscateSpec:
    """Construction request for the j-th super-lemniscate.

    ``c`` is 2/(4j-1)^2; ``period`` is one curvature period 4 K(1/2) in
    arclength, which is the full length of the single cover.
    """

    j: int
    samples: int = 2048

    def __post_init__(self):
        if self.j < 1:
            raise ValueError("j must be a positive integer")
        if self.samples < 512 or self.samples % 2 != 0:
            raise ValueError("samples must be an even integer >= 512")

    @property
    def c(self) -> float:
        return c_parameter(self.j)

    @property
    def period(self) -> float:
        return 4.0 * complete_K(0.5)

    @property
    def theta_max(self) -> float:
        """Half-width of the tangential angle range, sqrt(2/c) * pi/4."""
        return np.sqrt(2.0 / self.c) * np.pi / 4.0


@dataclass(frozen=True)
class OdeSolutionParams:
    """Parameters (alpha, beta) with k(s) = (alpha/sqrt(c)) cn(alpha s + beta; 1/2)."""

    c: float
    alpha: float
    beta: float
    k0: float
    k1: float


@dataclass(frozen=True)
class HomotheticCheck:
    residual: float
    coefficient: float
    support: np.ndarray


def closure_residual(c: float) -> float:
    """Half the closure integral at t = 1/sqrt(2c).

    This is the obstruction to the curvature profile closing up; it vanishes
    (|.| < 1e-8) exactly at the parameters c_j.
    """
    if c <= 0.0:
        raise ValueError("c must be positive")
    return 0.5 * closure_integral(1.0 / np.sqrt(2.0 * c))


def _theta_of_s(s: np.ndarray, c: float) -> np.ndarray:
    _, sn, _ = jacobi_cn_sn_dn(s, 0.5)
    return np.sqrt(2.0 / c) * np.arcsin(np.clip(sn / np.sqrt(2.0), -1.0, 1.0))


def curvature_profile(spec: SuperLemniscateSpec):
    """Arclength grid, curvature and tangential angle of the profile."""
    length = spec.period
    s = length * np.arange(spec.samples) / spec.samples
    cn, _, _ = jacobi_cn_sn_dn(s, 0.5)
    k = cn / np.sqrt(spec.c)
    return s, k, _theta_of_s(s, spec.c)


def build_super_lemniscate(spec: SuperLemniscateSpec) -> ClosedCurve:
    """Construct the closed curve of length 4 K(1/2) with the stated curvature.

    The unit tangent (cos theta, sin theta) is integrated by its spectral
    antiderivative (exact per Fourier mode), so the samples are uniform in
    arclength and the positions carry only aliasing error.  Closure is never
    enforced: the closure gap is itself the quantity under test.
    """
    n = spec.samples
    _, _, theta = curvature_profile(spec)
    t = np.exp(1j * theta)
    # gamma(s) = mean(T) s + periodic antiderivative of (T - mean)
    that = np.fft.fft(t)
    tbar = that[0] / n
    wave = np.fft.fftfreq(n, d=1.0 / n)
    ghat = np.zeros_like(that)
    nz = wave != 0
    # arclength grid spacing is period/n, parameter spacing 2 pi / n
    scale = spec.period / (2.0 * np.pi)
    ghat[nz] = scale * that[nz] / (1j * wave[nz])
    gper = np.fft.ifft(ghat)
    s = spec.period * np.arange(n) / n
    z = tbar * s + gper - gper[0]
    z -= z.mean()  # centre at the arclength centroid = symmetry centre
    return ClosedCurve(np.stack([z.real, z.imag], axis=1))


def closure_gap(spec: SuperLemniscateSpec) -> float:
    """Norm of the full-period tangent integral |gamma(L) - gamma(0)|.

    Nonzero values mean the curvature profile does not close up; the gap is
    the mean of the unit tangent over one period times the period.
    """
    _, _, theta = curvature_profile(spec)
    t = np.exp(1j * theta)
    return float(abs(t.mean()) * spec.period)


def stationarity_residual(curve: ClosedCurve, c: float) -> float:
    """Sup norm of k_ss + c k^3 from spectral differentiation of the curve.

    The position spectrum is truncated at the roundoff floor first: the
    fourth-order derivative chain otherwise amplifies white sample noise by
    (N/2)^4, drowning the residual for well-resolved analytic curves.
    """
    k, _, k_ss, _ = curvature_derivatives(curve, rel_floor=1e-15)
    return float(np.max(np.abs(k_ss + c * k**3)))


def solve_curvature_ode(c: float, k0: float, k1: float) -> OdeSolutionParams:
    """Match (alpha, beta) so that (alpha/sqrt(c)) cn(alpha s + beta; 1/2)
    solves w'' + c w^3 = 0 with w(0) = k0, w'(0) = k1.

    Branches follow the uniqueness argument: reduce to k1 <= 0 by the
    reflection s -> -s, then split on k0 = 0 (where beta = K(1/2)) and
    k0 != 0 (root finding over beta in (-K, K)).
    """
    if c <= 0.0:
        raise ValueError("c must be positive")
    if k0 == 0.0 and k1 == 0.0:
        raise ValueError("trivial initial data gives the zero solution")

    if k1 > 0.0:
        flipped = solve_curvature_ode(c, k0, -k1)
        return OdeSolutionParams(c=c, alpha=flipped.alpha, beta=-flipped.beta,
                                 k0=k0, k1=k1)

    big_k = complete_K(0.5)
    if k0 == 0.0:
        alpha = np.sqrt(-k1 * np.sqrt(2.0 * c))
        beta = big_k
        return OdeSolutionParams(c=c, alpha=alpha, beta=beta, k0=k0, k1=k1)

    sqc = np.sqrt(c)

    def matching(t: float) -> float:
        cn, sn, dn = jacobi_cn_sn_dn(t, 0.5)
        return -sqc * k0 * k0 * sn * dn / (cn * cn) - k1

    eps = 1e-12
    beta = brentq(matching, -big_k + eps, big_k - eps, xtol=1e-15, rtol=8.9e-16)
    cn_b, _, _ = jacobi_cn_sn_dn(beta, 0.5)
    alpha = sqc * k0 / cn_b
    return OdeSolutionParams(c=c, alpha=alpha, beta=beta, k0=k0, k1=k1)


def reconstruct_curvature(params: OdeSolutionParams, s) -> np.ndarray:
    cn, _, _ = jacobi_cn_sn_dn(params.alpha * np.asarray(s) + params.beta, 0.5)
    return params.alpha / np.sqrt(params.c) * cn


def homothetic_identity_check(curve: ClosedCurve, which: str) -> HomotheticCheck:
    """Verify one of the self-similarity identities on a given curve.

    ``lemniscate_mu``:       sup-norm residual of k_ss + (2/9) k^3.
    ``lemniscate_support``:  fit A in h = A k^3, where h = <gamma, N> about
    the arclength centroid, using only points with |k| > 0.1 max|k|; the
    residual is the sup norm of h - A k^3 over the fitted region.
    """
    if which == "lemniscate_mu":
        if metrics(curve).omega != 0:
            raise ValueError(
                "the curvature identity applies to turning-number-zero curves"
            )
        res = stationarity_residual(curve, 2.0 / 9.0)
        return HomotheticCheck(residual=res, coefficient=-2.0 / 9.0,
                               support=np.array([]))
    if which != "lemniscate_support":
        raise ValueError(f"unknown check mode {which!r}")

    from .geometry import _speed_and_derivs

    _, normal, k = tangent_normal_curvature(curve)
    _, _, _, v = _speed_and_derivs(curve)
    dx = 2.0 * np.pi / curve.n
    length = float(np.sum(v) * dx)
    centroid = (curve.points * (v * dx / length)[:, None]).sum(axis=0)
    rel = curve.points - centroid
    h = np.einsum("ij,ij->i", rel, normal)
    mask = np.abs(k) > 0.1 * np.max(np.abs(k))
    k3 = k[mask] ** 3
    coeff = float(np.dot(h[mask], k3) / np.dot(k3, k3))
    residual = float(np.max(np.abs(h[mask] - coeff * k3)))
    return HomotheticCheck(residual=residual, coefficient=coeff, support=h)
