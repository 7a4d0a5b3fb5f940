"""Discrete closed immersed planar curves and their shape diagnostics.

A curve is stored as N samples at the uniform parameter grid
x_i = 2 pi i / N on the periodic parameter circle; closure is implicit in
the index arithmetic.  All differentiation is trigonometric (FFT based),
so every diagnostic converges spectrally on analytic curves.

Conventions fixed once and used everywhere:

* the unit normal is the tangent rotated by +pi/2, which makes the
  curvature +1 on a counterclockwise unit circle (the inward normal for
  positively wound curves);
* arclength derivatives are d/ds = |gamma_x|^{-1} d/dx.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ClosedCurve",
    "CurveMetrics",
    "FourierModes",
    "DegenerateCurveError",
    "TurningNumberError",
    "UndefinedExpansionError",
    "ResolutionWarning",
    "circle",
    "ellipse",
    "tangent_normal_curvature",
    "metrics",
    "resample_by_arclength",
    "fourier_of_curvature",
    "translation_mode_energy",
    "tangent_winding",
    "write_curve_csv",
    "read_curve_csv",
]


class DegenerateCurveError(ValueError):
    """The sampled curve is not immersed (vanishing parameter speed)."""


class TurningNumberError(ValueError):
    """The integral of curvature is too far from an integer multiple of 2 pi."""


class UndefinedExpansionError(ValueError):
    """Curvature Fourier expansion requested for a curve with zero turning."""


class ResolutionWarning(UserWarning):
    """The top third of the position spectrum carries non-negligible energy."""


# fraction of spectral energy tolerated in the top third of the modes
_RESOLUTION_ENERGY_TOL = 1e-10
# relative speed floor below which a curve counts as non-immersed
_IMMERSION_TOL = 1e-9


@dataclass(frozen=True)
class ClosedCurve:
    """Closed planar curve sampled at x_i = 2 pi i / N.

    ``points`` has shape (N, 2) with N even and at least 16.
    """

    points: np.ndarray

    def __post_init__(self):
        # private copy: the stored array is frozen and must not alias caller data
        pts = np.array(self.points, dtype=float, order="C", copy=True)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError("points must have shape (N, 2)")
        n = pts.shape[0]
        if n < 16 or n % 2 != 0:
            raise ValueError(f"need an even sample count N >= 16, got {n}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def x(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n) / self.n

    def z(self) -> np.ndarray:
        """Positions as complex numbers px + i py."""
        return self.points[:, 0] + 1j * self.points[:, 1]


@dataclass(frozen=True)
class CurveMetrics:
    length: float
    area: float
    omega: int
    k_bar: float
    k_osc: float
    k_max_abs: float


@dataclass(frozen=True)
class FourierModes:
    """Fourier amplitudes a_n of k - 1 on the length-2*pi*omega normalisation.

    ``coefficients[i]`` is a_n for n = i - n_max, so the array covers
    n in [-n_max, n_max].  ``e`` is the oscillation integral int (k-1)^2 ds
    of the rescaled curve (equal to K_osc / (2 pi omega)).
    """

    coefficients: np.ndarray
    n_max: int
    omega: int
    e: float

    def a(self, n: int) -> complex:
        if abs(n) > self.n_max:
            raise IndexError(f"|n| must be <= n_max = {self.n_max}")
        return complex(self.coefficients[n + self.n_max])


def _wavenumbers(n: int) -> np.ndarray:
    return np.fft.fftfreq(n, d=1.0 / n)


def _deriv_hat(zhat: np.ndarray, order: int) -> np.ndarray:
    """Multiply a spectrum by (ik)^order, zeroing Nyquist for odd orders."""
    n = zhat.shape[0]
    k = _wavenumbers(n)
    if order % 2 == 1:
        k = k.copy()
        k[n // 2] = 0.0
    return (1j * k) ** order * zhat


def _speed_and_derivs(curve: ClosedCurve):
    z = curve.z()
    zhat = np.fft.fft(z)
    z_x = np.fft.ifft(_deriv_hat(zhat, 1))
    z_xx = np.fft.ifft(_deriv_hat(zhat, 2))
    v = np.abs(z_x)
    vmax = v.max()
    if vmax == 0.0 or v.min() < _IMMERSION_TOL * vmax:
        raise DegenerateCurveError("curve is not immersed: parameter speed vanishes")
    return z, z_x, z_xx, v


def check_resolution(curve: ClosedCurve, stacklevel: int = 3) -> bool:
    """Warn if the top third of the position spectrum is energetic.

    Returns True when the curve looks resolved.
    """
    zhat = np.fft.fft(curve.z())
    zhat = zhat.copy()
    zhat[0] = 0.0
    power = np.abs(zhat) ** 2
    total = power.sum()
    if total == 0.0:
        return True
    k = np.abs(_wavenumbers(curve.n))
    top = power[k >= curve.n / 3.0].sum()
    if top > _RESOLUTION_ENERGY_TOL * total:
        warnings.warn(
            "curve may be under-resolved: top third of the spectrum carries "
            f"{top / total:.2e} of the energy",
            ResolutionWarning,
            stacklevel=stacklevel,
        )
        return False
    return True


def tangent_normal_curvature(curve: ClosedCurve):
    """Unit tangent, unit normal (tangent rotated +pi/2) and curvature.

    Returns (T, N, k) with T, N of shape (N, 2) and k of shape (N,).
    """
    _, z_x, z_xx, v = _speed_and_derivs(curve)
    t = z_x / v
    tangent = np.stack([t.real, t.imag], axis=1)
    normal = np.stack([-t.imag, t.real], axis=1)
    k = np.imag(np.conj(z_x) * z_xx) / v**3
    return tangent, normal, k


def _quad_weight(curve: ClosedCurve) -> float:
    return 2.0 * np.pi / curve.n


def metrics(curve: ClosedCurve) -> CurveMetrics:
    """Length, signed area, turning number, mean curvature, K_osc, max |k|.

    The turning number is (1/2pi) int k ds rounded to the nearest integer;
    a raw value farther than 0.1 from an integer raises TurningNumberError
    since it signals an under-resolved or non-closed curvature field.
    """
    z, z_x, z_xx, v = _speed_and_derivs(curve)
    dx = _quad_weight(curve)
    k = np.imag(np.conj(z_x) * z_xx) / v**3

    length = float(np.sum(v) * dx)
    area = 0.5 * float(np.sum(np.imag(np.conj(z) * z_x)) * dx)
    total_turn = float(np.sum(k * v) * dx) / (2.0 * np.pi)
    omega = int(round(total_turn))
    drift = abs(total_turn - omega)
    if drift > 0.1:
        raise TurningNumberError(
            f"integral of curvature gives turning number {total_turn:.6f}, "
            "not close to an integer"
        )
    if drift > 1e-3:
        warnings.warn(
            f"turning number off an integer by {drift:.2e}", ResolutionWarning,
            stacklevel=2,
        )
    k_bar = 2.0 * np.pi * total_turn / length
    k_osc = length * float(np.sum((k - k_bar) ** 2 * v) * dx)
    return CurveMetrics(
        length=length,
        area=area,
        omega=omega,
        k_bar=k_bar,
        k_osc=k_osc,
        k_max_abs=float(np.max(np.abs(k))),
    )


def arclength_derivative(curve: ClosedCurve, f: np.ndarray, order: int = 1,
                         rel_floor: float = 0.0) -> np.ndarray:
    """Spectral arclength derivative of a sampled field along the curve.

    With ``rel_floor`` > 0, spectrum entries below that fraction of the
    largest coefficient are zeroed before each differentiation.  Every
    physical-space round trip reseeds white roundoff which differentiation
    amplifies by the mode number squared; for fields whose true coefficients
    have decayed below the floor this drops noise only.
    """
    _, _, _, v = _speed_and_derivs(curve)
    out = np.asarray(f, dtype=float)
    for _ in range(order):
        fhat = np.fft.fft(out)
        if rel_floor > 0.0:
            mag = np.abs(fhat)
            fhat[mag < rel_floor * mag.max()] = 0.0
        out = np.fft.ifft(_deriv_hat(fhat, 1)).real / v
    return out


def curvature_derivatives(curve: ClosedCurve, rel_floor: float = 0.0):
    """Curvature and its first two arclength derivatives plus the speed.

    Everything is computed from a single spectral pass over the positions:
    z_x .. z_xxxx come from one (optionally floor-filtered) spectrum and k,
    k_s, k_ss follow by product rule in physical space.  This avoids
    re-transforming stored intermediate fields, whose fresh roundoff would
    be amplified by the mode number squared per extra derivative.

    Returns (k, k_s, k_ss, v).
    """
    zhat = np.fft.fft(curve.z())
    if rel_floor > 0.0:
        mag = np.abs(zhat)
        ref = mag[1:].max()
        zhat = zhat.copy()
        zhat[mag < rel_floor * ref] = 0.0
    z1 = np.fft.ifft(_deriv_hat(zhat, 1))
    z2 = np.fft.ifft(_deriv_hat(zhat, 2))
    z3 = np.fft.ifft(_deriv_hat(zhat, 3))
    z4 = np.fft.ifft(_deriv_hat(zhat, 4))
    v2 = np.abs(z1) ** 2
    v = np.sqrt(v2)
    vmax = v.max()
    if vmax == 0.0 or v.min() < _IMMERSION_TOL * vmax:
        raise DegenerateCurveError("curve is not immersed: parameter speed vanishes")
    v_x = np.real(np.conj(z1) * z2) / v
    v_xx = (np.abs(z2) ** 2 + np.real(np.conj(z1) * z3)) / v - v_x**2 / v
    w1 = np.imag(np.conj(z1) * z2)
    w2 = np.imag(np.conj(z1) * z3)
    w3 = np.imag(np.conj(z2) * z3) + np.imag(np.conj(z1) * z4)
    k = w1 / v**3
    k_x = w2 / v**3 - 3.0 * k * v_x / v
    k_xx = (
        w3 / v**3
        - 3.0 * w2 * v_x / v**4
        - 3.0 * k_x * v_x / v
        - 3.0 * k * v_xx / v
        + 3.0 * k * v_x**2 / v2
    )
    k_s = k_x / v
    k_ss = (k_xx * v - k_x * v_x) / v**3
    return k, k_s, k_ss, v


def denoise(curve: ClosedCurve, rel_floor: float = 1e-14) -> ClosedCurve:
    """Zero position-spectrum modes below a relative roundoff floor.

    High-order spectral derivatives amplify white roundoff in the samples by
    powers of the mode number; for analytic curves whose true coefficients
    have decayed below double precision this truncation discards noise only.
    """
    zhat = np.fft.fft(curve.z())
    mag = np.abs(zhat)
    ref = mag[1:].max()  # ignore the mean (translation) mode
    zhat[mag < rel_floor * ref] = 0.0
    znew = np.fft.ifft(zhat)
    return ClosedCurve(np.stack([znew.real, znew.imag], axis=1))


def tangent_winding(curve: ClosedCurve) -> int:
    """Winding number of the tangent image, from unwrapped tangent angles."""
    _, z_x, _, _ = _speed_and_derivs(curve)
    ang = np.unwrap(np.angle(z_x))
    # closing increment back to the first sample
    closing = np.angle(z_x[0] / z_x[-1])
    total = ang[-1] - ang[0] + closing
    return int(round(total / (2.0 * np.pi)))


def _eval_trig(zhat: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Evaluate the trigonometric interpolant with spectrum zhat at points xs.

    The Nyquist coefficient is split evenly between +N/2 and -N/2 so the
    interpolant of real data stays real.
    """
    n = zhat.shape[0]
    k = _wavenumbers(n)
    coeff = zhat / n
    coeff = coeff.copy()
    nyq = coeff[n // 2]
    phases = np.exp(1j * np.outer(xs, k))
    out = phases @ coeff
    # correct the Nyquist term: replace e^{-i(N/2)x} by cos((N/2)x)
    out += nyq * (np.cos(n / 2 * xs) - np.exp(-1j * (n / 2) * xs))
    return out


def resample_by_arclength(curve: ClosedCurve, n_out: int) -> ClosedCurve:
    """Resample to n_out points equally spaced in arclength.

    The position is evaluated through its trigonometric interpolant, so the
    geometric image is preserved to spectral accuracy; the first sample is
    kept as the arclength origin.  Already-uniform curves are returned
    unchanged (up to interpolation roundoff).
    """
    if n_out < 16 or n_out % 2 != 0:
        raise ValueError("n_out must be an even integer >= 16")
    check_resolution(curve)
    z, z_x, _, v = _speed_and_derivs(curve)
    n = curve.n
    dx = _quad_weight(curve)
    length = float(np.sum(v) * dx)

    # arclength s(x) = vbar x + periodic part, via spectral antiderivative
    vhat = np.fft.fft(v)
    vbar = vhat[0].real / n
    k = _wavenumbers(n)
    shat = np.zeros_like(vhat)
    nz = k != 0
    shat[nz] = vhat[nz] / (1j * k[nz])
    s_periodic0 = np.fft.ifft(shat).real[0]

    def s_of(xs):
        per = _eval_trig(shat, xs).real - s_periodic0
        return vbar * xs + per

    def v_of(xs):
        return _eval_trig(vhat, xs).real

    targets = length * np.arange(n_out) / n_out
    xs = targets / vbar
    for _ in range(60):
        res = s_of(xs) - targets
        if np.max(np.abs(res)) < 1e-14 * length:
            break
        xs = xs - res / v_of(xs)

    zhat = np.fft.fft(z)
    znew = _eval_trig(zhat, xs)
    return ClosedCurve(np.stack([znew.real, znew.imag], axis=1))


def fourier_of_curvature(curve: ClosedCurve, n_max: int) -> FourierModes:
    """Fourier amplitudes of k - 1 in arclength after rescaling to L = 2 pi omega.

    The rescaling leaves K_osc unchanged, and on the rescaled curve the mean
    curvature is exactly 1, so a_0 vanishes up to quadrature error.  Parseval
    gives e = 2 pi omega * sum_{n != 0} |a_n|^2.
    """
    m = metrics(curve)
    if m.omega == 0:
        raise UndefinedExpansionError(
            "curvature expansion needs a nonzero turning number"
        )
    omega = abs(m.omega)
    uniform = resample_by_arclength(curve, curve.n)
    _, _, k = tangent_normal_curvature(uniform)
    if m.omega < 0:
        k = -k[::-1]  # reverse orientation so the turning number is positive
    f = k * (m.length / (2.0 * np.pi * omega)) - 1.0
    n = uniform.n
    if n_max >= n // 2:
        raise ValueError("n_max must be below the Nyquist mode")
    fhat = np.fft.fft(f) / n
    coeffs = np.empty(2 * n_max + 1, dtype=complex)
    for idx, mode in enumerate(range(-n_max, n_max + 1)):
        coeffs[idx] = fhat[mode % n]
    # arclength element of the rescaled curve
    rho = 2.0 * np.pi * omega / m.length
    ds = rho * _quad_weight(uniform) * np.abs(
        np.fft.ifft(_deriv_hat(np.fft.fft(uniform.z()), 1))
    )
    e = float(np.sum(f**2 * ds))
    return FourierModes(coefficients=coeffs, n_max=n_max, omega=omega, e=e)


def translation_mode_energy(modes: FourierModes, omega: int) -> float:
    """Energy 2 pi omega (|a_omega|^2 + |a_{-omega}|^2) of the translation modes."""
    if abs(omega) > modes.n_max:
        raise ValueError("omega exceeds the stored mode range")
    a_plus = modes.a(omega)
    a_minus = modes.a(-omega)
    return 2.0 * np.pi * abs(omega) * (abs(a_plus) ** 2 + abs(a_minus) ** 2)


def circle(omega: int = 1, radius: float = 1.0, n: int = 128,
           center=(0.0, 0.0)) -> ClosedCurve:
    """Counterclockwise omega-fold covered circle."""
    if omega == 0:
        raise ValueError("omega must be a nonzero integer")
    x = 2.0 * np.pi * np.arange(n) / n
    ang = omega * x
    pts = np.stack(
        [center[0] + radius * np.cos(ang), center[1] + radius * np.sin(ang)], axis=1
    )
    return ClosedCurve(pts)


def ellipse(a: float, b: float, n: int = 256) -> ClosedCurve:
    x = 2.0 * np.pi * np.arange(n) / n
    return ClosedCurve(np.stack([a * np.cos(x), b * np.sin(x)], axis=1))


def write_curve_csv(curve: ClosedCurve, path) -> None:
    """Write the curve in the interchange format: header x,px,py."""
    rows = np.column_stack([curve.x, curve.points])
    np.savetxt(path, rows, delimiter=",", header="x,px,py", comments="",
               fmt="%.17g")


def read_curve_csv(path) -> ClosedCurve:
    """Read a curve CSV, rejecting non-uniform parameter grids."""
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    if data.ndim != 2 or data.shape[1] != 3:
        raise ValueError("curve CSV must have columns x,px,py")
    x = data[:, 0]
    n = x.shape[0]
    expected = 2.0 * np.pi * np.arange(n) / n
    if not np.allclose(x, expected, atol=1e-9 * 2.0 * np.pi / n, rtol=0.0):
        raise ValueError("curve CSV parameter grid is not the uniform grid 2*pi*i/N")
    return ClosedCurve(data[:, 1:3])
