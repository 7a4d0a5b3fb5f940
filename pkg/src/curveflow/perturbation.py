"""Support-function perturbations of circles and the variational functionals
driving the oscillation energy.

A locally convex curve with support function h(theta) = 1 + eta cos(n0
theta / omega) on theta in [0, 2 pi omega) has radius of curvature
rho = h + h'' = 1 + a eta cos(n0 theta / omega), a = 1 - n0^2/omega^2, and
length exactly 2 pi omega.  For small eta it is an explicit analytic
perturbation of the omega-circle whose oscillation energy e = int (k-1)^2 ds
starts at pi omega a^2 eta^2 + O(eta^3); its initial growth rate is

    e'(0) = -Q[f] + R[f] = -pi omega a^2 p_c(n0/omega) eta^2 + O(eta^3),

so a negative spectral gap makes the energy strictly increase: the explicit
unstable datum.  Q and R below are the exact quadratic part and remainder of
d e/dt along the length-normalised flow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .geometry import ClosedCurve, curvature_derivatives, metrics
from .stability import as_exact, lambda_hat, p_c
from . import flow as flowmod

__all__ = [
    "SupportPerturbation",
    "InstabilityReport",
    "build_support_curve",
    "Q_functional",
    "R_functional",
    "e_prime0_prediction",
    "measure_e_prime0",
    "run_instability_experiment",
]


@dataclass(frozen=True)
class SupportPerturbation:
    """Mode-n0 support perturbation of the omega-circle with amplitude eta."""

    omega: int
    n0: int
    eta: float

    def __post_init__(self):
        if self.omega < 1:
            raise ValueError("omega must be a positive integer")
        if self.n0 < 1 or self.n0 == self.omega:
            raise ValueError("n0 must be a positive integer different from omega")
        if abs(self.a * self.eta) >= 1.0:
            raise ValueError(
                "perturbation is not locally convex: |a * eta| must be < 1"
            )

    @property
    def a(self) -> float:
        return 1.0 - (self.n0 / self.omega) ** 2


def build_support_curve(p: SupportPerturbation, n: int = 256) -> ClosedCurve:
    """Curve gamma = h (cos,sin) + h' (-sin,cos) on theta = omega * x.

    theta is not arclength (ds = rho dtheta); callers needing uniform
    arclength sampling resample afterwards.
    """
    if n < 16 or n % 2 != 0:
        raise ValueError("n must be an even integer >= 16")
    x = 2.0 * np.pi * np.arange(n) / n
    theta = p.omega * x
    # h as a function of theta: n0 theta / omega = n0 x
    h = 1.0 + p.eta * np.cos(p.n0 * x)
    h_t = -p.eta * (p.n0 / p.omega) * np.sin(p.n0 * x)
    ct, st = np.cos(theta), np.sin(theta)
    pts = np.stack([h * ct - h_t * st, h * st + h_t * ct], axis=1)
    return ClosedCurve(pts)


def _oscillation_fields(curve: ClosedCurve, rel_floor: float = 1e-15):
    """f = k - 1 with derivatives and arclength element, after rescaling the
    curve to length 2 pi omega (which leaves K_osc unchanged)."""
    m = metrics(curve)
    if m.omega == 0:
        raise ValueError("oscillation functionals need a nonzero turning number")
    omega = abs(m.omega)
    rho = 2.0 * np.pi * omega / m.length
    k, k_s, k_ss, v = curvature_derivatives(curve, rel_floor=rel_floor)
    if m.omega < 0:
        k, k_s, k_ss = -k, -k_s, -k_ss
    f = k / rho - 1.0
    f_s = k_s / rho**2
    f_ss = k_ss / rho**3
    ds = rho * v * (2.0 * np.pi / curve.n)
    return f, f_s, f_ss, ds, omega


def Q_functional(curve: ClosedCurve, c: float) -> float:
    """Quadratic part 2 int f_ss^2 - (6c+2) int f_s^2 + 8c int f^2.

    Equals the symbol sum 2 pi omega sum_n p_c(n/omega) |a_n|^2; the test
    suite checks the two evaluation routes against each other.
    """
    f, f_s, f_ss, ds, _ = _oscillation_fields(curve, rel_floor=1e-15)
    return float(
        2.0 * np.sum(f_ss**2 * ds)
        - (6.0 * c + 2.0) * np.sum(f_s**2 * ds)
        + 8.0 * c * np.sum(f**2 * ds)
    )


def Q_functional_fourier(curve: ClosedCurve, c: float, n_max: int = 0) -> float:
    """Symbol-sum route to Q, through the curvature Fourier amplitudes."""
    from .geometry import fourier_of_curvature

    if n_max <= 0:
        n_max = curve.n // 2 - 1
    modes = fourier_of_curvature(curve, n_max)
    total = 0.0
    for mode in range(-n_max, n_max + 1):
        if mode == 0:
            continue
        total += float(p_c(mode / modes.omega, c)) * abs(modes.a(mode)) ** 2
    return 2.0 * np.pi * modes.omega * total


def R_functional(curve: ClosedCurve, c: float) -> float:
    """The full ten-term remainder of d e/dt = -Q + R.

    For e <= 1 it obeys |R| <= C sqrt(e) (int f_ss^2 ds + e); on support
    perturbations it is O(eta^3) while Q is of order eta^2.
    """
    f, f_s, f_ss, ds, omega = _oscillation_fields(curve, rel_floor=1e-15)
    two_pi_omega = 2.0 * np.pi * omega
    e = float(np.sum(f**2 * ds))
    i_f3 = float(np.sum(f**3 * ds))
    i_f4 = float(np.sum(f**4 * ds))
    i_f5 = float(np.sum(f**5 * ds))
    i_f6 = float(np.sum(f**6 * ds))
    i_fs2 = float(np.sum(f_s**2 * ds))
    i_f2fss = float(np.sum(f**2 * f_ss * ds))
    i_f3fss = float(np.sum(f**3 * f_ss * ds))
    return (
        -(6.0 * c + 3.0) * i_f2fss
        - (2.0 * c + 1.0) * i_f3fss
        - 16.0 * c * i_f3
        - 14.0 * c * i_f4
        - 6.0 * c * i_f5
        - c * i_f6
        - e / two_pi_omega * i_fs2
        + 6.0 * c / two_pi_omega * e**2
        + 4.0 * c * e / two_pi_omega * i_f3
        + c * e / two_pi_omega * i_f4
    )


def e_prime0_prediction(p: SupportPerturbation, c: float) -> float:
    """Leading-order initial energy rate -pi omega a^2 p_c(n0/omega) eta^2."""
    symbol = float(p_c(Fraction(p.n0, p.omega), as_exact(c)))
    return -math.pi * p.omega * p.a**2 * symbol * p.eta**2


def measure_e_prime0(p: SupportPerturbation, c: float, n: int = 96,
                     micro_steps: int = 8):
    """Initial d e/dt measured along the normalised flow.

    Records e over a window of micro-steps and differentiates a cubic fit at
    t = 0 (Richardson-style: the window is a few multiples of dt, so the
    fit error is far below the eta^2 signal).  Returns (e_prime0, e0).
    """
    from .geometry import resample_by_arclength

    curve = build_support_curve(p, n)
    config = flowmod.FlowConfig(c=c, mode=flowmod.LENGTH_NORMALISED, n=n,
                                record_every=1)
    m = metrics(curve)
    two_pi_omega = 2.0 * np.pi * abs(m.omega)
    # uniform arclength start so the kernel does not immediately resample
    state = flowmod.FlowState(
        time=0.0,
        curve=resample_by_arclength(curve, n),
        lambda_now=None,
        sigma=1.0,
    )
    times = [0.0]
    energies = [metrics(state.curve).k_osc / two_pi_omega]
    for _ in range(micro_steps):
        state = flowmod.step(state, config)
        times.append(state.time)
        energies.append(metrics(state.curve).k_osc / two_pi_omega)
    coeffs = np.polyfit(np.array(times), np.array(energies), 3)
    return float(coeffs[-2]), float(energies[0])


@dataclass
class InstabilityReport:
    c: float
    omega: int
    n0: int
    a: float
    lambda_hat: float
    etas: list = field(default_factory=list)
    measured: list = field(default_factory=list)
    ratios: list = field(default_factory=list)
    q_values: list = field(default_factory=list)
    r_values: list = field(default_factory=list)
    predicted_ratio: float = 0.0
    verdict: str = ""

    def to_dict(self) -> dict:
        return {
            "c": self.c,
            "omega": self.omega,
            "n0": self.n0,
            "a": self.a,
            "lambda_hat": self.lambda_hat,
            "etas": self.etas,
            "measured_e_prime0": self.measured,
            "measured_over_eta2": self.ratios,
            "predicted_over_eta2": self.predicted_ratio,
            "Q": self.q_values,
            "R": self.r_values,
            "verdict": self.verdict,
        }


def run_instability_experiment(c: float, omega: int, eta_list=None,
                               n0: Optional[int] = None, n: int = 96,
                               ) -> InstabilityReport:
    """Drive the explicit unstable datum and compare against the prediction.

    Requires a negative spectral gap; n0 defaults to the minimising mode.
    For each eta the initial energy rate is measured along the normalised
    flow, checked for positivity, and its eta^2-normalised value compared to
    -pi omega a^2 p_c(n0/omega).
    """
    lam, n_min = lambda_hat(as_exact(c), omega)
    if not lam < 0:
        raise ValueError(
            f"instability experiment needs a negative spectral gap, "
            f"got lambda_hat = {float(lam):.6g}"
        )
    if n0 is None:
        n0 = n_min
    if eta_list is None:
        eta_list = [0.04, 0.02, 0.01]

    a = 1.0 - (n0 / omega) ** 2
    symbol = float(p_c(Fraction(n0, omega), as_exact(c)))
    report = InstabilityReport(
        c=float(c), omega=omega, n0=n0, a=a, lambda_hat=float(lam),
        predicted_ratio=-math.pi * omega * a**2 * symbol,
    )
    for eta in eta_list:
        p = SupportPerturbation(omega=omega, n0=n0, eta=float(eta))
        e_prime, _ = measure_e_prime0(p, c, n=n)
        curve = build_support_curve(p, n)
        report.etas.append(float(eta))
        report.measured.append(e_prime)
        report.ratios.append(e_prime / eta**2)
        report.q_values.append(Q_functional(curve, c))
        report.r_values.append(R_functional(curve, c))
    grew = all(v > 0.0 for v in report.measured)
    report.verdict = "unstable" if grew else "inconclusive"
    return report
