"""Time integration of the curve evolution, plain and length-normalised.

The unnormalised evolution moves each point with normal speed
-(k_ss + c k^3); the length-normalised variant adds the global term
lambda(t) * gamma with

    lambda(t) = (1/L0) ( int k_s^2 ds - c int k^4 ds ),   L0 = 2 pi omega,

which freezes the length at L0 and turns the unit omega-circle into a fixed
point.  Together with the tracked scale factor sigma (d sigma/dt =
-lambda sigma) the normalised run is a reparametrised-in-time view of the
plain one: both are integrated with explicit RK4 at dt = dt_safety *
(min arclength spacing)^4, the stability-limited step for the fourth-order
operator.

Tangential motion: the evolution itself is purely normal; the sampling is
returned to uniform arclength whenever the parameter speed spread exceeds a
small threshold.  That changes the parametrisation only, never the image,
and each resample event is counted in the returned series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .geometry import (
    ClosedCurve,
    check_resolution,
    metrics,
    resample_by_arclength,
    write_curve_csv,
)

__all__ = [
    "FlowConfig",
    "FlowState",
    "TimeSeries",
    "BlowupDetected",
    "velocity_field",
    "normalisation_rate",
    "step",
    "run",
    "e_evolution_check",
    "sigma_asymptotics",
]

UNNORMALISED = "unnormalised"
LENGTH_NORMALISED = "length_normalised"

# relative speed spread beyond which the sampling is returned to uniform
_SPREAD_TOL = 1e-3
# steps between dealiasing projections of the evolving state
_DEALIAS_EVERY = 10


class BlowupDetected(RuntimeError):
    """Raised by step() when a stop condition fires; run() reports via status."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


@dataclass(frozen=True)
class FlowConfig:
    c: float
    mode: str = UNNORMALISED
    n: int = 128
    dt_safety: float = 0.02
    reparam_every: int = 10
    t_end: Optional[float] = None
    stop_kmax: float = 1e4
    stop_koscmax: float = math.inf
    record_every: int = 500
    snapshot_every: int = 0

    def __post_init__(self):
        if self.mode not in (UNNORMALISED, LENGTH_NORMALISED):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not (0.0 < self.dt_safety <= 0.03):
            raise ValueError("dt_safety must lie in (0, 0.03]")
        if self.n < 64 or self.n % 2 != 0:
            raise ValueError("n must be an even integer >= 64")
        if self.record_every < 1 or self.reparam_every < 1:
            raise ValueError("record_every and reparam_every must be >= 1")


@dataclass(frozen=True)
class FlowState:
    time: float
    curve: ClosedCurve
    lambda_now: Optional[float]
    sigma: float


@dataclass
class TimeSeries:
    """Diagnostics history of one run, plus optional curve snapshots."""

    columns = ("t", "L", "A", "omega", "Kosc", "kmax", "lambda", "sigma", "cx", "cy")

    records: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    status: str = "running"
    resample_events: int = 0
    blowup_bracket: Optional[tuple] = None

    def append(self, rec: tuple):
        if self.records and rec[0] <= self.records[-1][0]:
            return
        self.records.append(rec)

    def column(self, name: str) -> np.ndarray:
        idx = self.columns.index(name)
        return np.array([r[idx] for r in self.records], dtype=float)

    @property
    def final_state(self) -> tuple:
        return self.records[-1]

    def write_csv(self, path):
        arr = np.array(self.records, dtype=float)
        np.savetxt(path, arr, delimiter=",", header=",".join(self.columns),
                   comments="", fmt="%.17g")


def _spectral_dx(field: np.ndarray, order: int = 1) -> np.ndarray:
    n = field.shape[0]
    k = np.fft.fftfreq(n, d=1.0 / n)
    if order % 2 == 1:
        k = k.copy()
        k[n // 2] = 0.0
    return np.fft.ifft((1j * k) ** order * np.fft.fft(field)).real


def velocity_field(curve: ClosedCurve, c: float, mode: str = UNNORMALISED,
                   l0: Optional[float] = None) -> np.ndarray:
    """Pointwise velocity of the evolution on the sampled curve.

    Unnormalised: -(k_ss + c k^3) N.  Length-normalised: the same plus
    lambda * gamma, with l0 defaulting to 2 pi omega of the curve.  This is
    the reference implementation of the discretisation used by the compiled
    stepping kernel; the two agree to roundoff.
    """
    check_resolution(curve)
    z = curve.z()
    zhat = np.fft.fft(z)
    n = curve.n
    wave = np.fft.fftfreq(n, d=1.0 / n)
    w1 = wave.copy()
    w1[n // 2] = 0.0
    z_x = np.fft.ifft(1j * w1 * zhat)
    z_xx = np.fft.ifft(-(wave**2) * zhat)
    v = np.abs(z_x)
    k = np.imag(np.conj(z_x) * z_xx) / v**3
    k_x = _spectral_dx(k, 1)
    k_xx = _spectral_dx(k, 2)
    v_x = np.real(np.conj(z_x) * z_xx) / v
    k_ss = (k_xx * v - k_x * v_x) / v**3
    f = k_ss + c * k**3
    nx = -z_x.imag / v
    ny = z_x.real / v
    vel = np.stack([-f * nx, -f * ny], axis=1)
    if mode == LENGTH_NORMALISED:
        lam = normalisation_rate(curve, c, l0)
        vel += lam * curve.points
    elif mode != UNNORMALISED:
        raise ValueError(f"unknown mode {mode!r}")
    return vel


def normalisation_rate(curve: ClosedCurve, c: float,
                       l0: Optional[float] = None) -> float:
    """The global rate lambda = (1/L0)(int k_s^2 ds - c int k^4 ds)."""
    z = curve.z()
    zhat = np.fft.fft(z)
    n = curve.n
    wave = np.fft.fftfreq(n, d=1.0 / n)
    w1 = wave.copy()
    w1[n // 2] = 0.0
    z_x = np.fft.ifft(1j * w1 * zhat)
    z_xx = np.fft.ifft(-(wave**2) * zhat)
    v = np.abs(z_x)
    k = np.imag(np.conj(z_x) * z_xx) / v**3
    k_s = _spectral_dx(k, 1) / v
    dx = 2.0 * np.pi / n
    if l0 is None:
        m = metrics(curve)
        if m.omega == 0:
            raise ValueError("length normalisation needs a nonzero turning number")
        l0 = 2.0 * np.pi * abs(m.omega)
    i_ks = float(np.sum(k_s**2 * v) * dx)
    i_k4 = float(np.sum(k**4 * v) * dx)
    return (i_ks - c * i_k4) / l0


def _kernel_advance(points: np.ndarray, config: FlowConfig, t: float,
                    logsig: float, l0: float, max_steps: int):
    n = points.shape[0]
    ds = _kernels.diff_stack(n)
    filt = _kernels.dealias_matrix(n)
    normalized = config.mode == LENGTH_NORMALISED
    t_end = config.t_end if config.t_end is not None else 0.0
    return _kernels.advance(
        points, ds, filt, float(config.c), normalized, l0, config.dt_safety,
        t, logsig, max_steps, t_end, config.t_end is not None,
        config.stop_kmax, _SPREAD_TOL, _DEALIAS_EVERY,
    )


def _renormalise_length(points: np.ndarray, l0: float) -> float:
    """Rescale to length l0 in place; returns the log of the absorbed factor."""
    curve = ClosedCurve(points)
    length = metrics(curve).length
    rho = l0 / length
    points *= rho
    return math.log(length / l0)


def step(state: FlowState, config: FlowConfig) -> FlowState:
    """One RK4 step (the same compiled kernel run() uses).

    Raises BlowupDetected when a stop condition prevents the step.
    """
    points = np.array(state.curve.points, dtype=float)
    logsig = math.log(state.sigma) if state.sigma > 0 else 0.0
    normalized = config.mode == LENGTH_NORMALISED
    m = metrics(state.curve)
    l0 = 2.0 * np.pi * abs(m.omega) if m.omega != 0 else m.length
    t, logsig, steps, status, kmax, dt = _kernel_advance(
        points, config, state.time, logsig, l0, 1)
    if status == _kernels.STATUS_RESAMPLE and steps == 0:
        resampled = resample_by_arclength(state.curve, config.n)
        points = np.array(resampled.points, dtype=float)
        if normalized:
            logsig += _renormalise_length(points, l0)
        t, logsig, steps, status, kmax, dt = _kernel_advance(
            points, config, state.time, logsig, l0, 1)
    if steps == 0 and status in (_kernels.STATUS_KMAX,
                                 _kernels.STATUS_DT_UNDERFLOW):
        raise BlowupDetected(
            f"stop condition before stepping (kmax={kmax:.3g})", state=state)
    curve = ClosedCurve(points)
    lam = normalisation_rate(curve, config.c, l0) if normalized else None
    return FlowState(time=t, curve=curve, lambda_now=lam,
                     sigma=math.exp(logsig))


def _record(series: TimeSeries, t: float, curve: ClosedCurve, config: FlowConfig,
            l0: float, logsig: float) -> float:
    m = metrics(curve)
    normalized = config.mode == LENGTH_NORMALISED
    if normalized:
        lam = normalisation_rate(curve, config.c, l0)
        sigma = math.exp(logsig)
    else:
        lam = math.nan
        sigma = m.length / l0
    dx = 2.0 * np.pi / curve.n
    z = curve.z()
    zhat = np.fft.fft(z)
    wave = np.fft.fftfreq(curve.n, d=1.0 / curve.n)
    w1 = wave.copy()
    w1[curve.n // 2] = 0.0
    v = np.abs(np.fft.ifft(1j * w1 * zhat))
    centroid = (curve.points * (v * dx / m.length)[:, None]).sum(axis=0)
    series.append((t, m.length, m.area, m.omega, m.k_osc, m.k_max_abs,
                   lam, sigma, centroid[0], centroid[1]))
    return m.k_osc


def run(gamma0: ClosedCurve, config: FlowConfig) -> TimeSeries:
    """Integrate from gamma0 until t_end or a stop condition.

    The returned series carries a status string: "completed", "blowup"
    (with the bracket [t_last, t_last + dt] of the last accepted step), or
    "kosc_exceeded".  In length-normalised mode the curve is rescaled to
    L = 2 pi omega at the start and after every resample, the correction
    being folded into sigma.
    """
    m0 = metrics(gamma0)
    normalized = config.mode == LENGTH_NORMALISED
    if normalized and m0.omega == 0:
        raise ValueError("length-normalised mode needs a nonzero turning number")
    l0 = 2.0 * np.pi * abs(m0.omega) if m0.omega != 0 else m0.length

    work = resample_by_arclength(gamma0, config.n)
    points = np.array(work.points, dtype=float)
    logsig = 0.0
    if normalized:
        # sigma(0) = L/L0, and the working curve starts at length exactly L0
        logsig = _renormalise_length(points, l0)

    series = TimeSeries()
    t = 0.0
    total_steps = 0
    last_dt = 0.0
    kosc = _record(series, t, ClosedCurve(points.copy()), config, l0, logsig)
    if config.snapshot_every:
        series.snapshots.append((t, ClosedCurve(points.copy())))
    steps_since_record = 0
    steps_since_snapshot = 0
    stalled = 0

    while True:
        if config.t_end is not None and t >= config.t_end:
            series.status = "completed"
            break
        budget = config.record_every - steps_since_record
        t, logsig, steps, status, kmax, dt = _kernel_advance(
            points, config, t, logsig, l0, budget)
        total_steps += steps
        steps_since_record += steps
        steps_since_snapshot += steps
        if dt > 0.0:
            last_dt = dt
        stalled = stalled + 1 if steps == 0 else 0

        if status == _kernels.STATUS_RESAMPLE:
            curve = resample_by_arclength(ClosedCurve(points), config.n)
            points = np.array(curve.points, dtype=float)
            if normalized:
                logsig += _renormalise_length(points, l0)
            series.resample_events += 1
            if stalled > 3:
                raise RuntimeError("resampling failed to restore uniform sampling")
            continue
        if status in (_kernels.STATUS_KMAX, _kernels.STATUS_DT_UNDERFLOW):
            kosc = _record(series, t, ClosedCurve(points.copy()), config, l0, logsig)
            series.status = "blowup"
            series.blowup_bracket = (t, t + last_dt)
            break

        if steps_since_record >= config.record_every or \
                status == _kernels.STATUS_T_END:
            kosc = _record(series, t, ClosedCurve(points.copy()), config, l0, logsig)
            steps_since_record = 0
            if kosc > config.stop_koscmax:
                series.status = "kosc_exceeded"
                break
        if config.snapshot_every and steps_since_snapshot >= config.snapshot_every:
            series.snapshots.append((t, ClosedCurve(points.copy())))
            steps_since_snapshot = 0
        if status == _kernels.STATUS_T_END:
            series.status = "completed"
            break
        if config.t_end is None and status == _kernels.STATUS_STEPS_DONE \
                and total_steps > 2**62:  # pragma: no cover
            raise RuntimeError("runaway flow without t_end")
    if config.snapshot_every and (not series.snapshots
                                  or t > series.snapshots[-1][0]):
        series.snapshots.append((t, ClosedCurve(points.copy())))
    return series


def e_evolution_check(state: FlowState, c: float):
    """Two-sided consistency check of the oscillation-energy evolution.

    lhs: centred finite difference of e = K_osc/(2 pi omega) across two
    micro-steps of the normalised flow.  rhs: -Q + R evaluated on the middle
    curve through the variational functionals.  The two agree to the
    discretisation error of a single step.
    """
    from .perturbation import Q_functional, R_functional

    config = FlowConfig(c=c, mode=LENGTH_NORMALISED,
                        n=state.curve.n, record_every=1)
    m = metrics(state.curve)
    if m.omega == 0:
        raise ValueError("needs a nonzero turning number")
    two_pi_omega = 2.0 * np.pi * abs(m.omega)

    s0 = state
    s1 = step(s0, config)
    s2 = step(s1, config)
    e0 = metrics(s0.curve).k_osc / two_pi_omega
    e2 = metrics(s2.curve).k_osc / two_pi_omega
    lhs = (e2 - e0) / (s2.time - s0.time)
    rhs = -Q_functional(s1.curve, c) + R_functional(s1.curve, c)
    return lhs, rhs


def sigma_asymptotics(series: TimeSeries, c: float):
    """Late-time scale diagnostics of a converged normalised run.

    Returns (sigma_inf_estimate, decay_slope) where sigma_inf estimates
    lim sigma(t) e^{-c t} and decay_slope is the fitted slope of
    log |lambda(t) + c| over the tail of the records.
    """
    kosc = series.column("Kosc")
    if kosc[-1] >= 1e-8:
        raise ValueError("run has not converged (final K_osc >= 1e-8)")
    t = series.column("t")
    lam = series.column("lambda")
    sigma = series.column("sigma")
    sigma_inf = sigma[-1] * math.exp(-c * t[-1])

    resid = np.abs(lam + c)
    usable = resid > 1e-12
    if usable.sum() < 4:
        return sigma_inf, -math.inf
    tt = t[usable]
    rr = np.log(resid[usable])
    # fit over the second half of the usable window
    half = tt >= tt[0] + 0.5 * (tt[-1] - tt[0])
    if half.sum() >= 4:
        tt, rr = tt[half], rr[half]
    slope = float(np.polyfit(tt, rr, 1)[0])
    return sigma_inf, slope
