"""Spectral stability calculus for multiply covered circles.

The linearised oscillation dynamics at the unit omega-circle is governed by
the even quartic symbol

    p_c(x) = 2 x^4 - (6c + 2) x^2 + 8c,

evaluated on the lattice frequencies n/omega.  Removing the scaling mode
n = 0 and the translation modes n = +-omega leaves the spectral gap

    lambda_hat(c, omega) = min over remaining n of p_c(n / omega),

whose sign decides stability.  All lattice arithmetic is carried out in
exact rationals (fractions.Fraction); floating output is derived at the
boundary.  That matters: near the thresholds, stability is decided by how
well fractions n/omega approximate sqrt(2) and sqrt(2/3), and float rounding
would misclassify borderline pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

__all__ = [
    "StabilityReport",
    "Thresholds",
    "p_c",
    "lambda_hat",
    "thresholds",
    "symbol_roots",
    "stable_omegas",
    "stability_report",
    "stability_region_grid",
    "as_exact",
]

Rational = Union[int, Fraction]
# verdict slack for floating-point c; exact inputs use 0
_BORDERLINE_EPS = 1e-12


def as_exact(c) -> Fraction:
    """Coerce a parameter value to an exact rational.

    Strings and ints/Fraction pass through Fraction exactly; floats are
    converted through their exact binary value (use strings such as "1.001"
    when decimal semantics matter).
    """
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, str)):
        return Fraction(c)
    if isinstance(c, float):
        return Fraction(c)
    raise TypeError(f"cannot interpret {c!r} as an exact rational")


def p_c(x, c):
    """The quartic symbol 2 x^4 - (6c+2) x^2 + 8c, exact on rational input."""
    if isinstance(x, Fraction) or isinstance(c, Fraction):
        x = Fraction(x)
        c = Fraction(c)
    x2 = x * x
    return 2 * x2 * x2 - (6 * c + 2) * x2 + 8 * c


def _ceil_sqrt_rational(q: Fraction) -> int:
    """Smallest integer m with m^2 >= q, for q >= 0, exactly."""
    if q <= 0:
        return 0
    m = math.isqrt(q.numerator // q.denominator)
    while Fraction(m * m) < q:
        m += 1
    return m


def lambda_hat(c, omega: int):
    """Spectral gap and its minimising mode.

    Returns (lambda_hat, n_min) where n_min > 0 is the smallest positive
    minimiser.  The scan range is provably exhaustive: p_c is increasing in
    |x| once x^2 >= max(0, (3c+1)/2), so it suffices to scan up to the first
    lattice point beyond that turning region (plus margin for the excluded
    n = omega).
    """
    if omega < 1:
        raise ValueError("omega must be a positive integer")
    c = as_exact(c)
    turn = (3 * c + 1) / 2
    n_max = max(omega + 2, omega * _ceil_sqrt_rational(turn) + omega + 2)
    best = None
    best_n = None
    for n in range(1, n_max + 1):
        if n == omega:
            continue
        val = p_c(Fraction(n, omega), c)
        if best is None or val < best:
            best = val
            best_n = n
    return best, best_n


@dataclass(frozen=True)
class Thresholds:
    """Stability interval endpoints in c for a given omega.

    ``c_minus`` is None for omega = 1 (the maximum over an empty lattice
    range, conventionally -infinity).  Exact rationals; float views attached.
    """

    omega: int
    c_minus: Optional[Fraction]
    c_plus: Fraction

    @property
    def c_minus_float(self) -> float:
        return -math.inf if self.c_minus is None else float(self.c_minus)

    @property
    def c_plus_float(self) -> float:
        return float(self.c_plus)


def _g(n: int, omega: int) -> Fraction:
    # g(n/omega) = x^2 (1 - x^2) / (4 - 3 x^2) written over integers
    n2 = n * n
    w2 = omega * omega
    return Fraction(n2 * (w2 - n2), w2 * (4 * w2 - 3 * n2))


def thresholds(omega: int) -> Thresholds:
    """Exact stability interval endpoints (c_minus, c_plus) for omega.

    c_minus maximises n^2(omega^2-n^2) / (omega^2 (4 omega^2 - 3 n^2)) over
    1 <= n <= omega-1; c_plus minimises the same expression over integers
    with 3 n^2 > 4 omega^2.  The upward scan for c_plus stops at the first n
    beyond sqrt(2)*omega whose value exceeds the current minimum, where the
    underlying function is increasing.
    """
    if omega < 1:
        raise ValueError("omega must be a positive integer")
    c_minus: Optional[Fraction] = None
    for n in range(1, omega):
        val = _g(n, omega)
        if c_minus is None or val > c_minus:
            c_minus = val

    n = _ceil_sqrt_rational(Fraction(4 * omega * omega, 3))
    if 3 * n * n == 4 * omega * omega:  # need strict inequality
        n += 1
    c_plus = None
    while True:
        val = _g(n, omega)
        if c_plus is None or val < c_plus:
            c_plus = val
        elif n * n > 2 * omega * omega:
            break
        n += 1
    return Thresholds(omega=omega, c_minus=c_minus, c_plus=c_plus)


def symbol_roots(c: float):
    """Positive roots (r_minus, r_plus) of the symbol, for c in (0,1/9) or (1,inf).

    r_{c}^{+-} = sqrt( (3c + 1 +- sqrt((c-1)(9c-1))) / 2 ); the discriminant
    is negative in [1/9, 1] (symbol positive definite there) and the
    formula degenerates for c <= 0, hence the domain restriction.
    """
    cf = float(c)
    if not (0.0 < cf < 1.0 / 9.0 or cf > 1.0):
        raise ValueError("roots are real and positive only for c in (0,1/9) or (1,inf)")
    disc = math.sqrt((cf - 1.0) * (9.0 * cf - 1.0))
    r_minus = math.sqrt((3.0 * cf + 1.0 - disc) / 2.0)
    r_plus = math.sqrt((3.0 * cf + 1.0 + disc) / 2.0)
    return r_minus, r_plus


def _lattice_hits_root_interval(c: Fraction, omega: int) -> bool:
    """Exact test for (1/omega) N intersecting [r_minus, r_plus].

    n/omega lies in the closed root interval iff p_c(n/omega) <= 0, i.e.
    (2 (n/omega)^2 - (3c+1))^2 <= (c-1)(9c-1); both sides are rational.
    """
    disc = (c - 1) * (9 * c - 1)
    n = 1
    while True:
        q = Fraction(n * n, omega * omega)
        if q > 3 * c + 1:  # r_plus^2 < 3c+1, so no further lattice point can hit
            return False
        lhs = 2 * q - (3 * c + 1)
        if lhs * lhs <= disc:
            return True
        n += 1


def stable_omegas(c, omega_max: int, method: str = "symbol") -> set:
    """Set of omega <= omega_max whose circles have a positive spectral gap.

    ``method="symbol"`` minimises p_c over the lattice; ``method="lattice"``
    uses the equivalent root-interval avoidance criterion (valid for
    c in (0,1/9) or (1,inf) together with the direct rules c in [1/9,1]
    all-stable for the gap sign and omega = 1 handled via thresholds).
    Both are exact; the test suite checks they agree.
    """
    if omega_max < 1:
        raise ValueError("omega_max must be >= 1")
    c = as_exact(c)
    out = set()
    if method == "symbol":
        for omega in range(1, omega_max + 1):
            lam, _ = lambda_hat(c, omega)
            if lam > 0:
                out.add(omega)
        return out
    if method != "lattice":
        raise ValueError(f"unknown method {method!r}")
    for omega in range(1, omega_max + 1):
        th = thresholds(omega)
        lower_ok = th.c_minus is None or c > th.c_minus
        if omega == 1 or not (0 < c < Fraction(1, 9) or c > 1):
            # outside the root regime fall back to the exact interval
            if lower_ok and c < th.c_plus:
                out.add(omega)
            continue
        if not _lattice_hits_root_interval(c, omega):
            out.add(omega)
    return out


@dataclass(frozen=True)
class StabilityReport:
    """Stability verdict for one (c, omega) pair, with exact thresholds."""

    c: float
    omega: int
    lambda_hat: float
    argmin_n: int
    verdict: str
    c_minus: float
    c_plus: float
    r_minus: Optional[float]
    r_plus: Optional[float]
    lambda_hat_exact: Fraction
    c_minus_exact: Optional[Fraction]
    c_plus_exact: Fraction

    def to_dict(self) -> dict:
        return {
            "c": self.c,
            "omega": self.omega,
            "lambda_hat": self.lambda_hat,
            "argmin_n": self.argmin_n,
            "verdict": self.verdict,
            "c_minus": self.c_minus,
            "c_plus": self.c_plus,
            "r_minus": self.r_minus,
            "r_plus": self.r_plus,
        }


def stability_report(c, omega: int) -> StabilityReport:
    """Full per-(c, omega) report: gap, minimising mode, verdict, thresholds, roots."""
    c_exact = as_exact(c)
    lam, n_min = lambda_hat(c_exact, omega)
    th = thresholds(omega)
    if lam > 0:
        verdict = "stable"
    elif lam < 0:
        verdict = "unstable"
    else:
        verdict = "borderline"
    cf = float(c_exact)
    try:
        r_minus, r_plus = symbol_roots(cf)
    except ValueError:
        r_minus = r_plus = None
    return StabilityReport(
        c=cf,
        omega=omega,
        lambda_hat=float(lam),
        argmin_n=n_min,
        verdict=verdict,
        c_minus=th.c_minus_float,
        c_plus=th.c_plus_float,
        r_minus=r_minus,
        r_plus=r_plus,
        lambda_hat_exact=lam,
        c_minus_exact=th.c_minus,
        c_plus_exact=th.c_plus,
    )


def stability_region_grid(c_min, c_max, omega_max: int, resolution: int):
    """Stable/unstable classification over a (c, omega) grid.

    Returns (c_values, rows) where rows[omega] is a dict with the exact
    interval endpoints and the boolean stability mask along the c grid.
    For every omega the stable set in c is exactly the open interval
    (c_minus, c_plus), so the mask is derived from exact comparisons.
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    c_lo = as_exact(c_min)
    c_hi = as_exact(c_max)
    if not c_hi > c_lo:
        raise ValueError("need c_max > c_min")
    cs = [c_lo + (c_hi - c_lo) * Fraction(i, resolution - 1) for i in range(resolution)]
    rows = {}
    for omega in range(1, omega_max + 1):
        th = thresholds(omega)
        mask = []
        for cv in cs:
            lower_ok = th.c_minus is None or cv > th.c_minus
            mask.append(bool(lower_ok and cv < th.c_plus))
        rows[omega] = {
            "thresholds": th,
            "stable_mask": mask,
        }
    return [float(cv) for cv in cs], rows
