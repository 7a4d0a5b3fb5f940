import math

import numpy as np
import pytest

from curveflow.elliptic import (
    closure_integral,
    complete_K,
    incomplete_F,
    jacobi_am,
    jacobi_cn_sn_dn,
)


def agm_K(m):
    # independent oracle: K(m) = pi / (2 AGM(1, sqrt(1-m))) with fixed iteration
    a, b = 1.0, math.sqrt(1.0 - m)
    for _ in range(40):
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (2.0 * a)


def test_incomplete_F_at_zero():
    assert incomplete_F(0.0, 0.5) == 0.0


def test_incomplete_F_quarter_period_equals_K():
    assert incomplete_F(math.pi / 2, 0.5) == pytest.approx(1.8540746773, abs=1e-9)
    assert incomplete_F(math.pi / 2, 0.5) == pytest.approx(agm_K(0.5), abs=1e-12)


def test_incomplete_F_quasi_periodicity():
    x = 0.3
    lhs = incomplete_F(x + math.pi, 0.5)
    rhs = incomplete_F(x, 0.5) + 2.0 * complete_K(0.5)
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_incomplete_F_monotone_odd():
    xs = np.linspace(-2.0, 2.0, 21)
    vals = [incomplete_F(x, 0.7) for x in xs]
    assert np.all(np.diff(vals) > 0)
    for x, v in zip(xs, vals):
        assert v == pytest.approx(-incomplete_F(-x, 0.7), abs=1e-13)


def test_complete_K_values():
    assert complete_K(0.5) == pytest.approx(1.8540746773, abs=1e-9)
    assert complete_K(0.75) == pytest.approx(2.1565156475, abs=1e-9)
    assert complete_K(1e-12) == pytest.approx(math.pi / 2, abs=1e-11)


@pytest.mark.parametrize("m", [-0.1, 0.0, 1.0, 1.5])
def test_parameter_domain_errors(m):
    with pytest.raises(ValueError):
        complete_K(m)
    with pytest.raises(ValueError):
        incomplete_F(0.3, m)
    with pytest.raises(ValueError):
        jacobi_am(0.3, m)


def test_am_basics():
    assert jacobi_am(0.0, 0.5) == 0.0
    K = complete_K(0.5)
    assert jacobi_am(K, 0.5) == pytest.approx(math.pi / 2, abs=1e-13)
    v = jacobi_am(0.9, 0.5)
    assert incomplete_F(v, 0.5) == pytest.approx(0.9, abs=1e-12)


def test_am_round_trip_random():
    rng = np.random.default_rng(20240817)
    for _ in range(200):
        m = rng.uniform(0.05, 0.95)
        K = complete_K(m)
        u = rng.uniform(-3.0 * K, 3.0 * K)
        assert abs(incomplete_F(jacobi_am(u, m), m) - u) < 1e-11


def test_am_monotone_odd():
    us = np.linspace(-5.0, 5.0, 41)
    vals = jacobi_am(us, 0.5)
    assert np.all(np.diff(vals) > 0)
    assert np.allclose(vals, -jacobi_am(-us, 0.5), atol=1e-13)


def test_cn_sn_dn_special_points():
    cn, sn, dn = jacobi_cn_sn_dn(0.0, 0.5)
    assert (cn, sn, dn) == (1.0, 0.0, 1.0)
    K = complete_K(0.5)
    cn, sn, dn = jacobi_cn_sn_dn(K, 0.5)
    assert cn == pytest.approx(0.0, abs=1e-13)
    assert sn == pytest.approx(1.0, abs=1e-13)
    assert dn == pytest.approx(math.sqrt(0.5), abs=1e-13)


def test_pythagorean_identities():
    rng = np.random.default_rng(7)
    us = rng.uniform(-8, 8, size=200)
    for m in (0.2, 0.5, 0.9):
        cn, sn, dn = jacobi_cn_sn_dn(us, m)
        assert np.max(np.abs(sn**2 + cn**2 - 1.0)) < 1e-12
        assert np.max(np.abs(dn**2 + m * sn**2 - 1.0)) < 1e-12


def test_cn_even_antiperiodic_sn_odd():
    K = complete_K(0.5)
    us = np.linspace(-3, 3, 37)
    cn, sn, _ = jacobi_cn_sn_dn(us, 0.5)
    cn_neg, sn_neg, _ = jacobi_cn_sn_dn(-us, 0.5)
    assert np.allclose(cn, cn_neg, atol=1e-13)
    assert np.allclose(sn, -sn_neg, atol=1e-13)
    cn_shift, _, _ = jacobi_cn_sn_dn(us + 2 * K, 0.5)
    assert np.allclose(cn_shift, -cn, atol=1e-12)


def test_derivative_identities_vs_finite_differences():
    h = 1e-5
    rng = np.random.default_rng(11)
    for m in (0.3, 0.5, 0.8):
        for u in rng.uniform(-4, 4, size=20):
            cn0, sn0, dn0 = jacobi_cn_sn_dn(u, m)
            cnp, snp, dnp = jacobi_cn_sn_dn(u + h, m)
            cnm, snm, dnm = jacobi_cn_sn_dn(u - h, m)
            d_cn = (cnp - cnm) / (2 * h)
            d_sn = (snp - snm) / (2 * h)
            d_dn = (dnp - dnm) / (2 * h)
            scale = max(1.0, abs(d_cn), abs(d_sn), abs(d_dn))
            assert abs(d_cn - (-sn0 * dn0)) / scale < 1e-6
            assert abs(d_sn - cn0 * dn0) / scale < 1e-6
            assert abs(d_dn - (-m * sn0 * cn0)) / scale < 1e-6


def mpmath_closure_oracle(t):
    # tanh-sinh quadrature of the raw integrand handles the endpoint singularity
    import mpmath

    mpmath.mp.dps = 30
    val = mpmath.quad(
        lambda x: mpmath.cos(t * x) / mpmath.sqrt(mpmath.cos(x)),
        [0, mpmath.pi / 2],
    )
    return float(val)


def test_closure_integral_at_zero():
    assert closure_integral(0.0) == pytest.approx(2.6220575543, abs=1e-9)
    assert closure_integral(0.0) == pytest.approx(mpmath_closure_oracle(0.0), abs=1e-10)


@pytest.mark.parametrize("t", [1.5, 3.5])
def test_closure_integral_lattice_zeros(t):
    assert abs(closure_integral(t)) < 1e-9


@pytest.mark.parametrize("t", [0.4, 0.9, 2.0, 2.8, 4.7, 6.3])
def test_closure_integral_vs_quadrature_oracle(t):
    assert closure_integral(t) == pytest.approx(mpmath_closure_oracle(t), abs=1e-10)


def test_closure_integral_even():
    for t in (0.7, 2.3, 5.9):
        assert closure_integral(t) == pytest.approx(closure_integral(-t), abs=1e-13)


@pytest.mark.parametrize("t", [1.2, 2.7, 4.4, 6.1])
def test_closure_integral_recursion(t):
    lhs = closure_integral(t)
    rhs = -(2 * t - 3) / (2 * t - 1) * closure_integral(t - 2)
    assert abs(lhs - rhs) < 1e-8


def test_closure_integral_sign_pattern():
    for t in np.linspace(0.0, 1.49, 16):
        assert closure_integral(t) > 0
    # sign change across each zero (4j-1)/2, j = 1..4
    for j in range(1, 5):
        z = (4 * j - 1) / 2
        assert closure_integral(z - 0.1) * closure_integral(z + 0.1) < 0
