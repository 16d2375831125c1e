import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from coupledsv.ensemble import BiorthogonalSystem, make_parameters, raw_phi, raw_psi
from coupledsv.ensemble.jpdf import log_phi
from coupledsv.errors import CapacityError, DomainError
from coupledsv.ensemble.moments import basis_overlaps, biorthogonality_matrix
from coupledsv.quadrature.rules import integrate_interval, integrate_semi_infinite


def mp_P(n, x, mu, nu):
    mu = mpmath.mpf(mu)
    a, d = (1 + mu) / (2 * mu), (1 - mu) / (2 * mu)
    gap = a * a - d * d
    fac = mpmath.factorial
    return (-1) ** n * fac(nu + n) * fac(n) * mpmath.fsum(
        gap ** (k + 0.5) / d**k * mpmath.rf(-n, k) / (fac(nu + k) * fac(k))
        * mpmath.mpf(x) ** (mpmath.mpf(k) / 2) * mpmath.besseli(k, 2 * d * mpmath.sqrt(x)) for k in range(n + 1))


def mp_Q(n, y, mu, nu):
    mu = mpmath.mpf(mu)
    a, d = (1 + mu) / (2 * mu), (1 - mu) / (2 * mu)
    gap = a * a - d * d
    fac = mpmath.factorial
    return (-1) ** n * 2 / fac(n) ** 2 * mpmath.fsum(
        gap ** (l + nu + 0.5) / a ** (l + nu) * mpmath.rf(-n, l) / (fac(nu + l) * fac(l))
        * mpmath.mpf(y) ** (mpmath.mpf(l + nu) / 2) * mpmath.besselk(l + nu, 2 * a * mpmath.sqrt(y))
        for l in range(n + 1))


def test_coefficient_tables_are_exact():
    sys = BiorthogonalSystem(make_parameters(0.5, 1, 3), max_n=6)
    nu = 2
    f = math.factorial
    for n in range(7):
        for k in range(n + 1):
            want = Fraction((-1) ** (n + k) * f(nu + n) * f(n) * (f(n) // f(n - k)), f(nu + k) * f(k))
            assert sys.p_coeffs[n][k] == want
        assert all(c == 0 for c in sys.p_coeffs[n][n + 1:])
        assert all(c == 0 for c in sys.q_coeffs[n][n + 1:])


def test_p0_and_q0_single_terms():
    p = make_parameters(0.37, 2, 4)
    sys = BiorthogonalSystem(p)
    x = 1.3
    assert sys.eval_P(0, x) == pytest.approx(math.sqrt(p.gap) * float(mpmath.besseli(0, 2 * p.delta * math.sqrt(x))), rel=1e-13)
    q0 = 2 * p.gap ** (p.nu + 0.5) * p.alpha ** (-p.nu) / math.factorial(p.nu) * x ** (p.nu / 2) * float(
        mpmath.besselk(p.nu, 2 * p.alpha * math.sqrt(x)))
    assert sys.eval_Q(0, x) == pytest.approx(q0, rel=1e-13)


@pytest.mark.parametrize("n", [0, 1, 4, 9])
def test_p_at_origin(n):
    p = make_parameters(0.6, 1, 3)
    want = (-1) ** n * math.factorial(p.nu + n) * math.factorial(n) * math.sqrt(p.gap) / math.factorial(p.nu)
    assert BiorthogonalSystem(p).eval_P(n, 0.0) == pytest.approx(want, rel=1e-13)


@given(st.sampled_from([0.1, 0.35, 0.5, 0.8, 0.97]), st.integers(0, 3), st.integers(0, 20),
       st.floats(1e-3, 40.0))
def test_against_mpmath_definition(mu, nu, n, x):
    sys = BiorthogonalSystem(make_parameters(mu, 1, 1 + nu))
    with mpmath.workdps(60):
        rp, rq = float(mp_P(n, x, mu, nu)), float(mp_Q(n, x, mu, nu))
    assert sys.eval_P(n, x) == pytest.approx(rp, rel=1e-9)
    assert sys.eval_Q(n, x) == pytest.approx(rq, rel=1e-9)


def test_vectorised_shapes_and_capacity():
    sys = BiorthogonalSystem(make_parameters(0.5, 2, 2), max_n=5)
    xs = np.array([0.2, 1.0, 3.0])
    assert sys.eval_P(2, xs).shape == (3,)
    assert sys.p_all(xs, 5).shape == (6, 3)
    with pytest.raises(CapacityError):
        sys.eval_P(6, 1.0)
    with pytest.raises(DomainError):
        sys.eval_Q(1, 0.0)


def test_default_capacity_covers_boundary_terms():
    sys = BiorthogonalSystem(make_parameters(0.5, 60, 60))
    assert sys.max_n >= 62


def test_raw_basis():
    p = make_parameters(0.5, 1, 3)
    assert raw_psi(0, 0.0, p) == 1.0
    assert raw_psi(2, 1.0, p) == pytest.approx(float(mpmath.besseli(2, 2 * p.delta)), rel=1e-14)
    xs = np.linspace(0.01, 30, 50)
    assert np.all(raw_phi(3, xs, p) > 0)


def test_p0q0_integrates_to_one():
    p = make_parameters(0.45, 1, 3)
    sys = BiorthogonalSystem(p)
    r = integrate_semi_infinite(lambda x: sys.eval_P(0, x) * sys.eval_Q(0, x), tol=1e-12)
    assert r.value == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("mu,nu", [(0.5, 1), (0.3, 0)])
def test_biorthogonality_small_block(mu, nu):
    g = biorthogonality_matrix(make_parameters(mu, 1, 1 + nu), 4, dps=30)
    assert np.max(np.abs(g - np.eye(5))) < 1e-12


def test_overlaps_match_factorial_law():
    # in the normalisation of basis_overlaps the overlap is (k+m)!/2 for every mu
    g = basis_overlaps(0.4, 3, 4, dps=30)
    for k in range(4):
        for m in range(5):
            assert float(g[k][m]) == pytest.approx(math.factorial(k + m) / 2, rel=1e-14)


def test_balanced_products_in_double_precision():
    sys = BiorthogonalSystem(make_parameters(0.5, 1, 2), max_n=3)

    def f(t):
        x = t * t
        return 2 * t * (sys.p_balanced(x, 3)[:, None, :] * sys.q_balanced(np.maximum(x, 1e-300), 3)[None]).reshape(16, -1)

    g = integrate_interval(f, 0.0, 60.0, tol=1e-11).value.reshape(4, 4)
    assert np.max(np.abs(g - np.eye(4))) < 1e-9


def test_log_phi_matches_raw():
    p = make_parameters(0.5, 1, 2)
    xs = np.array([0.3, 2.0])
    assert np.allclose(np.exp(log_phi(2, xs, p.alpha, p.nu))[:, 2], raw_phi(2, xs, p), rtol=1e-13)
