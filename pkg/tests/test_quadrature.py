import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special

from coupledsv.errors import ConvergenceError, DomainError
from coupledsv.quadrature.rules import (
    ContourSpec, gauss_legendre_nodes, integrate_interval, integrate_semi_infinite, mellin_barnes_line,
)


@given(st.integers(0, 8), st.floats(0.3, 4.0))
def test_gamma_integrals(k, a):
    r = integrate_semi_infinite(lambda x: x**k * np.exp(-a * x), tol=0, rtol=1e-12)
    assert r.value == pytest.approx(math.factorial(k) / a ** (k + 1), rel=1e-11)


def test_log_singularity_at_origin():
    r = integrate_semi_infinite(lambda x: -np.log(x) * np.exp(-x), tol=1e-12)
    assert r.value == pytest.approx(np.euler_gamma, abs=1e-10)


def test_vector_valued_integrand():
    r = integrate_interval(lambda x: np.vstack([np.sin(x), np.cos(x)]), 0.0, math.pi, tol=1e-13)
    assert np.allclose(r.value, [2.0, 0.0], atol=1e-12)


def test_interval_cap_raises_with_partial_estimate():
    with pytest.raises(ConvergenceError) as info:
        integrate_interval(lambda x: np.sin(1 / x), 1e-9, 1.0, tol=1e-15, max_intervals=20)
    assert info.value.value is not None and info.value.error_estimate > 0


def test_nonfinite_and_bad_interval():
    with pytest.raises(ConvergenceError):
        integrate_interval(lambda x: 1 / (x - 0.5) ** 0 * np.where(x > 0.7, np.inf, 1.0), 0.0, 1.0)
    with pytest.raises(DomainError):
        integrate_interval(np.exp, 1.0, 1.0)


@pytest.mark.parametrize("n", [2, 7, 40, 200])
def test_gauss_legendre_exactness(n):
    x, w = gauss_legendre_nodes(n)
    assert w.sum() == pytest.approx(1.0, abs=1e-14)
    deg = 2 * n - 1
    assert np.dot(w, x**deg) == pytest.approx(1 / (deg + 1), rel=1e-12)
    with pytest.raises(DomainError):
        gauss_legendre_nodes(1)


def test_mellin_barnes_exponential():
    # (1/2 pi i) int Gamma(s) y**-s ds = exp(-y)
    for y in (0.3, 1.0, 4.0):
        r = mellin_barnes_line(lambda s: special.gamma(s) * y ** (-s))
        assert r.value == pytest.approx(math.exp(-y), rel=1e-12)


@pytest.mark.parametrize("c", [0.5, 1.5])
def test_line_independent_of_abscissa(c):
    spec = ContourSpec(abscissa_c=c, height_T=80.0, nodes=4096)
    r = mellin_barnes_line(lambda s: special.gamma(s) ** 2 * 2.0 ** (-s), spec)
    # Gamma(s)**2 y**-s inverts to 2 K_0(2 sqrt y)
    assert r.value == pytest.approx(2 * special.k0(2 * math.sqrt(2.0)), rel=1e-10)


def test_doubling_height_changes_nothing():
    f = lambda s: special.gamma(s) ** 2 * 0.5 ** (-s)
    a = mellin_barnes_line(f, ContourSpec(0.5, 60.0, 4096)).value
    b = mellin_barnes_line(f, ContourSpec(0.5, 120.0, 8192)).value
    assert a == pytest.approx(b, rel=1e-12)


def test_contour_spec_validation():
    for bad in ({"abscissa_c": 0.0}, {"height_T": -1.0}, {"nodes": 63}):
        with pytest.raises(DomainError):
            ContourSpec(**bad)
