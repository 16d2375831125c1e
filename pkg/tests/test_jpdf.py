import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from coupledsv.ensemble import BiorthogonalSystem, make_parameters
from coupledsv.ensemble.jpdf import jpdf, log_jpdf, log_normalisation
from coupledsv.ensemble.kernel import kernel_direct
from coupledsv.errors import DomainError
from coupledsv.quadrature.rules import integrate_semi_infinite


def test_single_point_density_integrates_to_one():
    p = make_parameters(0.45, 1, 3)
    r = integrate_semi_infinite(lambda y: np.array([jpdf([v], p) for v in y]), tol=1e-11)
    assert r.value == pytest.approx(1.0, abs=1e-9)


def test_single_point_density_is_p0_q0():
    p = make_parameters(0.6, 1, 2)
    sys = BiorthogonalSystem(p, max_n=1)
    assert jpdf([1.3], p) == pytest.approx(sys.eval_P(0, 1.3) * sys.eval_Q(0, 1.3), rel=1e-13)


def test_two_point_normalisation():
    p = make_parameters(0.5, 2, 2)
    val, _ = integrate.dblquad(lambda y, x: jpdf([x, y], p), 0, np.inf, 0, np.inf, epsabs=1e-10, epsrel=1e-10)
    assert val == pytest.approx(1.0, abs=1e-6)


@given(st.sampled_from([0.3, 0.5, 0.7]), st.integers(1, 4), st.integers(0, 2), st.data())
def test_determinant_of_kernel_is_factorial_times_density(mu, n, nu, data):
    p = make_parameters(mu, n, n + nu)
    ys = data.draw(st.lists(st.floats(0.05, 10.0), min_size=n, max_size=n, unique=True))
    # close points make det K ill-conditioned in double precision
    if n > 1 and min(abs(a - b) for a in ys for b in ys if a != b) < 0.05 * max(ys):
        return
    sys = BiorthogonalSystem(p)
    y = np.array(ys)
    det = np.linalg.det(kernel_direct(y[:, None], y[None, :], sys))
    assert det == pytest.approx(math.factorial(n) * jpdf(y, p), rel=1e-8, abs=1e-300)


@given(st.permutations([0.4, 1.1, 2.5]))
def test_symmetric_in_points(perm):
    p = make_parameters(0.5, 3, 4)
    assert jpdf(perm, p) == pytest.approx(jpdf([0.4, 1.1, 2.5], p), rel=1e-12)


def test_coincident_points_and_errors():
    p = make_parameters(0.5, 2, 2)
    assert jpdf([1.0, 1.0], p) == 0.0
    assert log_jpdf([1.0, 1.0], p) == -math.inf
    with pytest.raises(DomainError):
        jpdf([1.0], p)
    with pytest.raises(DomainError):
        jpdf([1.0, -2.0], p)


def test_normalisation_constant_for_one_point():
    p = make_parameters(0.5, 1, 1)
    # Z_1 = 1 / (2 gap) at nu = 0
    assert math.exp(log_normalisation(p)) == pytest.approx(1 / (2 * p.gap), rel=1e-14)


def test_large_n_stays_finite():
    p = make_parameters(0.5, 30, 30)
    y = np.linspace(0.5, 400.0, 30)
    assert math.isfinite(log_jpdf(y, p))
