import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from coupledsv.clt import (
    LaurentPolynomial, clt_experiment, compose, fourier_coefficients, fourier_coefficients_numeric,
    limiting_recurrence_alphas, limiting_variance, primed_recurrence, symbol_s,
)
from coupledsv.ensemble import make_parameters
from coupledsv.errors import DomainError
from coupledsv.sampler import sample_batch


def test_endpoint_variances():
    assert limiting_variance([0, 1], 1) == 3.0
    assert limiting_variance([0, 1], 0) == 1.125


@given(st.floats(0.0, 1.0))
def test_linear_variance_closed_form(mu):
    q = (1 - mu) ** 2
    want = (3 * mu + q) * (mu + q) + 2 * (mu + q / 4) * (q / 4)
    assert limiting_variance([0, 1], mu) == pytest.approx(want, rel=1e-12, abs=1e-15)


def test_half_coupling_value():
    assert limiting_variance([0, 1], 0.5) == 1.3828125


@given(st.sampled_from([0.0, 0.25, 0.5, 0.8, 1.0]),
       st.lists(st.integers(-3, 3), min_size=1, max_size=4))
def test_fourier_data_real_and_matches_trapezoid(mu, coeffs):
    exact = fourier_coefficients(coeffs, mu)
    assert all(isinstance(v, Fraction) for v in exact.values())
    numeric = fourier_coefficients_numeric(coeffs, mu)
    scale = max([1.0] + [abs(float(v)) for v in exact.values()])
    for k, v in numeric.items():
        assert abs(v.imag) < 1e-11 * scale
        assert abs(v.real - float(exact.get(k, 0))) < 1e-11 * scale


def test_symbol_matches_its_factored_form():
    w = np.exp(1j * np.linspace(0.1, 6.0, 7))
    mu = 0.3
    direct = (w + 1) ** 3 * (w * (1 - mu) ** 2 + (1 + mu) ** 2) / (4 * w**2)
    assert np.allclose(symbol_s(mu)(w), direct)


def test_laurent_arithmetic():
    a = LaurentPolynomial({1: 1, -1: 1})
    assert (a * a).coefficients == {2: 1, 0: 2, -2: 1}
    assert (a + 1)[0] == 1
    assert LaurentPolynomial({3: 0}).coefficients == {}
    assert compose([0, 1], 0.5) == symbol_s(0.5)


def test_variance_nonnegative_for_quadratics():
    for mu in (0.1, 0.6):
        assert limiting_variance([1, -2, 1], mu) > 0


@pytest.mark.parametrize("mu", [0.3, 0.5, 0.9])
def test_primed_coefficients_approach_symbol(mu):
    alphas = dict(zip((2, 1, 0, -1, -2), limiting_recurrence_alphas(mu)))
    errs = []
    for n_scale in (200, 800):
        n = n_scale - 1
        errs.append(max(abs(primed_recurrence(j, n, n_scale, mu) - alphas[j]) for j in alphas))
    assert errs[1] < errs[0] / 3
    assert errs[1] < 2e-2


def test_domain_checks():
    with pytest.raises(DomainError):
        symbol_s(1.5)
    with pytest.raises(DomainError):
        primed_recurrence(3, 5, 10, 0.5)
    with pytest.raises(DomainError):
        limiting_variance([0] * 21 + [1], 0.5)
    with pytest.raises(DomainError):
        clt_experiment(make_parameters(0.5, 4, 4), [0, 1], 10, 1)


def test_small_experiment_report():
    r = clt_experiment(make_parameters(0.5, 20, 20), [0, 1], 1000, 3)
    assert r.trials + r.failures == 1000
    assert 0.75 < r.ratio < 1.25
    assert json.loads(r.to_json())["analytic_variance"] == limiting_variance([0, 1], 0.5)


@pytest.mark.parametrize("mu", [0.3, 0.5])
def test_rescaled_mean_follows_limiting_alpha0(mu):
    # a_{0,n} grows like alpha_0 (n/N)^2, so the sum over n < N gives N alpha_0 / 3
    n = 100
    batch = sample_batch(make_parameters(mu, n, n), 300, seed=5, rescaled=True)
    target = n * limiting_recurrence_alphas(mu)[2] / 3
    assert np.mean(batch.spectra.sum(axis=1)) == pytest.approx(target, rel=0.05)
