import json
import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from coupledsv.ensemble import make_parameters
from coupledsv.errors import DomainError
from coupledsv.identities import (
    Verdict, check_corollary, check_hankel_inverse, check_prop61, check_recurrence_duality, check_section9_sum,
    check_summa, run_suite, s_closed, s_direct, gamma_ratio_grid, gamma_ratio_sides, suite_json, summa4_without_nu,
    summa_sides,
)


@given(st.integers(0, 25), st.integers(0, 27), st.integers(0, 8))
def test_sum_identities_exact(i, j, nu):
    assert check_summa(i, j, nu)


def test_fourth_identity_needs_nu_in_last_factor():
    assert all(summa4_without_nu(i, j, 0) for i in range(8) for j in range(10))
    assert not all(summa4_without_nu(i, j, 2) for i in range(8) for j in range(10))


def test_first_identity_is_binomial_orthogonality():
    lhs, rhs = summa_sides(1, 4, 4, 0)
    assert lhs == rhs == 1
    with pytest.raises(DomainError):
        summa_sides(5, 1, 1, 0)


@given(st.integers(0, 4), st.integers(1, 9), st.data())
def test_factorial_sum_closed_form(alpha, n, data):
    k = data.draw(st.integers(0, n - 1))
    r = data.draw(st.integers(0, n - 1))
    assert check_prop61(alpha, k, r, n)
    # independent oracle: the sum evaluated with mpmath gamma functions
    ref = mpmath.fsum(mpmath.factorial(p) * mpmath.factorial(alpha + p) * mpmath.rgamma(p - k + 1)
                      * mpmath.rgamma(p - r + 1) for p in range(n))
    assert float(s_closed(alpha, k, r, n)) == pytest.approx(float(ref), rel=1e-12)


def test_factorial_sum_small_value():
    # p = 1 only: 1! * 1! / (0! 0!) with alpha = 0
    assert s_direct(0, 1, 1, 2) == Fraction(1)


@given(st.integers(1, 7), st.integers(0, 3), st.data())
def test_corollary(n, extra, data):
    k = data.draw(st.integers(0, n - 1))
    l = data.draw(st.integers(0, n - 1))
    assert check_corollary(n + extra, n, k, l)


def test_gamma_ratio_sum_against_mpmath():
    t, s, k, n = 0.37, 2.9, 2, 5
    lhs, rhs = gamma_ratio_sides(t, s, k, n)
    with mpmath.workdps(40):
        ref = mpmath.fsum(mpmath.gamma(t - p) / mpmath.gamma(s - p) * mpmath.rf(-p, k) / mpmath.rf(s - p, k)
                          for p in range(n))
    assert lhs == pytest.approx(float(ref), rel=1e-12)
    assert rhs == pytest.approx(float(ref), rel=1e-10)


def test_gamma_ratio_grid_and_pole_skip():
    results = [check_section9_sum(*g) for g in gamma_ratio_grid()]
    assert all(r is not False for r in results)
    assert check_section9_sum(2.0, 5.5, 1, 4) is None


def test_duality_and_hankel_checks():
    assert check_recurrence_duality(15, make_parameters(0.25, 1, 2))
    assert check_hankel_inverse(3, 6)


def test_suite_verdicts():
    verdicts = run_suite(summa_max=8, summa_nu=3)
    assert {v.family for v in verdicts} == {
        "summa", "factorial-sum", "corollary", "gamma-ratio", "recurrence-duality", "hankel-inverse"}
    assert all(v.ok for v in verdicts)
    data = json.loads(suite_json(verdicts))
    assert all(d["ok"] and d["failures"] == 0 for d in data)


def test_verdict_ok_flag():
    assert not Verdict("x", 3, 2, 1, 0).ok
