from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from coupledsv.ensemble import BiorthogonalSystem, RecurrenceCoefficients, make_parameters, recurrence_a, recurrence_b
from coupledsv.identities import check_recurrence_duality


def _residual(values, coeffs, n, point):
    terms = [coeffs[j] * values[n + j] for j in range(-2, 3) if n + j >= 0]
    scale = max(abs(point * values[n]), *(abs(t) for t in terms))
    return abs(point * values[n] - sum(terms)) / scale


def test_p_recurrence_example():
    sys = BiorthogonalSystem(make_parameters(0.5, 1, 2), max_n=8)
    vals = [sys.eval_P(n, 1.7) for n in range(7)]
    assert _residual(vals, recurrence_a(4, sys.params), 4, 1.7) < 1e-9


def test_q_recurrence_example():
    sys = BiorthogonalSystem(make_parameters(0.3, 1, 3), max_n=8)
    vals = [sys.eval_Q(n, 0.9) for n in range(6)]
    assert _residual(vals, recurrence_b(3, sys.params), 3, 0.9) < 1e-9


@given(st.sampled_from([0.2, 0.5, 0.8]), st.integers(0, 3), st.integers(0, 10), st.floats(0.05, 8.0))
def test_recurrences_hold_everywhere(mu, nu, n, x):
    sys = BiorthogonalSystem(make_parameters(mu, 1, 1 + nu), max_n=14)
    p = [sys.eval_P(m, x) for m in range(n + 3)]
    q = [sys.eval_Q(m, x) for m in range(n + 3)]
    assert _residual(p, recurrence_a(n, sys.params), n, x) < 1e-9
    assert _residual(q, recurrence_b(n, sys.params), n, x) < 1e-9


def test_vanishing_low_coefficients():
    p = make_parameters(0.4, 2, 4)
    assert recurrence_a(0, p)[-2] == recurrence_a(1, p)[-2] == recurrence_a(0, p)[-1] == 0
    assert recurrence_b(0, p)[-1] == recurrence_b(0, p)[-2] == recurrence_b(1, p)[-2] == 0


def test_a00_closed_form():
    p = make_parameters(0.35, 3, 5)
    nu, gap, d2 = p.nu, p.gap, p.delta**2
    assert recurrence_a(0, p)[0] == pytest.approx((nu + 1) / gap + (nu * nu + 3 * nu + 2) * d2 / gap**2, rel=1e-14)


def test_exact_duality_at_half_coupling():
    p = make_parameters(0.5, 1, 1)
    a2, d2, _ = p.exact_values()
    assert (a2, d2) == (Fraction(9, 4), Fraction(1, 4))
    a = recurrence_a(2, p, exact=True)
    assert a[2] == recurrence_b(4, p, exact=True)[-2]
    assert a[-2] == recurrence_b(0, p, exact=True)[2]


@pytest.mark.parametrize("mu", [0.25, 0.75, 0.2, 0.7])
@pytest.mark.parametrize("nu", [0, 3])
def test_duality_sweep(mu, nu):
    p = make_parameters(mu, 1, 1 + nu)
    assert check_recurrence_duality(20, p)
    assert check_recurrence_duality(20, p, exact=False)


def test_table_layout():
    p = make_parameters(0.6, 2, 3)
    tab = RecurrenceCoefficients.build(p, 6)
    assert tab.a.shape == (5, 7)
    assert tab.coefficient_a(1, 3) == recurrence_a(3, p)[1]
    assert tab.coefficient_b(-1, 4) == recurrence_b(4, p)[-1]
    with pytest.raises(ValueError):
        tab.a[0, 0] = 1.0
