from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from coupledsv.ensemble import make_parameters
from coupledsv.errors import DomainError


def test_half_coupling():
    p = make_parameters(0.5, 2, 5)
    assert (p.alpha, p.delta, p.nu) == (1.5, 0.5, 3)


def test_independent_end():
    p = make_parameters(1 - 1e-9, 1, 1)
    assert p.alpha == pytest.approx(1.0, abs=1e-8)
    assert p.delta == pytest.approx(0.0, abs=1e-8)


@given(st.floats(1e-6, 1 - 1e-6))
def test_weight_identities(mu):
    p = make_parameters(mu, 1, 1)
    assert p.alpha - p.delta == pytest.approx(1.0, rel=1e-12)
    assert p.gap == pytest.approx(1 / mu, rel=1e-14)
    a2, d2, gap = p.exact_values()
    assert a2 - d2 == gap == 1 / Fraction(mu)


@pytest.mark.parametrize("args", [(0.0, 1, 1), (1.0, 1, 1), (0.5, 3, 2), (0.5, 0, 0), (0.5, 1.5, 2)])
def test_rejects(args):
    with pytest.raises(DomainError):
        make_parameters(*args)


def test_rescaled_multiplies_weights():
    p = make_parameters(0.3, 4, 6).rescaled(10)
    assert p.alpha == pytest.approx(10 * 1.3 / 0.6)
    assert p.gap == pytest.approx(100 / 0.3)
