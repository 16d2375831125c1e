"""Five-term recurrence coefficients of the biorthogonal functions.

``x P_n = sum_j a[j, n] P_{n+j}`` and ``y Q_n = sum_j b[j, n] Q_{n+j}`` for
``j in -2..2``.  The formulas are rational in ``alpha**2``, ``delta**2`` and
``alpha**2 - delta**2``, so they work on floats and on
:class:`fractions.Fraction` alike.

Coefficients that multiply functions with negative index have closed forms
dividing by zero (``b[-1, 0]``, ``b[-2, 0]``, ``b[-2, 1]``); they are stored
as 0.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from coupledsv.ensemble.parameters import CouplingParameters

SHIFTS = (-2, -1, 0, 1, 2)


def _weights(params, exact):
    if exact:
        a2, d2, gap = params.exact_values()
    else:
        a2, d2, gap = params.alpha**2, params.delta**2, params.gap
    return a2, d2, gap


def a_coefficients(n: int, nu: int, a2, d2, gap) -> dict:
    """Coefficients ``a[j, n]`` from explicit ``alpha**2``, ``delta**2`` and their difference."""
    inv = 1 / gap
    r = d2 / gap**2
    s = a2 / gap**2
    return {
        2: r / ((n + 2) * (n + 1)),
        1: inv + 2 * (2 * n + nu + 2) * r / (n + 1),
        0: (3 * n * n + 2 * nu * n + 3 * n + nu + 1) * inv
        + (6 * n * n + 6 * n * nu + nu * nu + 6 * n + 3 * nu + 2) * r,
        -1: n * n * (n + nu) * (3 * n + nu) * inv + 2 * n * n * (nu + n) * (2 * n + nu) * r,
        -2: (nu + n) * (nu + n - 1) * n * n * (n - 1) ** 2 * s,
    }


def b_coefficients(n: int, nu: int, a2, d2, gap) -> dict:
    """Coefficients ``b[j, n]``; see the module note on the zero convention."""
    inv = 1 / gap
    r = d2 / gap**2
    s = a2 / gap**2
    zero = inv * 0
    return {
        2: (nu + n + 2) * (nu + n + 1) * (n + 2) ** 2 * (n + 1) ** 2 * s,
        1: -((n + 1) ** 2) * (n + nu + 1) ** 2 * inv + 2 * (2 * n + nu + 2) * (n + nu + 1) * (n + 1) ** 2 * s,
        0: -((n + nu) ** 2 + 2 * (n + 1) * (n + nu) + n + 1) * inv
        + ((n + nu) * (5 * n + nu + 3) + n * (n + 3) + 2) * s,
        -1: (-(3 * n + 2 * nu) * inv + 2 * (2 * n + nu) * s) / n if n > 0 else zero,
        -2: r / (n * (n - 1)) if n > 1 else zero,
    }


def recurrence_a(n: int, params: CouplingParameters, exact: bool = False) -> dict:
    """``{j: a[j, n]}`` for the P-recurrence.

    Examples
    --------
    >>> from coupledsv.ensemble.parameters import make_parameters
    >>> recurrence_a(0, make_parameters(0.5, 1, 1))[-2]
    0.0
    """
    return a_coefficients(n, params.nu, *_weights(params, exact))


def recurrence_b(n: int, params: CouplingParameters, exact: bool = False) -> dict:
    """``{j: b[j, n]}`` for the Q-recurrence."""
    return b_coefficients(n, params.nu, *_weights(params, exact))


@dataclass(frozen=True)
class RecurrenceCoefficients:
    """Tables ``a[j + 2, n]`` and ``b[j + 2, n]`` for ``n = 0..max_n``."""

    a: np.ndarray
    b: np.ndarray

    @classmethod
    def build(cls, params: CouplingParameters, max_n: int) -> "RecurrenceCoefficients":
        a = np.zeros((5, max_n + 1))
        b = np.zeros((5, max_n + 1))
        for n in range(max_n + 1):
            ca, cb = recurrence_a(n, params), recurrence_b(n, params)
            for row, j in enumerate(SHIFTS):
                a[row, n] = ca[j]
                b[row, n] = cb[j]
        a.setflags(write=False)
        b.setflags(write=False)
        return cls(a, b)

    def coefficient_a(self, j: int, n: int) -> float:
        return float(self.a[j + 2, n])

    def coefficient_b(self, j: int, n: int) -> float:
        return float(self.b[j + 2, n])
