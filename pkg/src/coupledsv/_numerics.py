"""Summation helpers shared by the evaluation code."""
from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import numpy as np


def neumaier_sum(terms, axis: int = 0):
    """Compensated (Kahan-Babuska-Neumaier) sum of ``terms`` along ``axis``.

    Works on real or complex arrays and returns an array with ``axis`` removed.
    """
    terms = np.moveaxis(np.asarray(terms), axis, 0)
    if terms.shape[0] == 0:
        return np.zeros(terms.shape[1:], dtype=terms.dtype)
    s = terms[0].copy()
    comp = np.zeros_like(s)
    for t in terms[1:]:
        tmp = s + t
        big = np.abs(s) >= np.abs(t)
        comp = comp + np.where(big, (s - tmp) + t, (t - tmp) + s)
        s = tmp
    return s + comp


def cancellation_ratio(total, terms, axis: int = 0):
    """Return ``|total| / max|term|``; small values flag cancellation."""
    peak = np.max(np.abs(terms), axis=axis)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(peak > 0, np.abs(total) / np.where(peak > 0, peak, 1.0), 1.0)
    return ratio


def mpf_fraction(q: Fraction) -> mpmath.mpf:
    return mpmath.mpf(q.numerator) / q.denominator


def needed_dps(total, terms, floor: int = 30) -> int:
    """Working precision (decimal digits) that keeps ~20 significant digits."""
    peak = max((abs(t) for t in terms), default=mpmath.mpf(0))
    if peak == 0:
        return floor
    if total == 0:
        return 2 * floor
    lost = max(0.0, float(mpmath.log10(peak / abs(total))))
    return max(floor, int(math.ceil(lost)) + 25)


def mp_sum_adaptive(build_terms, floor: int = 30, ceiling: int = 400):
    """Sum terms produced by ``build_terms(dps)`` at a precision that survives cancellation.

    ``build_terms`` is called inside an ``mpmath.workdps`` context and must
    return a list of mpf values.  The precision is raised until the digits
    lost to cancellation leave at least 20 significant digits.
    """
    dps = floor
    while True:
        with mpmath.workdps(dps):
            terms = build_terms(dps)
            total = mpmath.fsum(terms)
            want = needed_dps(total, terms, floor)
        if want <= dps or dps >= ceiling:
            return total
        dps = min(want, ceiling)
