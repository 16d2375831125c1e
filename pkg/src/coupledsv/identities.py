"""Exact verification of the combinatorial identities behind the kernel formulas.

Everything except the Gamma-ratio lemma runs in integer/rational arithmetic
with zero tolerance.  :func:`run_suite` sweeps the documented grids and
returns one verdict per identity family.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np
from scipy import special as sc

from coupledsv.ensemble.moments import hankel_entry, hankel_inverse
from coupledsv.ensemble.parameters import CouplingParameters, make_parameters
from coupledsv.ensemble.recurrence import a_coefficients, b_coefficients
from coupledsv.errors import DomainError

POLE_MARGIN = 1e-3
GAMMA_RTOL = 1e-10


def _inv_fact(n: int) -> Fraction:
    return Fraction(1, math.factorial(n)) if n >= 0 else Fraction(0)


def _delta(a: int, b: int) -> int:
    return 1 if a == b else 0


def _falling(p: int, k: int) -> int:
    # Pochhammer (-p)_k
    out = 1
    for i in range(k):
        out *= i - p
    return out


# -- sum identities with Kronecker right-hand sides --------------------------------

def summa_sides(which: int, i: int, j: int, nu: int):
    """Left sum and right Kronecker combination of identity ``which`` (1-4) as Fractions.

    Identity 4 carries the factor ``(nu + m + 2)``; see :func:`summa4_without_nu`.
    """
    if min(i, j, nu) < 0:
        raise DomainError("i, j, nu must be non-negative")
    d = _delta
    sign = lambda m: (-1) ** (m + i)  # noqa: E731
    ms = range(i + 1)
    if which == 1:
        lhs = sum(sign(m) * _inv_fact(i - m) * _inv_fact(m - j) for m in ms)
        rhs = Fraction(d(i, j))
    elif which == 2:
        lhs = sum(sign(m) * (nu + m + 1) * (m + 1) ** 2 * _inv_fact(i - m) * _inv_fact(m + 1 - j) for m in ms)
        rhs = Fraction(
            (nu + i + 1) * (i + 1) ** 2 * d(i + 1, j)
            + (i * i + 2 * i * (nu + i) + nu + 3 * i + 1) * d(i, j)
            + (nu + 3 * i) * d(i - 1, j)
            + d(i - 2, j)
        )
    elif which == 3:
        lhs = sum(sign(m) * (nu + m + 1) ** 2 * (m + 1) * _inv_fact(i - m) * _inv_fact(m + 1 - j) for m in ms)
        rhs = Fraction(
            (i + 1) * (i + nu + 1) ** 2 * d(i + 1, j)
            + ((nu + i) ** 2 + 2 * (i + 1) * (i + nu) + i + 1) * d(i, j)
            + (2 * nu + 3 * i) * d(i - 1, j)
            + d(i - 2, j)
        )
    elif which == 4:
        lhs = _summa4_lhs(i, j, nu, lambda m: nu + m + 2)
        rhs = _summa4_rhs(i, j, nu)
    else:
        raise DomainError("identity index must be 1..4")
    return Fraction(lhs), rhs


def _summa4_lhs(i, j, nu, last):
    return sum(
        (-1) ** (m + i) * (m + 1) * (m + 2) * (nu + m + 1) * last(m) * _inv_fact(i - m) * _inv_fact(m + 2 - j)
        for m in range(i + 1)
    )


def _summa4_rhs(i, j, nu):
    d = _delta
    return Fraction(
        (nu + i + 2) * (nu + i + 1) * (i + 2) * (i + 1) * d(i + 2, j)
        + 2 * (i + 1) * (nu + 2 * i + 2) * (nu + i + 1) * d(i + 1, j)
        + ((nu + i) * (nu + 5 * i + 3) + i * (i + 3) + 2) * d(i, j)
        + 2 * (nu + 2 * i) * d(i - 1, j)
        + d(i - 2, j)
    )


def summa4_without_nu(i: int, j: int, nu: int) -> bool:
    """Identity 4 with the factor ``(m + 2)`` in place of ``(nu + m + 2)``; holds only for ``nu = 0``."""
    return Fraction(_summa4_lhs(i, j, nu, lambda m: m + 2)) == _summa4_rhs(i, j, nu)


def check_summa(i: int, j: int, nu: int) -> bool:
    """All four sum identities hold exactly at ``(i, j, nu)``.

    Examples
    --------
    >>> check_summa(3, 2, 1)
    True
    """
    return all(lhs == rhs for lhs, rhs in (summa_sides(w, i, j, nu) for w in (1, 2, 3, 4)))


# -- the factorial sum S(alpha; k, r, N) --------------------------------------------

def s_direct(alpha: int, k: int, r: int, n: int) -> Fraction:
    """``sum_{p<N} p! / ((p-k)! (p-r)!) (alpha + p)!``."""
    fac = math.factorial
    return Fraction(sum(fac(p) * fac(alpha + p) * _inv_fact(p - k) * _inv_fact(p - r) for p in range(n)))


def s_closed(alpha: int, k: int, r: int, n: int) -> Fraction:
    """Closed form of :func:`s_direct` as a single alternating sum over ``i <= r``."""
    fac = math.factorial
    pref = Fraction((-1) ** r * fac(alpha + r) * fac(r), fac(n - 1 - k))
    inner = sum(
        Fraction((-1) ** i * fac(n + i + alpha), fac(i + alpha) * fac(i) * fac(r - i) * (alpha + k + i + 1))
        for i in range(r + 1)
    )
    return pref * inner


def check_prop61(alpha_int: int, k: int, r: int, n_cap: int) -> bool:
    """Direct sum equals closed form, the ``r``-recurrence holds, and the ``r = 0`` value matches.

    ``n_cap`` is ``N``; requires ``0 <= k, r <= N - 1``.
    """
    n = n_cap
    if not (alpha_int >= 0 and 0 <= k < n and 0 <= r < n):
        raise DomainError("need alpha >= 0 and 0 <= k, r <= N - 1")
    ok = s_direct(alpha_int, k, r, n) == s_closed(alpha_int, k, r, n)
    if r + 1 < n:
        ok &= s_direct(alpha_int, k, r + 1, n) == (
            s_direct(alpha_int + 1, k, r, n) - (alpha_int + r + 1) * s_direct(alpha_int, k, r, n)
        )
    if r == 0:
        fac = math.factorial
        ok &= s_direct(alpha_int, k, 0, n) == Fraction(fac(n + alpha_int), (alpha_int + k + 1) * fac(n - k - 1))
    return bool(ok)


def check_corollary(m_large: int, n_small: int, k: int, l: int) -> bool:
    """``sum_p (M-N+p)!/p! (-p)_k (-p)_l`` against its single-sum closed form."""
    fac = math.factorial
    M, N = m_large, n_small
    if not (M >= N >= 1 and 0 <= k < N and 0 <= l < N):
        raise DomainError("need M >= N >= 1 and 0 <= k, l <= N - 1")
    lhs = sum(Fraction(fac(M - N + p) * _falling(p, k) * _falling(p, l), fac(p)) for p in range(N))
    rhs = Fraction(fac(M - N + l) * fac(l), fac(N - 1 - k)) * sum(
        Fraction((-1) ** (i + k) * fac(i + M), fac(M - N + i) * fac(i) * fac(l - i) * (M - N + k + i + 1))
        for i in range(l + 1)
    )
    return lhs == rhs


# -- Gamma-ratio lemma ---------------------------------------------------------------

def _near_pole(z: float) -> bool:
    return z <= 0.5 and abs(z - round(z)) < POLE_MARGIN


def _gamma(z: float) -> float:
    return float(sc.gammasgn(z) * math.exp(sc.gammaln(z)))


def _rgamma(z: float) -> float:
    return float(sc.rgamma(z))


def gamma_ratio_sides(t: float, s: float, k: int, n: int):
    """Left and right sides of the Gamma-ratio summation lemma, or ``None`` near a pole.

    ``sum_{n<N} Gamma(t-n)/Gamma(s-n) (-n)_k/(s-n)_k`` versus
    ``k! Gamma(t-N+1)/Gamma(s-t+k) sum_{m<=k} (-1)**m C(N, m) Gamma(s-t+m-1)/Gamma(s+m-N)
    - Gamma(t+1) Gamma(s-t-1) k! / (Gamma(s) Gamma(s-t+k))``.
    """
    if not (0 <= k < n):
        raise DomainError("need 0 <= k <= N - 1")
    numerators = [t - p for p in range(n)] + [t - n + 1, t + 1, s - t - 1] + [s - t + m - 1 for m in range(k + 1)]
    if any(_near_pole(z) for z in numerators):
        return None
    # (-n)_k / (s-n)_k / Gamma(s-n) = (-n)_k / Gamma(s-n+k)
    lhs = math.fsum(_gamma(t - p) * _falling(p, k) * _rgamma(s - p + k) for p in range(n))
    fk = math.factorial(k)
    inner = math.fsum(
        (-1) ** m * math.comb(n, m) * _gamma(s - t + m - 1) * _rgamma(s + m - n) for m in range(k + 1)
    )
    rhs = fk * _gamma(t - n + 1) * _rgamma(s - t + k) * inner - _gamma(t + 1) * _gamma(s - t - 1) * fk * _rgamma(s) * _rgamma(
        s - t + k
    )
    return lhs, rhs


def check_section9_sum(t: float, s: float, k: int, n_cap: int):
    """``True``/``False`` for agreement to ``1e-10`` relative; ``None`` (a skip) near a pole."""
    sides = gamma_ratio_sides(t, s, k, n_cap)
    if sides is None:
        return None
    lhs, rhs = sides
    return abs(lhs - rhs) <= GAMMA_RTOL * max(abs(lhs), abs(rhs), 1e-300)


# -- recurrence duality and Hankel inverse -------------------------------------------

DUALITY = ((2, -2, 2), (1, -1, 1), (0, 0, 0), (-1, 1, -1), (-2, 2, -2))


def check_recurrence_duality(n_cap: int, params: CouplingParameters, exact: bool = True) -> bool:
    """``a_{j,n} = b_{-j,n+j}`` for every ``n <= n_cap`` where ``n + j >= 0``.

    With ``exact=True`` the coefficients are Fractions in the binary value of
    ``mu`` and equality is literal; otherwise ``1e-12`` relative.
    """
    if n_cap > 50:
        raise DomainError("n_cap must be at most 50")
    if exact:
        a2, d2, gap = params.exact_values()
    else:
        a2, d2, gap = params.alpha**2, params.delta**2, params.gap
    nu = params.nu
    for n in range(n_cap + 1):
        a = a_coefficients(n, nu, a2, d2, gap)
        for j, jb, shift in DUALITY:
            m = n + shift
            if m < 0:
                continue
            b = b_coefficients(m, nu, a2, d2, gap)[jb]
            if exact:
                if a[j] != b:
                    return False
            elif abs(a[j] - b) > 1e-12 * max(abs(a[j]), abs(b)):
                return False
    return True


def check_hankel_inverse(nu: int, n_small: int) -> bool:
    """``[(k + l + nu)!] A = I`` exactly."""
    A = hankel_inverse(nu, n_small)
    for i in range(n_small):
        for k in range(n_small):
            if sum(hankel_entry(i, j, nu) * A[j][k] for j in range(n_small)) != (1 if i == k else 0):
                return False
    return True


# -- suite ---------------------------------------------------------------------------

@dataclass
class Verdict:
    family: str
    grid_size: int
    passes: int
    failures: int
    skips: int

    @property
    def ok(self) -> bool:
        return self.failures == 0 and self.passes > 0


def _tally(family, results):
    results = list(results)
    return Verdict(
        family,
        len(results),
        sum(r is True for r in results),
        sum(r is False for r in results),
        sum(r is None for r in results),
    )


def gamma_ratio_grid():
    """Deterministic grid of generic ``(t, s)`` pairs for ``N <= 7``."""
    rng = np.random.default_rng(20240611)
    for n in range(1, 8):
        for k in range(n):
            for _ in range(6):
                t = float(rng.uniform(-4.5, 4.5))
                s = float(rng.uniform(0.2, 12.0))
                yield t, s, k, n
    yield 0.3, 7.6, 0, 5
    yield 0.3, 9.1, 2, 6
    yield 2.0, 5.5, 1, 4  # t - n hits a pole: recorded as a skip


def run_suite(summa_max: int = 30, summa_nu: int = 10) -> list:
    """Sweep every identity family over its documented grid."""
    verdicts = [
        _tally("summa", (check_summa(i, j, nu) for nu in range(summa_nu + 1) for i in range(summa_max + 1)
                         for j in range(summa_max + 1))),
        _tally("factorial-sum", (check_prop61(a, k, r, n) for a in range(5) for n in range(1, 9) for k in range(n)
                          for r in range(n))),
        _tally("corollary", (check_corollary(n + nu, n, k, l) for nu in range(4) for n in range(1, 8)
                             for k in range(n) for l in range(n))),
        _tally("gamma-ratio", (check_section9_sum(*g) for g in gamma_ratio_grid())),
        _tally("recurrence-duality", (check_recurrence_duality(20, make_parameters(mu, 1, 1 + nu))
                                      for mu in (0.25, 0.75, 0.5, 0.2, 0.7) for nu in (0, 1, 3))),
        _tally("hankel-inverse", (check_hankel_inverse(nu, n) for n in range(1, 9) for nu in range(5))),
    ]
    return verdicts


def suite_json(verdicts) -> str:
    return json.dumps([{**asdict(v), "ok": v.ok} for v in verdicts], indent=2)
