"""Correlation kernel ``K_N(x, y)`` in several closed forms.

Methods
-------
direct-sum
    ``sum_{n<N} P_n(x) Q_n(y)``.
double-sum
    Explicit double sum over Bessel products with exact rational weights.
christoffel-darboux
    Boundary terms of the five-term recurrences divided by ``x - y``.
double-contour
    Residue sum in ``t`` times a Mellin-Barnes line integral in ``s``;
    implemented in :mod:`coupledsv.quadrature.contour`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from coupledsv._numerics import mpf_fraction, needed_dps
from coupledsv.ensemble.biorthogonal import MP_CEILING_DPS, MP_FLOOR_DPS, BiorthogonalSystem
from coupledsv.ensemble.recurrence import recurrence_a
from coupledsv.errors import DomainError, NumericError, ProximityError

DIRECT = "direct-sum"
DOUBLE = "double-sum"
CD = "christoffel-darboux"
CONTOUR = "double-contour"
METHODS = (DIRECT, DOUBLE, CD, CONTOUR)
ALIASES = {"direct": DIRECT, "double": DOUBLE, "cd": CD, "contour": CONTOUR}
for _m in METHODS:
    ALIASES[_m] = _m

PROXIMITY = 1e-4
DOUBLE_SUM_THRESHOLD = 1e-4


@dataclass(frozen=True)
class KernelValue:
    """A kernel evaluation together with the method that produced it."""

    x: float
    y: float
    value: float
    method: str


def resolve_method(method: str) -> str:
    try:
        return ALIASES[method]
    except KeyError:
        raise DomainError(f"unknown kernel method {method!r}; choose from {sorted(ALIASES)}") from None


def _pair(x, y):
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    if np.any(~(x > 0)) or np.any(~(y > 0)):
        raise DomainError("kernel arguments must be positive")
    return x.ravel(), y.ravel(), x.shape


def kernel_direct(x, y, sys: BiorthogonalSystem):
    """Direct biorthogonal sum, elementwise over broadcast ``x`` and ``y``."""
    xs, ys, shape = _pair(x, y)
    n = sys.params.n_small
    mp_, sx = sys.p_scaled(xs, n - 1)
    mq, sy = sys.q_scaled(ys, n - 1)
    with np.errstate(over="ignore", under="ignore"):
        return (np.sum(mp_ * mq, axis=0) * np.exp(sx + sy)).reshape(shape)


@lru_cache(maxsize=64)
def double_sum_weights(n_small: int, nu: int):
    """Exact weights ``W[k][l]`` with ``K_N = sqrt(gap) sum W[k][l] psihat_k(x) phihat_l(y)``."""
    fac = math.factorial
    table = []
    for k in range(n_small):
        row = []
        for l in range(n_small):
            acc = Fraction(0)
            for i in range(l + 1):
                acc += Fraction(
                    (-1) ** (i + k) * fac(nu + n_small + i),
                    fac(n_small - 1 - k) * fac(nu + k) * fac(i) * fac(l - i) * fac(k) * fac(nu + i) * (nu + k + i + 1),
                )
            row.append(2 * acc)
        table.append(tuple(row))
    return tuple(table)


def kernel_double(x, y, sys: BiorthogonalSystem):
    """Explicit double-sum form of the kernel, elementwise over ``x`` and ``y``."""
    xs, ys, shape = _pair(x, y)
    p = sys.params
    n = p.n_small
    weights = double_sum_weights(n, p.nu)
    logw = np.array([[math.log(abs(w)) if w else -np.inf for w in row] for row in weights])
    sgn = np.array([[(w > 0) - (w < 0) for w in row] for row in weights], dtype=float)
    lp = sys._log_psi_hat(n - 1, xs)
    lq = sys._log_phi_hat(n - 1, ys)
    lt = logw[:, :, None] + lp[:, None, :] + lq[None, :, :]
    lt = lt.reshape(n * n, -1)
    signs = np.repeat(sgn.reshape(n * n, 1), xs.size, axis=1)
    peak = np.max(lt, axis=0)
    safe = np.where(np.isfinite(peak), peak, 0.0)
    with np.errstate(invalid="ignore", over="ignore"):
        terms = np.where(np.isfinite(lt), signs * np.exp(lt - safe), 0.0)
    s = terms[0].copy()
    comp = np.zeros_like(s)
    for t in terms[1:]:
        tmp = s + t
        comp += np.where(np.abs(s) >= np.abs(t), (s - tmp) + t, (t - tmp) + s)
        s = tmp
    s = s + comp
    with np.errstate(over="ignore"):
        out = s * np.exp(safe + 0.5 * math.log(p.gap))
    flag = (np.abs(s) < DOUBLE_SUM_THRESHOLD) | ~np.isfinite(out) | ~np.isfinite(peak)
    for i in np.nonzero(flag)[0]:
        out[i] = _double_mp(sys, float(xs[i]), float(ys[i]), weights, float(abs(s[i])))
    return out.reshape(shape)


def _double_mp(sys, x, y, weights, ratio):
    n = sys.params.n_small
    lost = -math.log10(ratio) if 0 < ratio < 1 else 0.0
    dps = min(MP_CEILING_DPS, max(MP_FLOOR_DPS, int(lost) + 30))
    while True:
        with mpmath.workdps(dps):
            psi, _ = sys._mp_basis("P", x, n - 1)
            phi, _ = sys._mp_basis("Q", y, n - 1)
            terms = [mpf_fraction(weights[k][l]) * psi[k] * phi[l] for k in range(n) for l in range(n)]
            total = mpmath.fsum(terms)
            want = needed_dps(total, terms, MP_FLOOR_DPS)
            value = float(total * mpmath.sqrt(sys.params.mp_values()[2]))
        if want <= dps:
            return value
        if dps >= MP_CEILING_DPS:
            raise NumericError("double-sum kernel cancellation exceeds the precision ceiling")
        dps = min(want, MP_CEILING_DPS)


def kernel_cd(x, y, sys: BiorthogonalSystem, proximity: float = PROXIMITY):
    """Christoffel-Darboux form; requires ``N >= 2`` and ``|x - y| > proximity * max(x, y)``."""
    xs, ys, shape = _pair(x, y)
    p = sys.params
    n = p.n_small
    if n < 2:
        raise DomainError("the Christoffel-Darboux form needs N >= 2")
    if np.any(np.abs(xs - ys) <= proximity * np.maximum(xs, ys)):
        raise ProximityError("x and y too close for the Christoffel-Darboux form; use method='direct-sum'")
    P, sx = sys.p_scaled(xs, n + 1)
    Q, sy = sys.q_scaled(ys, n + 1)
    ln = sys.log_norm

    def a(j, m):
        return recurrence_a(m, p)[j]

    def term(coef, i, j):
        # coef * P_i(x) Q_j(y) expressed through the balanced functions
        return coef * math.exp(ln(i) - ln(j)) * P[i] * Q[j]

    num = (
        -term(a(-2, n), n - 2, n)
        - term(a(-2, n + 1), n - 1, n + 1)
        - term(a(-1, n), n - 1, n)
        + term(a(1, n - 1), n, n - 1)
        + term(a(2, n - 2), n, n - 2)
        + term(a(2, n - 1), n + 1, n - 1)
    )
    with np.errstate(over="ignore", under="ignore"):
        return (num * np.exp(sx + sy) / (xs - ys)).reshape(shape)


def kernel_values(x, y, sys: BiorthogonalSystem, method: str = DIRECT, contour=None):
    """Vectorised kernel evaluation with the chosen method."""
    method = resolve_method(method)
    if method == DIRECT:
        return kernel_direct(x, y, sys)
    if method == DOUBLE:
        return kernel_double(x, y, sys)
    if method == CD:
        return kernel_cd(x, y, sys)
    from coupledsv.quadrature.contour import kernel_double_contour

    return kernel_double_contour(x, y, sys, contour)


def kernel(x: float, y: float, sys: BiorthogonalSystem, method: str = DIRECT, contour=None) -> KernelValue:
    """Evaluate ``K_N(x, y)`` at one point pair.

    Examples
    --------
    >>> from coupledsv.ensemble import make_parameters
    >>> sys = BiorthogonalSystem(make_parameters(0.5, 1, 1), max_n=3)
    >>> kv = kernel(0.5, 1.0, sys)
    >>> kv.method
    'direct-sum'
    """
    method = resolve_method(method)
    value = float(np.asarray(kernel_values(x, y, sys, method, contour)).ravel()[0])
    if not math.isfinite(value):
        raise NumericError(f"non-finite kernel value from {method}")
    return KernelValue(float(x), float(y), value, method)


@lru_cache(maxsize=64)
def _laguerre_weights(n_small: int, nu: int):
    fac = math.factorial
    out = []
    for k in range(n_small):
        row = []
        for l in range(n_small):
            acc = Fraction(0)
            for i in range(l + 1):
                acc += Fraction(
                    (-1) ** (i + k) * fac(nu + n_small + i) * 2 ** (k + l + nu),
                    fac(n_small - 1 - k) * fac(nu + k) * fac(i) * fac(l - i) * fac(k) * fac(nu + i) * (nu + k + i + 1),
                )
            row.append(float(acc))
        out.append(row)
    return np.array(out)


def laguerre_type_kernel(x, y, n_small: int, nu: int):
    """Kernel of the Laguerre-type ensemble reached as ``mu -> 0``.

    ``exp(-sqrt x - sqrt y) (x y)**(-1/4) sum W[k, l] x**(k/2) y**((l + nu)/2)``.
    """
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    if np.any(~(x > 0)) or np.any(~(y > 0)):
        raise DomainError("arguments must be positive")
    w = _laguerre_weights(int(n_small), int(nu))
    k = np.arange(n_small)
    rx = np.sqrt(x)[..., None] ** k
    ry = np.sqrt(y)[..., None] ** (k + nu)
    total = np.einsum("...k,kl,...l->...", rx, w, ry)
    return np.exp(-np.sqrt(x) - np.sqrt(y)) / (x * y) ** 0.25 * total
