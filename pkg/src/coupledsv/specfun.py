"""Special functions used throughout the package.

Gamma and the integer-order modified Bessel functions are thin, validated
wrappers around :mod:`scipy.special`; the hypergeometric sums are evaluated
here directly because they need complex parameters (Mellin-Barnes lines)
or must stay independent of the Bessel routines they are checked against.

All functions broadcast over numpy arrays.
"""
from __future__ import annotations

import numpy as np
from scipy import special as sc

from coupledsv._numerics import neumaier_sum
from coupledsv.errors import ConvergenceError, DomainError

POLE_DISTANCE = 1e-8
SERIES_TERM_CAP = 500
SERIES_RTOL = 1e-17


def log_gamma(x):
    """Natural log of the Gamma function for positive real ``x``."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("log_gamma requires x > 0")
    out = sc.gammaln(x)
    return out[()] if out.ndim == 0 else out


def _check_poles(z):
    z = np.asarray(z, dtype=complex)
    nearest = np.round(z.real)
    near_pole = (nearest <= 0) & (np.abs(z - nearest) < POLE_DISTANCE)
    if np.any(near_pole):
        raise DomainError("argument within 1e-8 of a pole of Gamma")
    return z


def gamma_complex(z):
    """Gamma function of a complex argument.

    Raises :class:`DomainError` within ``1e-8`` of a non-positive integer.
    """
    z = _check_poles(z)
    out = np.exp(sc.loggamma(z))
    return out[()] if out.ndim == 0 else out


def log_gamma_complex(z):
    """Analytic continuation of ``log Gamma(z)`` (imaginary part not reduced mod 2 pi)."""
    z = _check_poles(z)
    out = sc.loggamma(z)
    return out[()] if out.ndim == 0 else out


def _check_order(k):
    k = np.asarray(k)
    if not np.all(np.equal(np.mod(k, 1), 0)):
        raise DomainError("only integer Bessel orders are supported")
    return k


def bessel_i(k, z):
    """Modified Bessel function of the first kind, integer order ``k >= 0``, ``z >= 0``."""
    k = _check_order(k)
    z = np.asarray(z, dtype=float)
    if np.any(k < 0):
        raise DomainError("bessel_i order must be non-negative")
    if np.any(z < 0):
        raise DomainError("bessel_i requires z >= 0")
    out = sc.iv(k, z)
    if np.any(np.isinf(out)):
        raise OverflowError("bessel_i overflows; use bessel_ie")
    return out[()] if out.ndim == 0 else out


def bessel_ie(k, z):
    """Exponentially scaled ``exp(-z) I_k(z)``."""
    k = _check_order(k)
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise DomainError("bessel_ie requires z >= 0")
    out = sc.ive(np.abs(k), z)
    return out[()] if out.ndim == 0 else out


def bessel_k(k, z):
    """Modified Bessel function of the second kind, integer order, ``z > 0``.

    Negative orders are folded onto positive ones (``K_{-k} = K_k``).
    """
    k = np.abs(_check_order(k))
    z = np.asarray(z, dtype=float)
    if np.any(~(z > 0)):
        raise DomainError("bessel_k diverges at z <= 0")
    out = sc.kv(k, z)
    return out[()] if out.ndim == 0 else out


def bessel_ke(k, z):
    """Exponentially scaled ``exp(z) K_k(z)``."""
    k = np.abs(_check_order(k))
    z = np.asarray(z, dtype=float)
    if np.any(~(z > 0)):
        raise DomainError("bessel_ke diverges at z <= 0")
    out = sc.kve(k, z)
    return out[()] if out.ndim == 0 else out


def hyp0f1(c, z):
    """Confluent limit function ``0F1(; c; z) = sum_m z^m / ((c)_m m!)``.

    Direct ascending series with compensated summation.  For ``z > 0`` every
    term is positive, so the only limitation is the 500-term cap, which is
    reached near ``z ~ 6e4``.
    """
    c, z = np.broadcast_arrays(np.asarray(c, dtype=float), np.asarray(z, dtype=float))
    if np.any(~(c > 0)):
        raise DomainError("hyp0f1 requires c > 0")
    term = np.ones(c.shape)
    total = np.ones(c.shape)
    comp = np.zeros(c.shape)
    for m in range(SERIES_TERM_CAP):
        with np.errstate(over="ignore"):
            term = term * z / ((c + m) * (m + 1))
        if not np.all(np.isfinite(term)):
            break
        tmp = total + term
        comp += np.where(np.abs(total) >= np.abs(term), (total - tmp) + term, (term - tmp) + total)
        total = tmp
        if np.all(np.abs(term) <= SERIES_RTOL * np.abs(total + comp)) and m > 2:
            out = total + comp
            return out[()] if out.ndim == 0 else out
    raise ConvergenceError("hyp0f1 series did not converge within 500 terms", total + comp)
    out = total + comp
    return out[()] if out.ndim == 0 else out


def hyp2f1_terminating(n: int, b, c, z):
    """Terminating Gauss sum ``2F1(-n, b; c; z)`` with ``n + 1`` terms.

    ``b``, ``c`` and ``z`` may be complex arrays (the Mellin-Barnes
    integrands pass ``c = s - n`` along a vertical line).
    """
    if n < 0 or int(n) != n:
        raise DomainError("n must be a non-negative integer")
    n = int(n)
    b, c, z = np.broadcast_arrays(np.asarray(b), np.asarray(c), np.asarray(z))
    dtype = np.result_type(b, c, z, float)
    if n > 0:
        forbidden = np.arange(0, -n, -1)
        cc = np.asarray(c, dtype=complex)
        if np.any(np.isin(cc, forbidden)):
            raise DomainError("c in {0, -1, ..., -(n-1)} makes the sum undefined")
    terms = np.empty((n + 1,) + b.shape, dtype=dtype)
    term = np.ones(b.shape, dtype=dtype)
    terms[0] = term
    for l in range(n):
        term = term * (-n + l) * (b + l) / ((c + l) * (l + 1)) * z
        terms[l + 1] = term
    out = neumaier_sum(terms, axis=0)
    return out[()] if np.ndim(out) == 0 else out


def mp_besselk_ladder(order: int, count: int, z):
    """``[K_order(z), ..., K_{order+count-1}(z)]`` as mpmath numbers.

    ``K_0`` and ``K_1`` come from their logarithmic power series, summed with
    enough guard digits to absorb the ``exp(2z)`` cancellation; higher orders
    follow from the upward recurrence ``K_{m+1} = K_{m-1} + (2m/z) K_m``,
    which is stable for ``K``.  The result carries the caller's working
    precision.
    """
    import mpmath

    z = mpmath.mpf(z)
    if z <= 0:
        raise DomainError("K ladder requires z > 0")
    target = mpmath.mp.dps
    if z > 400:
        k0, k1 = mpmath.besselk(0, z), mpmath.besselk(1, z)
    else:
        guard = int(2 * float(z) * 0.4343) + 15
        with mpmath.workdps(target + guard):
            q = z * z / 4
            eps = mpmath.mpf(10) ** (-(target + guard))
            i0 = i1 = s0 = s1 = mpmath.mpf(0)
            term = mpmath.mpf(1)  # (z^2/4)^k / (k!)^2
            harm = mpmath.mpf(0)
            k = 0
            while True:
                t1 = term / (k + 1)  # (z^2/4)^k / (k! (k+1)!)
                i0 += term
                i1 += t1
                s0 += harm * term
                s1 += (2 * harm + mpmath.mpf(1) / (k + 1)) * t1
                if k > z and term < eps * i0:
                    break
                k += 1
                harm += mpmath.mpf(1) / k
                term = term * q / (k * k)
            lg = mpmath.log(z / 2)
            k0 = -(lg + mpmath.euler) * i0 + s0
            i1 = i1 * z / 2
            k1 = 1 / z + lg * i1 - (z / 4) * (s1 - 2 * mpmath.euler * (i1 * 2 / z))
            k0, k1 = +k0, +k1
    ladder = [k0, k1]
    top = order + count
    for m in range(1, top - 1):
        ladder.append(ladder[m - 1] + 2 * m / z * ladder[m])
    return ladder[order:top]
