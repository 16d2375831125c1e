"""Biorthogonal functions ``P_n`` and ``Q_n``.

Both families are finite combinations of Bessel-type basis functions:

``P_n(x) = sum_k rP[n, k] gap**(k + 1/2) delta**(-k) x**(k/2) I_k(2 delta sqrt(x))``

``Q_n(y) = sum_l rQ[n, l] gap**(l + nu + 1/2) alpha**(-l - nu) y**((l + nu)/2) K_{l+nu}(2 alpha sqrt(y))``

with ``gap = alpha**2 - delta**2`` and exact rational ``rP``, ``rQ``.

``P_n`` grows and ``Q_n`` shrinks factorially in ``n``, so internally the
*balanced* pair ``P_n / (n! (n+nu)!)`` and ``Q_n n! (n+nu)!`` is evaluated.
Each sum is formed from log-magnitudes with compensated summation; when the
result is smaller than ``CANCELLATION_THRESHOLD`` times its largest term the
point is recomputed with mpmath at a working precision that covers the digits
lost to cancellation.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import cached_property

import mpmath
import numpy as np
from scipy import special as sc

from coupledsv._numerics import mpf_fraction, needed_dps
from coupledsv.ensemble.parameters import CouplingParameters
from coupledsv.ensemble.recurrence import RecurrenceCoefficients
from coupledsv.errors import CapacityError, DomainError, NumericError
from coupledsv.specfun import bessel_i, bessel_k, hyp0f1, mp_besselk_ladder

DEFAULT_MAX_N = 40
CANCELLATION_THRESHOLD = 1e-4
MP_FLOOR_DPS = 30
MP_CEILING_DPS = 600
_IVE_UNDERFLOW = 1e-250


def raw_psi(j: int, x, params: CouplingParameters):
    """``x**(j/2) I_j(2 delta sqrt(x))``."""
    if j < 0:
        raise DomainError("j must be non-negative")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("x must be non-negative")
    return x ** (j / 2) * bessel_i(j, 2 * params.delta * np.sqrt(x))


def raw_phi(j: int, x, params: CouplingParameters):
    """``x**((j+nu)/2) K_{j+nu}(2 alpha sqrt(x))``."""
    if j < 0:
        raise DomainError("j must be non-negative")
    x = np.asarray(x, dtype=float)
    m = j + params.nu
    return x ** (m / 2) * bessel_k(m, 2 * params.alpha * np.sqrt(x))


def _as_points(x, allow_zero):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    bad = x < 0 if allow_zero else ~(x > 0)
    if np.any(bad) or np.any(~np.isfinite(x)):
        raise DomainError("evaluation points must be positive" + (" or zero" if allow_zero else ""))
    return x


class BiorthogonalSystem:
    """Exact coefficient tables and evaluators for ``P_n``, ``Q_n``, ``n <= max_n``.

    Parameters
    ----------
    params : CouplingParameters
    max_n : int, optional
        Highest prepared index.  Defaults to ``max(40, N + 2)`` so that the
        Christoffel-Darboux form (which needs ``P_{N+1}``) is always available.

    Notes
    -----
    Instances are immutable after construction; evaluation methods are pure.
    """

    def __init__(self, params: CouplingParameters, max_n: int | None = None):
        if max_n is None:
            max_n = max(DEFAULT_MAX_N, params.n_small + 2)
        if max_n < 0:
            raise DomainError("max_n must be non-negative")
        self.params = params
        self.max_n = int(max_n)
        nu = params.nu
        fac = math.factorial
        self.p_coeffs = tuple(
            tuple(
                Fraction((-1) ** (n + k) * fac(nu + n) * fac(n) * (fac(n) // fac(n - k)), fac(nu + k) * fac(k))
                for k in range(n + 1)
            )
            for n in range(self.max_n + 1)
        )
        self.q_coeffs = tuple(
            tuple(
                Fraction(2 * (-1) ** (n + l), fac(n) * fac(n - l) * fac(nu + l) * fac(l))
                for l in range(n + 1)
            )
            for n in range(self.max_n + 1)
        )
        size = self.max_n + 1
        self._bal_p = [[c / self._norm(n) for c in row] for n, row in enumerate(self.p_coeffs)]
        self._bal_q = [[c * self._norm(n) for c in row] for n, row in enumerate(self.q_coeffs)]
        self._logc_p, self._sgn_p = self._log_table(self._bal_p, size)
        self._logc_q, self._sgn_q = self._log_table(self._bal_q, size)

    def _norm(self, n):
        return math.factorial(n) * math.factorial(n + self.params.nu)

    @staticmethod
    def _log_table(rows, size):
        logc = np.full((size, size), -np.inf)
        sgn = np.zeros((size, size))
        for n, row in enumerate(rows):
            for k, c in enumerate(row):
                logc[n, k] = math.log(abs(c.numerator)) - math.log(c.denominator)
                sgn[n, k] = 1.0 if c > 0 else -1.0
        return logc, sgn

    @cached_property
    def recurrence(self) -> RecurrenceCoefficients:
        return RecurrenceCoefficients.build(self.params, self.max_n)

    def log_norm(self, n: int) -> float:
        """``log(n! (n+nu)!)``, the balancing factor between ``P_n`` and its balanced form."""
        return math.lgamma(n + 1) + math.lgamma(n + self.params.nu + 1)

    def _check_n(self, n):
        if n < 0 or n != int(n):
            raise DomainError("index must be a non-negative integer")
        if n > self.max_n:
            raise CapacityError(f"index {n} exceeds prepared max_n={self.max_n}")

    # -- basis functions in log form ------------------------------------------------
    def _log_psi_hat(self, kmax, x):
        """``log[gap**k delta**-k x**(k/2) I_k(2 delta sqrt x)]`` for ``k = 0..kmax``."""
        p = self.params
        k = np.arange(kmax + 1)[:, None]
        out = np.full((kmax + 1, x.size), -np.inf)
        out[0, x == 0] = 0.0
        pos = x > 0
        if np.any(pos):
            xp = x[pos][None, :]
            z = 2 * p.delta * np.sqrt(xp)
            ive = sc.ive(k, z)
            with np.errstate(divide="ignore"):
                lg = k * math.log(p.gap) - k * math.log(p.delta) + 0.5 * k * np.log(xp) + np.log(ive) + z
            small = ive < _IVE_UNDERFLOW
            if np.any(small):
                kk, ii = np.nonzero(small)
                xs = xp[0, ii]
                series = (
                    kk * np.log(p.gap * xs) - sc.gammaln(kk + 1) + np.log(hyp0f1(kk + 1.0, p.delta**2 * xs))
                )
                lg[kk, ii] = series
            out[:, pos] = lg
        return out

    def _log_phi_hat(self, lmax, y):
        """``log[gap**(m+1/2) alpha**-m y**(m/2) K_m(2 alpha sqrt y)]``, ``m = l + nu``."""
        p = self.params
        m = (np.arange(lmax + 1) + p.nu)[:, None]
        z = 2 * p.alpha * np.sqrt(y)[None, :]
        kve = sc.kve(m, z)
        with np.errstate(divide="ignore"):
            return (m + 0.5) * math.log(p.gap) - m * math.log(p.alpha) + 0.5 * m * np.log(y)[None, :] + np.log(kve) - z

    # -- balanced evaluation ---------------------------------------------------------
    def _combine(self, logc, sgn, logb, n_max, extra_log=0.0):
        """Sum ``sgn * exp(logc + logb)`` over the basis index.

        Returns mantissas, their log-scales (``value = mantissa * exp(scale)``)
        and the cancellation ratios.
        """
        lc = logc[: n_max + 1, : n_max + 1][:, :, None]
        lt = lc + logb[None, : n_max + 1, :]
        peak = np.max(lt, axis=1)
        safe_peak = np.where(np.isfinite(peak), peak, 0.0)
        with np.errstate(invalid="ignore", over="ignore"):
            scaled = sgn[: n_max + 1, : n_max + 1][:, :, None] * np.exp(lt - safe_peak[:, None, :])
        scaled = np.where(np.isfinite(lt), scaled, 0.0)
        s = scaled[:, 0, :].copy()
        comp = np.zeros_like(s)
        for k in range(1, n_max + 1):
            t = scaled[:, k, :]
            tmp = s + t
            comp += np.where(np.abs(s) >= np.abs(t), (s - tmp) + t, (t - tmp) + s)
            s = tmp
        s = s + comp
        bad = ~np.isfinite(peak) & np.any(np.isnan(lt) | (lt == np.inf), axis=1)
        return s, safe_peak + extra_log, np.abs(s), bad

    def _parts(self, kind, x, n_max):
        """Balanced values as ``mantissa * exp(scale)`` with one scale per point.

        Keeps products ``P_n(x) Q_n(y)`` finite when the factors themselves
        overflow or underflow (large ``delta`` or ``alpha``).
        """
        if kind == "P":
            logb = self._log_psi_hat(n_max, x)
            s, peak, ratio, bad = self._combine(self._logc_p, self._sgn_p, logb, n_max, 0.5 * math.log(self.params.gap))
            flag = (ratio < CANCELLATION_THRESHOLD) | bad
        else:
            logb = self._log_phi_hat(n_max, x)
            s, peak, ratio, bad = self._combine(self._logc_q, self._sgn_q, logb, n_max)
            flag = (ratio < CANCELLATION_THRESHOLD) | bad | ~np.all(np.isfinite(logb), axis=0)[None, :]
        scale = np.max(np.where(s != 0, peak, -np.inf), axis=0)
        scale = np.where(np.isfinite(scale), scale, 0.0)
        with np.errstate(under="ignore"):
            mant = s * np.exp(peak - scale[None, :])
        for i in np.nonzero(np.any(flag, axis=0))[0]:
            ns = np.nonzero(flag[:, i])[0]
            vals = self._mp_balanced(kind, float(x[i]), ns, float(np.min(ratio[ns, i])), as_mp=True)
            with mpmath.workdps(MP_FLOOR_DPS):
                mant[ns, i] = [float(v / mpmath.exp(scale[i])) for v in vals]
        if not np.all(np.isfinite(mant)):
            raise NumericError(f"non-finite balanced {kind}_n values")
        return mant, scale

    def p_scaled(self, x, n_max: int | None = None):
        """``(m, s)`` with balanced ``P_n(x) = m[n] * exp(s)``; ``s`` is shared by all ``n``."""
        n_max = self.max_n if n_max is None else n_max
        self._check_n(n_max)
        return self._parts("P", _as_points(x, allow_zero=True), n_max)

    def q_scaled(self, y, n_max: int | None = None):
        """``(m, s)`` with balanced ``Q_n(y) = m[n] * exp(s)``."""
        n_max = self.max_n if n_max is None else n_max
        self._check_n(n_max)
        return self._parts("Q", _as_points(y, allow_zero=False), n_max)

    def p_balanced(self, x, n_max: int | None = None) -> np.ndarray:
        """``P_n(x) / (n! (n+nu)!)`` for ``n = 0..n_max``; array of shape ``(n_max + 1, len(x))``."""
        mant, scale = self.p_scaled(x, n_max)
        with np.errstate(over="ignore", under="ignore"):
            return mant * np.exp(scale)[None, :]

    def q_balanced(self, y, n_max: int | None = None) -> np.ndarray:
        """``Q_n(y) n! (n+nu)!`` for ``n = 0..n_max``; array of shape ``(n_max + 1, len(y))``."""
        mant, scale = self.q_scaled(y, n_max)
        with np.errstate(over="ignore", under="ignore"):
            return mant * np.exp(scale)[None, :]

    # -- extended precision ----------------------------------------------------------
    def _mp_basis(self, kind, x, kmax):
        alpha, delta, gap = self.params.mp_values()
        x = mpmath.mpf(x)
        if kind == "P":
            out = []
            term = mpmath.mpf(1)
            for k in range(kmax + 1):
                if k:
                    term = term * gap * x / k
                out.append(term * mpmath.hyp0f1(k + 1, delta * delta * x) if x else (term if k == 0 else mpmath.mpf(0)))
            return out, mpmath.sqrt(gap)
        nu = self.params.nu
        z = 2 * alpha * mpmath.sqrt(x)
        kvals = mp_besselk_ladder(nu, kmax + 1, z)
        return [
            gap ** (l + nu + mpmath.mpf(1) / 2) * alpha ** (-(l + nu)) * x ** (mpmath.mpf(l + nu) / 2) * kvals[l]
            for l in range(kmax + 1)
        ], mpmath.mpf(1)

    def _mp_balanced(self, kind, x, ns, ratio=1.0, as_mp=False):
        """Recompute balanced ``P`` or ``Q`` at one point for the indices ``ns``.

        ``ratio`` is the smallest float cancellation ratio seen for this point
        and seeds the working precision.
        """
        table = self._bal_p if kind == "P" else self._bal_q
        kmax = int(max(ns))
        lost = -math.log10(ratio) if 0 < ratio < 1 else 0.0
        dps = min(MP_CEILING_DPS, max(MP_FLOOR_DPS, int(lost) + 30))
        while True:
            with mpmath.workdps(dps):
                basis, pref = self._mp_basis(kind, x, kmax)
                want = dps
                results = []
                for n in ns:
                    terms = [mpf_fraction(c) * basis[k] for k, c in enumerate(table[n])]
                    total = mpmath.fsum(terms)
                    want = max(want, needed_dps(total, terms, MP_FLOOR_DPS))
                    results.append(pref * total)
            if want <= dps:
                return results if as_mp else np.array([float(r) for r in results])
            if dps >= MP_CEILING_DPS:
                raise NumericError(f"cancellation in {kind}_n exceeds {MP_CEILING_DPS} digits")
            dps = min(want, MP_CEILING_DPS)

    # -- public evaluators -----------------------------------------------------------
    def p_all(self, x, n_max: int | None = None) -> np.ndarray:
        """Unbalanced ``P_n(x)`` for ``n = 0..n_max`` (may overflow for large ``n``)."""
        bal = self.p_balanced(x, n_max)
        scale = np.exp([self.log_norm(n) for n in range(bal.shape[0])])[:, None]
        return bal * scale

    def q_all(self, y, n_max: int | None = None) -> np.ndarray:
        """Unbalanced ``Q_n(y)`` for ``n = 0..n_max``."""
        bal = self.q_balanced(y, n_max)
        scale = np.exp([-self.log_norm(n) for n in range(bal.shape[0])])[:, None]
        return bal * scale

    def eval_P(self, n: int, x):
        """``P_n(x)`` for ``x >= 0``.

        Examples
        --------
        >>> from coupledsv.ensemble.parameters import make_parameters
        >>> sys = BiorthogonalSystem(make_parameters(0.5, 2, 2), max_n=3)
        >>> round(float(sys.eval_P(0, 0.0)), 12)  # sqrt(gap) = sqrt(2)
        1.414213562373
        """
        self._check_n(n)
        scalar = np.ndim(x) == 0
        out = self.p_balanced(x, n)[n] * math.exp(self.log_norm(n))
        return out[0] if scalar else out

    def eval_Q(self, n: int, y):
        """``Q_n(y)`` for ``y > 0``."""
        self._check_n(n)
        scalar = np.ndim(y) == 0
        out = self.q_balanced(y, n)[n] * math.exp(-self.log_norm(n))
        return out[0] if scalar else out
