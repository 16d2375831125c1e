"""Contour-integral representations of ``P_n``, ``Q_n`` and the kernel.

Closed contours around the non-negative integers are evaluated exactly as
residue sums; vertical Mellin-Barnes lines use :func:`mellin_barnes_line`.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import special as sc

from coupledsv._numerics import neumaier_sum
from coupledsv.ensemble.biorthogonal import BiorthogonalSystem
from coupledsv.errors import ConvergenceError, DomainError
from coupledsv.quadrature.rules import ContourSpec, QuadratureResult, mellin_barnes_line
from coupledsv.specfun import hyp0f1, hyp2f1_terminating

CONTOUR_RTOL = 1e-6


def _positive(v, name):
    v = float(v)
    if not v > 0:
        raise DomainError(f"{name} must be positive")
    return v


def p_residues(n: int, x: float, sys: BiorthogonalSystem) -> np.ndarray:
    """The ``n + 1`` residue contributions whose sum is ``P_n(x)``.

    Residues of ``Gamma(t - n)`` sit at ``t = j`` with value
    ``(-1)**(n - j) / (n - j)!``.
    """
    p = sys.params
    nu = p.nu
    j = np.arange(n + 1)
    lg = (
        sc.gammaln(nu + n + 1) + 2 * sc.gammaln(n + 1) + 0.5 * math.log(p.gap)
        - sc.gammaln(n - j + 1) + j * math.log(p.gap * x) - 2 * sc.gammaln(j + 1) - sc.gammaln(j + nu + 1)
    )
    sign = (-1.0) ** (n - j)
    return sign * np.exp(lg) * hyp0f1(j + 1.0, p.delta**2 * x)


def eval_P_contour(n: int, x: float, sys: BiorthogonalSystem) -> float:
    """``P_n(x)`` from the closed-contour representation (exact residue sum)."""
    if n < 0:
        raise DomainError("n must be non-negative")
    x = float(x)
    if x < 0:
        raise DomainError("x must be non-negative")
    return float(neumaier_sum(p_residues(n, x, sys)))


def _q_integrand(n, y, sys):
    p = sys.params
    nu = p.nu
    rho2 = p.ratio**2
    log_ay = math.log(p.alpha**2 * y)

    def f(s):
        # Gamma(s)/Gamma(s-n) = (s-1)(s-2)...(s-n)
        poly = np.ones_like(s)
        for i in range(1, n + 1):
            poly = poly * (s - i)
        base = np.exp(sc.loggamma(s) + sc.loggamma(s + nu) - s * log_ay)
        return base * poly * hyp2f1_terminating(n, nu + s, s - n, rho2)

    return f


def eval_Q_contour_result(n: int, y: float, sys: BiorthogonalSystem, contour: ContourSpec | None = None) -> QuadratureResult:
    """Line-integral value of ``Q_n(y)`` with its error estimate."""
    if n < 0:
        raise DomainError("n must be non-negative")
    y = _positive(y, "y")
    p = sys.params
    pref = math.exp(
        p.nu * math.log1p(-p.ratio**2) + 0.5 * math.log(p.gap) - 2 * math.lgamma(n + 1) - math.lgamma(n + p.nu + 1)
    )
    r = mellin_barnes_line(_q_integrand(n, y, sys), contour)
    return QuadratureResult(pref * r.value, pref * r.error_estimate, r.evaluations)


def eval_Q_contour(n: int, y: float, sys: BiorthogonalSystem, contour: ContourSpec | None = None,
                   rtol: float = CONTOUR_RTOL) -> float:
    """``Q_n(y)`` by trapezoidal quadrature of its Mellin-Barnes representation.

    Raises :class:`ConvergenceError` when the error estimate exceeds
    ``rtol * |value|``.
    """
    r = eval_Q_contour_result(n, y, sys, contour)
    if not r.error_estimate <= rtol * abs(r.value):
        raise ConvergenceError("Mellin-Barnes estimate for Q_n above tolerance", r.value, r.error_estimate)
    return float(r.value)


def double_contour_terms(x: float, y: float, sys: BiorthogonalSystem, contour: ContourSpec | None = None):
    """Weighted contributions ``(delta/alpha)**(2k) K^(k)(x, y)`` for ``k = 0..N-1``.

    Returns ``(terms, error_estimate)``.  The ``t``-contour is a residue sum
    over the poles of ``Gamma(t - N + 1)`` at ``t = 0..N-1``; for each ``(k, m)``
    the remaining ``s``-integrand is a single Mellin-Barnes line integral.
    """
    x = _positive(x, "x")
    y = _positive(y, "y")
    contour = contour or ContourSpec()
    p = sys.params
    N, nu = p.n_small, p.nu
    rho2 = p.ratio**2
    s, w = contour.points()

    t = np.arange(N)
    # residue of Gamma(t - N + 1) at t = N - 1 - j is (-1)**j / j!
    j = N - 1 - t
    log_t = (
        (t + 1) * math.log(p.gap) + t * math.log(x) - 2 * sc.gammaln(t + 1) - sc.gammaln(t + nu + 1) - sc.gammaln(j + 1)
    )
    t_factor = (-1.0) ** j * np.exp(log_t) * hyp0f1(t + 1.0, p.delta**2 * x) * math.exp(nu * math.log1p(-rho2))

    base = np.exp(2 * sc.loggamma(s) - s * math.log(p.alpha**2 * y))
    terms = np.zeros(N)
    err = 0.0
    for k in range(N):
        gk = base * np.exp(sc.loggamma(s + nu + k))
        total = np.zeros_like(s)
        for m in range(k + 1):
            # Gamma(s - t + m - 1) / Gamma(s - t + k) = 1 / prod_{i=m-1}^{k-1} (s - t + i)
            shifted = s[None, :] - t[:, None]
            denom = np.ones((N, s.size), dtype=complex)
            for i in range(m - 1, k):
                denom = denom * (shifted + i)
            inner = np.sum(t_factor[:, None] / denom, axis=0)
            total = total + (-1) ** m * math.comb(N, m) * inner * sc.rgamma(s - N + m)
        r = mellin_barnes_line(lambda _s, v=gk * total: v, contour)
        weight = rho2**k
        terms[k] = weight * r.value
        err += weight * r.error_estimate
    return terms, err


def kernel_double_contour(x, y, sys: BiorthogonalSystem, contour: ContourSpec | None = None,
                          rtol: float = CONTOUR_RTOL):
    """Double-contour form of ``K_N(x, y)``, elementwise over broadcast ``x``, ``y``."""
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    out = np.empty(x.shape)
    for idx in np.ndindex(x.shape):
        terms, err = double_contour_terms(x[idx], y[idx], sys, contour)
        value = float(neumaier_sum(terms))
        if not err <= max(rtol * abs(value), 1e-300):
            raise ConvergenceError("double-contour kernel estimate above tolerance", value, err)
        out[idx] = value
    return out
