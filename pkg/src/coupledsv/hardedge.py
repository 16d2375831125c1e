"""Hard-edge scaling limit: the Meijer G-kernel and the rescaled finite kernel.

``f(x) = G^{1,0}_{0,3}(-; 0, -nu, 0 | x)`` is an entire power series and
``g(y) = G^{2,0}_{0,3}(-; nu, 0, 0 | y)`` a Mellin-Barnes line integral.  The
limiting kernel is ``K_nu(x, y) = int_0^1 f(ux) g(uy) du``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy import special as sc

from coupledsv.ensemble.biorthogonal import BiorthogonalSystem
from coupledsv.ensemble.kernel import kernel_direct
from coupledsv.errors import ConvergenceError, DomainError
from coupledsv.quadrature.rules import ContourSpec, gauss_legendre_nodes, mellin_barnes_line

F_TERM_CAP = 400
F_CANCELLATION = 1e-4
G_RTOL = 1e-8
POLE_DISTANCE = 1e-8


@dataclass(frozen=True)
class HardEdgeContext:
    """Numerical settings for the limiting kernel.

    ``levels`` geometric panels ``[2**-(i+1), 2**-i]`` (plus ``[0, 2**-levels]``)
    each carry an ``order``-point Gauss-Legendre rule; the grading absorbs the
    logarithmic behaviour of ``g`` at the origin.
    """

    nu: int = 0
    order: int = 16
    levels: int = 30
    contour: ContourSpec = field(default_factory=ContourSpec)

    def __post_init__(self):
        if self.nu < 0 or int(self.nu) != self.nu:
            raise DomainError("nu must be a non-negative integer")

    def nodes(self):
        x, w = gauss_legendre_nodes(self.order)
        edges = np.concatenate([[0.0], 2.0 ** -np.arange(self.levels, -1, -1)])
        lo, hi = edges[:-1, None], edges[1:, None]
        return (lo + (hi - lo) * x).ravel(), ((hi - lo) * w).ravel()


def _f_series(x, nu, power):
    """``sum_k (-1)**k k**power x**k / (k!**2 (k+nu)!)`` and its cancellation ratio."""
    x = np.asarray(x, dtype=float)
    k = np.arange(F_TERM_CAP)
    with np.errstate(divide="ignore", invalid="ignore"):
        logt = k[:, None] * np.log(x.ravel())[None, :] - 2 * sc.gammaln(k + 1)[:, None] - sc.gammaln(k + nu + 1)[:, None]
    if power:
        with np.errstate(divide="ignore"):
            logt = logt + power * np.log(np.where(k > 0, k, 0.0))[:, None]
    logt[0, x.ravel() == 0] = (-np.inf if power else -math.lgamma(nu + 1))
    terms = np.where(np.isfinite(logt), (-1.0) ** k[:, None] * np.exp(logt), 0.0)
    if np.any(np.abs(terms[-1]) > 1e-300):
        raise ConvergenceError("Meijer f series not converged within the term cap")
    total = np.sum(terms, axis=0)
    total[x.ravel() == 0] = 0.0 if power else 1 / math.factorial(nu)
    big = np.max(np.abs(terms), axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(big > 0, np.abs(total) / big, 1.0)
    return total.reshape(x.shape), ratio.reshape(x.shape)


def _f_mp(x, nu, power):
    with mpmath.workdps(40):
        peak = max(1.0, 3 * float(x) ** (1 / 3))
        extra = int(peak / math.log(10)) + 5
    with mpmath.workdps(30 + extra):
        xm = mpmath.mpf(x)
        total = mpmath.mpf(0)
        term = 1 / mpmath.factorial(nu)
        k = 0
        while True:
            total += (k**power if power else 1) * term
            k += 1
            term = -term * xm / (k * k * (k + nu))
            if abs(term) * k**power < mpmath.mpf(10) ** (-(30 + extra)) * max(abs(total), mpmath.mpf(10) ** -300) and k > xm:
                break
        return float(total)


def _meijer_f_power(x, nu, power):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("meijer_f requires x >= 0")
    total, ratio = _f_series(x, nu, power)
    flat, rflat, xflat = total.ravel(), ratio.ravel(), x.ravel()
    for i in np.nonzero(rflat < F_CANCELLATION)[0]:
        flat[i] = _f_mp(xflat[i], nu, power)
    out = flat.reshape(x.shape)
    return out[()] if out.ndim == 0 else out


def meijer_f(x, nu: int):
    """``G^{1,0}_{0,3}(-; 0, -nu, 0 | x) = sum_k (-1)**k x**k / (k!**2 (k+nu)!)``.

    Alternating series summed in double precision; points where the sum is
    much smaller than its largest term are redone in mpmath.

    Examples
    --------
    >>> float(meijer_f(0.0, 2))
    0.5
    """
    return _meijer_f_power(x, nu, 0)


def meijer_f_xd(x, nu: int, order: int = 1):
    """``(x d/dx)**order f(x)`` by term-wise differentiation."""
    return _meijer_f_power(x, nu, order)


def _g_line(y, nu, contour, weight_power):
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(~(y > 0)):
        raise DomainError("meijer_g requires y > 0")
    contour = contour or ContourSpec()
    s, _ = contour.points()
    base = sc.loggamma(s) + sc.loggamma(s + nu) - sc.loggamma(1 - s)
    poly = (-s) ** weight_power

    def integrand(_s):
        return poly[None, :] * np.exp(base[None, :] - np.log(y)[:, None] * s[None, :])

    r = mellin_barnes_line(integrand, contour)
    return np.asarray(r.value), r.error_estimate


def meijer_g(y, nu: int, contour: ContourSpec | None = None, rtol: float = G_RTOL):
    """``G^{2,0}_{0,3}(-; nu, 0, 0 | y) = (1/2 pi i) int Gamma(s) Gamma(s+nu) / Gamma(1-s) y**(-s) ds``.

    The line ``Re s = c > 0`` passes right of every pole, so the double pole
    at ``s = 0`` for ``nu = 0`` needs no special treatment.
    """
    return meijer_g_yd(y, nu, 0, contour, rtol)


def meijer_g_yd(y, nu: int, order: int = 1, contour: ContourSpec | None = None, rtol: float = G_RTOL):
    """``(y d/dy)**order g(y)``: the Mellin integrand gains a factor ``(-s)**order``."""
    y_arr = np.asarray(y, dtype=float)
    vals, err = _g_line(y_arr, nu, contour, order)
    scale = float(np.max(np.abs(vals))) if vals.size else 0.0
    if not err <= max(rtol * scale, 1e-14):
        raise ConvergenceError("Meijer g line integral above tolerance", vals, err)
    out = vals.reshape(y_arr.shape)
    return out[()] if out.ndim == 0 else out


def limiting_kernel(x, y, nu: int, ctx: HardEdgeContext | None = None):
    """Hard-edge limit ``int_0^1 f(ux) g(uy) du``, elementwise over broadcast ``x``, ``y``."""
    ctx = ctx or HardEdgeContext(nu=nu)
    if ctx.nu != nu:
        ctx = HardEdgeContext(nu, ctx.order, ctx.levels, ctx.contour)
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    if np.any(~(x > 0)) or np.any(~(y > 0)):
        raise DomainError("limiting kernel arguments must be positive")
    u, w = ctx.nodes()
    xs, ys = np.unique(x), np.unique(y)
    fv = meijer_f(u[None, :] * xs[:, None], nu)
    gv = meijer_g((u[None, :] * ys[:, None]).ravel(), nu, ctx.contour).reshape(ys.size, u.size)
    table = (fv * w) @ gv.T
    out = table[np.searchsorted(xs, x), np.searchsorted(ys, y)]
    return out[()] if out.ndim == 0 else out


def limiting_kernel_derivative_form(x: float, y: float, nu: int, contour: ContourSpec | None = None) -> float:
    """Cross-check of :func:`limiting_kernel` through ``f``, ``g`` and their Euler derivatives.

    ``[f (nu yg' - y(yg')') + xf' (yg' - nu g) - x(xf')' g] / (x - y)`` with
    ``yg' = (y d/dy) g`` etc.; valid for ``x != y``.
    """
    if x == y:
        raise DomainError("the derivative form needs x != y")
    f0, f1, f2 = (float(meijer_f_xd(x, nu, k)) for k in range(3))
    g0, g1, g2 = (float(meijer_g_yd(y, nu, k, contour)) for k in range(3))
    return (f0 * (nu * g1 - g2) + f1 * (g1 - nu * g0) - f2 * g0) / (x - y)


def rescaled_finite_kernel(x, y, sys: BiorthogonalSystem):
    """``K_N(x / (N gap), y / (N gap)) / (N gap)`` with the direct-sum kernel; ``gap = 1/mu``."""
    p = sys.params
    if sys.max_n < p.n_small + 2:
        raise DomainError("system must prepare at least N + 2 functions")
    scale = p.n_small * p.gap
    return kernel_direct(np.asarray(x, dtype=float) / scale, np.asarray(y, dtype=float) / scale, sys) / scale


def scaling_limit_AB(s: complex, t: complex, n: int, nu: int):
    """The intermediate functions ``A(s, t; N)`` and ``B(s, t; N)`` of the large-``N`` analysis.

    Evaluated in mpmath so that the ``O(N**3)`` cancellations are exact to
    well below double precision.  Raises :class:`DomainError` near the poles
    ``s = N``, ``s = N - 1`` and ``t = N + 1``.
    """
    for val, pole in ((s, n), (s, n - 1), (t, n + 1)):
        if abs(complex(val) - pole) < POLE_DISTANCE:
            raise DomainError("A/B evaluated at a pole")
    with mpmath.workdps(50):
        S, T, N, v = mpmath.mpc(s), mpmath.mpc(t), mpmath.mpf(n), mpmath.mpf(nu)
        A = N**2 * (N + v) / (S - N) - (T - N) * (S + T + N + v)
        B = (
            N * (N + 1) * (N + v) * (N + v + 1) / ((T - N - 1) * (S - N))
            + N * (N - 1) * (N + v) * (N + v - 1) / ((S - N + 1) * (S - N))
            + 2 * N * (N + v) * (2 * N + v) / (S - N)
            - (T - N) * (T + S + 2 * N + 2 * v)
        )
        return complex(A), complex(B)
