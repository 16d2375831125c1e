"""Moment matrix and the exact inverse of its Hankel part."""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from coupledsv.ensemble.parameters import CouplingParameters
from coupledsv.errors import DomainError


def moment_matrix_entry(k: int, l: int, params: CouplingParameters) -> float:
    """``g_{k,l} = int_0^inf psi_l(x) phi_k(x) dx``.

    Closed form ``alpha**(k+nu) delta**l gap**(-k-nu-l-1) (k+l+nu)! / 2``.

    Examples
    --------
    >>> from coupledsv.ensemble import make_parameters
    >>> round(moment_matrix_entry(0, 0, make_parameters(0.5, 1, 1)), 12)
    0.25
    """
    if k < 0 or l < 0:
        raise DomainError("indices must be non-negative")
    nu = params.nu
    m = k + nu
    lg = (
        m * math.log(params.alpha)
        + (l * math.log(params.delta) if l else 0.0)
        - (m + l + 1) * math.log(params.gap)
        + math.lgamma(m + l + 1)
        - math.log(2)
    )
    return math.exp(lg)


def hankel_entry(k: int, l: int, nu: int) -> int:
    """``h_{k+l} = (k + l + nu)!``."""
    return math.factorial(k + l + nu)


def _falling(p: int, k: int) -> int:
    # (-p)_k
    out = 1
    for i in range(k):
        out *= -p + i
    return out


def hankel_inverse_entry(k: int, l: int, nu: int, n_small: int) -> Fraction:
    """Exact entry ``a_{k,l}`` of the inverse of ``[(k + l + nu)!]_{k,l<N}``.

    ``a_{k,l} = sum_{p<N} (nu+p)! (-p)_k (-p)_l / (p! (nu+k)! k! (nu+l)! l!)``.

    Examples
    --------
    >>> hankel_inverse_entry(0, 0, 3, 1)
    Fraction(1, 6)
    """
    if not (0 <= k < n_small and 0 <= l < n_small):
        raise DomainError("indices must lie in [0, N-1]")
    if nu < 0:
        raise DomainError("nu must be non-negative")
    fac = math.factorial
    num = sum(Fraction(fac(nu + p) * _falling(p, k) * _falling(p, l), fac(p)) for p in range(n_small))
    return num / (fac(nu + k) * fac(k) * fac(nu + l) * fac(l))


def hankel_inverse(nu: int, n_small: int):
    """The full ``N x N`` inverse as nested tuples of :class:`~fractions.Fraction`."""
    return tuple(tuple(hankel_inverse_entry(k, l, nu, n_small) for l in range(n_small)) for k in range(n_small))


def _panel_rule(t_max: float, levels: int, width: float):
    """Gauss-Legendre panels in ``t = sqrt(x)``: geometric towards 0, uniform on ``[1, t_max]``.

    The graded panels carry 24 nodes and the uniform ones 48.
    """
    import mpmath
    from mpmath.calculus.quadrature import GaussLegendre

    rule = GaussLegendre(mpmath.mp)
    graded = [mpmath.mpf(0)] + [mpmath.mpf(2) ** -i for i in range(levels, -1, -1)]
    uniform = [1 + width * j for j in range(int(math.ceil((t_max - 1) / width)) + 1)]
    nodes, weights = [], []
    for edges, degree in ((graded, 4), (uniform, 5)):
        base = rule.calc_nodes(degree, mpmath.mp.prec)
        for lo, hi in zip(edges[:-1], edges[1:]):
            half, mid = (hi - lo) / 2, (hi + lo) / 2
            for x, w in base:
                nodes.append(mid + half * x)
                weights.append(half * w)
    return nodes, weights


def basis_overlaps(mu: float, k_max: int, m_max: int, dps: int = 40):
    """Extended-precision quadrature of ``int_0^inf psi_k(x) phi_m(x) dx``.

    ``psi_k = gap**(k+1/2) delta**-k x**(k/2) I_k(2 delta sqrt x)`` and
    ``phi_m = gap**(m+1/2) alpha**-m x**(m/2) K_m(2 alpha sqrt x)``, where
    ``m`` is the full Bessel order (``l + nu``).  The integral is taken in
    ``t = sqrt(x)`` on Gauss-Legendre panels at ``dps`` digits, so that the
    exact rational combinations forming ``P_n`` and ``Q_m`` can be applied
    afterwards without losing the result to cancellation.  This is a quadrature
    and makes no use of the closed form in :func:`moment_matrix_entry`.

    Returns a ``(k_max + 1) x (m_max + 1)`` nested list of mpmath numbers.
    """
    import mpmath

    from coupledsv.ensemble.parameters import make_parameters
    from coupledsv.specfun import mp_besselk_ladder

    with mpmath.workdps(dps):
        alpha, delta, gap = make_parameters(mu, 1, 1).mp_values()
        # integrand ~ t**(k+m+1) exp(-2 (alpha - delta) t) with alpha - delta = 1
        t_max = dps * math.log(10) / 2 + (k_max + m_max + 2) * 2.5 + 10
        nodes, weights = _panel_rule(t_max, levels=dps + 10, width=8)
        rows_i = [[] for _ in range(k_max + 1)]
        rows_k = [[] for _ in range(m_max + 1)]
        for t, w in zip(nodes, weights):
            z = 2 * delta * t
            ivals = [mpmath.mpf(0)] * (k_max + 2)
            ivals[k_max + 1], ivals[k_max] = mpmath.besseli(k_max + 1, z), mpmath.besseli(k_max, z)
            for k in range(k_max, 0, -1):
                ivals[k - 1] = ivals[k + 1] + 2 * k / z * ivals[k]
            kvals = mp_besselk_ladder(0, m_max + 1, 2 * alpha * t)
            a, b = 2 * t * w, t * gap / delta
            for k in range(k_max + 1):
                rows_i[k].append(a * ivals[k])
                a *= b
            c, e = mpmath.mpf(1), t * gap / alpha
            for m in range(m_max + 1):
                rows_k[m].append(c * kvals[m])
                c *= e
        return [[gap * mpmath.fdot(rows_i[k], rows_k[m]) for m in range(m_max + 1)] for k in range(k_max + 1)]


def biorthogonality_matrix(params: CouplingParameters, n_max: int, dps: int = 40, overlaps=None) -> np.ndarray:
    """``[int P_n Q_m]`` for ``n, m <= n_max`` by extended-precision quadrature.

    ``P_n`` and ``Q_m`` are exact rational combinations of the basis
    functions, so the integral is assembled from :func:`basis_overlaps` with
    the coefficient tables of :class:`BiorthogonalSystem`.  Pass precomputed
    ``overlaps`` (covering Bessel orders up to ``n_max + nu``) to share work
    across several ``nu``.
    """
    import mpmath

    from coupledsv._numerics import mpf_fraction
    from coupledsv.ensemble.biorthogonal import BiorthogonalSystem

    if params.weight_scale != 1:
        raise DomainError("biorthogonality_matrix expects unit weight scale")
    nu = params.nu
    sys = BiorthogonalSystem(params, max_n=n_max)
    with mpmath.workdps(dps):
        g = overlaps if overlaps is not None else basis_overlaps(params.mu, n_max, n_max + nu, dps)
        pc = [[mpf_fraction(c) for c in row] for row in sys.p_coeffs]
        qc = [[mpf_fraction(c) for c in row] for row in sys.q_coeffs]
        # inner[n][l] = sum_k P-coefficient * overlap(k, l + nu)
        inner = [[mpmath.fdot(pc[n], [g[k][l + nu] for k in range(n + 1)]) for l in range(n_max + 1)]
                 for n in range(n_max + 1)]
        out = np.empty((n_max + 1, n_max + 1))
        for n in range(n_max + 1):
            for m in range(n_max + 1):
                out[n, m] = float(mpmath.fdot(qc[m], inner[n][: m + 1]))
    return out
