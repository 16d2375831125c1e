"""Boundary forms of the joint density as ``mu -> 1`` and ``mu -> 0``."""
from __future__ import annotations

import math

import numpy as np
from scipy import special as sc

from coupledsv.errors import DomainError


def _prep(points, nu):
    y = np.asarray(points, dtype=float).ravel()
    if np.any(~(y > 0)):
        raise DomainError("points must be positive")
    if nu < 0 or int(nu) != nu:
        raise DomainError("nu must be a non-negative integer")
    return y, int(nu)


def _slog(mat):
    sign, ld = np.linalg.slogdet(mat)
    return sign, ld


def independent_product_density(points, nu: int) -> float:
    """Density reached as ``mu -> 1`` (independent factors).

    ``det[y_i**(j-1)] det[2 y_i**((j+nu-1)/2) K_{j+nu-1}(2 sqrt y_i)] / (N! prod Gamma(j)**2 Gamma(j+nu))``.
    """
    y, nu = _prep(points, nu)
    N = y.size
    j = np.arange(N)
    s1, l1 = _slog(y[:, None] ** j[None, :])
    m = j + nu
    z = 2 * np.sqrt(y)[:, None]
    logk = math.log(2) + 0.5 * m[None, :] * np.log(y)[:, None] + np.log(sc.kve(m[None, :], z)) - z
    rows = np.max(logk, axis=1, keepdims=True)
    s2, l2 = _slog(np.exp(logk - rows))
    l2 += float(np.sum(rows))
    lz = math.lgamma(N + 1) + sum(2 * math.lgamma(k) + math.lgamma(k + nu) for k in range(1, N + 1))
    return float(s1 * s2 * math.exp(l1 + l2 - lz))


def laguerre_limit_density(points, nu: int) -> float:
    """Density reached as ``mu -> 0`` in the squared singular values ``y``.

    ``2**(N(M-1)) / (N! prod Gamma(j) Gamma(j+nu)) det[y_i**((j-1)/2)]**2 prod y_i**((nu-1)/2) exp(-2 sqrt y_i)``.
    """
    y, nu = _prep(points, nu)
    N = y.size
    M = N + nu
    _, l1 = _slog(np.sqrt(y)[:, None] ** np.arange(N)[None, :])
    lz = math.lgamma(N + 1) + sum(math.lgamma(k) + math.lgamma(k + nu) for k in range(1, N + 1))
    log_w = np.sum(0.5 * (nu - 1) * np.log(y) - 2 * np.sqrt(y))
    return float(math.exp(N * (M - 1) * math.log(2) + 2 * l1 + log_w - lz))


def laguerre_density(v, nu: int) -> float:
    """Classical Laguerre (Wishart) eigenvalue density ``det[v_i**(j-1)]**2 prod v_i**nu exp(-v_i) / Z``."""
    v, nu = _prep(v, nu)
    N = v.size
    _, l1 = _slog(v[:, None] ** np.arange(N)[None, :])
    lz = math.lgamma(N + 1) + sum(math.lgamma(k) + math.lgamma(k + nu) for k in range(1, N + 1))
    return float(math.exp(2 * l1 + np.sum(nu * np.log(v) - v) - lz))


def laguerre_pushforward(points, nu: int) -> float:
    """Laguerre density in ``v = 2 sqrt(y)`` pulled back to ``y`` (Jacobian ``prod y_i**(-1/2)``)."""
    y, nu = _prep(points, nu)
    return laguerre_density(2 * np.sqrt(y), nu) * float(np.prod(y ** -0.5))
