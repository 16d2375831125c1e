"""Joint density of the squared singular values and its normalisation."""
from __future__ import annotations

import math

import numpy as np
from scipy import special as sc

from coupledsv.ensemble.parameters import CouplingParameters
from coupledsv.errors import DomainError
from coupledsv.specfun import hyp0f1


def log_psi(jmax: int, y: np.ndarray, delta: float) -> np.ndarray:
    """``log[y**(j/2) I_j(2 delta sqrt y)]`` for ``j = 0..jmax``; shape ``(len(y), jmax + 1)``."""
    j = np.arange(jmax + 1)[None, :]
    y = y[:, None]
    z = 2 * delta * np.sqrt(y)
    ive = sc.ive(j, z)
    with np.errstate(divide="ignore"):
        out = 0.5 * j * np.log(y) + np.log(ive) + z
    small = ive < 1e-250
    if np.any(small):
        ii, jj = np.nonzero(small)
        ys = y[ii, 0]
        # y**(j/2) I_j(2 delta sqrt y) = (delta y)**j / j! * 0F1(; j+1; delta**2 y)
        out[ii, jj] = jj * np.log(delta * ys) - sc.gammaln(jj + 1) + np.log(hyp0f1(jj + 1.0, delta**2 * ys))
    return out


def log_phi(jmax: int, y: np.ndarray, alpha: float, nu: int) -> np.ndarray:
    """``log[y**((j+nu)/2) K_{j+nu}(2 alpha sqrt y)]`` for ``j = 0..jmax``."""
    m = (np.arange(jmax + 1) + nu)[None, :]
    y = y[:, None]
    z = 2 * alpha * np.sqrt(y)
    with np.errstate(divide="ignore"):
        return 0.5 * m * np.log(y) + np.log(sc.kve(m, z)) - z


def _log_abs_det(logm: np.ndarray):
    """Sign and log-modulus of ``det(exp(logm))`` with row and column scaling."""
    rows = np.max(logm, axis=1, keepdims=True)
    scaled = logm - rows
    cols = np.max(scaled, axis=0, keepdims=True)
    sign, logdet = np.linalg.slogdet(np.exp(scaled - cols))
    return sign, logdet + float(np.sum(rows)) + float(np.sum(cols))


def log_normalisation(params: CouplingParameters) -> float:
    """``log Z_N`` via log-Gamma.

    ``Z_N = N! alpha**(N nu + N(N-1)/2) delta**(N(N-1)/2) / (2**N gap**(N nu + N**2))
    * prod_{j=1}^N Gamma(j) Gamma(j + nu)``.
    """
    N, nu = params.n_small, params.nu
    a, d, gap = params.alpha, params.delta, params.gap
    pairs = N * (N - 1) / 2
    return (
        math.lgamma(N + 1)
        + (N * nu + pairs) * math.log(a)
        + pairs * math.log(d)
        - N * math.log(2)
        - (N * nu + N * N) * math.log(gap)
        + sum(math.lgamma(j) + math.lgamma(j + nu) for j in range(1, N + 1))
    )


def _points(points, params):
    y = np.asarray(points, dtype=float).ravel()
    if y.size != params.n_small:
        raise DomainError(f"jpdf needs exactly N = {params.n_small} points, got {y.size}")
    if np.any(~(y > 0)) or np.any(~np.isfinite(y)):
        raise DomainError("jpdf points must be positive and finite")
    return y


def log_jpdf(points, params: CouplingParameters) -> float:
    """Logarithm of :func:`jpdf`; ``-inf`` when two points coincide."""
    y = _points(points, params)
    N = params.n_small
    if np.unique(y).size < N:
        return -math.inf
    s1, l1 = _log_abs_det(log_psi(N - 1, y, params.delta))
    s2, l2 = _log_abs_det(log_phi(N - 1, y, params.alpha, params.nu))
    if s1 * s2 <= 0:
        # both determinants change sign together under permutations
        return -math.inf
    return l1 + l2 - log_normalisation(params)


def jpdf(points, params: CouplingParameters) -> float:
    """Joint density of the ``N`` squared singular values (symmetric, unordered).

    ``det[y_i**((j-1)/2) I_{j-1}(2 delta sqrt y_i)] det[y_i**((j+nu-1)/2) K_{j+nu-1}(2 alpha sqrt y_i)] / Z_N``.
    Determinants are evaluated in log space after row and column scaling
    (LU with partial pivoting).  Coincident points give ``0``.

    Examples
    --------
    >>> from coupledsv.ensemble import make_parameters
    >>> jpdf([0.3, 0.3], make_parameters(0.5, 2, 2))
    0.0
    """
    lv = log_jpdf(points, params)
    return 0.0 if lv == -math.inf else math.exp(lv)
