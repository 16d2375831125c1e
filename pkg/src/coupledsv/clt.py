"""Central limit theorem for polynomial linear statistics.

The rescaled recurrence coefficients converge to the five coefficients of the
Laurent symbol ``s(w; mu) = (w + 1)**3 (w (1 - mu)**2 + (1 + mu)**2) / (4 w**2)``.
For polynomial ``f`` the Fourier data of ``f(s(w))`` on the unit circle is
computed exactly in rational arithmetic, and the limiting variance of
``sum_i f(y_i)`` is ``sum_{k>=1} k f_k f_{-k}``.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np
from scipy import stats

from coupledsv.ensemble.parameters import CouplingParameters
from coupledsv.ensemble.recurrence import a_coefficients
from coupledsv.errors import DomainError, NumericError
from coupledsv.sampler import linear_statistic, sample_batch

MAX_DEGREE = 20


def _rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(str(float(x)))


class LaurentPolynomial:
    """Finite Laurent series ``sum_k c_k w**k`` with rational coefficients.

    Examples
    --------
    >>> w = LaurentPolynomial({1: 1, 0: 1})
    >>> (w * w).coefficients == {2: 1, 1: 2, 0: 1}
    True
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Mapping[int, object] | None = None):
        self._c = {int(k): _rational(v) for k, v in (coeffs or {}).items() if _rational(v) != 0}

    @property
    def coefficients(self) -> dict:
        return dict(self._c)

    def __getitem__(self, k: int) -> Fraction:
        return self._c.get(k, Fraction(0))

    def degrees(self):
        return sorted(self._c)

    def __add__(self, other):
        other = other if isinstance(other, LaurentPolynomial) else LaurentPolynomial({0: other})
        out = dict(self._c)
        for k, v in other._c.items():
            out[k] = out.get(k, 0) + v
        return LaurentPolynomial(out)

    __radd__ = __add__

    def __mul__(self, other):
        if not isinstance(other, LaurentPolynomial):
            other = LaurentPolynomial({0: other})
        out: dict = {}
        for i, a in self._c.items():
            for j, b in other._c.items():
                out[i + j] = out.get(i + j, 0) + a * b
        return LaurentPolynomial(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, LaurentPolynomial) and self._c == other._c

    def __call__(self, w):
        w = np.asarray(w, dtype=complex)
        return sum(float(c) * w**k for k, c in self._c.items()) + 0 * w

    def __repr__(self):
        return f"LaurentPolynomial({ {k: str(v) for k, v in sorted(self._c.items())} })"


def _check_mu(mu):
    if not (0 <= float(mu) <= 1):
        raise DomainError("mu must lie in [0, 1]")
    return _rational(mu)


def limiting_recurrence_alphas(mu) -> tuple:
    """``(alpha_2, alpha_1, alpha_0, alpha_-1, alpha_-2)`` as floats."""
    return tuple(float(symbol_s(mu)[j]) for j in (2, 1, 0, -1, -2))


def symbol_s(mu) -> LaurentPolynomial:
    """Laurent symbol with coefficients ``alpha_j`` at ``w**j``.

    Examples
    --------
    >>> [symbol_s(1)[j] for j in (2, 1, 0, -1, -2)] == [0, 1, 3, 3, 1]
    True
    """
    m = _check_mu(mu)
    q = (1 - m) ** 2
    return LaurentPolynomial({2: q / 4, 1: m + q, 0: 3 * m + 3 * q / 2, -1: 3 * m + q, -2: m + q / 4})


def _coeffs(f) -> list:
    if isinstance(f, np.polynomial.Polynomial):
        f = f.coef
    c = [_rational(v) for v in f]
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    if len(c) - 1 > MAX_DEGREE:
        raise DomainError(f"polynomial degree above {MAX_DEGREE}")
    return c


def compose(f: Sequence, mu) -> LaurentPolynomial:
    """``f(s(w; mu))`` by Horner's rule in exact Laurent arithmetic."""
    s = symbol_s(mu)
    out = LaurentPolynomial()
    for c in reversed(_coeffs(f)):
        out = out * s + c
    return out


def fourier_coefficients(f: Sequence, mu) -> dict:
    """``{k: f_k}`` with ``f_k = (1/2 pi i) oint f(s(w)) w**k dw / w``, the coefficient of ``w**-k``.

    ``f`` is a sequence of ascending real coefficients (or a numpy
    ``Polynomial``); results are exact :class:`~fractions.Fraction`.
    """
    comp = compose(f, mu)
    return {-k: v for k, v in comp.coefficients.items()}


def fourier_coefficients_numeric(f: Sequence, mu: float, nodes: int = 256) -> dict:
    """Trapezoid rule on ``|w| = 1``; a floating-point cross-check of :func:`fourier_coefficients`."""
    w = np.exp(2j * np.pi * np.arange(nodes) / nodes)
    m = float(mu)
    s = (w + 1) ** 3 * (w * (1 - m) ** 2 + (1 + m) ** 2) / (4 * w**2)
    vals = np.polynomial.Polynomial([float(c) for c in _coeffs(f)])(s)
    deg = 2 * (len(_coeffs(f)) - 1)
    return {k: complex(np.mean(vals * w**k)) for k in range(-deg, deg + 1)}


def limiting_variance(f: Sequence, mu) -> float:
    """``sum_{k>=1} k f_k f_{-k}`` (exact, then rounded to float).

    Examples
    --------
    >>> limiting_variance([0, 1], 1), limiting_variance([0, 1], 0)
    (3.0, 1.125)
    """
    fk = fourier_coefficients(f, mu)
    total = sum((k * fk[k] * fk.get(-k, 0) for k in fk if k >= 1), Fraction(0))
    if total < 0:
        raise NumericError("negative limiting variance; Fourier coefficients are inconsistent")
    return float(total)


def primed_recurrence(j: int, n: int, n_scale: int, mu: float, nu: int = 0) -> float:
    """``a'_{j,n} = a_{j,n}(N alpha, N delta) (n+j)! (n+j+nu)! / (n! (n+nu)!)`` with ``N = n_scale``."""
    if j not in (-2, -1, 0, 1, 2):
        raise DomainError("j must lie in -2..2")
    mu = float(mu)
    a = n_scale * (1 + mu) / (2 * mu)
    d = n_scale * (1 - mu) / (2 * mu)
    gap = n_scale**2 / mu
    base = a_coefficients(n, nu, a * a, d * d, gap)[j]
    if n + j < 0:
        return 0.0
    lf = math.lgamma(n + j + 1) + math.lgamma(n + j + nu + 1) - math.lgamma(n + 1) - math.lgamma(n + nu + 1)
    return float(base * math.exp(lf))


@dataclass
class CLTReport:
    """Monte Carlo versus analytic variance of ``sum_i f(y_i)`` in the rescaled ensemble."""

    mu: float
    N: int
    M: int
    f: list
    trials: int
    failures: int
    sample_mean: float
    sample_variance: float
    analytic_variance: float
    ratio: float
    z_score: float
    skewness: float
    kurtosis: float
    seed: int

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def clt_experiment(params: CouplingParameters, f: Sequence, trials: int, seed: int) -> CLTReport:
    """Sample the rescaled ensemble and compare ``Var sum f(y_i)`` with :func:`limiting_variance`.

    The statistic is centred by its sample mean.  ``z_score`` uses the
    Gaussian standard error ``var * sqrt(2 / (trials - 1))``; skewness and
    excess kurtosis are advisory normality diagnostics.
    """
    if trials < 1000:
        raise DomainError("clt_experiment needs at least 1000 trials")
    coeffs = [float(c) for c in _coeffs(f)]
    batch = sample_batch(params, trials, seed, rescaled=True)
    ys = linear_statistic(batch, coeffs)
    var = float(np.var(ys, ddof=1))
    target = limiting_variance(coeffs, params.mu)
    se = target * math.sqrt(2 / (batch.count - 1))
    degenerate = var == 0.0
    return CLTReport(
        mu=params.mu, N=params.n_small, M=params.m_large, f=coeffs, trials=batch.count, failures=batch.failures,
        sample_mean=float(np.mean(ys)), sample_variance=var, analytic_variance=target,
        ratio=var / target if target > 0 else (1.0 if degenerate else math.inf),
        z_score=(var - target) / se if se > 0 else 0.0,
        skewness=0.0 if degenerate else float(stats.skew(ys)),
        kurtosis=0.0 if degenerate else float(stats.kurtosis(ys)),
        seed=int(seed),
    )
