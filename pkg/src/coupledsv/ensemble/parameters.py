"""Coupling parameters of the ensemble."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from coupledsv.errors import DomainError


@dataclass(frozen=True)
class CouplingParameters:
    """Coupling ``mu`` together with matrix sizes and derived weights.

    The weight of a pair ``(X1, X2)`` is
    ``exp(-alpha Tr(X1 X1* + X2* X2) + delta Tr(X1 X2 + X2* X1*))`` with
    ``alpha = (1 + mu) / (2 mu)`` and ``delta = (1 - mu) / (2 mu)``.

    ``weight_scale`` multiplies both ``alpha`` and ``delta``; the rescaled
    ensemble used for linear statistics has ``weight_scale = N``.

    Attributes
    ----------
    mu : float
    n_small, m_large : int
        ``N`` and ``M`` with ``M >= N``.
    nu : int
        ``M - N``.
    alpha, delta : float
        Scaled weights (``weight_scale * alpha(mu)`` etc.).
    weight_scale : float
    """

    mu: float
    n_small: int
    m_large: int
    nu: int
    alpha: float
    delta: float
    weight_scale: float = 1.0

    @property
    def N(self) -> int:
        return self.n_small

    @property
    def M(self) -> int:
        return self.m_large

    @property
    def gap(self) -> float:
        """``alpha**2 - delta**2``, computed as ``weight_scale**2 / mu`` to avoid cancellation."""
        return self.weight_scale**2 / self.mu

    @property
    def ratio(self) -> float:
        """``delta / alpha = (1 - mu) / (1 + mu)``."""
        return (1.0 - self.mu) / (1.0 + self.mu)

    def mp_values(self):
        """``(alpha, delta, gap)`` as mpmath numbers at the current working precision."""
        mu = mpmath.mpf(self.mu)
        w = mpmath.mpf(self.weight_scale)
        return w * (1 + mu) / (2 * mu), w * (1 - mu) / (2 * mu), w * w / mu

    def exact_values(self):
        """``(alpha**2, delta**2, gap)`` as Fractions (exact in the binary value of ``mu``)."""
        mu = Fraction(self.mu)
        w = Fraction(self.weight_scale)
        a = w * (1 + mu) / (2 * mu)
        d = w * (1 - mu) / (2 * mu)
        return a * a, d * d, w * w / mu

    def rescaled(self, scale: float) -> "CouplingParameters":
        """Same coupling and sizes with both weights multiplied by ``scale``."""
        return make_parameters(self.mu, self.n_small, self.m_large, weight_scale=self.weight_scale * scale)


def make_parameters(mu: float, n_small: int, m_large: int, weight_scale: float = 1.0) -> CouplingParameters:
    """Validate inputs and build a :class:`CouplingParameters`.

    Examples
    --------
    >>> p = make_parameters(0.5, 2, 3)
    >>> p.alpha, p.delta, p.nu
    (1.5, 0.5, 1)
    """
    mu = float(mu)
    if not (0.0 < mu < 1.0):
        raise DomainError(f"mu must lie strictly between 0 and 1, got {mu}")
    if int(n_small) != n_small or int(m_large) != m_large:
        raise DomainError("matrix dimensions must be integers")
    n_small, m_large = int(n_small), int(m_large)
    if n_small < 1:
        raise DomainError("N must be at least 1")
    if m_large < n_small:
        raise DomainError(f"M={m_large} must be at least N={n_small}")
    if not weight_scale > 0:
        raise DomainError("weight_scale must be positive")
    alpha = weight_scale * (1.0 + mu) / (2.0 * mu)
    delta = weight_scale * (1.0 - mu) / (2.0 * mu)
    return CouplingParameters(mu, n_small, m_large, m_large - n_small, alpha, delta, float(weight_scale))
