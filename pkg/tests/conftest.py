import mpmath
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def mp50():
    with mpmath.workdps(50):
        yield


def mp_kernel(x, y, mu, n_small, nu):
    """Direct kernel from the defining Bessel sums in 60-digit arithmetic."""
    with mpmath.workdps(60):
        mu = mpmath.mpf(mu)
        a = (1 + mu) / (2 * mu)
        d = (1 - mu) / (2 * mu)
        gap = a * a - d * d
        x, y = mpmath.mpf(x), mpmath.mpf(y)
        fac = mpmath.factorial
        total = mpmath.mpf(0)
        for n in range(n_small):
            p = (-1) ** n * fac(nu + n) * fac(n) * mpmath.fsum(
                gap ** (k + 0.5) / d**k * mpmath.rf(-n, k) / (fac(nu + k) * fac(k))
                * x ** (mpmath.mpf(k) / 2) * mpmath.besseli(k, 2 * d * mpmath.sqrt(x))
                for k in range(n + 1))
            q = (-1) ** n * 2 / fac(n) ** 2 * mpmath.fsum(
                gap ** (l + nu + 0.5) / a ** (l + nu) * mpmath.rf(-n, l) / (fac(nu + l) * fac(l))
                * y ** (mpmath.mpf(l + nu) / 2) * mpmath.besselk(l + nu, 2 * a * mpmath.sqrt(y))
                for l in range(n + 1))
            total += p * q
        return float(total)
