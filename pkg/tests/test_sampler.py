import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from coupledsv.ensemble import BiorthogonalSystem, make_parameters
from coupledsv.ensemble.kernel import kernel_direct
from coupledsv.ensemble.recurrence import recurrence_a
from coupledsv.errors import DomainError, NumericError
from coupledsv.quadrature.rules import gauss_legendre_nodes, integrate_semi_infinite
from coupledsv.sampler import (
    SampleBatch, empirical_density, jacobi_eigh, linear_statistic, sample_batch, sample_coupled_pair,
    squared_singular_values, standard_complex_normal, trial_generator,
)


def charpoly_roots(h):
    """Eigenvalues of a Hermitian matrix from its characteristic polynomial (Faddeev-LeVerrier)."""
    with mpmath.workdps(50):
        n = h.shape[0]
        a = mpmath.matrix([[mpmath.mpc(complex(v)) for v in row] for row in h])
        m = mpmath.zeros(n)
        coeffs = [mpmath.mpf(1)]
        for k in range(1, n + 1):
            m = a * m + coeffs[-1] * mpmath.eye(n)
            coeffs.append(-sum((a * m)[i, i] for i in range(n)) / k)
        roots = mpmath.polyroots([mpmath.re(c) for c in coeffs], maxsteps=200, extraprec=200)
        return np.sort([float(mpmath.re(r)) for r in roots])


def _draws(mu, n=317):
    # one n x n draw gives about 1e5 coupled entry pairs (X1_ij, X2_ji)
    x1, x2 = sample_coupled_pair(make_parameters(mu, n, n), trial_generator(7, 0))
    return x1.ravel(), x2.T.ravel()


def test_unit_variance_convention():
    z = standard_complex_normal(trial_generator(1, 0), (10**5,))
    se = np.std(np.abs(z) ** 2) / math.sqrt(z.size)
    assert abs(np.mean(np.abs(z) ** 2) - 1) < 3 * se
    assert abs(np.mean(z)) < 3 / math.sqrt(z.size)


@pytest.mark.parametrize("mu", [0.2, 0.7])
def test_pair_moments(mu):
    x1, x2 = _draws(mu)
    prod = x1 * x2
    se = np.std(prod.real) / math.sqrt(prod.size)
    assert abs(np.mean(prod.real) - (1 - mu) / 2) < 3 * se
    assert abs(np.mean(prod.imag)) < 3 * np.std(prod.imag) / math.sqrt(prod.size)
    sq = np.abs(x1) ** 2
    assert abs(np.mean(sq) - (1 + mu) / 2) < 3 * np.std(sq) / math.sqrt(sq.size)


def test_pair_shapes_and_replay():
    p = make_parameters(0.5, 3, 5)
    a1, a2 = sample_coupled_pair(p, trial_generator(11, 4))
    b1, b2 = sample_coupled_pair(p, trial_generator(11, 4))
    assert a1.shape == (3, 5) and a2.shape == (5, 3)
    assert np.array_equal(a1, b1) and np.array_equal(a2, b2)
    c1, _ = sample_coupled_pair(p, trial_generator(11, 5))
    assert not np.array_equal(a1, c1)


def test_trivial_spectra():
    assert np.allclose(squared_singular_values(np.eye(3)), [1, 1, 1])
    assert np.allclose(squared_singular_values(np.diag([1, 2j])), [1, 4])
    with pytest.raises(DomainError):
        squared_singular_values(np.ones((2, 3)))


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_jacobi_against_characteristic_polynomial(seed):
    rng = np.random.default_rng(seed)
    y = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    h = y @ y.conj().T
    ref = charpoly_roots(h)
    assert np.allclose(squared_singular_values(y), ref, rtol=1e-8, atol=1e-8 * np.max(ref))


@given(st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_jacobi_residuals(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    h = a + a.conj().T
    w, v = jacobi_eigh(h, vectors=True)
    assert np.all(np.diff(w) >= 0)
    norm = np.linalg.norm(h)
    assert np.max(np.linalg.norm(h @ v - v * w, axis=0)) <= 1e-10 * norm
    assert np.allclose(v.conj().T @ v, np.eye(n), atol=1e-12)
    assert np.allclose(w, np.linalg.eigvalsh(h), atol=1e-10 * norm)


def test_jacobi_sweep_cap():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(6, 6))
    with pytest.raises(NumericError):
        jacobi_eigh(a + a.T, sweeps=1)


def test_batch_invariants_and_determinism():
    p = make_parameters(0.4, 4, 6)
    b = sample_batch(p, 300, seed=5)
    assert b.spectra.shape == (300, 4) and b.failures == 0
    assert np.all(b.spectra >= 0) and np.all(np.diff(b.spectra, axis=1) >= 0)
    again = sample_batch(p, 300, seed=5, chunk=64)
    assert np.array_equal(b.spectra, again.spectra)
    # trace identity checked directly on a fresh trial
    x1, x2 = sample_coupled_pair(p, trial_generator(5, 17))
    y = x1 @ x2
    assert b.spectra[17].sum() == pytest.approx(np.sum(np.abs(y) ** 2), rel=1e-10)


def test_large_n_uses_lapack_path():
    p = make_parameters(0.5, 20, 20)
    b = sample_batch(p, 3, seed=1)
    assert b.spectra.shape == (3, 20)


def test_serialisation_roundtrip():
    b = sample_batch(make_parameters(0.3, 3, 4), 25, seed=9, rescaled=True)
    for back in (SampleBatch.from_csv(b.to_csv()), SampleBatch.from_json(b.to_json())):
        assert back.params == b.params and back.seed == 9 and back.rescaled
        assert np.array_equal(back.spectra, b.spectra)
    assert b.to_csv().startswith("#")


def test_histogram_normalisation():
    b = sample_batch(make_parameters(0.5, 3, 3), 400, seed=2)
    h = empirical_density(b, 20, (0.0, float(b.spectra.max())))
    assert np.sum(h.density * np.diff(h.edges)) == pytest.approx(3.0)
    with pytest.raises(DomainError):
        empirical_density(b, 5)


def test_mean_trace_matches_recurrence_diagonal():
    p = make_parameters(0.5, 3, 4)
    b = sample_batch(p, 4000, seed=3)
    s = linear_statistic(b, [0, 1])
    target = sum(recurrence_a(n, p)[0] for n in range(3))
    assert abs(s.mean() - target) < 3 * s.std(ddof=1) / math.sqrt(b.count)


def test_single_level_distribution():
    p = make_parameters(0.5, 1, 2)
    b = sample_batch(p, 3000, seed=4)
    sys = BiorthogonalSystem(p, max_n=2)

    def cdf(v):
        return integrate_semi_infinite(lambda x: np.where(x <= v, sys.eval_P(0, x) * sys.eval_Q(0, x), 0.0),
                                       tol=1e-10).value

    grid = np.quantile(b.spectra[:, 0], np.linspace(0.02, 0.98, 25))
    table = {float(g): cdf(float(g)) for g in grid}
    res = stats.kstest(b.spectra[:, 0], lambda v: np.interp(v, list(table), list(table.values())))
    assert res.pvalue > 0.001


def test_counting_variance_on_an_interval():
    p = make_parameters(0.5, 4, 4)
    sys = BiorthogonalSystem(p)
    lo, hi = 2.0, 12.0
    x, w = gauss_legendre_nodes(48)
    x, w = lo + (hi - lo) * x, (hi - lo) * w
    kmat = kernel_direct(x[:, None], x[None, :], sys)
    mean = np.dot(w, np.diag(kmat))
    var = mean - w @ (kmat * kmat.T) @ w
    b = sample_batch(p, 20000, seed=12)
    counts = np.sum((b.spectra >= lo) & (b.spectra < hi), axis=1).astype(float)
    dev = (counts - counts.mean()) ** 2
    assert abs(counts.mean() - mean) < 3 * counts.std() / math.sqrt(counts.size)
    assert abs(dev.mean() - var) < 3 * dev.std() / math.sqrt(dev.size)
