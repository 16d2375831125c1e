"""Monte Carlo sampling of the coupled product ``Y = X1 X2``.

Convention: a standard complex Gaussian has independent real and imaginary
parts of variance 1/2, so ``E|z|**2 = 1``.  With ``A``, ``B`` independent
``N x M`` standard complex Gaussian matrices,

    X1 = (A - i sqrt(mu) B) / sqrt(2),    X2 = (A^H - i sqrt(mu) B^H) / sqrt(2).

The rescaled variant divides both factors by ``sqrt(N)``, which replaces
``alpha, delta`` by ``N alpha, N delta`` in the joint density.

Every trial draws from its own Philox stream keyed by ``(seed, trial)``, so
batches are reproducible regardless of chunking or execution order.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from coupledsv.ensemble.parameters import CouplingParameters, make_parameters
from coupledsv.errors import DomainError, NumericError

JACOBI_MAX_N = 16
JACOBI_SWEEPS = 60
JACOBI_TOL = 1e-15
TRACE_RTOL = 1e-10
CHUNK = 2048
FORMAT_VERSION = 1


def trial_generator(seed: int, trial: int) -> np.random.Generator:
    """Counter-based stream for one trial."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(trial),))
    return np.random.Generator(np.random.Philox(ss))


def standard_complex_normal(gen: np.random.Generator, shape) -> np.ndarray:
    """Box-Muller: ``sqrt(-log(1 - u1)) exp(2 pi i u2)`` has ``E|z|**2 = 1``."""
    u = gen.random((2,) + tuple(shape))
    return np.sqrt(-np.log1p(-u[0])) * np.exp(2j * np.pi * u[1])


def sample_coupled_pair(params: CouplingParameters, gen: np.random.Generator, rescaled: bool = False):
    """Draw ``(X1, X2)`` with shapes ``(N, M)`` and ``(M, N)``."""
    N, M = params.n_small, params.m_large
    z = standard_complex_normal(gen, (2, N, M))
    a, b = z[0], z[1]
    root = math.sqrt(params.mu)
    scale = 1 / math.sqrt(2 * N) if rescaled else 1 / math.sqrt(2)
    x1 = (a - 1j * root * b) * scale
    x2 = (a.conj().T - 1j * root * b.conj().T) * scale
    return x1, x2


def jacobi_eigh(h: np.ndarray, vectors: bool = False, sweeps: int = JACOBI_SWEEPS):
    """Cyclic complex Jacobi for a batch of Hermitian matrices ``(..., n, n)``.

    Each ``(p, q)`` rotation first removes the phase of ``h_pq`` and then
    applies a real Jacobi rotation.  Returns ascending eigenvalues (and the
    unitary eigenvector matrices if requested).  Raises :class:`NumericError`
    if the off-diagonal mass does not fall below ``1e-15 ||H||`` within the
    sweep cap.
    """
    h = np.array(h, dtype=complex)
    if h.ndim == 2:
        out = jacobi_eigh(h[None], vectors, sweeps)
        return (out[0][0], out[1][0]) if vectors else out[0]
    n = h.shape[-1]
    v = np.broadcast_to(np.eye(n, dtype=complex), h.shape).copy() if vectors else None
    norm = np.sqrt(np.sum(np.abs(h) ** 2, axis=(-2, -1)))
    norm = np.where(norm > 0, norm, 1.0)
    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(sweeps):
        off = np.sqrt(np.sum(np.abs(h * offdiag) ** 2, axis=(-2, -1)))
        if np.all(off <= JACOBI_TOL * norm):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                hpq = h[:, p, q]
                mag = np.abs(hpq)
                active = mag > 1e-300
                if not np.any(active):
                    continue
                phase = np.where(active, hpq / np.where(active, mag, 1.0), 1.0)
                app, aqq = h[:, p, p].real, h[:, q, q].real
                tau = (aqq - app) / (2 * np.where(active, mag, 1.0))
                big = np.abs(tau) > 1e150
                tau = np.where(big, 1.0, tau)
                t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1 + tau * tau))
                t = np.where(big, 0.0, t)
                t = np.where(active, t, 0.0)
                c = 1 / np.sqrt(1 + t * t)
                s = t * c
                pc = phase.conj()
                # columns: H <- H G, G = [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
                cp, cq = h[:, :, p].copy(), h[:, :, q]
                h[:, :, p] = c[:, None] * cp - (s * pc)[:, None] * cq
                h[:, :, q] = s[:, None] * cp + (c * pc)[:, None] * cq
                rp, rq = h[:, p, :].copy(), h[:, q, :]
                h[:, p, :] = c[:, None] * rp - (s * phase)[:, None] * rq
                h[:, q, :] = s[:, None] * rp + (c * phase)[:, None] * rq
                h[:, p, q] = 0
                h[:, q, p] = 0
                if vectors:
                    vp, vq = v[:, :, p].copy(), v[:, :, q]
                    v[:, :, p] = c[:, None] * vp - (s * pc)[:, None] * vq
                    v[:, :, q] = s[:, None] * vp + (c * pc)[:, None] * vq
    else:
        raise NumericError("Jacobi eigensolver did not converge within the sweep cap")
    w = np.diagonal(h, axis1=-2, axis2=-1).real
    order = np.argsort(w, axis=-1)
    w = np.take_along_axis(w, order, axis=-1)
    if vectors:
        v = np.take_along_axis(v, order[:, None, :], axis=-1)
        return w, v
    return (w,)


def squared_singular_values(y: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of ``Y Y^H`` for one ``(N, N)`` or a batch ``(T, N, N)``.

    Jacobi for ``N <= 16``; LAPACK ``eigvalsh`` beyond.  Tiny negative round-off
    is clipped at zero.

    Examples
    --------
    >>> squared_singular_values(np.diag([1, 2j])).round(12).tolist()
    [1.0, 4.0]
    """
    y = np.asarray(y, dtype=complex)
    if y.shape[-1] != y.shape[-2]:
        raise DomainError("squared_singular_values needs a square matrix")
    gram = y @ np.conj(np.swapaxes(y, -1, -2))
    if y.shape[-1] <= JACOBI_MAX_N:
        w = jacobi_eigh(gram if gram.ndim == 3 else gram[None])[0]
        w = w if gram.ndim == 3 else w[0]
    else:
        w = np.linalg.eigvalsh(gram)
    return np.maximum(w, 0.0)


@dataclass
class SampleBatch:
    """Independent spectra of ``Y Y^H``; rows sorted ascending."""

    params: CouplingParameters
    seed: int
    rescaled: bool
    spectra: np.ndarray
    failures: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def count(self) -> int:
        return int(self.spectra.shape[0])

    def header(self) -> dict:
        p = self.params
        return {"format": FORMAT_VERSION, "mu": p.mu, "N": p.n_small, "M": p.m_large, "seed": int(self.seed),
                "rescaled": bool(self.rescaled), "failures": int(self.failures)}

    def to_csv(self) -> str:
        """``#``-prefixed ``key=value`` header lines, a column row, then one sorted spectrum per row."""
        buf = io.StringIO()
        for k, v in self.header().items():
            buf.write(f"# {k}={v}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"y{i + 1}" for i in range(self.params.n_small)])
        for row in self.spectra:
            w.writerow([repr(float(v)) for v in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SampleBatch":
        meta, rows = {}, []
        lines = text.splitlines()
        body = [ln for ln in lines if not ln.startswith("#")]
        for ln in lines:
            if ln.startswith("#"):
                k, _, v = ln[1:].strip().partition("=")
                meta[k] = v
        for row in list(csv.reader(body))[1:]:
            rows.append([float(v) for v in row])
        params = make_parameters(float(meta["mu"]), int(meta["N"]), int(meta["M"]))
        spectra = np.array(rows, dtype=float).reshape(-1, params.n_small)
        return cls(params, int(meta["seed"]), meta["rescaled"] == "True", spectra, int(meta.get("failures", 0)))

    def to_json(self) -> str:
        return json.dumps({**self.header(), "spectra": self.spectra.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "SampleBatch":
        d = json.loads(text)
        params = make_parameters(d["mu"], d["N"], d["M"])
        return cls(params, d["seed"], d["rescaled"], np.array(d["spectra"], dtype=float).reshape(-1, d["N"]),
                   d.get("failures", 0))


def sample_batch(params: CouplingParameters, count: int, seed: int, rescaled: bool = False,
                 chunk: int = CHUNK) -> SampleBatch:
    """Draw ``count`` spectra; trial ``t`` uses stream ``(seed, t)``.

    Trials whose eigen-decomposition fails, or whose eigenvalue sum misses
    ``Tr(Y Y^H)`` by more than ``1e-10`` relative, are dropped and counted in
    ``failures``.
    """
    if count < 1:
        raise DomainError("count must be at least 1")
    N = params.n_small
    kept, failures = [], 0
    for start in range(0, count, chunk):
        trials = range(start, min(count, start + chunk))
        ys = []
        for t in trials:
            x1, x2 = sample_coupled_pair(params, trial_generator(seed, t), rescaled)
            ys.append(x1 @ x2)
        ys = np.array(ys)
        trace = np.sum(np.abs(ys) ** 2, axis=(-2, -1))
        try:
            w = squared_singular_values(ys)
        except NumericError:
            w = np.full((len(ys), N), np.nan)
            for i, y in enumerate(ys):
                try:
                    w[i] = squared_singular_values(y[None])[0]
                except NumericError:
                    pass
        ok = np.all(np.isfinite(w), axis=1) & (np.abs(np.sum(w, axis=1) - trace) <= TRACE_RTOL * trace)
        failures += int(np.count_nonzero(~ok))
        kept.append(w[ok])
    spectra = np.concatenate(kept, axis=0) if kept else np.empty((0, N))
    return SampleBatch(params, int(seed), bool(rescaled), spectra, failures)


@dataclass(frozen=True)
class Histogram:
    """One-point density estimate; ``density`` integrates to about ``N``."""

    edges: np.ndarray
    density: np.ndarray
    stderr: np.ndarray
    counts: np.ndarray
    trials: int


def empirical_density(batch: SampleBatch, bins: int, range: tuple[float, float] | None = None) -> Histogram:
    """Histogram of all points normalised per trial and per unit length.

    Standard errors come from the spread of per-trial bin counts, which
    accounts for the correlations between points of the same spectrum.
    """
    if bins < 10:
        raise DomainError("bins must be at least 10")
    if batch.count == 0:
        raise DomainError("empty batch")
    lo, hi = range if range is not None else (0.0, float(np.max(batch.spectra)))
    edges = np.linspace(lo, hi, bins + 1)
    idx = np.searchsorted(edges, batch.spectra, side="right") - 1
    idx[batch.spectra == hi] = bins - 1
    inside = (idx >= 0) & (idx < bins)
    per_trial = np.zeros((batch.count, bins))
    rows = np.broadcast_to(np.arange(batch.count)[:, None], idx.shape)
    np.add.at(per_trial, (rows[inside], idx[inside]), 1.0)
    width = np.diff(edges)
    T = batch.count
    mean = per_trial.mean(axis=0)
    se = per_trial.std(axis=0, ddof=1) / math.sqrt(T) if T > 1 else np.full(bins, np.inf)
    return Histogram(edges, mean / width, se / width, per_trial.sum(axis=0), T)


def linear_statistic(batch: SampleBatch, poly) -> np.ndarray:
    """``sum_i f(y_i)`` per trial; ``poly`` is ascending coefficients or a numpy ``Polynomial``."""
    if batch.count == 0:
        raise DomainError("empty batch")
    f = poly if isinstance(poly, np.polynomial.Polynomial) else np.polynomial.Polynomial(np.asarray(poly, dtype=float))
    return np.sum(f(batch.spectra), axis=1)
