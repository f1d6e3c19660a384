"""Monte Carlo simulation of the stochastic equations and covariance estimation.

Every replication ``i`` of a run with master seed ``s`` draws from its own
stream ``PCG64(SeedSequence(s, spawn_key=(i,)))``, so a path does not depend on
how many paths are simulated, on the chunking, or on the thread count.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy import signal

from . import kernels
from ._convolution import DEFAULT_BLOCK, causal_solve
from .autocovariance import PowerTailFit, _tail_pair_integral, fit_power_tail
from .exceptions import DomainError
from .kernels import KernelSpec

CHUNK_PATHS = 256
N_BATCHES = 32


class SimScheme(str, Enum):
    EULER_MARUYAMA = "em"
    DISCRETE_RECURSION = "discrete"
    STATIONARY_MA = "ma"


class Noise(str, Enum):
    GAUSSIAN = "gaussian"
    RADEMACHER = "rademacher"


@dataclass(frozen=True, eq=False)
class SamplePath:
    """Simulated values; shape ``(N,)`` for one path or ``(N, P)`` for ``P`` replications."""

    values: np.ndarray
    step: float
    scheme: SimScheme
    seed: int
    sigma: float
    truncation_M: Optional[int] = None

    def __post_init__(self):
        if self.values.shape[0] < 1:
            raise DomainError("a path has at least one value")
        self.values.setflags(write=False)

    @property
    def n_paths(self) -> int:
        return 1 if self.values.ndim == 1 else self.values.shape[1]

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.values.shape[0]) * self.step


@dataclass(frozen=True, eq=False)
class CovarianceEstimate:
    lags: np.ndarray
    c_hat: np.ndarray
    std_err: np.ndarray
    n_effective: int


def path_rng(seed: int, index: int) -> np.random.Generator:
    """Independent generator for replication ``index`` of master ``seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(int(index),))))


def _draw(rng: np.random.Generator, n: int, noise: Noise) -> np.ndarray:
    if noise is Noise.GAUSSIAN:
        return rng.standard_normal(n)
    return rng.integers(0, 2, n).astype(float) * 2.0 - 1.0


def _noise_matrix(seed, first_path, n_paths, n, noise):
    z = np.empty((n, n_paths))
    for p in range(n_paths):
        z[:, p] = _draw(path_rng(seed, first_path + p), n, noise)
    return z


def _run_chunks(fn, n_paths: int, threads: int):
    """Apply ``fn(first, count)`` to fixed chunks and stack along the path axis."""
    starts = list(range(0, n_paths, CHUNK_PATHS))
    args = [(s, min(CHUNK_PATHS, n_paths - s)) for s in starts]
    if threads > 1 and len(args) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(lambda a: fn(*a), args))
    else:
        parts = [fn(*a) for a in args]
    return np.concatenate(parts, axis=1)


def _finish(values: np.ndarray, n_paths: Optional[int]) -> np.ndarray:
    return values[:, 0].copy() if n_paths is None else values


def simulate_discrete(k_seq, a: float, sigma: float, N: int, seed: int, x0: float = 0.0,
                      n_paths: Optional[int] = None, threads: int = 1,
                      noise: Noise = Noise.GAUSSIAN, fft: bool = True) -> SamplePath:
    """``X_{n+1} - X_n = a X_n + sum_{j=1}^n k_j X_{n-j} + sigma zeta_{n+1}``, ``X_0 = x0``.

    Parameters
    ----------
    k_seq : array_like
        ``k_seq[i] = k_{i+1}``; missing terms are zero.
    a, sigma : float
        Instantaneous coefficient and noise scale.
    N : int
        Number of values ``X_0..X_{N-1}``.
    seed : int
        Master seed.
    x0 : float
        Deterministic initial value.
    n_paths : int, optional
        Number of replications; values then have shape ``(N, n_paths)``.
    threads : int
        Worker threads over fixed path chunks; does not affect the output.
    noise : Noise
        Gaussian or Rademacher innovations.
    fft : bool
        Divide-and-conquer FFT history sums instead of direct summation.
    """
    if N < 1:
        raise DomainError("N must be positive")
    noise = Noise(noise)
    w = np.zeros(max(N, 2))
    w[1] = 1.0 + a
    ks = np.asarray(k_seq, dtype=float)[: max(N - 2, 0)]
    w[2: 2 + ks.size] = ks

    def chunk(first, count):
        f = np.zeros((N, count))
        f[1:] = sigma * _noise_matrix(seed, first, count, N - 1, noise)
        return causal_solve(w, f, x0, fft=fft, block=DEFAULT_BLOCK)

    vals = _run_chunks(chunk, n_paths or 1, threads)
    return SamplePath(_finish(vals, n_paths), 1.0, SimScheme.DISCRETE_RECURSION, int(seed), float(sigma))


def simulate_continuous_em(spec: KernelSpec, sigma: float, h: float, T: float, seed: int,
                           X0: float = 0.0, n_paths: Optional[int] = None, threads: int = 1,
                           noise: Noise = Noise.GAUSSIAN, fft: bool = True) -> SamplePath:
    """Euler-Maruyama for ``dX = (a X + int_0^t k(t-s) X(s) ds) dt + sigma dB``.

    ``X_{i+1} = X_i + h (a X_i + Q_i) + sigma sqrt(h) zeta_i`` with ``Q_i`` the
    trapezoid rule for the memory integral on ``[0, t_i]``.
    """
    if spec.discrete:
        raise DomainError("Euler-Maruyama needs a continuous-time kernel")
    if not h > 0:
        raise DomainError("h must be positive")
    n = int(round(T / h))
    if n < 1 or not math.isclose(n * h, T, rel_tol=1e-9):
        raise DomainError("T must be a positive multiple of h")
    N = n + 1
    noise = Noise(noise)
    a = spec.a
    k = kernels.eval_kernel(spec, np.arange(N) * h)
    w = np.zeros(N)
    w[1] = 1.0 + h * a + 0.5 * h * h * k[0]
    w[2:] = h * h * k[1: N - 1]
    # the X_0 endpoint carries half weight in the trapezoid rule
    f0 = np.zeros(N)
    f0[1:] = -0.5 * h * h * k[: N - 1] * X0

    def chunk(first, count):
        f = np.repeat(f0[:, None], count, axis=1)
        f[1:] += sigma * math.sqrt(h) * _noise_matrix(seed, first, count, N - 1, noise)
        return causal_solve(w, f, X0, fft=fft, block=DEFAULT_BLOCK)

    vals = _run_chunks(chunk, n_paths or 1, threads)
    return SamplePath(_finish(vals, n_paths), float(h), SimScheme.EULER_MARUYAMA, int(seed), float(sigma))


class ExtendedResolvent:
    """Resolvent table ``r_0..r_{R-1}`` continued by its last-decade power-law fit.

    Provides the sums ``sum_{j>=s} r_j r_{j+d}`` needed for moving-average
    truncation bounds and covariances; beyond the table the sum is replaced by
    the midpoint-rule integral of the fitted power law.
    """

    def __init__(self, r_seq):
        self.r = np.asarray(r_seq, dtype=float)
        self.R = self.r.size
        if self.R < 20:
            raise DomainError("need at least 20 resolvent values")
        fit = fit_power_tail(np.arange(1, self.R, dtype=float), self.r[1:])
        if fit is None:
            raise DomainError("no positive resolvent values to fit")
        if fit.exponent >= -0.5:
            raise DomainError(f"fitted decay exponent {fit.exponent:.4f} >= -1/2: r is not square summable")
        self.fit: PowerTailFit = fit

    def values(self, lo: int, hi: int) -> np.ndarray:
        out = np.empty(hi - lo)
        cut = min(max(self.R, lo), hi)
        out[: cut - lo] = self.r[lo:cut]
        if hi > cut:
            out[cut - lo:] = self.fit(np.arange(cut, hi, dtype=float))
        return out

    def pair_tail(self, s: int, d: int) -> float:
        """``sum_{j >= s} r_j r_{j+d}``."""
        R, r = self.R, self.r
        total = 0.0
        lo, hi = s, R - d
        if hi > lo:
            total += float(np.dot(r[lo:hi], r[lo + d: hi + d]))
        lo, hi = max(s, R - d), R
        if hi > lo:
            total += float(np.dot(r[lo:hi], self.fit(np.arange(lo, hi, dtype=float) + d)))
        total += _tail_pair_integral(self.fit, max(s, R) - 0.5, float(d))
        return total

    def truncated_cov(self, d: int, M: int) -> float:
        """``sum_{j=0}^{M-d} r_j r_{j+d}``, the lag-``d`` covariance of the order-``M`` average (``sigma = 1``)."""
        return self.pair_tail(0, d) - self.pair_tail(M - d + 1, d)


def ma_truncation_for(r_seq, tail_tol: float = 1e-4) -> int:
    """Smallest ``M`` with ``sum_{j>M} r_j^2 <= tail_tol * sum_j r_j^2``."""
    ext = r_seq if isinstance(r_seq, ExtendedResolvent) else ExtendedResolvent(r_seq)
    total = ext.pair_tail(0, 0)
    budget = tail_tol * total
    sq = ext.r * ext.r
    # tail beyond index j (exclusive of j) within the table
    fit_tail = ext.pair_tail(ext.R, 0)
    within = np.cumsum(sq[::-1])[::-1]       # within[j] = sum_{i>=j, i<R} r_i^2
    tails = np.append(within[1:], 0.0) + fit_tail
    ok = np.nonzero(tails <= budget)[0]
    if ok.size:
        return int(ok[0])
    mu, lc = ext.fit.exponent, ext.fit.log_coefficient
    p = 2 * mu + 1
    # C^2 (M + 1/2)^p / -p = budget
    M = int(math.ceil(math.exp((math.log(budget * -p) - 2 * lc) / p) - 0.5))
    while ext.pair_tail(M + 1, 0) > budget:
        M = int(M * 1.01) + 1
    return max(M, ext.R)


def _check_truncation(ext: ExtendedResolvent, M: int, tail_tol: float):
    total = ext.pair_tail(0, 0)
    tail = ext.pair_tail(M + 1, 0)
    if tail > tail_tol * total:
        need = ma_truncation_for(ext, tail_tol)
        raise DomainError(
            f"truncation M={M} leaves tail variance {tail / total:.3g} * c(0) > {tail_tol:g} * c(0); "
            f"M >= {need} is required")


def simulate_stationary_discrete(r_seq, sigma: float, N: int, M: int, seed: int,
                                 noise: Noise = Noise.GAUSSIAN,
                                 tail_tol: float = 1e-4) -> SamplePath:
    """Truncated moving average ``X_n = sigma sum_{j=0}^{M} r_j zeta_{n-j}``, ``n = 0..N-1``.

    ``r_seq`` shorter than ``M + 1`` is continued by its fitted power-law tail.
    The neglected variance ``sigma^2 sum_{j>M} r_j^2`` must not exceed
    ``tail_tol * c(0)``.
    """
    if N < 1 or M < 0:
        raise DomainError("need N >= 1 and M >= 0")
    ext = ExtendedResolvent(r_seq)
    _check_truncation(ext, M, tail_tol)
    coef = ext.values(0, M + 1)
    z = _draw(path_rng(seed, 0), N + M, Noise(noise))
    x = sigma * signal.fftconvolve(z, coef, mode="valid")
    return SamplePath(x, 1.0, SimScheme.STATIONARY_MA, int(seed), float(sigma), int(M))


def simulate_stationary_ensemble(r_seq, sigma: float, horizon: int, n_paths: int, seed: int,
                                 M: Optional[int] = None, near: int = 1 << 14,
                                 tail_tol: float = 1e-4, threads: int = 1) -> SamplePath:
    """Replications of ``X_0..X_horizon`` of the order-``M`` stationary moving average.

    Innovations ``zeta_i`` for ``-near <= i <= horizon`` are drawn explicitly.
    The older innovations, up to ``i = -M``, enter only through a Gaussian
    vector with covariance ``G_ab = sigma^2 sum_{j=a+near+1}^{M-|a-b|} r_j r_{j+|a-b|}``,
    which is sampled exactly.  The result has the law of the truncated moving
    average, even for ``M`` far beyond what explicit noise could reach.

    Returns values of shape ``(horizon + 1, n_paths)``.
    """
    if horizon < 0 or n_paths < 1:
        raise DomainError("need horizon >= 0 and n_paths >= 1")
    ext = ExtendedResolvent(r_seq)
    if M is None:
        M = ma_truncation_for(ext, tail_tol)
    _check_truncation(ext, M, tail_tol)
    H = horizon
    near = min(near, M - H)
    if near < 0:
        raise DomainError("M must exceed the horizon")
    coef = ext.values(0, near + H + 1)
    # near part: X_n = sigma sum_{j=0}^{n+near} r_j zeta_{n-j}; row n of A holds r_{n-i} for i = -near..H
    A = np.zeros((H + 1, near + H + 1))
    for n in range(H + 1):
        A[n, : n + near + 1] = coef[n + near:: -1]
    G = np.empty((H + 1, H + 1))
    for i in range(H + 1):
        for j in range(i, H + 1):
            d = j - i
            lo, hi = i + near + 1, M - d
            G[i, j] = G[j, i] = (ext.pair_tail(lo, d) - ext.pair_tail(hi + 1, d)) if hi >= lo else 0.0
    evals, evecs = np.linalg.eigh(G)
    root = evecs * np.sqrt(np.clip(evals, 0.0, None))

    def chunk(first, count):
        out = np.empty((H + 1, count))
        for p in range(count):
            rng = path_rng(seed, first + p)
            z = rng.standard_normal(near + H + 1)
            y = root @ rng.standard_normal(H + 1)
            out[:, p] = sigma * (A @ z + y)
        return out

    vals = _run_chunks(chunk, n_paths, threads)
    return SamplePath(vals, 1.0, SimScheme.STATIONARY_MA, int(seed), float(sigma), int(M))


def _batch_se(x: np.ndarray, scale: float) -> float:
    nb = N_BATCHES
    m = x.size // nb
    means = x[: m * nb].reshape(nb, m).mean(axis=1) * scale
    return max(float(np.std(means, ddof=1) / math.sqrt(nb)), np.finfo(float).tiny)


def empirical_autocov(path: SamplePath, lags) -> CovarianceEstimate:
    """``c_hat(h) = (1/n) sum_i (X_i - Xbar)(X_{i+h} - Xbar)`` along one path.

    Standard errors come from 32 batch means of the lag products; they are
    floored at the smallest positive float so a degenerate path still reports
    a positive error.
    """
    x = np.asarray(path.values, dtype=float)
    if x.ndim != 1:
        raise DomainError("empirical_autocov takes a single path; use ensemble_autocov")
    lags = np.atleast_1d(np.asarray(lags, dtype=np.int64))
    n = x.size
    max_lag = int(lags.max()) if lags.size else 0
    if n < 100 * max(max_lag, 1) or n < 2 * N_BATCHES:
        raise DomainError(f"path length {n} must be at least 100 x max lag and 64")
    y = x - x.mean()
    c = np.empty(lags.size)
    se = np.empty(lags.size)
    for i, h in enumerate(lags):
        prod = y[: n - h] * y[h:]
        c[i] = prod.sum() / n
        se[i] = _batch_se(prod, (n - h) / n)
    return CovarianceEstimate(lags, c, se, n)


def ensemble_autocov(paths: SamplePath, lags) -> CovarianceEstimate:
    """Zero-mean product moments ``E[X_n X_{n+h}]`` pooled over times and replications.

    Appropriate for stationary zero-mean ensembles; replications are independent,
    so 32 batches of paths give an honest standard error.
    """
    x = np.asarray(paths.values, dtype=float)
    if x.ndim != 2 or x.shape[1] < 2 * N_BATCHES:
        raise DomainError(f"need a (time, path) ensemble with at least {2 * N_BATCHES} paths")
    lags = np.atleast_1d(np.asarray(lags, dtype=np.int64))
    if lags.size and lags.max() >= x.shape[0]:
        raise DomainError("lag exceeds the simulated horizon")
    c = np.empty(lags.size)
    se = np.empty(lags.size)
    for i, h in enumerate(lags):
        per_path = (x[: x.shape[0] - h] * x[h:]).mean(axis=0)
        c[i] = per_path.mean()
        se[i] = _batch_se(per_path, 1.0)
    return CovarianceEstimate(lags, c, se, x.shape[1])


def write_path_csv(path, sample: SamplePath, column: int = 0):
    vals = sample.values if sample.values.ndim == 1 else sample.values[:, column]
    discrete = sample.scheme is not SimScheme.EULER_MARUYAMA
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["n", "x"] if discrete else ["t", "x"])
        for i, v in enumerate(vals):
            out.writerow([i if discrete else f"{i * sample.step:.17g}", f"{v:.17g}"])


def write_estimate_csv(path, est: CovarianceEstimate):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["lag", "c_hat", "std_err"])
        for h, c, s in zip(est.lags, est.c_hat, est.std_err):
            out.writerow([int(h), f"{c:.17g}", f"{s:.17g}"])
