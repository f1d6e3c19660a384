"""Deterministic resolvent solvers and their structural identities.

Continuous time offers two independent second-order schemes on a uniform grid:

* the renewal form ``r(t) + int_0^t lam(t - s) r(s) ds = 1``, valid in the
  critical regime, discretized with composite trapezoid convolution;
* the integro-differential form ``r' = a r + k * r`` advanced with the
  trapezoidal (Lobatto IIIA) Volterra-Runge-Kutta method, trapezoidal memory.

Discrete time uses the exact forward recurrence.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy import signal

from . import kernels
from ._convolution import DEFAULT_BLOCK, causal_convolve, causal_solve
from .exceptions import DomainError, RegimeError
from .kernels import KernelSpec, Regime


class Scheme(str, Enum):
    RENEWAL = "renewal"
    INTEGRO_ODE = "ode"
    DISCRETE_RECURRENCE = "discrete"


@dataclass(frozen=True)
class Grid:
    step: float
    n_points: int

    def __post_init__(self):
        if not self.step > 0:
            raise DomainError("grid step must be positive")
        if self.n_points < 2:
            raise DomainError("a grid needs at least two points")

    @classmethod
    def from_horizon(cls, step: float, t_max: float) -> "Grid":
        n = int(round(t_max / step))
        if not math.isclose(n * step, t_max, rel_tol=1e-9, abs_tol=1e-12):
            raise DomainError(f"t_max={t_max} is not a multiple of h={step}")
        return cls(step, n + 1)

    @property
    def t_max(self) -> float:
        return self.step * (self.n_points - 1)

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_points) * self.step

    def index(self, t: float) -> int:
        i = int(round(t / self.step))
        if not math.isclose(i * self.step, t, rel_tol=1e-9, abs_tol=1e-12) or not 0 <= i < self.n_points:
            raise DomainError(f"t={t} is not a grid point")
        return i


@dataclass(frozen=True, eq=False)
class ResolventGrid:
    grid: Grid
    r: np.ndarray
    scheme: Scheme
    rho: Optional[np.ndarray] = None
    log_convex: Optional[bool] = None

    def __post_init__(self):
        self.r.setflags(write=False)
        if self.rho is not None:
            self.rho.setflags(write=False)

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    def at(self, t: float) -> float:
        return float(self.r[self.grid.index(t)])


@dataclass(frozen=True)
class Residual:
    max_abs: float
    at_t: float


@dataclass(frozen=True)
class DeltaReport:
    all_nonnegative: bool
    max_disagreement: float
    min_delta: float
    first_negative: Optional[int]
    kaluza_with_unit_head: bool
    delta_direct: np.ndarray
    delta_recurrence: np.ndarray


def _require_regime(spec: KernelSpec, wanted: Regime, what: str):
    cls = kernels.classify_regime(spec)
    if cls.regime is not wanted:
        raise RegimeError(
            f"{what} requires the {wanted.value} regime; a + mass = {cls.mass_gap:.6g} "
            f"({cls.regime.value})")
    return cls


def solve_resolvent_renewal(spec: KernelSpec, grid: Grid, fft: bool = True,
                            block: int = DEFAULT_BLOCK) -> ResolventGrid:
    """Solve ``r + lam * r = 1`` with the trapezoid rule.

    Each step solves ``r_i (1 + h lam(0)/2) = 1 - h [lam_i r_0 / 2 + sum_{0<j<i} lam_{i-j} r_j]``.
    ``rho = -r'`` is the backward difference with ``rho[0] = lam(0)``.
    """
    if spec.discrete:
        raise DomainError("the renewal scheme is continuous-time; use solve_resolvent_discrete")
    _require_regime(spec, Regime.CRITICAL, "the renewal scheme")
    h = grid.step
    lam = kernels.tail_integral(spec, grid.times)
    d = 1.0 + 0.5 * h * lam[0]
    assert d > 0, "renewal diagonal must be positive"
    w = -h * lam
    f = 1.0 + 0.5 * h * lam
    r = causal_solve(w, f, 1.0, d=d, fft=fft, block=block)
    rho = np.empty_like(r)
    rho[0] = lam[0]
    rho[1:] = -np.diff(r) / h
    convex = kernels.check_log_convexity(lam).passed if lam.size >= 3 else None
    return ResolventGrid(grid, r, Scheme.RENEWAL, rho, convex)


def solve_resolvent_ode(spec: KernelSpec, grid: Grid, fft: bool = True,
                        block: int = DEFAULT_BLOCK) -> ResolventGrid:
    """Trapezoidal Volterra-Runge-Kutta solve of ``r' = a r + int_0^t k(t-s) r(s) ds``.

    Valid in every regime; it is the only continuous scheme outside the
    critical one.  ``rho`` is ``-(a r + Q)`` with ``Q`` the trapezoidal memory
    term, i.e. minus the right-hand side evaluated on the solution.
    """
    if spec.discrete:
        raise DomainError("the integro-ODE scheme is continuous-time")
    h = grid.step
    n = grid.n_points
    a = spec.a
    k = kernels.eval_kernel(spec, np.arange(n + 1) * h)
    d = 1.0 - 0.5 * h * a - 0.25 * h * h * k[0]
    w = np.zeros(n)
    w[1:] = 0.5 * h * h * (k[: n - 1] + k[1:n])
    w[1] += 1.0 + 0.5 * h * a - 0.25 * h * h * k[0]
    f = np.zeros(n)
    f[1:] = -0.25 * h * h * (k[: n - 1] + k[1:n])
    r = causal_solve(w, f, 1.0, d=d, fft=fft, block=block)
    memory = h * causal_convolve(k[:n], r, fft=fft) - 0.5 * h * (k[:n] * r[0] + k[0] * r)
    rho = -(a * r + memory)
    return ResolventGrid(grid, r, Scheme.INTEGRO_ODE, rho)


def solve_resolvent_discrete(k_seq, a: float, N: int, fft: bool = True,
                             block: int = DEFAULT_BLOCK) -> np.ndarray:
    """Return ``r_0..r_{N-1}`` of ``r_{n+1} - r_n = a r_n + sum_{j=1}^n k_j r_{n-j}``.

    ``k_seq[i]`` is ``k_{i+1}``; missing terms are zero.

    Examples
    --------
    >>> solve_resolvent_discrete([0.5], -0.5, 3)
    array([1.  , 0.5 , 0.75])
    """
    if N < 1:
        raise DomainError("N must be positive")
    k = np.zeros(max(N, 2))
    ks = np.asarray(k_seq, dtype=float)[: max(N - 1, 0)]
    k[: ks.size] = ks
    # r_m = (1+a) r_{m-1} + sum_{s<m-1} k_{m-1-s} r_s: lag-1 weight 1+a, lag l>=2 weight k_{l-1}
    w = np.zeros(max(N, 2))
    w[1] = 1.0 + a
    w[2:] = k[: w.size - 2]
    return causal_solve(w[:max(N, 2)], np.zeros(N), 1.0, fft=fft, block=block)


def resolvent_for(spec: KernelSpec, grid_or_n, scheme: Optional[Scheme] = None,
                  fft: bool = True) -> ResolventGrid:
    """Dispatch to the natural solver for ``spec``.

    Continuous critical kernels default to the renewal scheme, other continuous
    kernels to the integro-ODE scheme, discrete kernels to the recurrence.
    """
    if spec.discrete:
        n = grid_or_n.n_points if isinstance(grid_or_n, Grid) else int(grid_or_n)
        k, _ = kernels.discrete_sequences(spec, n)
        r = solve_resolvent_discrete(k, spec.a, n, fft=fft)
        return ResolventGrid(Grid(1.0, n), r, Scheme.DISCRETE_RECURRENCE)
    if scheme is None:
        critical = kernels.classify_regime(spec).regime is Regime.CRITICAL
        scheme = Scheme.RENEWAL if critical else Scheme.INTEGRO_ODE
    scheme = Scheme(scheme)
    if scheme is Scheme.RENEWAL:
        return solve_resolvent_renewal(spec, grid_or_n, fft=fft)
    if scheme is Scheme.INTEGRO_ODE:
        return solve_resolvent_ode(spec, grid_or_n, fft=fft)
    raise DomainError("the discrete recurrence needs a discrete kernel")


def _simpson_memory(lam: np.ndarray, r: np.ndarray, h: float) -> np.ndarray:
    """``S[i] ~ int_0^{t_i} lam(t_i - s) r(s) ds`` by composite Simpson, ``i >= 2``.

    Odd interval counts close with the 3/8 rule on the last three intervals.
    ``S[0] = 0`` and ``S[1]`` is NaN (a single interval admits no Simpson rule).
    """
    n = r.size
    odd = np.zeros(n)
    odd[1::2] = r[1::2]
    full = signal.convolve(lam, r, method="direct")[:n]
    full_odd = signal.convolve(lam, odd, method="direct")[:n]
    i = np.arange(n)
    g0 = lam * r[0]            # g_0 for target i
    gi = lam[0] * r            # g_i for target i
    S = np.full(n, np.nan)
    S[0] = 0.0
    ev = (i % 2 == 0) & (i >= 2)
    S[ev] = h / 3.0 * (2 * full[ev] + 2 * full_odd[ev] - g0[ev] - gi[ev])
    od = np.nonzero((i % 2 == 1) & (i >= 3))[0]
    if od.size:
        g1 = lam[1] * r[od - 1]
        g2 = lam[2] * r[od - 2]
        g3 = lam[3] * r[od - 3]
        trunc = full[od] - g2 - g1 - gi[od]
        trunc_odd = full_odd[od] - g2 - gi[od]   # od and od-2 are odd
        m = od - 3
        gm = np.where(m > 0, g3, 0.0)
        simpson = h / 3.0 * (2 * trunc + 2 * trunc_odd - g0[od] - gm)
        simpson = np.where(m > 0, simpson, 0.0)
        S[od] = simpson + 3.0 * h / 8.0 * (g3 + 3 * g2 + 3 * g1 + gi[od])
    return S


def renewal_residual(res: ResolventGrid, spec: KernelSpec) -> Residual:
    """Worst deviation of ``r(t) + int_0^t lam(t-s) r(s) ds`` from 1, by Simpson quadrature."""
    if spec.discrete:
        raise DomainError("use discrete_renewal_identity for discrete resolvents")
    _require_regime(spec, Regime.CRITICAL, "the renewal identity")
    lam = kernels.tail_integral(spec, res.times)
    S = _simpson_memory(lam, np.asarray(res.r), res.grid.step)
    dev = np.abs(res.r + S - 1.0)
    dev[1] = np.nan if dev.size > 1 else dev[0]
    j = int(np.nanargmax(dev))
    return Residual(float(dev[j]), float(res.times[j]))


def discrete_renewal_identity(r, lam) -> np.ndarray:
    """Return ``a_n = r_n + sum_{j=0}^{n-1} r_j lam_{n-j}``; identically 1 in the critical case.

    ``lam[i]`` is ``lam_{i+1}``.  Evaluated by FFT convolution, independently of
    the recurrence that produced ``r``.
    """
    r = np.asarray(r, dtype=float)
    lam = np.asarray(lam, dtype=float)
    n = r.size
    if lam.size < n - 1:
        raise DomainError("need lam_1..lam_{N-1}")
    lag = np.zeros(n)
    lag[1:] = lam[: n - 1]
    conv = signal.fftconvolve(lag, r)[:n]
    return r + conv


def delta_recurrence_check(k_seq, a: float, N: int, lam_seq=None,
                           fft: bool = True, slack: float = 1e-14) -> DeltaReport:
    """Compare ``Delta_n = r_{n-1} - r_n`` with ``Delta_n = lam_n - sum_{j<n} lam_{n-j} Delta_j``.

    ``lam_seq[i]`` is ``lam_{i+1}``; by default ``lam_n = -a - sum_{j<n} k_j``,
    the tail sums of a critical kernel.  Values above ``-slack * lam_1`` count
    as nonnegative (rounding of exact zeros).
    """
    r = solve_resolvent_discrete(k_seq, a, N, fft=fft)
    if lam_seq is None:
        k = np.zeros(N)
        ks = np.asarray(k_seq, dtype=float)[:N]
        k[: ks.size] = ks
        lam = -a - np.concatenate([[0.0], np.cumsum(k[: N - 1])])
    else:
        lam = np.asarray(lam_seq, dtype=float)[:N]
        if lam.size < N - 1:
            raise DomainError("lam_seq too short")
    direct = -np.diff(r)                      # Delta_1..Delta_{N-1}
    w = np.zeros(N)
    w[1:] = -lam[: N - 1]
    f = np.zeros(N)
    f[1:] = lam[: N - 1]
    rec = causal_solve(w, f, 0.0, fft=fft)[1:]
    floor = -slack * max(abs(lam[0]), 1.0) if lam.size else 0.0
    neg = np.nonzero(rec < floor)[0]
    head = kernels.check_kaluza(np.concatenate([[1.0], lam[: min(N, 3)]])).passed
    return DeltaReport(
        all_nonnegative=bool(neg.size == 0 and np.all(direct >= floor)),
        max_disagreement=float(np.max(np.abs(direct - rec))) if N > 1 else 0.0,
        min_delta=float(min(rec.min(), direct.min())) if N > 1 else 0.0,
        first_negative=int(neg[0] + 1) if neg.size else None,
        kaluza_with_unit_head=head,
        delta_direct=direct,
        delta_recurrence=rec,
    )


def limiting_value(spec: KernelSpec) -> float:
    """``lim r(t) = 1 / (1 + int_0^inf s k(s) ds)`` for critical kernels with finite first moment."""
    _require_regime(spec, Regime.CRITICAL, "the limiting value")
    m = kernels.first_moment(spec)
    if math.isinf(m):
        raise DomainError("the kernel has infinite first moment; r(t) -> 0")
    return 1.0 / (1.0 + m)


def write_csv(path, res: ResolventGrid):
    """``t,r,rho`` for continuous grids, ``n,r`` for discrete ones; 17 significant digits."""
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        if res.scheme is Scheme.DISCRETE_RECURRENCE:
            out.writerow(["n", "r"])
            for n, v in enumerate(res.r):
                out.writerow([n, f"{v:.17g}"])
        else:
            rho = res.rho if res.rho is not None else np.full(res.r.size, np.nan)
            out.writerow(["t", "r", "rho"])
            for t, v, p in zip(res.times, res.r, rho):
                out.writerow([f"{t:.17g}", f"{v:.17g}", f"{p:.17g}"])
