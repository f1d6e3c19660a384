"""Memory kernels: evaluation, tail integrals, moments and structural checks.

A kernel is the pair ``(a, k)`` of the linear Volterra equation

    x'(t) = a x(t) + int_0^t k(t - s) x(s) ds

or of its difference-equation analogue with a positive sequence
``(k_n)_{n >= 1}``.  The tail integral ``lam(t) = int_t^inf k(s) ds`` (the tail
sum ``lam_n = sum_{j >= n} k_j`` in discrete time) drives all asymptotics.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy import integrate, special

from .exceptions import DomainError


class TimeMode(str, Enum):
    CONTINUOUS = "continuous"
    DISCRETE = "discrete"


class Regime(str, Enum):
    CRITICAL = "critical"
    SUBEXPONENTIAL = "subexponential"
    UNSTABLE = "unstable"


@dataclass(frozen=True)
class PowerLaw:
    """``k(t) = scale * (1 + t)**(-alpha - 1)``; in discrete time ``k_n`` at ``t = n``."""

    alpha: float
    scale: float = 1.0

    def __post_init__(self):
        if not self.alpha > 0 or not self.scale > 0:
            raise DomainError("PowerLaw needs alpha > 0 and scale > 0")


@dataclass(frozen=True)
class PowerTail:
    """Discrete kernel with exact tail ``lam_n = scale * n**(-alpha)``.

    The kernel is the telescoping difference ``k_n = lam_n - lam_{n+1}``.
    """

    alpha: float
    scale: float = 1.0

    def __post_init__(self):
        if not self.alpha > 0 or not self.scale > 0:
            raise DomainError("PowerTail needs alpha > 0 and scale > 0")


@dataclass(frozen=True, eq=False)
class Tabulated:
    """Kernel sampled on a uniform grid.

    In continuous time ``values[i] = k(i * step)`` and the kernel is linearly
    interpolated.  In discrete time ``values[i] = k_{i+1}`` and ``step`` must be 1.
    Beyond the table the kernel is ``C * t**tail_exponent`` with ``C`` fitted on
    the last decade of samples; without ``tail_exponent`` the kernel is taken to
    vanish beyond the table and pointwise evaluation there is an error.
    """

    step: float
    values: np.ndarray
    tail_exponent: Optional[float] = None

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 2:
            raise DomainError("tabulated kernel needs at least two samples")
        if not self.step > 0:
            raise DomainError("tabulated step must be positive")
        if np.any(vals < 0):
            raise DomainError("tabulated kernel values must be nonnegative")
        object.__setattr__(self, "values", vals)

    @property
    def extent(self) -> float:
        return self.step * (self.values.size - 1)


@dataclass(frozen=True)
class Custom:
    """User supplied kernel.

    ``tail`` (``lam``) and ``total_mass`` are optional closed forms; when absent
    they are obtained by adaptive quadrature.  ``alpha`` is the regular-variation
    index of ``lam`` if known and is used to decide divergence of moments.
    """

    evaluator: Callable[[float], float]
    tail: Optional[Callable[[float], float]] = None
    alpha: Optional[float] = None


Family = Union[PowerLaw, PowerTail, Tabulated, Custom]


@dataclass(frozen=True)
class KernelSpec:
    family: Family
    a: float
    time_mode: TimeMode = TimeMode.CONTINUOUS

    def __post_init__(self):
        object.__setattr__(self, "time_mode", TimeMode(self.time_mode))
        if isinstance(self.family, PowerTail) and self.time_mode is TimeMode.CONTINUOUS:
            raise DomainError("PowerTail is a discrete-time family")
        if (isinstance(self.family, Tabulated) and self.time_mode is TimeMode.DISCRETE
                and self.family.step != 1):
            raise DomainError("discrete tabulated kernels must have step 1")

    @property
    def discrete(self) -> bool:
        return self.time_mode is TimeMode.DISCRETE

    @classmethod
    def critical(cls, family: Family, time_mode=TimeMode.CONTINUOUS) -> "KernelSpec":
        """Spec with ``a`` chosen so that ``a + total mass = 0``."""
        probe = cls(family, 0.0, time_mode)
        return cls(family, -total_mass(probe), time_mode)


@dataclass(frozen=True)
class RegimeClass:
    regime: Regime
    mass_gap: float
    tolerance: float


@dataclass(frozen=True)
class SlowVariationSpec:
    """Slowly varying factor ``L`` with ``lam(t) = L(t) t**(-alpha)``.

    ``log_evaluator`` optionally gives ``u -> L(exp(u))`` so that quantities at
    astronomically large ``t`` can be evaluated without overflow.
    """

    evaluator: Callable[[float], float]
    description: str
    alpha: float
    log_evaluator: Optional[Callable[[float], float]] = None
    kernel: Optional[Callable[[float], float]] = None

    def __call__(self, t):
        return self.evaluator(t)

    def at_log(self, u: float) -> float:
        if self.log_evaluator is not None:
            return self.log_evaluator(u)
        return self.evaluator(math.exp(u))


@dataclass(frozen=True)
class ConvexityReport:
    passed: bool
    worst_violation: float
    worst_index: int
    equality: bool = False


# --------------------------------------------------------------------------
# tabulated helpers


def _last_decade(t: np.ndarray) -> np.ndarray:
    t_end = t[-1]
    return (t >= t_end / 10.0) & (t > 0)


def _table_grid(fam: Tabulated, discrete: bool) -> np.ndarray:
    if discrete:
        return np.arange(1, fam.values.size + 1, dtype=float)
    return np.arange(fam.values.size) * fam.step


def _tail_coefficient(fam: Tabulated, discrete: bool) -> float:
    t = _table_grid(fam, discrete)
    sel = _last_decade(t) & (fam.values > 0)
    if not np.any(sel):
        raise DomainError("no positive samples in the last decade of the table")
    p = fam.tail_exponent
    return float(np.exp(np.mean(np.log(fam.values[sel]) - p * np.log(t[sel]))))


def _check_tail_exponent(fam: Tabulated):
    if fam.tail_exponent is not None and fam.tail_exponent >= -1:
        raise DomainError(
            f"tail exponent {fam.tail_exponent} gives a non-integrable kernel")


def _tab_eval(fam: Tabulated, t: np.ndarray, discrete: bool) -> np.ndarray:
    grid = _table_grid(fam, discrete)
    end = grid[-1]
    beyond = t > end * (1 + 1e-12)
    if np.any(beyond) and fam.tail_exponent is None:
        raise DomainError(f"t={t[beyond][0]} beyond table extent {end} and no tail exponent")
    if discrete:
        idx = np.rint(t).astype(int)
        if np.any(np.abs(t - idx) > 1e-9) or np.any(idx < 1):
            raise DomainError("discrete kernels are defined on integers n >= 1")
        out = np.empty_like(t)
        inside = ~beyond
        out[inside] = fam.values[idx[inside] - 1]
    else:
        out = np.interp(t, grid, fam.values)
    if np.any(beyond):
        _check_tail_exponent(fam)
        c = _tail_coefficient(fam, discrete)
        out[beyond] = c * t[beyond] ** fam.tail_exponent
    return out


def _tab_tail(fam: Tabulated, t: np.ndarray, discrete: bool) -> np.ndarray:
    _check_tail_exponent(fam)
    vals = fam.values
    grid = _table_grid(fam, discrete)
    end = grid[-1]
    c = _tail_coefficient(fam, discrete) if fam.tail_exponent is not None else 0.0
    p = fam.tail_exponent
    out = np.empty_like(t)
    if discrete:
        # suffix sums plus Hurwitz-zeta tail of the fitted power law
        suffix = np.concatenate([np.cumsum(vals[::-1])[::-1], [0.0]])
        beyond_tail = c * special.zeta(-p, end + 1) if p is not None else 0.0
        for i, ti in enumerate(t):
            n = int(round(ti))
            if n < 1:
                raise DomainError("discrete tails are defined for n >= 1")
            if n <= vals.size:
                out[i] = suffix[n - 1] + beyond_tail
            else:
                out[i] = c * special.zeta(-p, n) if p is not None else 0.0
        return out
    cells = 0.5 * (vals[1:] + vals[:-1]) * fam.step
    suffix = np.concatenate([np.cumsum(cells[::-1])[::-1], [0.0]])
    analytic_end = -c * end ** (p + 1) / (p + 1) if p is not None else 0.0
    for i, ti in enumerate(t):
        if ti >= end:
            out[i] = -c * ti ** (p + 1) / (p + 1) if p is not None else 0.0
            continue
        j = int(ti // fam.step)
        kt = np.interp(ti, grid, vals)
        partial = 0.5 * (kt + vals[j + 1]) * (grid[j + 1] - ti)
        out[i] = partial + suffix[j + 1] + analytic_end
    return out


# --------------------------------------------------------------------------
# operations


def eval_kernel(spec: KernelSpec, t):
    """Evaluate ``k`` at ``t`` (a time, or an integer index ``n >= 1`` in discrete mode).

    Examples
    --------
    >>> eval_kernel(KernelSpec(PowerLaw(0.3), -10 / 3), 0.0)
    1.0
    """
    scalar = np.ndim(t) == 0
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(tt < 0):
        raise DomainError("kernel arguments must be nonnegative")
    fam = spec.family
    if isinstance(fam, PowerLaw):
        out = fam.scale * (1.0 + tt) ** (-fam.alpha - 1.0)
    elif isinstance(fam, PowerTail):
        if np.any(tt < 1):
            raise DomainError("discrete kernels are defined on integers n >= 1")
        out = fam.scale * (tt ** -fam.alpha - (tt + 1.0) ** -fam.alpha)
    elif isinstance(fam, Tabulated):
        out = _tab_eval(fam, tt, spec.discrete)
    else:
        out = np.array([float(fam.evaluator(x)) for x in tt])
    return float(out[0]) if scalar else out


def tail_integral(spec: KernelSpec, t):
    """Return ``lam(t) = int_t^inf k`` (or ``sum_{j >= n} k_j`` in discrete mode)."""
    scalar = np.ndim(t) == 0
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    fam = spec.family
    if isinstance(fam, PowerLaw):
        if spec.discrete:
            out = fam.scale * special.zeta(fam.alpha + 1.0, tt + 1.0)
        else:
            out = fam.scale / (fam.alpha * (1.0 + tt) ** fam.alpha)
    elif isinstance(fam, PowerTail):
        out = fam.scale * tt ** -fam.alpha
    elif isinstance(fam, Tabulated):
        out = _tab_tail(fam, tt, spec.discrete)
    else:
        out = np.array([_custom_tail(spec, x) for x in tt])
    return float(out[0]) if scalar else out


def _custom_tail(spec: KernelSpec, t: float) -> float:
    fam = spec.family
    if fam.tail is not None:
        return float(fam.tail(t))
    if spec.discrete:
        raise DomainError("discrete custom kernels must supply their tail sums")
    val, _ = integrate.quad(fam.evaluator, t, np.inf, limit=400)
    return val


def total_mass(spec: KernelSpec) -> float:
    """``int_0^inf k`` in continuous time, ``sum_{j >= 1} k_j`` in discrete time."""
    return tail_integral(spec, 1.0 if spec.discrete else 0.0)


def first_moment(spec: KernelSpec) -> float:
    """Return ``int_0^inf s k(s) ds`` (``sum n k_n``), or ``math.inf`` when it diverges."""
    fam = spec.family
    if isinstance(fam, PowerLaw):
        a = fam.alpha
        if a <= 1:
            return math.inf
        if spec.discrete:
            # sum_{n>=1} n (n+1)^(-a-1) = (zeta(a) - 1) - (zeta(a+1) - 1)
            return fam.scale * float(special.zeta(a) - special.zeta(a + 1))
        return fam.scale / (a * (a - 1.0))
    if isinstance(fam, PowerTail):
        # sum n k_n = sum_{n>=1} lam_n
        return math.inf if fam.alpha <= 1 else fam.scale * float(special.zeta(fam.alpha))
    if isinstance(fam, Tabulated):
        return _tab_first_moment(fam, spec.discrete)
    if fam.alpha is not None and fam.alpha <= 1:
        return math.inf
    if spec.discrete:
        raise DomainError("first moment of a discrete custom kernel is not supported")
    val, _ = integrate.quad(lambda s: s * fam.evaluator(s), 0, np.inf, limit=400)
    return val


def _tab_first_moment(fam: Tabulated, discrete: bool) -> float:
    _check_tail_exponent(fam)
    grid = _table_grid(fam, discrete)
    p = fam.tail_exponent
    if p is not None and p >= -2:
        return math.inf
    c = _tail_coefficient(fam, discrete) if p is not None else 0.0
    end = grid[-1]
    if discrete:
        body = float(np.dot(grid, fam.values))
        tail = c * special.zeta(-p - 1, end + 1) if p is not None else 0.0
        return body + tail
    g = grid * fam.values
    body = float(fam.step * (g.sum() - 0.5 * (g[0] + g[-1])))
    tail = -c * end ** (p + 2) / (p + 2) if p is not None else 0.0
    return body + tail


def classify_regime(spec: KernelSpec, tol: Optional[float] = None) -> RegimeClass:
    """Classify by the sign of ``a + total mass``.

    The default tolerance is ``1e-10 * (|a| + mass)``.
    """
    mass = total_mass(spec)
    gap = spec.a + mass
    if tol is None:
        tol = 1e-10 * (abs(spec.a) + mass)
    if abs(gap) <= tol:
        regime = Regime.CRITICAL
    elif gap < 0:
        regime = Regime.SUBEXPONENTIAL
    else:
        regime = Regime.UNSTABLE
    return RegimeClass(regime, gap, tol)


def _exact(values) -> bool:
    return all(isinstance(v, (Fraction, int)) and not isinstance(v, bool) for v in values)


def _midpoint_report(values, rel_slack: float) -> ConvexityReport:
    if len(values) < 3:
        raise DomainError("need at least three values")
    if _exact(values):
        viol = [values[i] ** 2 - values[i - 1] * values[i + 1] for i in range(1, len(values) - 1)]
        worst = max(range(len(viol)), key=lambda i: viol[i])
        return ConvexityReport(
            passed=all(v <= 0 for v in viol),
            worst_violation=float(viol[worst]),
            worst_index=worst + 1,
            equality=all(v == 0 for v in viol),
        )
    lam = np.asarray(values, dtype=float)
    mid = lam[1:-1] ** 2
    viol = mid - lam[:-2] * lam[2:]
    worst = int(np.argmax(viol))
    slack = rel_slack * mid
    return ConvexityReport(
        passed=bool(np.all(viol <= slack)),
        worst_violation=float(viol[worst]),
        worst_index=worst + 1,
        equality=bool(np.all(np.abs(viol) <= np.maximum(slack, 1e-300))),
    )


def check_log_convexity(spec_or_values, grid: Optional[Sequence[float]] = None,
                        rel_tol: float = 1e-12) -> ConvexityReport:
    """Midpoint test ``lam_i**2 <= lam_{i-1} lam_{i+1}`` on a uniform grid.

    Accepts either a :class:`KernelSpec` plus a uniform time grid, or the tail
    values themselves.  ``worst_violation`` is the largest
    ``lam_i**2 - lam_{i-1} lam_{i+1}``; it is positive only if convexity fails.
    """
    if isinstance(spec_or_values, KernelSpec):
        if grid is None:
            raise DomainError("a grid is required when checking a kernel spec")
        g = np.asarray(grid, dtype=float)
        if g.size >= 3:
            dg = np.diff(g)
            if not np.allclose(dg, dg[0], rtol=1e-9, atol=0):
                raise DomainError("log-convexity is checked on uniform grids only")
        values = tail_integral(spec_or_values, g)
    else:
        values = spec_or_values
    return _midpoint_report(values, rel_tol)


def check_kaluza(lambda_seq, rel_slack: float = 1e-12) -> ConvexityReport:
    """Kaluza test ``lam_n**2 <= lam_{n-1} lam_{n+1}`` at every interior index.

    Sequences of :class:`fractions.Fraction` or ``int`` are checked exactly.

    Note that the monotonicity argument for the discrete resolvent applies
    the test to the sequence prefixed by ``lam_0 = 1``; use
    ``check_kaluza([1, *lam])`` for that version.
    """
    return _midpoint_report(list(lambda_seq) if _exact(lambda_seq) else lambda_seq, rel_slack)


def discrete_sequences(spec: KernelSpec, n: int):
    """Return ``(k, lam)`` with ``k[i] = k_{i+1}`` and ``lam[i] = lam_{i+1}``, ``i < n``."""
    if not spec.discrete:
        raise DomainError("discrete sequences requested for a continuous kernel")
    idx = np.arange(1, n + 1, dtype=float)
    fam = spec.family
    if isinstance(fam, PowerTail):
        lam_ext = fam.scale * np.arange(1, n + 2, dtype=float) ** -fam.alpha
        return lam_ext[:-1] - lam_ext[1:], lam_ext[:-1]
    if isinstance(fam, Tabulated) and fam.tail_exponent is None and n > fam.values.size:
        k = np.zeros(n)
        k[: fam.values.size] = fam.values
        lam = np.cumsum(k[::-1])[::-1]
        return k, lam
    return eval_kernel(spec, idx), tail_integral(spec, idx)


# --------------------------------------------------------------------------
# slow variation


def powerlaw_slow_variation(spec: KernelSpec) -> SlowVariationSpec:
    """``L(t) = lam(t) t**alpha`` for the power-law families."""
    fam = spec.family
    if isinstance(fam, PowerLaw) and not spec.discrete:
        a, c = fam.alpha, fam.scale
        return SlowVariationSpec(
            evaluator=lambda t: c * (t / (1.0 + t)) ** a / a,
            description=f"{c}/{a} * (t/(1+t))^{a}",
            alpha=a,
        )
    if isinstance(fam, PowerTail):
        return SlowVariationSpec(lambda t: fam.scale + 0.0 * t, f"{fam.scale}", fam.alpha)
    if isinstance(fam, PowerLaw):
        return SlowVariationSpec(
            evaluator=lambda t: tail_integral(spec, t) * np.asarray(t, dtype=float) ** fam.alpha,
            description="discrete Hurwitz-zeta tail times n^alpha",
            alpha=fam.alpha,
        )
    raise DomainError("slow variation is only closed-form for power-law families")


def kernel_from_target_decay(gamma: Callable[[float], float],
                             dgamma: Callable[[float], float],
                             t_min: float,
                             t_max: float = 1e300,
                             samples: int = 400,
                             log_dgamma: Optional[Callable[[float], float]] = None,
                             description: str = "") -> SlowVariationSpec:
    """Slowly varying ``L`` with ``L(t)**2 = -1 / (t * gamma'(t))``.

    A kernel ``k(t) ~ t**(-3/2) L(t)`` built from it gives an autocovariance
    decaying like ``gamma``.  ``gamma'`` must be strictly negative on a
    log-spaced probe of ``[t_min, t_max]``.

    ``log_dgamma`` optionally supplies ``u -> t * gamma'(t)`` at ``t = exp(u)``,
    used to evaluate ``L`` beyond floating-point range.
    """
    if not t_min > 0:
        raise DomainError("t_min must be positive")
    probe = np.geomspace(t_min, t_max, samples)
    slopes = np.array([dgamma(t) for t in probe])
    bad = np.nonzero(~(slopes < 0))[0]
    if bad.size:
        raise DomainError(f"gamma' is not negative at t={probe[bad[0]]:.6g}")

    def L(t):
        t = np.asarray(t, dtype=float)
        return np.sqrt(-1.0 / (t * np.vectorize(dgamma)(t)))

    def kern(t):
        return np.asarray(t, dtype=float) ** -1.5 * L(t)

    log_eval = None
    if log_dgamma is not None:
        def log_eval(u):
            return math.sqrt(-1.0 / log_dgamma(u))
    return SlowVariationSpec(
        evaluator=lambda t: float(L(t)) if np.ndim(t) == 0 else L(t),
        description=description or "L^2(t) = -1/(t gamma'(t))",
        alpha=0.5,
        log_evaluator=log_eval,
        kernel=kern,
    )


def inverse_log_target():
    """``gamma(t) = 1/log t``, giving ``L(t) = log t``."""
    return dict(
        gamma=lambda t: 1.0 / math.log(t),
        dgamma=lambda t: -1.0 / (t * math.log(t) ** 2),
        log_dgamma=lambda u: -1.0 / u ** 2,
        description="L(t) = log t",
    )


def inverse_loglog_target():
    """``gamma(t) = 1/log log t``, giving ``L(t)**2 = log t (log log t)**2``."""
    return dict(
        gamma=lambda t: 1.0 / math.log(math.log(t)),
        dgamma=lambda t: -1.0 / (t * math.log(t) * math.log(math.log(t)) ** 2),
        log_dgamma=lambda u: -1.0 / (u * math.log(u) ** 2),
        description="L(t)^2 = log t (log log t)^2",
    )


TARGET_DECAYS = {"inverse_log": inverse_log_target, "inverse_loglog": inverse_loglog_target}


def target_decay_family(target: str, t_min: float):
    """Kernel family and slowly varying factor for a named autocovariance decay ``gamma``.

    The kernel is ``t**(-3/2) L(t)`` for ``t >= t_min`` and the constant
    ``k(t_min)`` below, so it is positive, continuous and integrable.

    Returns
    -------
    (Custom, SlowVariationSpec)
    """
    try:
        recipe = TARGET_DECAYS[target]()
    except KeyError:
        raise DomainError(f"unknown target decay {target!r}; choose from {sorted(TARGET_DECAYS)}") from None
    L = kernel_from_target_decay(t_min=t_min, **recipe)
    k0 = float(L.kernel(t_min))

    def kern(t):
        return k0 if t < t_min else float(L.kernel(t))

    return Custom(kern, alpha=0.5), L


# --------------------------------------------------------------------------
# serialization


_FAMILY_NAMES = {PowerLaw: "powerlaw", PowerTail: "powertail", Tabulated: "tabulated",
                 Custom: "custom"}


def load_tabulated_csv(path, tail_exponent: Optional[float] = None) -> Tabulated:
    """Load a two-column ``t,k`` CSV (header optional) on a uniform grid."""
    ts, ks = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                t, k = float(row[0]), float(row[1])
            except ValueError:
                continue  # header
            ts.append(t)
            ks.append(k)
    t = np.asarray(ts)
    if t.size < 2:
        raise DomainError(f"{path}: fewer than two samples")
    step = t[1] - t[0]
    if not np.allclose(np.diff(t), step, rtol=1e-9, atol=0):
        raise DomainError(f"{path}: grid is not uniform")
    return Tabulated(step=float(step), values=np.asarray(ks), tail_exponent=tail_exponent)


def spec_to_block(spec: KernelSpec, csv_path: Optional[str] = None) -> dict:
    """Serialize to the flat key-value block used in experiment configs."""
    fam = spec.family
    block = {"family": _FAMILY_NAMES[type(fam)]}
    if isinstance(fam, (PowerLaw, PowerTail)):
        block["alpha"] = repr(fam.alpha)
        block["scale"] = repr(fam.scale)
    elif isinstance(fam, Tabulated):
        if csv_path is None:
            raise DomainError("tabulated kernels serialize by CSV path")
        block["csv"] = csv_path
        if fam.tail_exponent is not None:
            block["tail_exponent"] = repr(fam.tail_exponent)
    else:
        raise DomainError("custom kernels cannot be serialized")
    block["a"] = repr(spec.a)
    block["mode"] = spec.time_mode.value
    return block


def spec_from_block(block: dict) -> KernelSpec:
    """Inverse of :func:`spec_to_block`; ``a = critical`` selects ``a = -mass``."""
    try:
        name = block["family"].strip().lower()
        mode = TimeMode(block.get("mode", "continuous").strip().lower())
        if name in ("powerlaw", "powertail"):
            cls = PowerLaw if name == "powerlaw" else PowerTail
            fam = cls(alpha=float(block["alpha"]), scale=float(block.get("scale", 1.0)))
        elif name == "target_decay":
            fam, _ = target_decay_family(block["target"].strip(), float(block.get("t_min", 20.0)))
        elif name == "tabulated":
            tail = block.get("tail_exponent")
            fam = load_tabulated_csv(block["csv"], float(tail) if tail is not None else None)
        else:
            raise DomainError(f"unknown kernel family {name!r}")
        a_raw = str(block.get("a", "critical")).strip().lower()
    except KeyError as exc:
        raise DomainError(f"kernel block is missing key {exc}") from None
    if a_raw == "critical":
        return KernelSpec.critical(fam, mode)
    return KernelSpec(fam, float(a_raw), mode)


__all__ = [
    "TimeMode", "Regime", "PowerLaw", "PowerTail", "Tabulated", "Custom", "KernelSpec",
    "RegimeClass", "SlowVariationSpec", "ConvexityReport", "eval_kernel", "tail_integral",
    "total_mass", "first_moment", "classify_regime", "check_log_convexity", "check_kaluza",
    "discrete_sequences", "powerlaw_slow_variation", "kernel_from_target_decay",
    "inverse_log_target", "inverse_loglog_target", "target_decay_family", "TARGET_DECAYS", "load_tabulated_csv", "spec_to_block",
    "spec_from_block",
]

