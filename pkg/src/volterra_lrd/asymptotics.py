"""Closed-form asymptotic constants and convergence diagnostics."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate

from .exceptions import DomainError, RegimeError
from .kernels import SlowVariationSpec

# Lanczos approximation, g = 7, nine terms
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def _sinpi(x: float) -> float:
    """``sin(pi x)`` with argument reduction to ``[-1/2, 1/2]``."""
    n = round(x)
    s = math.sin(math.pi * (x - n))
    return -s if n % 2 else s


def gamma_fn(x: float) -> float:
    """Gamma function by the Lanczos approximation, with reflection for ``x < 1/2``.

    Parameters
    ----------
    x : float
        Any real number except a nonpositive integer.

    Returns
    -------
    float

    Raises
    ------
    DomainError
        At the poles ``0, -1, -2, ...``.

    Examples
    --------
    >>> round(gamma_fn(0.5) ** 2, 12) == round(math.pi, 12)
    True
    >>> gamma_fn(5.0)
    24.000000000000004
    """
    x = float(x)
    if x <= 0 and x == math.floor(x):
        raise DomainError(f"Gamma has a pole at {x}")
    if x < 0.5:
        return math.pi / (_sinpi(x) * gamma_fn(1.0 - x))
    x -= 1.0
    acc = _LANCZOS[0]
    for i in range(1, len(_LANCZOS)):
        acc += _LANCZOS[i] / (x + i)
    t = x + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (x + 0.5) * math.exp(-t) * acc


def resolvent_rate_constant(alpha: float) -> float:
    """``lim r(t) t^{1-alpha} L(t) = sin(alpha pi)/pi`` for ``alpha`` in (0, 1)."""
    if not 0 < alpha < 1:
        raise DomainError("alpha must lie in (0, 1)")
    return _sinpi(alpha) / math.pi


def acvf_ratio_constant(mu: float) -> float:
    """``Gamma(-1-2mu) Gamma(1+mu) / Gamma(-mu) = int_0^inf x^mu (1+x)^mu dx`` for ``mu`` in (-1, -1/2)."""
    if not -1 < mu < -0.5:
        raise DomainError("mu must lie in (-1, -1/2)")
    return gamma_fn(-1.0 - 2.0 * mu) * gamma_fn(1.0 + mu) / gamma_fn(-mu)


def acvf_ratio_quadrature(mu: float) -> float:
    """Independent evaluation of ``int_0^inf x^mu (1+x)^mu dx`` by algebraic-weight quadrature.

    ``[0, 1]`` carries the ``x^mu`` endpoint singularity as a weight; the tail is
    mapped by ``x = 1/y`` to ``int_0^1 y^{-2mu-2} (1+y)^mu dy``.
    """
    head, _ = integrate.quad(lambda x: (1.0 + x) ** mu, 0.0, 1.0, weight="alg", wvar=(mu, 0.0),
                             epsabs=0, epsrel=1e-13, limit=200)
    tail, _ = integrate.quad(lambda y: (1.0 + y) ** mu, 0.0, 1.0, weight="alg", wvar=(-2.0 * mu - 2.0, 0.0),
                             epsabs=0, epsrel=1e-13, limit=200)
    return head + tail


def acvf_rate_constant(alpha: float, sigma: float = 1.0) -> float:
    """``lim c(t) L(t)^2 t^{1-2alpha}``, long-memory case ``alpha`` in (0, 1/2)."""
    if not 0 < alpha < 0.5:
        raise DomainError("alpha must lie in (0, 1/2)")
    s = _sinpi(alpha) / math.pi
    return sigma * sigma * gamma_fn(1 - 2 * alpha) * gamma_fn(alpha) / gamma_fn(1 - alpha) * s * s


def powerlaw_acvf_limit(alpha: float, sigma: float = 1.0) -> float:
    """``lim c(t) t^{1-2alpha}`` for ``k(t) = (1+t)^{-alpha-1}``, where ``L -> 1/alpha``."""
    if not 0 < alpha < 0.5:
        raise DomainError("alpha must lie in (0, 1/2)")
    g = gamma_fn(-alpha)
    return sigma * sigma * _sinpi(alpha) * gamma_fn(1 - 2 * alpha) / (math.pi * g * g)


@dataclass(frozen=True)
class SubexpConstants:
    L_c: float
    c_limit: float


def subexp_constants(a: float, total_mass: float, sigma: float = 1.0) -> SubexpConstants:
    """Limits of ``r(t)/k(t)`` and ``c(t)/k(t)`` in the subexponential regime.

    The same formulas serve the discrete case with ``total_mass = sum k_j``.

    Examples
    --------
    >>> subexp_constants(-2.0, 2.0 / 3.0)
    SubexpConstants(L_c=0.5625, c_limit=0.421875)
    """
    gap = a + total_mass
    if not gap < 0:
        raise RegimeError(f"a + mass = {gap:.6g} is not negative; the kernel is not subexponential")
    return SubexpConstants(1.0 / (gap * gap), sigma * sigma / (-gap) ** 3)


# u = log s is integrated up to _U_SWITCH, then v = log u up to _V_MAX
_U_SWITCH = 700.0
_V_MAX = 300.0


def critical_acvf_profile(L: SlowVariationSpec, sigma: float, t: float) -> float:
    """``sigma^2/pi^2 int_t^inf ds / (s L(s)^2)`` for the critical case ``alpha = 1/2``.

    With ``u = log s`` the integral is ``int du / L(e^u)^2``; it is integrated
    adaptively up to ``u = 700`` and then, with ``v = log u``, up to ``v = 300``.
    The remainder uses a power-law fit ``g(v) ~ C v^{-p}`` of the ``v``-integrand,
    which makes the tail exact when ``L`` is a power of ``log log``, and
    negligible (``exp(-(2 beta - 1) e^300)``) when ``L`` is a log power.
    If ``L`` has no ``log_evaluator`` it is held at ``L(e^700)`` beyond that point.

    Raises
    ------
    DomainError
        If ``p <= 1``, i.e. the condition integral diverges and no stationary
        solution exists (for instance constant ``L``).
    """
    if not t > 1:
        raise DomainError("t must exceed 1")
    u0 = math.log(t)
    if u0 >= _U_SWITCH:
        raise DomainError("t too large for the quadrature ladder")

    def L_log(u):
        # without a log-form evaluator L is frozen beyond e^700, fine for slow variation
        return L.at_log(u if L.log_evaluator is not None else min(u, _U_SWITCH))

    def g(v):
        u = math.exp(v)
        try:
            lv = L_log(u)
            return u / (lv * lv)
        except OverflowError:   # L(e^u) beyond float range: integrand is 0 to working precision
            return 0.0

    vs = (_V_MAX / 2.0, _V_MAX)
    with np.errstate(over="ignore"):
        gv = [g(v) for v in vs]
    if not all(math.isfinite(x) and x >= 0 for x in gv) or gv[1] > 0 and gv[1] >= gv[0] * 2.0 ** -1.0:
        raise DomainError(
            "int_1^inf dt/(t L(t)^2) diverges for this L; no stationary solution exists")
    p = math.log(gv[0] / gv[1]) / math.log(2.0) if gv[1] > 0 else math.inf

    f = lambda u: 1.0 / L_log(u) ** 2
    pts = [u0]
    while pts[-1] * 4 < _U_SWITCH:
        pts.append(max(pts[-1] * 4, pts[-1] + 1.0))
    pts.append(_U_SWITCH)
    body = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        body += integrate.quad(f, lo, hi, epsabs=0, epsrel=1e-12, limit=400)[0]
    vpts = np.linspace(math.log(_U_SWITCH), _V_MAX, 41)
    for lo, hi in zip(vpts[:-1], vpts[1:]):
        body += integrate.quad(g, lo, hi, epsabs=0, epsrel=1e-12, limit=400)[0]
    tail = 0.0 if math.isinf(p) else _V_MAX * gv[1] / (p - 1.0)
    return sigma * sigma / math.pi ** 2 * (body + tail)


class Trend(str, Enum):
    CONVERGING = "Converging"
    STALLED = "Stalled"
    DIVERGING = "Diverging"


@dataclass(frozen=True)
class AsymptoticReport:
    target: str
    theory_constant: float
    times: np.ndarray
    ratios: np.ndarray
    relative_errors: np.ndarray
    trend: Trend
    extra: dict = field(default_factory=dict)

    @property
    def final_error(self) -> float:
        return float(self.relative_errors[-1])

    def to_dict(self) -> dict:
        out = {
            "target": self.target,
            "theory_constant": self.theory_constant,
            "samples": [{"t": float(t), "ratio": float(q), "rel_err": float(e)}
                        for t, q, e in zip(self.times, self.ratios, self.relative_errors)],
            "trend": self.trend.value,
        }
        out.update(self.extra)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def classify_trend(errors: Sequence[float], floor: float = 1e-12) -> Trend:
    e = np.asarray(errors, dtype=float)
    if not np.all(np.isfinite(e)):
        return Trend.DIVERGING      # overflowed series
    if np.all(e <= floor):
        return Trend.CONVERGING
    d = np.diff(e)
    if np.all(d < 0):
        return Trend.CONVERGING
    if np.all(d > 0):
        return Trend.DIVERGING
    return Trend.STALLED


def _sample(t, v, ts):
    out = np.empty(ts.size)
    for i, x in enumerate(ts):
        j = int(np.searchsorted(t, x))
        if j < t.size and math.isclose(t[j], x, rel_tol=1e-12):
            out[i] = v[j]
            continue
        j = min(max(j, 1), t.size - 1)
        t0, t1, v0, v1 = t[j - 1], t[j], v[j - 1], v[j]
        if min(t0, v0, v1) > 0:
            w = math.log(x / t0) / math.log(t1 / t0)
            out[i] = math.exp((1 - w) * math.log(v0) + w * math.log(v1))
        else:
            out[i] = v0 + (v1 - v0) * (x - t0) / (t1 - t0)
    return out


def rate_diagnostics(t, values, normalizer: Callable, theory: float,
                     sample_at: Optional[Sequence[float]] = None,
                     target: str = "") -> AsymptoticReport:
    """Compare ``value(t) * normalizer(t)`` with ``theory`` at decade points.

    Parameters
    ----------
    t, values : array_like
        The numerical series, ``t`` increasing and positive where sampled.
    normalizer : callable
        Vectorized map ``t -> scale``.
    theory : float
        Predicted limit of the scaled ratio; must be nonzero.
    sample_at : sequence of float, optional
        Sampling times; defaults to every power of ten inside the series range.
        Grid hits are used as is; other points are interpolated log-log where
        the series is positive and linearly elsewhere.
    target : str
        Label stored in the report.
    """
    t = np.asarray(t, dtype=float)
    v = np.asarray(values, dtype=float)
    if t.size != v.size or t.size < 2:
        raise DomainError("series must contain matching t and value arrays")
    if theory == 0:
        raise DomainError("theory constant must be nonzero")
    if sample_at is None:
        start = max(t[0], 1.0)
        if t[-1] < 100.0 * start * (1 - 1e-12):
            raise DomainError("series must cover at least two decades")
        k_lo = max(1, math.ceil(math.log10(start) - 1e-9))
        k_hi = math.floor(math.log10(t[-1]) + 1e-9)
        ts = 10.0 ** np.arange(k_lo, k_hi + 1)
        if ts.size < 2:
            raise DomainError("series must cover at least two decades")
    else:
        ts = np.asarray(sample_at, dtype=float)
        if ts.size < 2:
            raise DomainError("need at least two sampling points")
        if ts.min() < t[0] or ts.max() > t[-1]:
            raise DomainError("sampling points outside the series range")
    vals = _sample(t, v, ts)
    ratios = vals * np.asarray(normalizer(ts), dtype=float)
    errs = np.abs(ratios - theory) / abs(theory)
    return AsymptoticReport(target, float(theory), ts, ratios, errs, classify_trend(errs))
