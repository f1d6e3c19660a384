"""Verification targets: each asymptotic statement as a convergence report.

A target maps an experiment configuration to one or more
:class:`~volterra_lrd.asymptotics.AsymptoticReport` objects whose ``extra``
field records the threshold used and whether the target passed.
"""

from __future__ import annotations

import math
from dataclasses import replace
from typing import Callable, Dict, List

import numpy as np

from . import asymptotics as asy
from . import kernels
from .autocovariance import autocov_continuous, autocov_discrete
from .config import ExperimentConfig
from .exceptions import ConfigError, DomainError, RegimeError
from .kernels import KernelSpec, PowerLaw, PowerTail, Regime
from .resolvent import Grid, Scheme, resolvent_for

CRITICAL_PROFILE_TIMES = (math.exp(5.0), math.exp(10.0), math.exp(20.0))
LIMIT_TIMES = (100.0, 300.0, 1000.0)
SUBEXP_TIMES = (10.0, 100.0, 1000.0)


def _require(spec: KernelSpec, regime: Regime, discrete: bool, target: str):
    if spec.discrete != discrete:
        mode = "discrete" if discrete else "continuous"
        raise ConfigError(f"{target} needs a {mode}-time kernel")
    got = kernels.classify_regime(spec).regime
    if got is not regime:
        raise ConfigError(f"{target} needs the {regime.value} regime, the kernel is {got.value}")


def _alpha(spec: KernelSpec, target: str, lo: float, hi: float) -> float:
    fam = spec.family
    if not isinstance(fam, (PowerLaw, PowerTail)):
        raise ConfigError(f"{target} needs a power-law kernel family")
    if not lo < fam.alpha < hi:
        raise ConfigError(f"{target} needs alpha in ({lo}, {hi}), got {fam.alpha}")
    return fam.alpha


def _decades(lo: float, hi: float) -> np.ndarray:
    k0 = math.ceil(math.log10(lo) - 1e-9)
    k1 = math.floor(math.log10(hi) + 1e-9)
    return 10.0 ** np.arange(k0, k1 + 1)


def _grid(cfg: ExperimentConfig) -> Grid:
    try:
        return Grid.from_horizon(cfg.solver.h, cfg.solver.t_max)
    except DomainError as exc:
        raise ConfigError(f"[solver]: {exc}") from None


def _scheme(cfg: ExperimentConfig):
    s = cfg.solver.scheme
    return None if s == "auto" else Scheme(s)


def _solve(cfg: ExperimentConfig, spec: KernelSpec):
    if spec.discrete:
        return resolvent_for(spec, cfg.solver.n, fft=cfg.solver.fft_blocks)
    return resolvent_for(spec, _grid(cfg), _scheme(cfg), fft=cfg.solver.fft_blocks)


def _finish(rep: asy.AsymptoticReport, threshold: float, error: float = None,
            **extra) -> asy.AsymptoticReport:
    err = rep.final_error if error is None else error
    passed = rep.trend is asy.Trend.CONVERGING and err <= threshold
    info = dict(rep.extra, threshold=threshold, final_error=err, passed=bool(passed), **extra)
    return replace(rep, extra=info)


def thm3_2(cfg, spec):
    _require(spec, Regime.CRITICAL, False, "thm3.2")
    alpha = _alpha(spec, "thm3.2", 0.0, 1.0)
    L = kernels.powerlaw_slow_variation(spec)
    res = _solve(cfg, spec)
    ts = _decades(100.0, res.grid.t_max)
    rep = asy.rate_diagnostics(res.times, res.r, lambda t: t ** (1 - alpha) * L(t),
                               asy.resolvent_rate_constant(alpha), sample_at=ts, target="thm3.2")
    return [_finish(rep, cfg.verify.threshold("thm3.2"))]


def thm3_5(cfg, spec):
    _require(spec, Regime.CRITICAL, False, "thm3.5")
    alpha = _alpha(spec, "thm3.5", 0.0, 0.5)
    sigma = cfg.autocov.sigma
    L = kernels.powerlaw_slow_variation(spec)
    res = _solve(cfg, spec)
    lags = _decades(10.0, res.grid.t_max / 2)
    cov = autocov_continuous(res, sigma, lags)
    rep = asy.rate_diagnostics(lags, cov.c, lambda t: L(t) ** 2 * t ** (1 - 2 * alpha),
                               asy.acvf_rate_constant(alpha, sigma), sample_at=lags, target="thm3.5")
    return [_finish(rep, cfg.verify.threshold("thm3.5"), fitted_exponent=cov.fitted_exponent,
                    long_memory=cov.long_memory)]


def cor3_3(cfg, spec):
    _require(spec, Regime.CRITICAL, False, "cor3.3")
    from .resolvent import limiting_value
    try:
        limit = limiting_value(spec)
    except DomainError as exc:
        raise ConfigError(f"cor3.3: {exc}") from None
    res = _solve(cfg, spec)
    ts = [t for t in LIMIT_TIMES if t <= res.grid.t_max]
    if len(ts) < 2:
        raise ConfigError("cor3.3 needs t_max >= 300")
    rep = asy.rate_diagnostics(res.times, res.r, lambda t: np.ones_like(t), limit,
                               sample_at=ts, target="cor3.3")
    abs_err = [abs(q - limit) for q in rep.ratios]
    return [_finish(rep, cfg.verify.threshold("cor3.3"), error=abs_err[-1],
                    abs_errors=abs_err, error_kind="absolute")]


def thm3_7(cfg, spec):
    _require(spec, Regime.CRITICAL, False, "thm3.7")
    if cfg.kernel.get("family", "").strip().lower() != "target_decay":
        raise ConfigError("thm3.7 needs a target_decay kernel (alpha = 1/2 with a prescribed decay)")
    name = cfg.kernel["target"].strip()
    t_min = float(cfg.kernel.get("t_min", 20.0))
    _, L = kernels.target_decay_family(name, t_min)
    gamma = kernels.TARGET_DECAYS[name]()["gamma"]
    sigma = cfg.autocov.sigma
    ts = np.array([t for t in CRITICAL_PROFILE_TIMES if t > t_min])
    vals = np.array([asy.critical_acvf_profile(L, sigma, t) for t in ts])
    rep = asy.rate_diagnostics(ts, vals, lambda t: np.array([math.pi ** 2 / (sigma ** 2 * gamma(x)) for x in t]),
                               1.0, sample_at=ts, target="thm3.7")
    return [_finish(rep, cfg.verify.threshold("thm3.7"), error=float(rep.relative_errors.max()))]


def thm4_1(cfg, spec):
    _require(spec, Regime.CRITICAL, True, "thm4.1")
    alpha = _alpha(spec, "thm4.1", 0.0, 1.0)
    L = kernels.powerlaw_slow_variation(spec)
    res = _solve(cfg, spec)
    n = np.arange(res.r.size, dtype=float)
    ts = _decades(10.0, n[-1])
    rep = asy.rate_diagnostics(n, res.r, lambda t: t ** (1 - alpha) * L(t),
                               asy.resolvent_rate_constant(alpha), sample_at=ts, target="thm4.1")
    return [_finish(rep, cfg.verify.threshold("thm4.1"))]


def thm4_2(cfg, spec):
    _require(spec, Regime.CRITICAL, True, "thm4.2")
    alpha = _alpha(spec, "thm4.2", 0.0, 0.5)
    sigma = cfg.autocov.sigma
    L = kernels.powerlaw_slow_variation(spec)
    res = _solve(cfg, spec)
    lags = _decades(10.0, res.r.size / 10)
    cov = autocov_discrete(res.r, sigma, lags.astype(int))
    rep = asy.rate_diagnostics(lags, cov.c, lambda t: L(t) ** 2 * t ** (1 - 2 * alpha),
                               asy.acvf_rate_constant(alpha, sigma), sample_at=lags, target="thm4.2")
    return [_finish(rep, cfg.verify.threshold("thm4.2"), fitted_exponent=cov.fitted_exponent)]


def _subexp(cfg, spec, discrete: bool, target: str):
    _require(spec, Regime.SUBEXPONENTIAL, discrete, target)
    sigma = cfg.autocov.sigma
    const = asy.subexp_constants(spec.a, kernels.total_mass(spec), sigma)
    res = _solve(cfg, spec)
    if discrete:
        t = np.arange(res.r.size, dtype=float)
        ts = np.array([x for x in SUBEXP_TIMES if x <= (res.r.size - 1) / 10])
        cov = autocov_discrete(res.r, sigma, ts.astype(int))
    else:
        t = res.times
        ts = np.array([x for x in SUBEXP_TIMES if x <= res.grid.t_max / 2])
        cov = autocov_continuous(res, sigma, ts)
    if ts.size < 2:
        raise ConfigError(f"{target}: horizon too short for the sampling times {SUBEXP_TIMES}")
    inv_k = lambda x: 1.0 / np.asarray(kernels.eval_kernel(spec, x))
    rep_r = asy.rate_diagnostics(t, res.r, inv_k, const.L_c, sample_at=ts, target=target + ".r")
    rep_c = asy.rate_diagnostics(ts, cov.c, inv_k, const.c_limit, sample_at=ts, target=target + ".c")
    return [_finish(rep_r, cfg.verify.threshold(target + ".r")),
            _finish(rep_c, cfg.verify.threshold(target + ".c"))]


TARGET_RUNNERS: Dict[str, Callable] = {
    "thm3.2": thm3_2,
    "thm3.5": thm3_5,
    "cor3.3": cor3_3,
    "thm3.7": thm3_7,
    "thm4.1": thm4_1,
    "thm4.2": thm4_2,
    "thm5.2": lambda cfg, spec: _subexp(cfg, spec, False, "thm5.2"),
    "thm5.4": lambda cfg, spec: _subexp(cfg, spec, True, "thm5.4"),
}


def run_target(cfg: ExperimentConfig, target: str) -> List[asy.AsymptoticReport]:
    if target not in TARGET_RUNNERS:
        raise ConfigError(f"unknown target {target!r}")
    spec = cfg.kernel_spec()
    try:
        return TARGET_RUNNERS[target](cfg, spec)
    except RegimeError as exc:
        raise ConfigError(f"{target}: {exc}") from None


def check_targets(cfg: ExperimentConfig):
    """Raise :class:`ConfigError` if any target is incompatible with the kernel."""
    spec = cfg.kernel_spec()
    regime = kernels.classify_regime(spec).regime
    need = {"thm3.2": (Regime.CRITICAL, False), "thm3.5": (Regime.CRITICAL, False),
            "cor3.3": (Regime.CRITICAL, False), "thm3.7": (Regime.CRITICAL, False),
            "thm4.1": (Regime.CRITICAL, True), "thm4.2": (Regime.CRITICAL, True),
            "thm5.2": (Regime.SUBEXPONENTIAL, False), "thm5.4": (Regime.SUBEXPONENTIAL, True)}
    for t in cfg.verify.targets:
        reg, disc = need[t]
        if reg is not regime or disc != spec.discrete:
            mode = "discrete" if disc else "continuous"
            raise ConfigError(f"target {t} needs a {mode} {reg.value} kernel; "
                              f"the configured kernel is {'discrete' if spec.discrete else 'continuous'} "
                              f"{regime.value}")
