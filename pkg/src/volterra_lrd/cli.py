"""Command-line front end.

Subcommands ``resolvent``, ``autocov``, ``asymptotics``, ``simulate`` and
``verify`` read an INI experiment config and write CSV/JSON into the output
directory.  Exit codes: 0 success, 2 configuration error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from typing import List, Optional

import numpy as np

from . import asymptotics as asy
from . import kernels, resolvent, simulate
from .autocovariance import autocov_continuous, autocov_discrete
from .autocovariance import write_csv as write_autocov_csv
from .config import ExperimentConfig, load_config, with_overrides
from .exceptions import ConfigError, DomainError, RegimeError
from .verification import _solve, check_targets, run_target

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VERIFY = 3



def _out(cfg: ExperimentConfig, name: str) -> str:
    os.makedirs(cfg.output_dir, exist_ok=True)
    return os.path.join(cfg.output_dir, name)


def _dump(path: str, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, default=_json_default)
        fh.write("\n")


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o))


def _finite(x):
    return None if x is None or not math.isfinite(x) else x


def cmd_resolvent(cfg: ExperimentConfig, args) -> int:
    spec = cfg.kernel_spec()
    try:
        res = _solve(cfg, spec)
    except RegimeError as exc:
        raise ConfigError(f"scheme {cfg.solver.scheme!r} cannot be used here: {exc}") from None
    resolvent.write_csv(_out(cfg, "resolvent.csv"), res)
    summary = {"scheme": res.scheme.value, "n_points": int(res.r.size),
               "regime": kernels.classify_regime(spec).regime.value}
    if spec.discrete:
        k, lam = kernels.discrete_sequences(spec, res.r.size)
        if kernels.classify_regime(spec).regime is kernels.Regime.CRITICAL:
            an = resolvent.discrete_renewal_identity(res.r, lam)
            summary["renewal_identity_max_abs"] = float(np.max(np.abs(an - 1.0)))
    else:
        summary.update(h=res.grid.step, t_max=res.grid.t_max)
        if res.log_convex is not None:
            summary["tail_log_convex"] = res.log_convex
        if kernels.classify_regime(spec).regime is kernels.Regime.CRITICAL:
            rr = resolvent.renewal_residual(res, spec)
            summary["renewal_residual"] = {"max_abs": rr.max_abs, "at_t": rr.at_t}
    _dump(_out(cfg, "resolvent_summary.json"), summary)
    print(json.dumps(summary, indent=2, default=_json_default))
    return EXIT_OK


def cmd_autocov(cfg: ExperimentConfig, args) -> int:
    spec = cfg.kernel_spec()
    if not cfg.autocov.lags:
        raise ConfigError("[autocov] lags is empty")
    res = _solve(cfg, spec)
    try:
        if spec.discrete:
            lags = np.asarray(cfg.autocov.lags)
            if np.any(lags != np.round(lags)):
                raise ConfigError("[autocov] discrete lags must be integers")
            cov = autocov_discrete(res.r, cfg.autocov.sigma, lags.astype(int))
        else:
            cov = autocov_continuous(res, cfg.autocov.sigma, cfg.autocov.lags)
    except DomainError as exc:
        raise ConfigError(f"autocovariance unavailable: {exc}") from None
    write_autocov_csv(_out(cfg, "autocov.csv"), cov)
    summary = cov.summary()
    _dump(_out(cfg, "autocov_summary.json"), summary)
    print(json.dumps(summary, indent=2, default=_json_default))
    return EXIT_OK


def cmd_asymptotics(cfg: ExperimentConfig, args) -> int:
    """Closed-form constants that apply to the configured kernel."""
    spec = cfg.kernel_spec()
    cls = kernels.classify_regime(spec)
    sigma = cfg.autocov.sigma
    out = {"regime": cls.regime.value, "mass_gap": cls.mass_gap, "a": spec.a,
           "total_mass": kernels.total_mass(spec), "sigma": sigma}
    fam = spec.family
    alpha = getattr(fam, "alpha", None)
    if cls.regime is kernels.Regime.CRITICAL:
        m = kernels.first_moment(spec)
        out["first_moment"] = _finite(m)
        if math.isfinite(m):
            out["limiting_value"] = resolvent.limiting_value(spec)
        if alpha is not None and 0 < alpha < 1:
            out["resolvent_rate_constant"] = asy.resolvent_rate_constant(alpha)
        if alpha is not None and 0 < alpha < 0.5:
            out["acvf_rate_constant"] = asy.acvf_rate_constant(alpha, sigma)
            out["acvf_ratio_constant"] = asy.acvf_ratio_constant(alpha - 1.0)
            if isinstance(fam, kernels.PowerLaw) and not spec.discrete and fam.scale == 1.0:
                out["powerlaw_acvf_limit"] = asy.powerlaw_acvf_limit(alpha, sigma)
        if cfg.kernel.get("family", "").strip().lower() == "target_decay":
            name = cfg.kernel["target"].strip()
            _, L = kernels.target_decay_family(name, float(cfg.kernel.get("t_min", 20.0)))
            out["critical_profile"] = [
                {"t": t, "profile": asy.critical_acvf_profile(L, sigma, t)}
                for t in (math.exp(5.0), math.exp(10.0), math.exp(20.0))]
    elif cls.regime is kernels.Regime.SUBEXPONENTIAL:
        c = asy.subexp_constants(spec.a, kernels.total_mass(spec), sigma)
        out.update(r_over_k_limit=c.L_c, c_over_k_limit=c.c_limit)
    else:
        out["note"] = "unstable regime: the resolvent grows exponentially; no asymptotic constants"
    _dump(_out(cfg, "asymptotics.json"), out)
    print(json.dumps(out, indent=2, default=_json_default))
    return EXIT_OK


def cmd_simulate(cfg: ExperimentConfig, args) -> int:
    spec = cfg.kernel_spec()
    sim = cfg.simulation
    threads = max(1, args.threads or 1)
    n_paths = sim.paths if sim.paths > 1 else None
    try:
        if sim.scheme == "em":
            if spec.discrete:
                raise ConfigError("[simulation] scheme em needs a continuous kernel")
            path = simulate.simulate_continuous_em(spec, sim.sigma, sim.h, sim.t_max, sim.seed,
                                                   sim.x0, n_paths, threads, sim.noise,
                                                   cfg.solver.fft_blocks)
        elif sim.scheme == "discrete":
            if not spec.discrete:
                raise ConfigError("[simulation] scheme discrete needs a discrete kernel")
            k, _ = kernels.discrete_sequences(spec, sim.n_steps)
            path = simulate.simulate_discrete(k, spec.a, sim.sigma, sim.n_steps, sim.seed, sim.x0,
                                              n_paths, threads, sim.noise, cfg.solver.fft_blocks)
        else:
            if not spec.discrete:
                raise ConfigError("[simulation] scheme ma needs a discrete kernel")
            res = _solve(cfg, spec)
            if n_paths is None:
                M = sim.ma_truncation
                if M is None:
                    M = simulate.ma_truncation_for(res.r)
                path = simulate.simulate_stationary_discrete(res.r, sim.sigma, sim.n_steps, M,
                                                             sim.seed, sim.noise)
            else:
                if sim.noise != "gaussian":
                    raise ConfigError("stationary ensembles are Gaussian only")
                path = simulate.simulate_stationary_ensemble(res.r, sim.sigma, sim.n_steps - 1,
                                                             n_paths, sim.seed, sim.ma_truncation,
                                                             threads=threads)
    except DomainError as exc:
        raise ConfigError(f"simulation unavailable: {exc}") from None

    for p in range(min(path.n_paths, sim.path_files)):
        simulate.write_path_csv(_out(cfg, f"path_{p:05d}.csv"), path, p)
    report = {"seed": sim.seed, "scheme": sim.scheme, "paths": path.n_paths,
              "n_values": int(path.values.shape[0]), "sigma": sim.sigma,
              "truncation_M": path.truncation_M, "path_files": min(path.n_paths, sim.path_files)}
    if sim.lags:
        try:
            if path.n_paths == 1:
                est = simulate.empirical_autocov(path, sim.lags)
            else:
                vals = path.values
                if sim.scheme != "ma":      # drop the transient from the deterministic start
                    vals = vals[vals.shape[0] // 2:]
                est = simulate.ensemble_autocov(
                    simulate.SamplePath(np.ascontiguousarray(vals), path.step, path.scheme,
                                        path.seed, path.sigma, path.truncation_M), sim.lags)
        except DomainError as exc:
            raise ConfigError(f"covariance estimate unavailable: {exc}") from None
        simulate.write_estimate_csv(_out(cfg, "c_hat.csv"), est)
        report["estimate"] = {"lags": est.lags, "c_hat": est.c_hat, "std_err": est.std_err,
                              "n_effective": est.n_effective}
    _dump(_out(cfg, "simulation.json"), report)
    print(json.dumps(report, indent=2, default=_json_default))
    return EXIT_OK


def cmd_verify(cfg: ExperimentConfig, args) -> int:
    if not cfg.verify.targets:
        raise ConfigError("[verify] targets is empty")
    check_targets(cfg)
    reports = []
    for t in cfg.verify.targets:
        reports.extend(run_target(cfg, t))
    ok = all(r.extra["passed"] for r in reports)
    doc = {"passed": ok, "reports": [r.to_dict() for r in reports]}
    _dump(_out(cfg, "verify.json"), doc)
    for r in reports:
        print(f"{r.target:10s} {'PASS' if r.extra['passed'] else 'FAIL'}  trend={r.trend.value:10s} "
              f"final_error={r.extra['final_error']:.4g} threshold={r.extra['threshold']:g}")
    return EXIT_OK if ok else EXIT_VERIFY


COMMANDS = {
    "resolvent": cmd_resolvent,
    "autocov": cmd_autocov,
    "asymptotics": cmd_asymptotics,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="volterra-lrd", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        sp = sub.add_parser(name, help=(fn.__doc__ or name).strip().splitlines()[0])
        sp.add_argument("--config", required=True, help="experiment INI file")
        sp.add_argument("--out", help="output directory (overrides [output] dir)")
        sp.add_argument("--seed", type=int, help="master seed (overrides [simulation] seed)")
        sp.add_argument("--threads", type=int, default=1, help="worker threads for simulation")
        sp.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.seed is not None and not 0 <= args.seed < 2 ** 64:
            raise ConfigError("--seed must be an unsigned 64-bit integer")
        cfg = with_overrides(load_config(args.config), seed=args.seed, out=args.out)
        return COMMANDS[args.command](cfg, args)
    except (ConfigError, DomainError, RegimeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
