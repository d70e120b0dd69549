"""Command-line front end.

Subcommands map one-to-one to the checkers and the simulator::

    simulate          one trajectory, dumped as CSV (and optionally binary)
    jump-lipschitz    randomized exact sweep of the jump-kernel envelope
    moments           second-moment envelope checks on a model
    holding           holding-time floor checks
    harnack           randomized log-transport inequality sweep
    feller            common-random-number continuity-modulus probe
    chain-marginal    empirical chain marginals vs the matrix exponential
    truncation-check  shared-noise truncated/plain path identity + exit bound

Every run reads one JSON scenario config (see ``config``), accepts
``--seed/--replicas/--dt/--threads`` overrides, writes JSON-lines report
records stamped with the config hash, and exits 0 only when every pass flag
in the run is true. Exit codes: 2 config error, 3 model-assumption failure
(witness printed), 4 numerical blowup, 1 failed checks.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import estimators as est
from . import reports as rep
from .config import (ScenarioConfig, build_model, build_sim, config_hash,
                     load_config, validate_task)
from .engine import simulate
from .errors import (ConfigError, InvalidModelError, NumericalBlowupError,
                     UnsupportedSchemeError)
from .models import SamplingPlan, check_assumptions
from .trajectory import Trajectory

_GATES = {
    "moments": ("band_structure", "coefficient_growth", "rate_linear_growth"),
    "holding": ("band_structure", "rate_regime_linear"),
    "harnack": ("state_independent_rates", "one_sided_dissipativity",
                "uniform_ellipticity", "modulus_nonincreasing",
                "gamma_domination"),
    "truncation-check": ("band_structure", "rate_regime_linear",
                         "coefficient_growth"),
}


def _function_from_task(task: dict, dim: int):
    spec = task.get("f", {"name": "gauss"})
    name = spec.get("name", "gauss")
    if name == "gauss":
        return est.gauss_function(scale=spec.get("scale", 1.0),
                                  center=spec.get("center"))
    if name == "indicator_x1":
        return lambda X, lam: (np.asarray(X)[:, 0] > 0).astype(float)
    if name == "one":
        return lambda X, lam: np.ones(len(np.atleast_2d(X)))
    raise ConfigError(f"unknown observable {name!r}; "
                      "have gauss, indicator_x1, one")


def _gate(model, subcommand) -> int:
    names = _GATES.get(subcommand)
    if not names:
        return 0
    plan = SamplingPlan(n_pairs=2048, n_rate_pairs=64, max_regime=10)
    report = check_assumptions(model, plan)
    for name in names:
        res = report.results.get(name)
        if res is not None and not res.passed:
            print(f"assumption {name} failed "
                  f"(violation {res.max_violation:.3e}); witness: {res.witness}",
                  file=sys.stderr)
            return 3
    return 0


def _write_outputs(cfg: ScenarioConfig, records: list[dict],
                   traj: Trajectory | None = None) -> None:
    out = cfg.output
    outdir = Path(out.get("dir", "out"))
    outdir.mkdir(parents=True, exist_ok=True)
    rep.write_jsonl(outdir / out.get("reports", "reports.jsonl"), records)
    if traj is not None:
        if out.get("trajectory"):
            traj.to_csv(outdir / out["trajectory"])
        if out.get("trajectory_binary"):
            traj.to_binary(outdir / out["trajectory_binary"])
    if out.get("plot_data") and records:
        plottable = [r for r in records if r.get("checker") != "summary"]
        if plottable:
            rep.emit_plot_data(plottable, outdir / out["plot_data"])


def _run_simulate(model, cfg, sim, task, digest):
    x0 = task.get("x0", [0.0] * model.dim)
    i0 = int(task.get("i0", 1))
    traj = simulate(model, x0, i0, sim)
    traj.config_digest = digest
    records = [rep.record("simulate", model.model_id,
                          {"x0": x0, "i0": i0, "eta": traj.eta,
                           "tau_k": traj.tau_k, "n_samples": len(traj.times),
                           "n_jumps": len(traj.jumps)},
                          None, None, None, None, True, digest, sim.seed)]
    return 0, records, traj


def _run_jump_lipschitz(model, cfg, sim, task, digest):
    sweep = est.displacement_lipschitz_sweep(
        n_cases=int(task.get("cases", 1000)), seed=sim.seed,
        p_values=tuple(task.get("p_values", (1.0, 2.0))),
        i_max=int(task.get("i_max", 20)), dim=int(task.get("dim", 1)))
    records = [rep.record("jump-lipschitz", "random_banded",
                          {k: r[k] for k in ("case", "kappa", "i", "p")},
                          r["lhs"], r["rhs"], 0.0, r["margin"], r["passed"],
                          digest, sim.seed)
               for r in sweep]
    ok = all(r["passed"] for r in sweep)
    return (0 if ok else 1), records, None


def _run_moments(model, cfg, sim, task, digest):
    x0 = task.get("x0", [0.0] * model.dim)
    i0 = int(task.get("i0", 1))
    records = []
    ok = True
    for T in task.get("T_values", (0.25, 0.5, 1.0)):
        r = est.moment_bound_check(model, x0, i0, float(T), sim.replicas, sim,
                                   c1=float(task.get("c1", 3.0)),
                                   threads=sim.threads)
        ok &= r.passed
        records.append(rep.from_bound_report(r, digest, sim.seed))
    return (0 if ok else 1), records, None


def _run_holding(model, cfg, sim, task, digest):
    x0 = task.get("x0", [0.0] * model.dim)
    t_grid = task.get("t_grid", (0.1, 0.25, 0.5, 0.75, 1.0))
    records = []
    ok = True
    for K in task.get("K_values", (3, 5)):
        for k in task.get("k_values", range(1, int(K) + 1)):
            for r in est.holding_time_check(model, x0, int(k), int(K), t_grid,
                                            sim.replicas, sim,
                                            threads=sim.threads):
                ok &= r.passed
                records.append(rep.from_bound_report(r, digest, sim.seed))
    return (0 if ok else 1), records, None


def _run_harnack(model, cfg, sim, task, digest):
    reports = est.harnack_sweep(
        model, int(task.get("cases", 200)), sim.replicas, sim,
        threads=sim.threads, T_choices=tuple(task.get("T_values", (0.25, 0.5, 1.0))),
        x_radius=float(task.get("x_radius", 1.0)))
    summary = est.harnack_sweep_summary(
        reports, min_pass_rate=float(task.get("min_pass_rate", 0.99)))
    records = [rep.from_bound_report(r, digest, sim.seed) for r in reports]
    records.append(rep.record("summary", model.model_id, summary,
                              summary["pass_rate"], summary["cases"], None,
                              None, summary["ok"], digest, sim.seed))
    return (0 if summary["ok"] else 1), records, None


def _run_feller(model, cfg, sim, task, digest):
    f = _function_from_task(task, model.dim)
    x0 = task.get("x0", [0.0] * model.dim)
    i0 = int(task.get("i0", 1))
    t = float(task.get("t", 1.0))
    radii = [float(r) for r in task.get("radii", (0.5, 0.1, 0.01, 1e-3))]
    gaps = est.feller_modulus(model, f, t, x0, i0, radii, sim.replicas, sim,
                              threads=sim.threads)
    mode = task.get("mode", "trend")
    if mode == "trend":
        ok = est.gap_trend_pass(gaps)
        summary = {"mode": mode, "trend_decreasing": ok}
    elif mode == "floor":
        cert = est.discontinuity_certificate(gaps,
                                             floor=float(task.get("floor", 0.05)))
        ok = cert["certified"]
        summary = {"mode": mode, **cert}
    else:
        raise ConfigError(f"unknown feller mode {mode!r}")
    records = [rep.record("feller", model.model_id,
                          {"radius": g.radius, "t": t},
                          g.gap, None, g.stderr, None, True, digest, sim.seed)
               for g in gaps]
    records.append(rep.record("summary", model.model_id, summary, None, None,
                              None, None, ok, digest, sim.seed))
    return (0 if ok else 1), records, None


def _run_chain_marginal(model, cfg, sim, task, digest):
    times = [float(t) for t in task.get("times", (0.5, 1.0, 2.0))]
    mc = est.chain_marginal_check(model, times, sim.replicas, sim,
                                  threads=sim.threads,
                                  starts=task.get("starts"))
    ok = mc.passed(float(task.get("min_fraction", 0.99)))
    records = [rep.record("chain-marginal", model.model_id,
                          {"start": r["start"], "t": r["t"],
                           "regime": r["regime"]},
                          r["empirical"], r["oracle"], r["stderr"], None,
                          r["within_3se"], digest, sim.seed)
               for r in mc.records]
    records.append(rep.record("summary", model.model_id,
                              {"entries": mc.entries, "within": mc.within,
                               "fraction": mc.fraction_within},
                              None, None, None, None, ok, digest, sim.seed))
    return (0 if ok else 1), records, None


def _run_truncation(model, cfg, sim, task, digest):
    x0 = task.get("x0", [0.0] * model.dim)
    i0 = int(task.get("i0", 1))
    t = float(task.get("t", sim.horizon))
    records = []
    ok = True
    for K in task.get("K_values", (6,)):
        for case in range(int(task.get("compare_cases", 10))):
            res = est.truncation_identity_check(
                model, x0, i0, int(K), replace(sim, seed=sim.seed + case))
            ok &= res["identical"]
            records.append(rep.record(
                "truncation", model.model_id,
                {"K": int(K), "case": case, "tau_k": res["tau_k"],
                 "n_compared": res["n_compared"]},
                None, None, None, None, res["identical"], digest,
                sim.seed + case))
        r = est.truncation_exit_bound_check(model, x0, i0, int(K), t,
                                            sim.replicas, sim,
                                            threads=sim.threads)
        ok &= r.passed
        records.append(rep.from_bound_report(r, digest, sim.seed))
    return (0 if ok else 1), records, None


_RUNNERS = {
    "simulate": _run_simulate,
    "jump-lipschitz": _run_jump_lipschitz,
    "moments": _run_moments,
    "holding": _run_holding,
    "harnack": _run_harnack,
    "feller": _run_feller,
    "chain-marginal": _run_chain_marginal,
    "truncation-check": _run_truncation,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="switchsde",
        description="simulation and Monte Carlo verification of "
                    "regime-switching diffusions")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in _RUNNERS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="scenario JSON file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--replicas", type=int, default=None)
        p.add_argument("--dt", type=float, default=None)
        p.add_argument("--threads", type=int, default=None)
    return parser


def run(subcommand: str, config_path, *, seed=None, replicas=None, dt=None,
        threads=None) -> int:
    try:
        cfg = load_config(config_path)
        task = validate_task(cfg, subcommand)
        model = build_model(cfg)
        sim = build_sim(cfg, seed=seed, replicas=replicas, dt=dt,
                        threads=threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    gate = _gate(model, subcommand)
    if gate:
        return gate
    digest = config_hash(cfg)
    try:
        code, records, traj = _RUNNERS[subcommand](model, cfg, sim, task, digest)
    except NumericalBlowupError as exc:
        print(f"numerical blowup: {exc}", file=sys.stderr)
        return 4
    except UnsupportedSchemeError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except InvalidModelError as exc:
        print(f"model failure: {exc}", file=sys.stderr)
        return 3
    _write_outputs(cfg, records, traj)
    n_pass = sum(1 for r in records if r.get("pass"))
    print(f"{subcommand}: {n_pass}/{len(records)} records pass; exit {code}")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    code = run(args.subcommand, args.config, seed=args.seed,
               replicas=args.replicas, dt=args.dt, threads=args.threads)
    if argv is None:
        sys.exit(code)
    return code


if __name__ == "__main__":
    main()
