"""Command-line entry point: ``epochbandit {stats,bounds,simulate,generate,spectrum,audit}``.

Exit codes: 0 success, 1 an audited inequality is violated, 2 usage or
input error.
"""

import argparse
import json
import math
import os
import sys

import numpy as np

from . import bounds as B
from .chain import check_assumptions
from .environment import gaps
from .exceptions import EpochBanditError
from .harness import (EPOCH_POLICIES, ITERATION_POLICIES, aggregate_epoch_regret,
                      aggregate_iteration_regret, audit_inequalities, late_slope, make_policy,
                      run_replications)
from .instances import GeneratorSpec, example1, generate, penalty_example, spectrum_samples
from .io import (ensure_dir, instance_to_dict, load_instance, load_json, save_instance, svg_plot,
                 write_aggregate_csv, write_rows_csv, write_traces_csv)
from .policies import POLICIES
from .schedule import EpochSchedule


class UsageError(Exception):
    pass


BUILTINS = {"example1": example1, "penalty": penalty_example}


def _parse_list(text, cast=float):
    """``"1:50"`` (inclusive integer range) or a comma-separated list."""
    if ":" in text:
        lo, hi = text.split(":")
        return list(range(int(lo), int(hi) + 1))
    return [cast(v) for v in text.split(",") if v.strip()]


def _instance_from_args(args):
    if getattr(args, "instance", None):
        if not os.path.exists(args.instance):
            raise UsageError(f"instance file not found: {args.instance}")
        inst = load_instance(args.instance)
    elif getattr(args, "builtin", None):
        inst = BUILTINS[args.builtin](args.epsilon)
    else:
        raise UsageError("give --instance PATH or --builtin NAME")
    if getattr(args, "gamma", None) is not None:
        inst = inst.with_gamma(args.gamma)
    return inst


def _instance_from_spec(spec, base_dir="."):
    if isinstance(spec, str):
        path = spec if os.path.isabs(spec) else os.path.join(base_dir, spec)
        if not os.path.exists(path):
            raise UsageError(f"instance file not found: {path}")
        return load_instance(path)
    if "builtin" in spec:
        name = spec["builtin"]
        if name not in BUILTINS:
            raise UsageError(f"unknown builtin {name!r}")
        return BUILTINS[name](spec.get("epsilon", 0.01), spec.get("gamma", 1.0))
    if "generator" in spec:
        g = spec["generator"]
        return generate(GeneratorSpec(**{k: (tuple(v) if k == "kernel_palette" else v)
                                          for k, v in g.items()}))
    raise UsageError("instance must be a path, {builtin: ...} or {generator: {...}}")


def _add_instance_flags(p):
    p.add_argument("--instance", help="instance JSON file")
    p.add_argument("--builtin", choices=sorted(BUILTINS), help="canned instance")
    p.add_argument("--epsilon", type=float, default=0.01, help="parameter of the canned instance")
    p.add_argument("--gamma", type=float, default=None, help="override the discount factor (1 = time-averaged)")


def _add_schedule_flags(p):
    p.add_argument("--tau0", type=int, default=1, help="first epoch length")
    p.add_argument("--zeta", type=int, default=1, help="epoch length increment per pull")


# ---------------------------------------------------------------------------
# commands

def cmd_stats(args):
    inst = _instance_from_args(args)
    arms = []
    for j, st in enumerate(inst.stats()):
        rep = check_assumptions(inst.P[j])
        arms.append({
            "arm": j, "pi": [float(x) for x in st.pi], "lambda2M": st.lambda2M,
            "lambda_j": st.lambda_j, "C_j": st.C, "eta": st.eta, "phi": st.phi, "psi": st.psi,
            "mu": float(inst.mus[j]), "gap": float(gaps(inst)[j]),
            "assumptions": {"irreducible": rep.irreducible, "aperiodic": rep.aperiodic,
                            "M_irreducible": rep.M_irreducible},
        })
    out = {"name": inst.name, "gamma": inst.gamma, "optimal_arm": inst.optimal_arm,
           "unique_optimum": inst.has_unique_optimum, "arms": arms}
    if args.json:
        print(json.dumps(out, indent=1))
    else:
        print(f"{inst.name or 'instance'}: m={inst.m} states={inst.n_states} gamma={inst.gamma} "
              f"optimal arm={inst.optimal_arm}")
        for a in arms:
            pi = ", ".join(f"{x:.6g}" for x in a["pi"])
            print(f"  arm {a['arm']}: mu={a['mu']:.6g} gap={a['gap']:.6g} lambda2(M)={a['lambda2M']:.6g} "
                  f"lambda={a['lambda_j']:.6g} C={a['C_j']:.6g} pi=({pi})")
    return 0


def _n_grid(horizon, points=60):
    g = np.unique(np.round(np.logspace(0, math.log10(horizon), points)).astype(int))
    return [int(n) for n in g if n >= 1]


def cmd_bounds(args):
    inst = _instance_from_args(args)
    sched = EpochSchedule(args.tau0, args.zeta)
    inputs = B.BoundInputs.from_instance(inst, sched, args.gamma if args.gamma is not None else inst.gamma)
    ns = _n_grid(args.horizon)
    curves = []
    want = args.policy or ["epochucb", "epochgreedy"]
    if "epochucb" in want:
        curves += [c for c in B.bound_curves(inputs, ns)]
    if "epochgreedy" in want:
        d = args.d or float(np.min(inputs.gaps[inputs.gaps > 0])) if inputs.suboptimal else 1.0
        if args.c is not None:
            cfg = B.GreedyConfig(args.c, d, args.c_prime, strict=False)
        else:
            cfg = B.GreedyConfig.from_theory(B.kappa_from_inputs(inputs, args.horizon), d, args.c_prime)
        curves.append(B.BoundCurve("regret_cor3", [(n, B.cor3_regret_bound(cfg, inputs, n)) for n in ns]))
        lo = cfg.threshold(inst.m)
        curves.append(B.BoundCurve("thm2_prob", [(n, B.thm2_prob_bound(cfg, inst.m, n))
                                                  for n in ns if n >= lo]))
    if args.out:
        B.write_curves_csv(curves, args.out)
    else:
        w = sys.stdout
        w.write("k,value,kind,arm\n")
        for c in curves:
            for row in c.rows():
                w.write(",".join(str(v) for v in row) + "\n")
    return 0


def _run_config_from_args(args):
    if args.run_file:
        if not os.path.exists(args.run_file):
            raise UsageError(f"run file not found: {args.run_file}")
        cfg = load_json(args.run_file)
        base = os.path.dirname(os.path.abspath(args.run_file))
        inst = _instance_from_spec(cfg["instance"], base)
        policies = [(p["id"], p.get("params", {})) for p in cfg["policies"]]
        sched = cfg.get("schedule", {})
        outputs = cfg.get("outputs", {})
        return dict(instance=inst, policies=policies,
                    schedule=EpochSchedule(sched.get("tau0", 1), sched.get("zeta", 1)),
                    iters=cfg.get("iters"), horizon=cfg.get("horizon"),
                    reps=cfg.get("replications", 1), seed=cfg.get("master_seed", 0),
                    out=args.out or outputs.get("csv_dir", "."),
                    svg=args.svg or outputs.get("svg", False), mode=cfg.get("mode", "distribution"))
    inst = _instance_from_args(args)
    policies = [(p, {}) for p in (args.policy or ["epochucb", "epochgreedy"])]
    for pid, params in policies:
        if pid == "epochgreedy" and args.c is not None:
            params["c"] = args.c
        if pid == "eps_greedy" and args.eps_c is not None:
            params["c"] = args.eps_c
    return dict(instance=inst, policies=policies, schedule=EpochSchedule(args.tau0, args.zeta),
                iters=args.iters, horizon=args.horizon, reps=args.reps, seed=args.seed,
                out=args.out or ".", svg=args.svg, mode=args.mode)


def cmd_simulate(args):
    cfg = _run_config_from_args(args)
    inst = cfg["instance"]
    for pid, _ in cfg["policies"]:
        if pid not in POLICIES:
            raise UsageError(f"unknown policy {pid!r}; choose from {sorted(POLICIES)}")
        if pid in ITERATION_POLICIES and not cfg["iters"]:
            raise UsageError(f"policy {pid} needs an iteration budget (--iters)")
    if not cfg["iters"] and not cfg["horizon"]:
        raise UsageError("give --iters or --horizon")
    out = ensure_dir(cfg["out"])
    all_traces, series, summary = [], [], {}
    shared = bool(cfg["iters"])
    grid = None
    if shared:
        grid = np.unique(np.linspace(1, cfg["iters"], min(cfg["iters"], 1000)).astype(int))
    for pid, params in cfg["policies"]:
        traces = run_replications(pid, inst, cfg["reps"], cfg["seed"], schedule=cfg["schedule"],
                                  n_epochs=None if shared else cfg["horizon"],
                                  iterations=cfg["iters"] if shared else None,
                                  mode=cfg["mode"], **params)
        all_traces.extend(traces)
        agg = (aggregate_iteration_regret(traces, grid, pid) if shared
               else aggregate_epoch_regret(traces, pid))
        write_aggregate_csv(agg, os.path.join(out, f"aggregate_{pid}.csv"))
        series.append((pid, agg.x, agg.mean, agg.stderr))
        summary[pid] = {"final_regret": float(agg.mean[-1]), "stderr": float(agg.stderr[-1]),
                        "late_slope": late_slope(agg.mean, agg.x),
                        "pulls": [float(v) for v in np.mean([t.pull_counts for t in traces], axis=0)]}
    write_traces_csv(all_traces, os.path.join(out, "traces.csv"))
    with open(os.path.join(out, "summary.json"), "w") as fh:
        json.dump({"instance": instance_to_dict(inst), "x_axis": "iterations" if shared else "epochs",
                   "projection_exact": inst.gamma == 1.0, "policies": summary}, fh, indent=1)
        fh.write("\n")
    if cfg["svg"]:
        svg_plot(series, os.path.join(out, "regret.svg"), title=inst.name or "regret",
                 xlabel="iterations" if shared else "epochs")
    for pid, s in summary.items():
        print(f"{pid:12s} regret={s['final_regret']:.4f} +/- {s['stderr']:.4f} "
              f"late slope={s['late_slope']:.4f}")
    return 0


def cmd_generate(args):
    spec = GeneratorSpec(m=args.m, states=args.states, seed=args.seed,
                         anti_correlation_mass=args.mass,
                         gamma=1.0 if args.gamma is None else args.gamma)
    inst = generate(spec)
    if args.out:
        save_instance(inst, args.out)
        print(f"wrote {args.out}")
    else:
        print(json.dumps(instance_to_dict(inst), indent=1))
    return 0


def cmd_spectrum(args):
    vals = spectrum_samples(args.dist, args.states, args.samples, args.seed)
    lam = np.sqrt(vals)
    if args.out:
        write_rows_csv(args.out, ["sample", "lambda2M", "lambda_j"],
                       [(i, repr(float(v)), repr(float(l))) for i, (v, l) in enumerate(zip(vals, lam))])
    summary = {"dist": args.dist, "states": args.states, "samples": args.samples,
               "mean": float(vals.mean()), "p95": float(np.percentile(vals, 95)),
               "mean_lambda_j": float(lam.mean()), "p95_lambda_j": float(np.percentile(lam, 95))}
    print(json.dumps(summary, indent=1))
    return 0


def cmd_audit(args):
    inst = _instance_from_args(args)
    taus = _parse_list(args.grid_tau, int)
    gammas = _parse_list(args.grid_gamma, float)
    rep = audit_inequalities(inst, taus, gammas, T=args.T, fill_norm=args.fill_norm)
    text = json.dumps(rep.to_dict(), indent=1, default=float)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    if args.json or not args.out:
        print(text)
    return 0 if rep.ok else 1


# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="epochbandit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="chain statistics per arm")
    _add_instance_flags(p)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("bounds", help="evaluate regret bounds on a grid of horizons")
    _add_instance_flags(p)
    _add_schedule_flags(p)
    p.add_argument("--horizon", type=int, default=1000, help="largest epoch count n")
    p.add_argument("--policy", action="append", choices=EPOCH_POLICIES, help="repeatable; default both")
    p.add_argument("--c", type=float, default=None, help="EpochGreedy c (default c' nu^2)")
    p.add_argument("--c-prime", type=float, default=9.0, help="EpochGreedy c' (> 8)")
    p.add_argument("--d", type=float, default=None, help="gap lower bound (default: true minimum gap)")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("simulate", help="Monte-Carlo regret runs")
    p.add_argument("run_file", nargs="?", help="run JSON (overrides instance/policy flags)")
    _add_instance_flags(p)
    _add_schedule_flags(p)
    p.add_argument("--policy", action="append", choices=sorted(POLICIES), help="repeatable")
    p.add_argument("--horizon", type=int, help="epochs per run (epoch policies only)")
    p.add_argument("--iters", type=int, help="shared iteration budget for all policies")
    p.add_argument("--reps", type=int, default=10, help="replications")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--c", type=float, default=None, help="EpochGreedy exploration constant")
    p.add_argument("--eps-c", type=float, default=None, help="epsilon-greedy exploration constant")
    p.add_argument("--mode", choices=["distribution", "trajectory"], default="distribution",
                   help="state sampling semantics")
    p.add_argument("--out", help="output directory")
    p.add_argument("--svg", action="store_true", help="also write regret.svg")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("generate", help="draw an anti-correlated random instance")
    p.add_argument("--m", type=int, default=4, help="arms")
    p.add_argument("--states", type=int, default=4, help="states")
    p.add_argument("--seed", type=int, default=0, help="seed")
    p.add_argument("--mass", type=float, default=0.9, help="optimal arm's mass on its favored states")
    p.add_argument("--gamma", type=float, default=None, help="discount factor")
    p.add_argument("--out", help="instance JSON path (default stdout)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("spectrum", help="lambda2(M(P)) of random transition matrices")
    p.add_argument("--dist", choices=["uniform", "absnormal"], default="uniform", help="entry distribution")
    p.add_argument("--states", type=int, default=10, help="states")
    p.add_argument("--samples", type=int, default=1000, help="number of matrices")
    p.add_argument("--seed", type=int, default=0, help="seed")
    p.add_argument("--out", help="CSV of samples")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("audit", help="exact inequality audits")
    _add_instance_flags(p)
    p.add_argument("--grid-tau", default="1:50", help="epoch lengths, 'lo:hi' or comma list")
    p.add_argument("--grid-gamma", default="0.5,0.9,1", help="discount factors, comma list")
    p.add_argument("--T", type=int, default=200, help="schedule length for the cumulative audit")
    p.add_argument("--fill-norm", choices=["tv", "l1"], default="tv", help="distance used in Fill's bound")
    p.add_argument("--json", action="store_true", help="print the report even with --out")
    p.add_argument("--out", help="report JSON path")
    p.set_defaults(func=cmd_audit)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except (UsageError, EpochBanditError, ValueError, KeyError, OSError, json.JSONDecodeError) as e:
        print(f"epochbandit {args.command}: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
