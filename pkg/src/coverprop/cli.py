"""Command-line front door.

Subcommands: gen, solve, sp, bp, covers {enum,check,peel,encode}, decimate,
experiment {peeling,transition,growth,scatter}. Shared flags --seed, --out,
--threads and --budget-seconds appear on every subcommand; defaults match the
library defaults and environment variables are never consulted.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import covers as cov
from . import experiments as exp
from . import pipelines as pipe
from . import propagation as prop
from . import solver as slv
from .errors import ContradictionError
from .formula import build_factor_graph, generate_random_3sat, parse_dimacs, render_dimacs


def _common(parser):
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", type=str, default=None, help="output file (default stdout)")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--budget-seconds", type=float, default=None)


def _write(args, text: str):
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(path: str):
    with open(path) as fh:
        return parse_dimacs(fh.read())


def _alpha_list(spec: str) -> list[float]:
    """Either comma-separated values or start:stop:step (inclusive)."""
    if ":" in spec:
        start, stop, step = (float(x) for x in spec.split(":"))
        out = []
        a = start
        while a <= stop + 1e-9:
            out.append(round(a, 10))
            a += step
        return out
    return [float(x) for x in spec.split(",")]


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    top = argparse.ArgumentParser(prog="coverprop", description=__doc__)
    sub = top.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("gen", help="generate a random 3-SAT formula as DIMACS")
    p.add_argument("--n", type=int, required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--m", type=int)
    group.add_argument("--alpha", type=float)
    _common(p)

    p = sub.add_parser("solve", help="solve a DIMACS formula")
    p.add_argument("cnf")
    p.add_argument("--method", choices=["dpll", "walksat"], default="dpll")
    p.add_argument("--budget-decisions", type=int, default=None)
    p.add_argument("--max-flips", type=int, default=100_000)
    p.add_argument("--noise", type=float, default=0.5)
    _common(p)

    p = sub.add_parser("sp", help="run survey propagation, dump marginals CSV")
    p.add_argument("cnf")
    p.add_argument("--eps", type=float, default=1e-3)
    p.add_argument("--max-iters", type=int, default=1000)
    p.add_argument("--damping", type=float, default=0.0)
    p.add_argument("--init", choices=["random", "uniform"], default="random")
    p.add_argument("--telemetry", type=str, default=None, help="write (iter,residual) CSV here")
    _common(p)

    p = sub.add_parser("bp", help="run plain belief propagation, dump marginals CSV")
    p.add_argument("cnf")
    p.add_argument("--eps", type=float, default=1e-3)
    p.add_argument("--max-iters", type=int, default=10000)
    p.add_argument("--damping", type=float, default=0.5)
    p.add_argument("--init", choices=["uniform", "random"], default="uniform")
    p.add_argument("--telemetry", type=str, default=None)
    _common(p)

    pc = sub.add_parser("covers", help="cover enumeration, checking, peeling, encoding")
    csub = pc.add_subparsers(dest="covers_cmd", required=True)

    p = csub.add_parser("enum", help="enumerate covers")
    p.add_argument("cnf")
    p.add_argument("--method", choices=["bruteforce", "sat"], default="sat")
    p.add_argument("--limit", type=int, default=None)
    p.add_argument("--decision-budget", type=int, default=None)
    _common(p)

    p = csub.add_parser("check", help="validate a cover file against a formula")
    p.add_argument("cnf")
    p.add_argument("covers_file")
    _common(p)

    p = csub.add_parser("peel", help="star-propagate sampled solutions to covers")
    p.add_argument("cnf")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--policy", choices=["lowest", "random", "queue"], default="lowest")
    p.add_argument("--max-flips", type=int, default=100_000)
    p.add_argument("--noise", type=float, default=0.5)
    _common(p)

    p = csub.add_parser("encode", help="write the cover-of-F encoding as DIMACS")
    p.add_argument("cnf")
    p.add_argument("--map", dest="map_out", type=str, default=None,
                   help="write the decode map CSV here")
    _common(p)

    p = sub.add_parser("decimate", help="SP-guided decimation with walksat endgame")
    p.add_argument("cnf")
    p.add_argument("--fix-fraction", type=float, default=0.01)
    p.add_argument("--extreme-threshold", type=float, default=0.0)
    p.add_argument("--trivial-threshold", type=float, default=0.01)
    p.add_argument("--sp-eps", type=float, default=1e-3)
    p.add_argument("--sp-max-iters", type=int, default=1000)
    p.add_argument("--sp-damping", type=float, default=0.0)
    p.add_argument("--walksat-max-flips", type=int, default=2_000_000)
    p.add_argument("--log", type=str, default=None, help="write the per-round CSV here")
    _common(p)

    pe = sub.add_parser("experiment", help="desk-scale experiment reproductions")
    esub = pe.add_subparsers(dest="experiment_cmd", required=True)

    p = esub.add_parser("peeling")
    p.add_argument("--n", type=int, default=5000)
    p.add_argument("--alpha", type=float, default=4.2)
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--policy", choices=["lowest", "random", "queue"], default="lowest")
    p.add_argument("--max-flips", type=int, default=None)
    _common(p)

    p = esub.add_parser("transition")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--alphas", type=str, default="1.0:6.0:0.25")
    p.add_argument("--formulas", type=int, default=500)
    p.add_argument("--limit", type=int, default=None)
    p.add_argument("--decision-budget", type=int, default=2_000_000)
    _common(p)

    p = esub.add_parser("growth")
    p.add_argument("--n-grid", type=str, default="100,150,200,250,300")
    p.add_argument("--alpha", type=float, default=4.2)
    p.add_argument("--formulas", type=int, default=10)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--max-flips", type=int, default=None)
    _common(p)

    p = esub.add_parser("scatter")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--alpha", type=float, default=4.2)
    p.add_argument("--which", choices=list(exp.SCATTER_KINDS), required=True)
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--exact-var-cap", type=int, default=60)
    _common(p)

    args = top.parse_args(argv)
    return _dispatch(args)


def _dispatch(args) -> int:
    if args.cmd == "gen":
        m = args.m if args.m is not None else round(args.alpha * args.n)
        f = generate_random_3sat(args.n, m, args.seed)
        _write(args, render_dimacs(f))
        return 0

    if args.cmd == "solve":
        f = _load(args.cnf)
        if args.method == "dpll":
            res = slv.dpll_solve(f, budget=args.budget_decisions)
        else:
            res = slv.walksat(f, max_flips=args.max_flips, noise=args.noise, seed=args.seed)
        lines = [f"s {res.status.value}"]
        if res.model is not None:
            lines.append("v " + slv.render_model(res.model) + " 0")
        lines.append(
            f"c decisions={res.stats.decisions} propagations={res.stats.propagations} "
            f"flips={res.stats.flips}"
        )
        _write(args, "\n".join(lines) + "\n")
        return 0 if res.status is not slv.SolveStatus.UNKNOWN else 2

    if args.cmd in ("sp", "bp"):
        f = _load(args.cnf)
        g = build_factor_graph(f)
        try:
            if args.cmd == "sp":
                run = prop.sp_run(g, eps=args.eps, max_iters=args.max_iters,
                                  damping=args.damping, init=args.init, seed=args.seed)
                table = prop.sp_biases(g, run.state) if run.status is not prop.RunStatus.CONTRADICTION else None
            else:
                run = prop.plain_bp_run(g, eps=args.eps, max_iters=args.max_iters,
                                        damping=args.damping, init=args.init, seed=args.seed)
                table = prop.plain_bp_marginals(g, run.state) if run.status is not prop.RunStatus.CONTRADICTION else None
        except ContradictionError as exc:
            print(f"CONTRADICTION: {exc}", file=sys.stderr)
            return 1
        if args.telemetry:
            with open(args.telemetry, "w") as fh:
                fh.write(prop.residuals_to_csv(run.residuals))
        if table is None:
            print(f"{run.status.value} after {run.iterations} iterations", file=sys.stderr)
            return 1
        print(f"c {run.status.value} iterations={run.iterations}", file=sys.stderr)
        _write(args, table.to_csv())
        return 0

    if args.cmd == "covers":
        return _dispatch_covers(args)

    if args.cmd == "decimate":
        f = _load(args.cnf)
        cfg = pipe.DecimationConfig(
            fix_fraction=args.fix_fraction,
            extreme_threshold=args.extreme_threshold,
            trivial_threshold=args.trivial_threshold,
            sp_eps=args.sp_eps,
            sp_max_iters=args.sp_max_iters,
            sp_damping=args.sp_damping,
            walksat_max_flips=args.walksat_max_flips,
            seed=args.seed,
            budget_seconds=args.budget_seconds,
        )
        outcome = pipe.decimate(f, cfg)
        if args.log:
            with open(args.log, "w") as fh:
                fh.write(outcome.log_csv())
        lines = [f"s {outcome.status}"]
        if outcome.assignment is not None:
            lines.append("v " + slv.render_model(outcome.assignment) + " 0")
        _write(args, "\n".join(lines) + "\n")
        return 0 if outcome.status == "SOLVED" else 1

    if args.cmd == "experiment":
        return _dispatch_experiment(args)

    raise AssertionError(f"unhandled command {args.cmd}")


def _dispatch_covers(args) -> int:
    f = _load(args.cnf)
    if args.covers_cmd == "enum":
        if args.method == "bruteforce":
            records = cov.enumerate_covers_bruteforce(f)
            complete = True
        else:
            enum = cov.enumerate_covers_sat(f, limit=args.limit,
                                            decision_budget=args.decision_budget)
            records, complete = enum.records, enum.complete
        lines = [cov.format_cover_line(r) for r in records]
        if not complete:
            lines.append("c INCOMPLETE")
        _write(args, "\n".join(lines) + "\n")
        return 0 if complete else 2

    if args.covers_cmd == "check":
        with open(args.covers_file) as fh:
            lines = [ln for ln in fh.read().splitlines() if ln.strip() and not ln.startswith("c")]
        bad = 0
        out = []
        for ln in lines:
            rec = cov.parse_cover_line(ln, f.num_vars)
            ok = cov.is_cover(f, rec.assignment)
            bad += not ok
            out.append(f"{' '.join(rec.assignment)} | {'OK' if ok else 'NOT-A-COVER'}")
        _write(args, "\n".join(out) + "\n")
        return 0 if bad == 0 else 1

    if args.covers_cmd == "peel":
        models = slv.sample_solutions(f, args.samples, seed=args.seed,
                                      max_flips=args.max_flips, noise=args.noise)
        records = []
        for i, model in enumerate(models):
            res = cov.star_propagate(f, cov.assignment_to_generalized(model),
                                     policy=args.policy, seed=slv.derive_seed(args.seed, i),
                                     record_trace=False)
            records.append(cov.make_record(f, res.cover))
        _write(args, "\n".join(cov.format_cover_line(r) for r in records) + "\n")
        return 0

    if args.covers_cmd == "encode":
        enc = cov.encode_covers_as_cnf(f)
        _write(args, render_dimacs(enc.g))
        if args.map_out:
            with open(args.map_out, "w") as fh:
                fh.write(enc.decode_map_csv())
        return 0

    raise AssertionError(f"unhandled covers command {args.covers_cmd}")


def _dispatch_experiment(args) -> int:
    if args.experiment_cmd == "peeling":
        run = exp.run_peeling(args.n, args.alpha, args.samples, args.seed,
                              policy=args.policy, max_flips=args.max_flips)
    elif args.experiment_cmd == "transition":
        run = exp.run_transition(args.n, _alpha_list(args.alphas), args.formulas, args.seed,
                                 limit=args.limit, decision_budget=args.decision_budget,
                                 threads=args.threads, budget_seconds=args.budget_seconds)
    elif args.experiment_cmd == "growth":
        n_grid = [int(x) for x in args.n_grid.split(",")]
        run = exp.run_growth(n_grid, args.alpha, args.formulas, args.samples, args.seed,
                             max_flips=args.max_flips, threads=args.threads)
    elif args.experiment_cmd == "scatter":
        run = exp.run_scatter(args.n, args.alpha, args.seed, args.which,
                              samples=args.samples, exact_var_cap=args.exact_var_cap)
    else:
        raise AssertionError(f"unhandled experiment {args.experiment_cmd}")
    _write(args, run.to_csv())
    return 0


if __name__ == "__main__":
    sys.exit(main())
