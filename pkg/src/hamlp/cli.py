"""``hamlp`` command line.

Exit codes: 0 done with no violated verdicts, 1 done with at least one
violated verdict, 2 usage or input error, 3 internal anomaly.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import decompose as dec
from . import harness
from .compat import GuardExceeded, build_compat_matrix
from .graph import ParseError, format_rational, parse_digraph, parse_weights
from .lpsolve import SolverAnomaly, minimize, solve_feasibility, verify_certificate
from .oracle import enumerate_cycles, held_karp
from .polytope import build_objective, digraph_system, export_lp


class UsageError(Exception):
    pass


def _read_graph(path):
    return parse_digraph(Path(path).read_text())


def _read_weights(path, g):
    return parse_weights(Path(path).read_text(), g) if path else None


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_oracle(args) -> int:
    g = _read_graph(args.graph)
    w = _read_weights(args.weights, g)
    res = enumerate_cycles(g, cap=None if args.list else 0)
    doc = {"hamiltonian": res.hamiltonian, "cycle_count": res.cycle_count}
    if args.list:
        doc["cycles"] = [c.labels() for c in res.cycles]
    if w is not None:
        hk = held_karp(g, w)
        doc["optimum"] = format_rational(hk.optimum)
        doc["optimal_cycle"] = hk.optimal_cycle.labels() if hk.optimal_cycle else None
    _emit(harness.dumps(doc), None)
    return 0


def _system(args):
    g = _read_graph(args.graph)
    w = _read_weights(getattr(args, "weights", None), g)
    sys_ = digraph_system(g)
    if w is not None:
        sys_ = build_objective(sys_, w, getattr(args, "objective", "restricted"))
    return g, sys_


def cmd_lp_build(args) -> int:
    _, sys_ = _system(args)
    _emit(export_lp(sys_, args.format), args.out)
    return 0


def cmd_lp_solve(args) -> int:
    _, sys_ = _system(args)
    out = minimize(sys_) if sys_.objective is not None else solve_feasibility(sys_)
    if not verify_certificate(sys_, out):
        raise SolverAnomaly(f"{out.status} outcome failed certificate verification")
    doc = harness.outcome_json(out)
    doc["verified"] = True
    _emit(harness.dumps(doc), args.out)
    return 0


def cmd_verify(args) -> int:
    g = _read_graph(args.graph)
    w = _read_weights(args.weights, g)
    rep = harness.verify_instance(g, w, args.objective)
    _emit(harness.dumps(rep.to_json()), args.out)
    return 1 if rep.violated() else 0


def cmd_sweep(args) -> int:
    witness_dir = None
    if args.out and not args.no_witnesses:
        witness_dir = Path(str(args.out) + ".witnesses")
    if args.mode == "exhaustive":
        rep = harness.sweep_exhaustive(args.n, seed=args.seed, weighted=not args.unweighted, jobs=args.jobs,
                                       witness_dir=witness_dir, allow_long=args.long)
    else:
        if args.count is None:
            raise UsageError("--mode random needs --count")
        rep = harness.sweep_random(args.n, args.count, Fraction(args.p), seed=args.seed,
                                   weighted=not args.unweighted, jobs=args.jobs, witness_dir=witness_dir)
    print(f"sweep finished in {rep.wall_clock['seconds']} s at {time.strftime('%Y-%m-%dT%H:%M:%S')}",
          file=sys.stderr)
    doc = rep.to_json()
    doc["wall_clock"] = None  # timings go to stderr so reports stay byte-identical
    _emit(harness.dumps(doc), args.out)
    return 1 if rep.violations() else 0


def cmd_decompose(args) -> int:
    g = _read_graph(args.graph)
    doc = json.loads(Path(args.point).read_text())
    if "point" in doc:
        doc = doc["point"]
    pt = harness.point_from_json(doc)
    record, grids_ok = harness._decompose(pt, g.n, build_compat_matrix(g))
    record["all_solution_grids"] = grids_ok
    _emit(harness.dumps(record), args.out)
    return 0 if record["status"] == "decomposed" and grids_ok else 1


def cmd_export(args) -> int:
    g = _read_graph(args.graph)
    if args.what == "compat":
        _emit(build_compat_matrix(g).dump(), args.out)
    else:
        _emit(export_lp(digraph_system(g), args.format), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hamlp", description="Compatibility-matrix LP for DHC/ATSP, "
                                 "checked against brute-force oracles.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("oracle", help="Hamiltonian cycles and optimal tour by brute force")
    p.add_argument("graph")
    p.add_argument("--weights")
    p.add_argument("--list", action="store_true", help="list every cycle")
    p.set_defaults(func=cmd_oracle)

    lp = sub.add_parser("lp", help="build or solve the linear system of a digraph")
    lsub = lp.add_subparsers(dest="lp_command", required=True)
    p = lsub.add_parser("build")
    p.add_argument("graph")
    p.add_argument("--out")
    p.add_argument("--format", choices=["native-json", "lp-text"], default="native-json")
    p.add_argument("--weights")
    p.add_argument("--objective", choices=["restricted", "literal"], default="restricted")
    p.set_defaults(func=cmd_lp_build)
    p = lsub.add_parser("solve")
    p.add_argument("graph")
    p.add_argument("--weights")
    p.add_argument("--objective", choices=["restricted", "literal"], default="restricted")
    p.add_argument("--out")
    p.set_defaults(func=cmd_lp_solve)

    p = sub.add_parser("verify", help="check every claim on one digraph")
    p.add_argument("graph")
    p.add_argument("--weights")
    p.add_argument("--objective", choices=["restricted", "literal"], default="restricted")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="verify a family of digraphs")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mode", choices=["exhaustive", "random"], required=True)
    p.add_argument("--count", type=int)
    p.add_argument("--p", default="1/2", help="arc probability, e.g. 1/2")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--unweighted", action="store_true")
    p.add_argument("--long", action="store_true", help="allow the n=5 exhaustive sweep")
    p.add_argument("--no-witnesses", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("decompose", help="split a point into guesses")
    p.add_argument("graph")
    p.add_argument("point")
    p.add_argument("--out")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("export", help="dump the compatibility matrix or the cut system")
    p.add_argument("graph")
    p.add_argument("--what", choices=["compat", "system"], default="compat")
    p.add_argument("--format", choices=["native-json", "lp-text"], default="native-json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, UsageError, GuardExceeded, FileNotFoundError, json.JSONDecodeError,
            dec.NotHullFeasible) as exc:
        print(f"hamlp: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"hamlp: error: {exc}", file=sys.stderr)
        return 2
    except SolverAnomaly as exc:
        print(f"hamlp: internal anomaly: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
