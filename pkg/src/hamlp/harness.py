"""Per-instance claim verification and sweeps over digraph families.

Claims checked for every instance:

C1  Hamiltonian => cut system feasible.  A failure means the guess embedding
    is broken, so tests treat it as a hard error.
C2  cut system feasible => Hamiltonian.
C3  the solver's point is a convex combination of solution grids.
C4  LP optimum (restricted weight reading) == optimal tour weight.
C5  number of solution grids == n * number of Hamiltonian cycles.

C2-C5 are measurements: "violated" is a legitimate result and always comes
with a witness that :func:`recheck_report` can confirm from the JSON alone.
"""
from __future__ import annotations

import hashlib
import itertools
import json
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import decompose as dec
from .compat import build_compat_matrix, check_solution_grid, enumerate_solution_grids, zero_indices
from .graph import (INF, Digraph, WeightMatrix, digraph_fingerprint, format_rational, parse_digraph,
                    parse_rational, parse_weights, tour_weight)
from .lpsolve import (FEASIBLE, INFEASIBLE, OPTIMAL, SolveOutcome, SolverAnomaly, checked, minimize,
                      solve_feasibility, verify_certificate)
from .oracle import brute_force_optimum, enumerate_cycles, held_karp
from .polytope import (apply_cuts, build_hull_system, build_objective, evaluate_point, guess_point,
                       objective_coefficients, objective_value, parse_var_name, var_name)

SCHEMA = "hamlp-report/1"
CLAIMS = ("C1", "C2", "C3", "C4", "C5")
CONSISTENT, VIOLATED, NOT_APPLICABLE = "consistent", "violated", "not-applicable"
CYCLE_CAP = 50
WEIGHT_RANGE = (-9, 9)
EXHAUSTIVE_GUARD = 4


# -- serialization helpers -----------------------------------------------------------

def point_json(pt: dict) -> dict:
    keys = sorted((v for v, a in pt.items() if a != 0), key=lambda v: (len(v) == 2, v))
    return {var_name(v): format_rational(pt[v]) for v in keys}


def point_from_json(doc: dict) -> dict:
    return {parse_var_name(k): parse_rational(v) for k, v in doc.items()}


def outcome_json(out: SolveOutcome) -> dict:
    doc: dict = {"status": out.status}
    if out.point is not None:
        doc["point"] = point_json(out.point)
    if out.objective is not None:
        doc["objective"] = format_rational(out.objective)
    if out.farkas is not None:
        doc["farkas"] = [format_rational(a) for a in out.farkas]
    if out.dual is not None:
        doc["dual"] = [format_rational(a) for a in out.dual]
    if out.ray is not None:
        doc["ray"] = point_json(out.ray)
    return doc


def outcome_from_json(doc: dict) -> SolveOutcome:
    def rats(key):
        return [parse_rational(a) for a in doc[key]] if key in doc else None

    return SolveOutcome(
        doc["status"],
        point=point_from_json(doc["point"]) if "point" in doc else None,
        objective=parse_rational(doc["objective"]) if "objective" in doc else None,
        farkas=rats("farkas"), dual=rats("dual"),
        ray=point_from_json(doc["ray"]) if "ray" in doc else None,
    )


def perms_json(perms) -> list[list[int]]:
    return [[k + 1 for k in p] for p in perms]


def _perm(labels) -> tuple[int, ...]:
    return tuple(k - 1 for k in labels)


def dumps(doc) -> str:
    return json.dumps(doc, indent=1) + "\n"


def digest(doc) -> str:
    return hashlib.sha256(json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


# -- instance verification ---------------------------------------------------------------

@dataclass
class InstanceReport:
    fingerprint: str
    n: int
    oracle: dict
    lp_feasible: bool
    lp_optimum: object
    objective_reading: str | None
    decomposition: dict
    verdicts: dict
    digraph: str = field(repr=False, default="")
    weights: str | None = field(repr=False, default=None)

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "fingerprint": self.fingerprint,
            "n": self.n,
            "digraph": self.digraph,
            "weights": self.weights,
            "oracle": self.oracle,
            "lp_feasible": self.lp_feasible,
            "lp_optimum": None if self.lp_optimum is None else format_rational(self.lp_optimum),
            "objective_reading": self.objective_reading,
            "decomposition": self.decomposition,
            "verdicts": self.verdicts,
        }

    def statuses(self) -> dict:
        return {c: self.verdicts[c]["status"] for c in CLAIMS}

    def violated(self) -> list[str]:
        return [c for c in CLAIMS if self.verdicts[c]["status"] == VIOLATED]


def cut_system(g: Digraph):
    c = build_compat_matrix(g)
    return c, apply_cuts(build_hull_system(g.n), zero_indices(c))


def _verdict(status, **witness) -> dict:
    doc = {"status": status}
    if witness:
        doc["witness"] = witness
    return doc


def _decompose(pt: dict, n: int, c) -> tuple[dict, bool]:
    """Decomposition record and whether it certifies C3."""
    res = dec.decompose_point(pt, n)
    greedy = None
    if isinstance(res, dec.ConvexCombination):
        comb = res
        method = "greedy"
    else:
        greedy = {"residual": point_json(res.residual),
                  "trace": {"prefix": [k + 1 for k in res.trace["prefix"]],
                            "position": res.trace["position"] + 1,
                            "blocked": [[mu + 1, None if k is None else k + 1] for mu, k in res.trace["blocked"]]},
                  "peeled": res_terms_json(res.peeled)}
        comb, sep = dec.hull_membership(pt, n)
        method = "membership-lp"
        if comb is None:
            doc = {"status": "undecomposable", "method": method, "greedy_witness": greedy,
                   "separator": {"h": point_json(sep.h), "outside": format_rational(sep.outside)}}
            return doc, False
    if not dec.verify_combination(pt, comb):
        raise SolverAnomaly("decomposition failed its own reconstruction check")
    grids_ok = all(check_solution_grid(p, c) for _, p in comb.terms)
    doc = {"status": "decomposed", "method": method, "combination": comb.to_json()}
    if greedy is not None:
        doc["greedy_witness"] = greedy
    return doc, grids_ok


def res_terms_json(terms) -> list[dict]:
    return dec.ConvexCombination(list(terms)).to_json()


def verify_instance(g: Digraph, w: WeightMatrix | None = None, reading: str = "restricted") -> InstanceReport:
    n = g.n
    if w is not None:
        w.check_consistent(g)
    cyc = enumerate_cycles(g, cap=CYCLE_CAP)
    oracle_doc = {"hamiltonian": cyc.hamiltonian, "cycle_count": cyc.cycle_count,
                  "cycles": [c.labels() for c in cyc.cycles]}
    hk = None
    if w is not None:
        hk = held_karp(g, w)
        oracle_doc["optimum"] = format_rational(hk.optimum)
        oracle_doc["optimal_cycle"] = hk.optimal_cycle.labels() if hk.optimal_cycle else None

    c, sys = cut_system(g)
    grids = enumerate_solution_grids(c)
    if w is not None:
        sys = build_objective(sys, w, reading)
        out = checked(sys, minimize(sys))
    else:
        out = checked(sys, solve_feasibility(sys))
    feasible = out.status in (FEASIBLE, OPTIMAL)
    if out.status not in (FEASIBLE, OPTIMAL, INFEASIBLE):
        raise SolverAnomaly(f"{out.status} on a hull-derived system")
    solver = outcome_json(out)
    verdicts = {}

    # C1: every Hamiltonian digraph embeds its grids feasibly
    if cyc.hamiltonian:
        embedded = grids[0] if grids else None
        embed_ok = embedded is not None and evaluate_point(sys, guess_point(embedded)).feasible
        verdicts["C1"] = _verdict(CONSISTENT if feasible and embed_ok else VIOLATED,
                                  embedded_guess=None if embedded is None else perms_json([embedded])[0],
                                  embedded_feasible=embed_ok, solver=solver)
    else:
        verdicts["C1"] = _verdict(NOT_APPLICABLE)

    # C2
    if feasible and not cyc.hamiltonian:
        verdicts["C2"] = _verdict(VIOLATED, solver=solver, oracle_cycle_count=0)
    else:
        verdicts["C2"] = _verdict(CONSISTENT, solver=solver)

    # C3
    if feasible:
        decomposition, ok = _decompose(out.point, n, c)
        verdicts["C3"] = _verdict(CONSISTENT if ok else VIOLATED)
    else:
        decomposition = {"status": "not-applicable"}
        verdicts["C3"] = _verdict(NOT_APPLICABLE)

    # C4
    lp_opt = out.objective if out.status == OPTIMAL else None
    if w is not None:
        lp_value = lp_opt if feasible else INF
        detail = {"lp": format_rational(lp_value), "oracle": format_rational(hk.optimum),
                  "lower_bound_ok": not (hk.optimum is not INF and lp_value is not INF and lp_value > hk.optimum)}
        if feasible:
            lit = objective_coefficients(n, w, "literal")
            if all(a is not INF for a in lit.values()):
                detail["literal"] = format_rational(objective_value(lit, out.point))
        if hk.optimal_cycle is not None:
            detail["oracle_cycle"] = hk.optimal_cycle.labels()
        detail["solver"] = solver
        verdicts["C4"] = _verdict(CONSISTENT if lp_value == hk.optimum else VIOLATED, **detail)
    else:
        verdicts["C4"] = _verdict(NOT_APPLICABLE)

    # C5
    status = CONSISTENT if len(grids) == n * cyc.cycle_count else VIOLATED
    verdicts["C5"] = _verdict(status, grid_count=len(grids), cycle_count=cyc.cycle_count,
                              **({"grids": perms_json(grids)} if status == VIOLATED else {}))

    return InstanceReport(digraph_fingerprint(g), n, oracle_doc, feasible, lp_opt,
                          reading if w is not None else None, decomposition, verdicts,
                          digraph=g.serialize(), weights=w.serialize() if w is not None else None)


def recheck_report(doc: dict) -> list[str]:
    """Independently re-verify every verdict of a serialized instance report.

    Returns a list of problems; empty means every witness checks out.
    """
    problems = []
    g = parse_digraph(doc["digraph"])
    w = parse_weights(doc["weights"], g) if doc.get("weights") else None
    n = g.n
    if digraph_fingerprint(g) != doc["fingerprint"]:
        problems.append("fingerprint mismatch")
    c, sys = cut_system(g)
    if w is not None:
        sys = build_objective(sys, w, doc["objective_reading"])
    count = enumerate_cycles(g, cap=0).cycle_count
    ham = count > 0
    v = doc["verdicts"]

    for claim in ("C1", "C2"):
        wit = v[claim].get("witness")
        if wit is None:
            continue
        out = outcome_from_json(wit["solver"])
        if not verify_certificate(sys, out):
            problems.append(f"{claim}: solver certificate does not verify")
    if v["C1"]["status"] == CONSISTENT:
        p = _perm(v["C1"]["witness"]["embedded_guess"])
        if not ham or not evaluate_point(sys, guess_point(p)).feasible:
            problems.append("C1: embedded guess does not verify")
    if v["C2"]["status"] == VIOLATED and ham:
        problems.append("C2: violated, but the digraph is Hamiltonian")
    if v["C2"]["status"] == CONSISTENT:
        feas = outcome_from_json(v["C2"]["witness"]["solver"]).status != INFEASIBLE
        if feas and not ham:
            problems.append("C2: consistent, but feasible and non-Hamiltonian")

    d = doc["decomposition"]
    if v["C3"]["status"] != NOT_APPLICABLE:
        pt = outcome_from_json(v["C2"]["witness"]["solver"]).point
        if d["status"] == "decomposed":
            comb = dec.ConvexCombination([(parse_rational(t["weight"]), _perm(t["perm"])) for t in d["combination"]])
            if not dec.verify_combination(pt, comb):
                problems.append("C3: combination does not reconstruct the point")
            grids_ok = all(check_solution_grid(p, c) for _, p in comb.terms)
            if grids_ok != (v["C3"]["status"] == CONSISTENT):
                problems.append("C3: verdict disagrees with grid check of the combination")
        else:
            sep = dec.Separator(point_from_json(d["separator"]["h"]), parse_rational(d["separator"]["outside"]))
            if v["C3"]["status"] != VIOLATED or not dec.verify_separator(pt, sep, n):
                problems.append("C3: separator does not verify")

    if v["C4"]["status"] != NOT_APPLICABLE:
        wit = v["C4"]["witness"]
        out = outcome_from_json(wit["solver"])
        if not verify_certificate(sys, out):
            problems.append("C4: solver certificate does not verify")
        lp_value = out.objective if out.status == OPTIMAL else INF
        truth = brute_force_optimum(g, w)
        if parse_rational(wit["oracle"]) != truth or parse_rational(wit["lp"]) != lp_value:
            problems.append("C4: recorded values disagree with recomputation")
        if (lp_value == truth) != (v["C4"]["status"] == CONSISTENT):
            problems.append("C4: verdict disagrees with recomputation")

    grids = len(enumerate_solution_grids(c))
    if (grids == n * count) != (v["C5"]["status"] == CONSISTENT):
        problems.append("C5: verdict disagrees with recount")
    return problems


# -- instance generators ---------------------------------------------------------------------

def random_weights(g: Digraph, rng: random.Random) -> WeightMatrix:
    lo, hi = WEIGHT_RANGE
    return WeightMatrix.from_arc_weights(g, {a: rng.randint(lo, hi) for a in g.arcs()})


def all_digraphs(n: int):
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
    for mask in range(1 << len(pairs)):
        yield Digraph.from_arcs(n, [pairs[k] for k in range(len(pairs)) if mask >> k & 1])


def random_digraph(n: int, p: Fraction, rng: random.Random) -> Digraph:
    p = Fraction(p)
    arcs = [(a, b) for a in range(n) for b in range(n)
            if a != b and rng.randrange(p.denominator) < p.numerator]
    return Digraph.from_arcs(n, arcs)


# -- sweeps ----------------------------------------------------------------------------------

@dataclass
class SweepReport:
    generator: dict
    instances: list[dict]
    tallies: dict
    wall_clock: dict | None = None
    reports: list[InstanceReport] = field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "generator": self.generator, "instances": self.instances,
                "tallies": self.tallies, "wall_clock": self.wall_clock}

    def violations(self) -> list[dict]:
        return [i for i in self.instances if VIOLATED in i["verdicts"].values()]


def _run_one(args):
    g, w = args
    return verify_instance(g, w)


def _sweep(generator: dict, jobs_list, jobs: int, keep: bool, witness_dir) -> SweepReport:
    start = time.perf_counter()
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            reports = list(pool.map(_run_one, jobs_list, chunksize=16))
    else:
        reports = [_run_one(a) for a in jobs_list]
    order = sorted(range(len(reports)), key=lambda k: (reports[k].fingerprint, k))
    instances = []
    tallies = {c: {CONSISTENT: 0, VIOLATED: 0, NOT_APPLICABLE: 0} for c in CLAIMS}
    for k in order:
        rep = reports[k]
        doc = rep.to_json()
        st = rep.statuses()
        for claim, s in st.items():
            tallies[claim][s] += 1
        instances.append({"fingerprint": rep.fingerprint, "digest": digest(doc), "verdicts": st})
        if witness_dir is not None and rep.violated():
            path = Path(witness_dir)
            path.mkdir(parents=True, exist_ok=True)
            (path / f"{rep.fingerprint[:16]}-{k}.json").write_text(dumps(doc))
    wall = {"seconds": round(time.perf_counter() - start, 3)}
    return SweepReport(generator, instances, tallies, wall, [reports[k] for k in order] if keep else [])


def sweep_exhaustive(n: int, seed: int = 0, weighted: bool = True, jobs: int = 1, keep: bool = False,
                     witness_dir=None, allow_long: bool = False) -> SweepReport:
    """Every labeled digraph on n vertices; weights drawn per instance from ``seed``."""
    if n > EXHAUSTIVE_GUARD + (1 if allow_long else 0):
        raise ValueError(f"exhaustive sweep guarded at n <= {EXHAUSTIVE_GUARD} (n = 5 needs allow_long)")
    jobs_list = []
    for g in all_digraphs(n):
        w = random_weights(g, random.Random(f"{seed}:{digraph_fingerprint(g)}")) if weighted else None
        jobs_list.append((g, w))
    gen = {"mode": "exhaustive", "n": n, "seed": seed, "count": len(jobs_list), "weighted": weighted}
    return _sweep(gen, jobs_list, jobs, keep, witness_dir)


def sweep_random(n: int, count: int, p=Fraction(1, 2), seed: int = 0, weighted: bool = True,
                 jobs: int = 1, keep: bool = False, witness_dir=None) -> SweepReport:
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ValueError("arc probability must lie in [0, 1]")
    rng = random.Random(seed)
    jobs_list = []
    for _ in range(count):
        g = random_digraph(n, p, rng)
        jobs_list.append((g, random_weights(g, rng) if weighted else None))
    gen = {"mode": "random", "n": n, "seed": seed, "count": count, "p": format_rational(p),
           "weighted": weighted, "weight_range": list(WEIGHT_RANGE)}
    return _sweep(gen, jobs_list, jobs, keep, witness_dir)


# -- witness minimization -----------------------------------------------------------------------

def minimize_witness(g: Digraph, claim: str = "C2", w: WeightMatrix | None = None) -> Digraph:
    """Drop arcs one at a time (in label order) while ``claim`` stays violated."""
    def violated(h: Digraph) -> bool:
        hw = None
        if w is not None:
            hw = WeightMatrix.from_arc_weights(h, {a: w[a] for a in h.arcs()})
        return verify_instance(h, hw).verdicts[claim]["status"] == VIOLATED

    if not violated(g):
        raise ValueError(f"{claim} is not violated on the given digraph")
    changed = True
    while changed:
        changed = False
        for a, b in g.arcs():
            h = g.without_arc(a, b)
            if violated(h):
                g = h
                changed = True
    return g
