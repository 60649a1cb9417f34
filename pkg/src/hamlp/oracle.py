"""Ground truth: Hamiltonian cycle enumeration and Held-Karp."""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction

from .compat import GuardExceeded, build_compat_matrix, enumerate_solution_grids
from .graph import INF, CanonicalCycle, Digraph, WeightMatrix, tour_weight

CYCLE_GUARD = 12
HELD_KARP_GUARD = 15
GRID_RATIO_GUARD = 8


def _guard(n: int, limit: int, what: str) -> None:
    if n > limit and os.environ.get("HAMLP_GUARD_OVERRIDE") != "1":
        raise GuardExceeded(f"{what} guarded at n <= {limit} (set HAMLP_GUARD_OVERRIDE=1 to lift)")


@dataclass
class OracleResult:
    hamiltonian: bool
    cycle_count: int
    cycles: list[CanonicalCycle] = field(default_factory=list)
    optimum: object = None
    optimal_cycle: CanonicalCycle | None = None


def enumerate_cycles(g: Digraph, cap: int | None = None) -> OracleResult:
    """Grow paths from vertex 0; each oriented cycle is found exactly once."""
    n = g.n
    _guard(n, CYCLE_GUARD, "cycle enumeration")
    succ = [[b for b in range(n) if g.adjacency[a][b]] for a in range(n)]
    cycles: list[CanonicalCycle] = []
    count = 0
    path = [0]
    used = [False] * n
    used[0] = True

    def rec(a):
        nonlocal count
        if len(path) == n:
            if g.adjacency[a][0]:
                count += 1
                if cap is None or len(cycles) < cap:
                    cycles.append(CanonicalCycle(tuple(path)))
            return
        for b in succ[a]:
            if not used[b]:
                used[b] = True
                path.append(b)
                rec(b)
                path.pop()
                used[b] = False

    rec(0)
    return OracleResult(count > 0, count, cycles)


def held_karp(g: Digraph, w: WeightMatrix) -> OracleResult:
    """Exact ATSP by dynamic programming over subsets containing vertex 0.

    Weights may be negative: every tour has exactly n arcs, so the subset
    recursion is still a shortest-path problem on a DAG.
    """
    n = g.n
    _guard(n, HELD_KARP_GUARD, "Held-Karp")
    w.check_consistent(g)
    full = (1 << n) - 1
    # best[(mask, last)] = (cost, predecessor); paths start at vertex 0
    best: dict[tuple[int, int], tuple[Fraction, int]] = {(1, 0): (Fraction(0), -1)}
    for mask in range(1, full + 1):
        if not mask & 1:
            continue
        for last in range(n):
            entry = best.get((mask, last))
            if entry is None:
                continue
            cost = entry[0]
            for b in range(1, n):
                if mask >> b & 1 or not g.adjacency[last][b]:
                    continue
                key = (mask | 1 << b, b)
                cand = cost + w[last, b]
                old = best.get(key)
                if old is None or cand < old[0]:
                    best[key] = (cand, last)
    opt, end = INF, None
    for last in range(1, n):
        entry = best.get((full, last))
        if entry is not None and g.adjacency[last][0]:
            total = entry[0] + w[last, 0]
            if total < opt:
                opt, end = total, last
    if end is None:
        return OracleResult(False, 0, [], INF, None)
    seq = []
    mask, last = full, end
    while last != -1:
        seq.append(last)
        prev = best[(mask, last)][1]
        mask ^= 1 << last
        last = prev
    seq.reverse()
    cyc = CanonicalCycle(tuple(seq), tour_weight(seq, w))
    count = enumerate_cycles(g, cap=0).cycle_count if n <= CYCLE_GUARD else 1
    return OracleResult(True, count, [], opt, cyc)


def brute_force_optimum(g: Digraph, w: WeightMatrix):
    best = INF
    for c in enumerate_cycles(g).cycles:
        t = tour_weight(c.vertices, w)
        if t < best:
            best = t
    return best


def count_grids_vs_cycles(g: Digraph) -> tuple[int, int, bool]:
    _guard(g.n, GRID_RATIO_GUARD, "grid counting")
    grids = len(enumerate_solution_grids(build_compat_matrix(g)))
    cycles = enumerate_cycles(g, cap=0).cycle_count
    return grids, cycles, grids == g.n * cycles
