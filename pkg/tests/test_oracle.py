from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from hamlp.compat import GuardExceeded, build_compat_matrix, check_solution_grid
from hamlp.graph import INF, Digraph, WeightMatrix, complete_digraph, standard_cycle, tour_weight
from hamlp.oracle import brute_force_optimum, count_grids_vs_cycles, enumerate_cycles, held_karp


def _digraph(rng, n, p=0.5):
    return Digraph.from_arcs(n, [(a, b) for a in range(n) for b in range(n) if a != b and rng.random() < p])


def test_cycle_counts(four_cycle, acyclic3):
    assert enumerate_cycles(complete_digraph(4)).cycle_count == 6
    assert enumerate_cycles(four_cycle).cycle_count == 1
    res = enumerate_cycles(acyclic3)
    assert (res.hamiltonian, res.cycle_count, res.cycles) == (False, 0, [])


def test_cap_keeps_exact_count():
    res = enumerate_cycles(complete_digraph(5), cap=3)
    assert res.cycle_count == 24 and len(res.cycles) == 3


def test_cycles_are_canonical_and_oriented():
    g = Digraph.from_arcs(3, [(0, 1), (1, 2), (2, 0), (1, 0), (2, 1), (0, 2)])
    assert sorted(c.labels() for c in enumerate_cycles(g).cycles) == [[1, 2, 3], [1, 3, 2]]


def test_guard(monkeypatch):
    with pytest.raises(GuardExceeded):
        enumerate_cycles(standard_cycle(13))
    monkeypatch.setenv("HAMLP_GUARD_OVERRIDE", "1")
    assert enumerate_cycles(standard_cycle(13)).cycle_count == 1


def test_held_karp_examples():
    w = WeightMatrix.from_rows([[INF, 1, 4], [2, INF, 2], [3, 5, INF]])
    res = held_karp(complete_digraph(3), w)
    assert res.optimum == 6 and res.optimal_cycle.labels() == [1, 2, 3]
    g = standard_cycle(2)
    assert held_karp(g, WeightMatrix.from_arc_weights(g, {(0, 1): -1, (1, 0): -2})).optimum == -3


def test_held_karp_non_hamiltonian(acyclic3):
    w = WeightMatrix.from_arc_weights(acyclic3, {a: 1 for a in acyclic3.arcs()})
    res = held_karp(acyclic3, w)
    assert res.optimum is INF and res.optimal_cycle is None and not res.hamiltonian


def test_held_karp_matches_brute_force():
    rng = random.Random(9)
    for _ in range(60):
        n = rng.randint(2, 7)
        g = _digraph(rng, n, 0.6)
        w = WeightMatrix.from_arc_weights(g, {a: Fraction(rng.randint(-9, 9), rng.randint(1, 3)) for a in g.arcs()})
        res = held_karp(g, w)
        assert res.optimum == brute_force_optimum(g, w)
        if res.optimal_cycle is not None:
            assert tour_weight(res.optimal_cycle.vertices, w) == res.optimum


def test_grids_vs_cycles(three_cycle, acyclic3):
    assert count_grids_vs_cycles(three_cycle) == (3, 1, True)
    assert count_grids_vs_cycles(complete_digraph(4)) == (24, 6, True)
    assert count_grids_vs_cycles(acyclic3) == (0, 0, True)


def test_cycle_count_equals_grid_count_over_n():
    rng = random.Random(4)
    for _ in range(60):
        n = rng.randint(2, 7)
        g = _digraph(rng, n, 0.6)
        c = build_compat_matrix(g)
        grids = sum(check_solution_grid(p, c) for p in itertools.permutations(range(n)))
        assert grids == n * enumerate_cycles(g).cycle_count
