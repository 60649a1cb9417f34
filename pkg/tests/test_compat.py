from __future__ import annotations

import itertools
import random

import numpy as np
import pytest

from hamlp.compat import (GuardExceeded, box_identity_violations, build_box, build_compat_matrix,
                          check_solution_grid, enumerate_solution_grids, zero_indices)
from hamlp.graph import (Digraph, NotHamiltonianError, complete_digraph, empty_digraph, permutation_to_cycle,
                         standard_cycle)


def _hamiltonian_perm(p, g) -> bool:
    try:
        permutation_to_cycle(p, g)
    except NotHamiltonianError:
        return False
    return True


def _entry_by_definition(g, i, j, mu, nu) -> int:
    # brute reading of the box rule, written independently of build_box
    if i == j:
        return int(mu == nu)
    if mu == nu:
        return 0
    s = standard_cycle(g.n)
    if s.has_arc(i, j) and not g.has_arc(mu, nu):
        return 0
    if s.has_arc(j, i) and not g.has_arc(nu, mu):
        return 0
    return 1


def test_diagonal_boxes_are_identity():
    c = build_compat_matrix(complete_digraph(4))
    for i in range(4):
        assert np.array_equal(c.box(i, i), np.eye(4))


def test_complete_digraph_adjacent_box_is_k_n():
    n = 4
    c = build_compat_matrix(complete_digraph(n))
    k = np.ones((n, n)) - np.eye(n)
    for i in range(n):
        assert np.array_equal(c.box(i, (i + 1) % n), k)


def test_three_cycle_superdiagonal_box_is_adjacency(three_cycle):
    c = build_compat_matrix(three_cycle)
    assert np.array_equal(c.box(0, 1), three_cycle.array())


def test_complete_three_block_pattern():
    c = build_compat_matrix(complete_digraph(3))
    u, a = np.eye(3), np.ones((3, 3)) - np.eye(3)
    pattern = [[u, a, a.T], [a.T, u, a], [a, a.T, u]]
    for i in range(3):
        for j in range(3):
            assert np.array_equal(c.box(i, j), pattern[i][j])


def test_empty_digraph_adjacent_blocks_vanish():
    c = build_compat_matrix(empty_digraph(3))
    s = standard_cycle(3)
    for i, j in itertools.product(range(3), repeat=2):
        if s.has_arc(i, j) or s.has_arc(j, i):
            assert not c.box(i, j).any()


def test_entries_match_definition():
    rng = random.Random(3)
    for _ in range(30):
        n = rng.randint(2, 5)
        g = Digraph.from_arcs(n, [(a, b) for a in range(n) for b in range(n) if a != b and rng.random() < 0.5])
        c = build_compat_matrix(g)
        for q in itertools.product(range(n), repeat=4):
            assert c[q] == _entry_by_definition(g, *q)


def test_box_index_out_of_range(three_cycle):
    with pytest.raises(IndexError):
        build_box(three_cycle, standard_cycle(3), 0, 3)


def test_three_cycle_grids(three_cycle):
    c = build_compat_matrix(three_cycle)
    passing = [p for p in itertools.permutations(range(3)) if check_solution_grid(p, c)]
    assert len(passing) == 3
    assert enumerate_solution_grids(c) == passing


def test_identity_on_standard_cycle():
    for n in range(2, 7):
        assert check_solution_grid(range(n), build_compat_matrix(standard_cycle(n)))


def test_empty_digraph_has_no_grids():
    c = build_compat_matrix(empty_digraph(4))
    assert not any(check_solution_grid(p, c) for p in itertools.permutations(range(4)))


def test_complete_four_has_24_grids():
    assert len(enumerate_solution_grids(build_compat_matrix(complete_digraph(4)))) == 24


def test_acyclic_has_no_grids(acyclic3):
    assert enumerate_solution_grids(build_compat_matrix(acyclic3)) == []


def test_grid_check_size_mismatch(three_cycle):
    with pytest.raises(ValueError):
        check_solution_grid((0, 1), build_compat_matrix(three_cycle))


def test_enumeration_guard():
    c = build_compat_matrix(complete_digraph(10))
    with pytest.raises(GuardExceeded):
        enumerate_solution_grids(c)
    assert len(enumerate_solution_grids(c, limit=5)) == 5


def test_grid_iff_hamiltonian_tour():
    rng = random.Random(11)
    for _ in range(40):
        n = rng.randint(2, 5)
        g = Digraph.from_arcs(n, [(a, b) for a in range(n) for b in range(n) if a != b and rng.random() < 0.6])
        c = build_compat_matrix(g)
        for p in itertools.permutations(range(n)):
            assert check_solution_grid(p, c) == _hamiltonian_perm(p, g)


def test_zero_indices():
    assert zero_indices(build_compat_matrix(complete_digraph(4))) == frozenset()
    s = standard_cycle(3)
    expected = {(i, j, mu, nu) for i, j, mu, nu in itertools.product(range(3), repeat=4)
                if i != j and mu != nu and (s.has_arc(i, j) or s.has_arc(j, i))}
    assert zero_indices(build_compat_matrix(empty_digraph(3))) == expected


def test_three_cycle_zero_count(three_cycle):
    # brute force over the 36 off-diagonal entries gives 18 zeros
    c = build_compat_matrix(three_cycle)
    zeros = [q for q in itertools.product(range(3), repeat=4)
             if q[0] != q[1] and q[2] != q[3] and _entry_by_definition(three_cycle, *q) == 0]
    assert len(zero_indices(c)) == len(zeros) == 18


def test_identities_hold_on_random_digraphs():
    rng = random.Random(0)
    for _ in range(50):
        n = rng.randint(2, 7)
        g = Digraph.from_arcs(n, [(a, b) for a in range(n) for b in range(n) if a != b and rng.random() < 0.5])
        assert box_identity_violations(build_compat_matrix(g)) == []


def test_block_matrix_layout(three_cycle):
    c = build_compat_matrix(three_cycle)
    big = c.block_matrix()
    assert big.shape == (9, 9)
    assert np.array_equal(big[0:3, 3:6], c.box(0, 1))
    assert c.dump().count("\n") == 3 * 3 + 2
