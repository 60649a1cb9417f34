from __future__ import annotations

import itertools
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from hamlp.compat import box_identity_violations, build_compat_matrix, check_solution_grid
from hamlp.decompose import birkhoff_decompose, permutation_matrix_sum
from hamlp.graph import Digraph, WeightMatrix, parse_digraph
from hamlp.lpsolve import minimize, solve_feasibility, verify_certificate
from hamlp.oracle import held_karp
from hamlp.polytope import digraph_system, evaluate_point, guess_point


@st.composite
def digraphs(draw, lo=2, hi=5):
    n = draw(st.integers(lo, hi))
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Digraph.from_arcs(n, [p for p, keep in zip(pairs, mask) if keep])


@st.composite
def weighted(draw, lo=2, hi=5):
    g = draw(digraphs(lo, hi))
    return g, WeightMatrix.from_arc_weights(g, {a: draw(st.integers(-9, 9)) for a in g.arcs()})


@given(digraphs(2, 7))
def test_serialize_round_trip(g):
    assert parse_digraph(g.serialize()) == g


@given(digraphs(2, 7))
def test_box_identities(g):
    assert box_identity_violations(build_compat_matrix(g)) == []


@settings(max_examples=40, deadline=None)
@given(digraphs(2, 5))
def test_grids_embed_feasibly(g):
    sys = digraph_system(g)
    c = build_compat_matrix(g)
    for p in itertools.permutations(range(g.n)):
        assert evaluate_point(sys, guess_point(p)).feasible == check_solution_grid(p, c)


@settings(max_examples=30, deadline=None)
@given(weighted(2, 5))
def test_lp_is_a_certified_lower_bound(gw):
    g, w = gw
    sys = digraph_system(g, w)
    out = minimize(sys)
    assert verify_certificate(sys, out)
    hk = held_karp(g, w)
    if hk.hamiltonian:
        assert out.status == "Optimal" and out.objective <= hk.optimum


@settings(max_examples=30, deadline=None)
@given(digraphs(2, 5))
def test_feasibility_certified(g):
    sys = digraph_system(g)
    assert verify_certificate(sys, solve_feasibility(sys))


@given(st.integers(2, 6).flatmap(lambda m: st.lists(
    st.tuples(st.fractions(min_value=Fraction(1, 50), max_value=5, max_denominator=50), st.permutations(range(m))),
    min_size=1, max_size=6)))
def test_birkhoff_reconstructs(terms):
    m = len(terms[0][1])
    block = permutation_matrix_sum([(w, tuple(p)) for w, p in terms], m)
    out = birkhoff_decompose(block)
    assert permutation_matrix_sum(out, m) == block
    assert len(out) <= (m - 1) ** 2 + 1
