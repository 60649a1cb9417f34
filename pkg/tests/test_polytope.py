from __future__ import annotations

import itertools
from fractions import Fraction
from pathlib import Path

import pytest

from hamlp.compat import build_compat_matrix, check_solution_grid, zero_indices
from hamlp.graph import INF, WeightMatrix, complete_digraph, empty_digraph, standard_cycle
from hamlp.polytope import (FAMILY_PAIR, FAMILY_POSITION, FAMILY_SIMPLEX, apply_cuts, build_hull_system,
                            build_objective, center_point, digraph_system, evaluate_point, export_lp,
                            from_native_json, guess_point, objective_coefficients, objective_value,
                            parse_var_name, squared_norm, to_lp_text, to_native_json, var_name, xvar)

DATA = Path(__file__).parent / "data"
W3 = [[INF, 1, 4], [2, INF, 2], [3, 5, INF]]


def test_counts_n4():
    sys = build_hull_system(4)
    assert sum(len(v) == 4 for v in sys.variables) == 72
    assert sum(len(v) == 2 for v in sys.variables) == 16
    assert sys.row_family_counts() == {FAMILY_PAIR: 48, FAMILY_POSITION: 48, FAMILY_SIMPLEX: 4}


def test_counts_n2():
    sys = build_hull_system(2)
    assert len(sys.variables) == 6
    assert sum(len(v) == 4 for v in sys.variables) == 2


def test_small_n_rejected():
    with pytest.raises(ValueError):
        build_hull_system(1)
    with pytest.raises(ValueError):
        center_point(1)


def test_canonical_x_key():
    assert xvar(2, 0, 1, 3) == (0, 2, 3, 1)
    with pytest.raises(ValueError):
        xvar(1, 1, 0, 2)
    assert parse_var_name(var_name((0, 2, 3, 1))) == (0, 2, 3, 1)
    assert var_name((1, 0)) == "y_2_1"


def test_center_values():
    pt = center_point(3)
    assert {a for v, a in pt.items() if len(v) == 4} == {Fraction(1, 6)}
    assert {a for v, a in pt.items() if len(v) == 2} == {Fraction(1, 3)}
    assert set(center_point(2).values()) == {Fraction(1, 2)}


@pytest.mark.parametrize("n", range(2, 6))
def test_center_and_guesses_are_feasible(n):
    sys = build_hull_system(n)
    assert evaluate_point(sys, center_point(n)).feasible
    for p in itertools.permutations(range(n)):
        assert evaluate_point(sys, guess_point(p)).feasible


def test_guess_point_identity_n3():
    pt = guess_point((0, 1, 2))
    assert sum(1 for v in pt if len(v) == 4) == 3
    assert sum(1 for v in pt if len(v) == 2) == 3
    # the full box matrix has both mirrored copies: 6 unit x entries, 3 unit y entries
    assert squared_norm(pt) == 6 + 3


def test_complete_digraph_has_no_cuts():
    sys = build_hull_system(4)
    assert digraph_system(complete_digraph(4)) == sys


def test_three_cycle_integral_points(three_cycle):
    sys = digraph_system(three_cycle)
    feasible = [p for p in itertools.permutations(range(3)) if evaluate_point(sys, guess_point(p)).feasible]
    c = build_compat_matrix(three_cycle)
    assert feasible == [p for p in itertools.permutations(range(3)) if check_solution_grid(p, c)]
    assert len(feasible) == 3


def test_non_grid_guess_breaks_a_cut(three_cycle):
    sys = digraph_system(three_cycle)
    res = evaluate_point(sys, guess_point((0, 2, 1)))
    assert res.fixed_violations and not res.feasible


def test_perturbation_touches_only_its_rows():
    sys = build_hull_system(3)
    pt = center_point(3)
    v = (0, 1, 0, 1)
    pt[v] += Fraction(1, 7)
    res = evaluate_point(sys, pt)
    touching = [k for k, r in enumerate(sys.rows) if any(u == v for u, _ in r.coeffs)]
    assert res.nonzero_rows() == touching
    assert all(res.rows[k] == Fraction(1, 7) for k in touching)


def test_negative_and_unknown_entries_reported():
    sys = apply_cuts(build_hull_system(3), [(0, 1, 0, 1)])
    pt = dict(guess_point((0, 1, 2)))
    pt[(0, 2, 1, 0)] = Fraction(-1)
    pt[(0, 1, 0, 1)] = Fraction(1)
    pt[("junk",)] = Fraction(1)
    res = evaluate_point(sys, pt)
    assert res.negative == [(0, 2, 1, 0)]
    assert res.fixed_violations == [(0, 1, 0, 1)]
    assert res.unknown == [("junk",)]


def test_cut_validation():
    sys = build_hull_system(3)
    with pytest.raises(ValueError):
        apply_cuts(sys, [(0, 1, 0, 3)])
    with pytest.raises(ValueError):
        apply_cuts(sys, [(0, 0, 1, 2)])
    cut = apply_cuts(sys, [(1, 0, 2, 1)])
    assert (0, 1, 1, 2) in cut.fixed_zero and (0, 1, 1, 2) not in cut.variables
    # cutting an already cut variable is accepted
    assert apply_cuts(cut, [(0, 1, 1, 2)]).variables == cut.variables


def test_objective_unit_weights():
    g = standard_cycle(3)
    w = WeightMatrix.from_arc_weights(g, {a: 1 for a in g.arcs()})
    sys = digraph_system(g, w)
    assert evaluate_point(sys, guess_point((0, 1, 2))).objective == 3


def test_objective_three_cycle(three_cycle):
    w = WeightMatrix.from_arc_weights(three_cycle, {(0, 1): 1, (1, 2): 2, (2, 0): 3})
    sys = digraph_system(three_cycle, w)
    for p in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        assert evaluate_point(sys, guess_point(p)).objective == 6


def test_objective_complete_three():
    w = WeightMatrix.from_rows(W3)
    coeffs = objective_coefficients(3, w)
    values = {p: objective_value(coeffs, guess_point(p)) for p in itertools.permutations(range(3))}
    assert min(values.values()) == 6
    assert sorted(set(values.values())) == [6, 11]


def test_literal_reading_is_constant_on_guesses():
    w = WeightMatrix.from_rows([[INF, 1, 4, 7], [2, INF, 2, -3], [3, 5, INF, 0], [1, 1, 9, INF]])
    coeffs = objective_coefficients(4, w, "literal")
    values = {objective_value(coeffs, guess_point(p)) for p in itertools.permutations(range(4))}
    assert values == {sum(w[i, j] for i in range(4) for j in range(4) if i != j)}
    with pytest.raises(ValueError):
        objective_coefficients(4, w, "other")


def test_infinite_cost_on_surviving_variable():
    g = standard_cycle(3)
    w = WeightMatrix.from_arc_weights(g, {a: 1 for a in g.arcs()})
    with pytest.raises(ValueError):
        build_objective(build_hull_system(3), w)


def test_golden_lp_text():
    assert to_lp_text(build_hull_system(2)) == (DATA / "hull_n2.lp").read_text()


def test_lp_text_rejects_non_decimal():
    sys = build_objective(build_hull_system(3), WeightMatrix.from_rows([[0, Fraction(1, 3), 1]] * 3))
    with pytest.raises(ValueError):
        to_lp_text(sys)
    with pytest.raises(ValueError):
        export_lp(sys, "mps")


def test_native_json_round_trip(three_cycle):
    w = WeightMatrix.from_arc_weights(three_cycle, {(0, 1): Fraction(-1, 2), (1, 2): 2, (2, 0): 3})
    for sys in (build_hull_system(3), digraph_system(three_cycle, w)):
        back = from_native_json(to_native_json(sys))
        assert back.variables == sys.variables
        assert back.rows == sys.rows
        assert back.objective == sys.objective


def test_empty_digraph_cut_system_keeps_y():
    sys = digraph_system(empty_digraph(3))
    c = build_compat_matrix(empty_digraph(3))
    assert sys.fixed_zero == {xvar(*q) for q in zero_indices(c)}
    assert all(len(v) == 2 for v in sys.variables)
