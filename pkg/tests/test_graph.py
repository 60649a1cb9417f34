from __future__ import annotations

from fractions import Fraction

import pytest

from hamlp.graph import (INF, Digraph, LoopError, NotHamiltonianError, ParseError, SizeError, WeightMatrix,
                         complete_digraph, digraph_fingerprint, format_rational, parse_digraph,
                         parse_rational, parse_weights, permutation_to_cycle, standard_cycle)

from conftest import THREE_CYCLE

# sha256 of the serialized directed 3-cycle; also quoted in the README
THREE_CYCLE_DIGEST = "b967eac33650bf78ab21bc492808f9b259aa173535286d2b8bf3b7e03cafa3cf"


def test_parse_three_cycle(three_cycle):
    assert three_cycle.n == 3
    assert three_cycle.arcs() == [(0, 1), (1, 2), (2, 0)]


def test_parse_two_cycle():
    g = parse_digraph("2\n0 1\n1 0\n")
    assert g.arcs() == [(0, 1), (1, 0)]


def test_loop_is_rejected_with_row_and_line():
    with pytest.raises(LoopError) as exc:
        parse_digraph("3\n0 1 0\n0 1 1\n1 0 0\n")
    assert "row 2" in str(exc.value)
    assert exc.value.line == 3


@pytest.mark.parametrize("text", ["", "x\n", "1\n0\n", "3\n0 1 0\n0 0 1\n", "2\n0 2\n1 0\n", "2\n0 1 1\n1 0\n"])
def test_malformed_input(text):
    with pytest.raises(ParseError):
        parse_digraph(text)


def test_comments_and_blank_lines_are_skipped():
    g = parse_digraph("# a comment\n\n2\n0 1\n\n1 0\n")
    assert g == parse_digraph("2\n0 1\n1 0\n")


def test_standard_cycle():
    assert standard_cycle(3).adjacency == ((0, 1, 0), (0, 0, 1), (1, 0, 0))
    assert standard_cycle(2).adjacency == ((0, 1), (1, 0))
    with pytest.raises(SizeError):
        standard_cycle(1)


def test_permutation_to_cycle(three_cycle):
    assert permutation_to_cycle((0, 1, 2, 3), standard_cycle(4)).labels() == [1, 2, 3, 4]
    assert permutation_to_cycle((1, 2, 0), three_cycle).labels() == [1, 2, 3]
    g = standard_cycle(4).without_arc(3, 0)
    with pytest.raises(NotHamiltonianError) as exc:
        permutation_to_cycle((0, 1, 2, 3), g)
    assert exc.value.pair == (4, 1)
    assert "not a Hamiltonian cycle of g" in str(exc.value)


def test_fingerprint(three_cycle):
    assert digraph_fingerprint(three_cycle) == digraph_fingerprint(parse_digraph(THREE_CYCLE))
    reverse = Digraph.from_arcs(3, [(1, 0), (2, 1), (0, 2)])
    assert digraph_fingerprint(reverse) != digraph_fingerprint(three_cycle)
    assert digraph_fingerprint(three_cycle) == THREE_CYCLE_DIGEST


def test_serialize_round_trip():
    g = complete_digraph(5).without_arc(2, 4)
    assert parse_digraph(g.serialize()) == g


def test_rationals():
    assert format_rational(Fraction(-3, 6)) == "-1/2"
    assert format_rational(Fraction(4)) == "4"
    assert format_rational(INF) == "inf"
    assert parse_rational("-1/2") == Fraction(-1, 2)
    assert parse_rational("inf") is INF
    for bad in ("1/0", "x", "1.5", ""):
        with pytest.raises(ValueError):
            parse_rational(bad)


def test_infinity_ordering():
    assert INF + 5 is INF
    assert Fraction(10 ** 9) < INF
    assert not INF < INF and INF <= INF


def test_weights_must_match_arcs(three_cycle):
    w = parse_weights("3\ninf 1 inf\ninf inf 2\n3 inf inf\n", three_cycle)
    assert w[0, 1] == 1 and w[1, 0] is INF
    with pytest.raises(ValueError):
        parse_weights("3\ninf 1 7\ninf inf 2\n3 inf inf\n", three_cycle)
    with pytest.raises(ValueError):
        WeightMatrix.from_rows([[INF, 1], [INF, INF]]).check_consistent(standard_cycle(2))
