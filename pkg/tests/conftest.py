from __future__ import annotations

import pytest

from hamlp.graph import Digraph, parse_digraph

THREE_CYCLE = "3\n0 1 0\n0 0 1\n1 0 0\n"


@pytest.fixture
def three_cycle() -> Digraph:
    return parse_digraph(THREE_CYCLE)


@pytest.fixture
def four_cycle() -> Digraph:
    return Digraph.from_arcs(4, [(0, 1), (1, 2), (2, 3), (3, 0)])


@pytest.fixture
def acyclic3() -> Digraph:
    return Digraph.from_arcs(3, [(0, 1), (1, 2), (0, 2)])
