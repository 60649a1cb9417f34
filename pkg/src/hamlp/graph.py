"""Digraphs, weight matrices and permutations.

Vertices are 0-based internally.  Every public text format (digraph files,
weight files, reports, LP variable names) uses 1-based labels.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np


class ParseError(ValueError):
    """Malformed digraph or weight file; ``line`` is 1-based."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class HeaderError(ParseError):
    pass


class EntryError(ParseError):
    pass


class LoopError(ParseError):
    pass


class SizeError(ParseError):
    pass


class NotHamiltonianError(ValueError):
    def __init__(self, pair: tuple[int, int]):
        self.pair = pair
        super().__init__(f"not a Hamiltonian cycle of g: missing arc {pair[0]}->{pair[1]}")


class _Infinity:
    """Symbolic +infinity for extended rationals; absorbs addition."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("hamlp-inf")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True


INF = _Infinity()


def format_rational(value) -> str:
    """Serialize an extended rational as ``"p/q"``, an integer string, or ``"inf"``."""
    if value is INF:
        return "inf"
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(token: str):
    token = token.strip()
    if token == "inf":
        return INF
    if "/" in token:
        p, q = token.split("/", 1)
        if not _is_int(p) or not _is_int(q) or int(q) == 0:
            raise ValueError(f"bad rational {token!r}")
        return Fraction(int(p), int(q))
    if not _is_int(token):
        raise ValueError(f"bad rational {token!r}")
    return Fraction(int(token))


def _is_int(s: str) -> bool:
    s = s[1:] if s[:1] in "+-" else s
    return s.isdigit()


@dataclass(frozen=True)
class Digraph:
    n: int
    adjacency: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 2:
            raise SizeError(f"need n >= 2, got {self.n}")
        if len(self.adjacency) != self.n or any(len(r) != self.n for r in self.adjacency):
            raise SizeError("adjacency is not n x n")
        for i, row in enumerate(self.adjacency):
            for v in row:
                if v not in (0, 1):
                    raise EntryError(f"entry {v!r} not in {{0,1}}")
            if row[i]:
                raise LoopError(f"nonzero diagonal at row {i + 1}")

    @classmethod
    def from_matrix(cls, rows) -> "Digraph":
        rows = tuple(tuple(int(v) for v in r) for r in rows)
        return cls(len(rows), rows)

    @classmethod
    def from_arcs(cls, n: int, arcs: Iterable[tuple[int, int]]) -> "Digraph":
        """Build from 0-based arc pairs."""
        m = [[0] * n for _ in range(n)]
        for a, b in arcs:
            m[a][b] = 1
        return cls.from_matrix(m)

    def has_arc(self, a: int, b: int) -> bool:
        return bool(self.adjacency[a][b])

    def arcs(self) -> list[tuple[int, int]]:
        return [(a, b) for a in range(self.n) for b in range(self.n) if self.adjacency[a][b]]

    def array(self) -> np.ndarray:
        return np.array(self.adjacency, dtype=np.int8)

    def without_arc(self, a: int, b: int) -> "Digraph":
        m = [list(r) for r in self.adjacency]
        m[a][b] = 0
        return Digraph.from_matrix(m)

    def serialize(self) -> str:
        lines = [str(self.n)] + [" ".join(str(v) for v in r) for r in self.adjacency]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class WeightMatrix:
    n: int
    w: tuple[tuple[object, ...], ...]

    def __getitem__(self, ab):
        a, b = ab
        return self.w[a][b]

    @classmethod
    def from_rows(cls, rows) -> "WeightMatrix":
        conv = []
        for r in rows:
            conv.append(tuple(v if v is INF else (parse_rational(v) if isinstance(v, str) else Fraction(v))
                              for v in r))
        return cls(len(conv), tuple(conv))

    @classmethod
    def from_arc_weights(cls, g: Digraph, weights: dict[tuple[int, int], object]) -> "WeightMatrix":
        rows = [[INF] * g.n for _ in range(g.n)]
        for a, b in g.arcs():
            rows[a][b] = Fraction(weights[(a, b)])
        return cls(g.n, tuple(tuple(r) for r in rows))

    def check_consistent(self, g: Digraph) -> None:
        """Off-diagonal entries are +inf exactly where ``g`` has no arc."""
        if self.n != g.n:
            raise ValueError(f"weight matrix has n={self.n}, digraph has n={g.n}")
        for a in range(g.n):
            for b in range(g.n):
                if a == b:
                    continue
                if (self.w[a][b] is INF) == g.has_arc(a, b):
                    raise ValueError(f"weight/arc mismatch at ({a + 1},{b + 1})")

    def serialize(self) -> str:
        lines = [str(self.n)] + [" ".join(format_rational(v) for v in r) for r in self.w]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CanonicalCycle:
    vertices: tuple[int, ...]
    weight: object = None

    def labels(self) -> list[int]:
        return [v + 1 for v in self.vertices]


def _data_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line


def _parse_table(text: str, convert):
    lines = list(_data_lines(text))
    if not lines:
        raise HeaderError("missing header", 1)
    hline, header = lines[0]
    if not header.isdigit():
        raise HeaderError(f"header must be an integer, got {header!r}", hline)
    n = int(header)
    if n < 2:
        raise SizeError(f"need n >= 2, got {n}", hline)
    body = lines[1:]
    if len(body) != n:
        last = body[-1][0] if body else hline
        raise SizeError(f"expected {n} rows, found {len(body)}", last)
    rows = []
    for lineno, line in body:
        toks = line.split()
        if len(toks) != n:
            raise SizeError(f"expected {n} entries, found {len(toks)}", lineno)
        rows.append([convert(t, lineno) for t in toks])
    return n, rows, [ln for ln, _ in body]


def parse_digraph(text: str) -> Digraph:
    def conv(tok, lineno):
        if tok not in ("0", "1"):
            raise EntryError(f"entry {tok!r} not in {{0,1}}", lineno)
        return int(tok)

    n, rows, linenos = _parse_table(text, conv)
    for i, row in enumerate(rows):
        if row[i]:
            raise LoopError(f"nonzero diagonal at row {i + 1}", linenos[i])
    return Digraph.from_matrix(rows)


def parse_weights(text: str, g: Digraph | None = None) -> WeightMatrix:
    def conv(tok, lineno):
        try:
            return parse_rational(tok)
        except ValueError as exc:
            raise EntryError(str(exc), lineno) from None

    n, rows, _ = _parse_table(text, conv)
    w = WeightMatrix(n, tuple(tuple(r) for r in rows))
    if g is not None:
        w.check_consistent(g)
    return w


def standard_cycle(n: int) -> Digraph:
    """The fixed circular shift S with arcs k -> k+1 and n -> 1."""
    if n < 2:
        raise SizeError(f"need n >= 2, got {n}")
    return Digraph.from_arcs(n, [(k, (k + 1) % n) for k in range(n)])


def complete_digraph(n: int) -> Digraph:
    return Digraph.from_arcs(n, [(a, b) for a in range(n) for b in range(n) if a != b])


def empty_digraph(n: int) -> Digraph:
    return Digraph.from_arcs(n, [])


def canonical_rotation(seq: Sequence[int]) -> tuple[int, ...]:
    k = min(range(len(seq)), key=lambda t: seq[t])
    return tuple(seq[k:]) + tuple(seq[:k])


def check_permutation(p: Sequence[int], n: int | None = None) -> tuple[int, ...]:
    p = tuple(p)
    if sorted(p) != list(range(len(p))) or (n is not None and len(p) != n):
        raise ValueError(f"not a permutation of 0..{len(p) - 1}: {p}")
    return p


def tour_weight(vertices: Sequence[int], w: WeightMatrix):
    total = Fraction(0)
    for k in range(len(vertices)):
        total = total + w[vertices[k], vertices[(k + 1) % len(vertices)]]
    return total


def permutation_to_cycle(p: Sequence[int], g: Digraph, w: WeightMatrix | None = None) -> CanonicalCycle:
    """Tour p(0) -> p(1) -> ... -> p(n-1) -> p(0), rotated to start at its smallest vertex."""
    p = check_permutation(p, g.n)
    for k in range(g.n):
        a, b = p[k], p[(k + 1) % g.n]
        if not g.has_arc(a, b):
            raise NotHamiltonianError((a + 1, b + 1))
    seq = canonical_rotation(p)
    return CanonicalCycle(seq, tour_weight(seq, w) if w is not None else None)


def digraph_fingerprint(g: Digraph) -> str:
    return hashlib.sha256(g.serialize().encode("ascii")).hexdigest()
