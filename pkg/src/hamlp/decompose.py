"""Splitting hull points into guesses.

Three tools, from local to global:

* :func:`extract_block` / :func:`birkhoff_decompose` work on the
  ``(n-1) x (n-1)`` slice of x-values sharing one (j, nu); that slice is a
  scaled doubly stochastic matrix for any hull-feasible point.
* :func:`decompose_point` greedily peels whole guesses off a point.
* :func:`hull_membership` settles membership in the convex hull of guesses
  exactly, returning either a combination or a separating vector that can be
  checked against every permutation.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .lpsolve import INFEASIBLE, solve_feasibility, verify_certificate
from .polytope import (LinearSystem, Row, build_hull_system, evaluate_point, guess_point,
                       is_x, xvar)


class NotHullFeasible(ValueError):
    pass


@dataclass(frozen=True)
class StochasticBlock:
    j: int
    nu: int
    scale: Fraction
    entries: tuple[tuple[Fraction, ...], ...]
    rows: tuple[int, ...]   # mu labels
    cols: tuple[int, ...]   # i labels


@dataclass
class ConvexCombination:
    terms: list[tuple[Fraction, tuple[int, ...]]]

    def to_json(self) -> list[dict]:
        from .graph import format_rational
        return [{"weight": format_rational(w), "perm": [k + 1 for k in p]} for w, p in self.terms]


@dataclass
class DecompositionWitness:
    residual: dict
    trace: dict
    peeled: list = field(default_factory=list)


def point_size(pt: dict) -> int:
    return 1 + max(max(k) for k in pt) if pt else 0


def _clean(pt: dict) -> dict:
    return {v: Fraction(a) for v, a in pt.items() if a != 0}


def require_hull_feasible(pt: dict, n: int) -> None:
    res = evaluate_point(build_hull_system(n), pt)
    if not res.feasible:
        raise NotHullFeasible(f"point is not hull-feasible (rows {res.nonzero_rows()[:5]}, "
                              f"negative {res.negative[:3]}, unknown {res.unknown[:3]})")


# -- blocks --------------------------------------------------------------------

def extract_block(pt: dict, j: int, nu: int, n: int | None = None) -> StochasticBlock:
    n = n or point_size(pt)
    rows = tuple(mu for mu in range(n) if mu != nu)
    cols = tuple(i for i in range(n) if i != j)
    entries = tuple(tuple(Fraction(pt.get(xvar(i, j, mu, nu), 0)) for i in cols) for mu in rows)
    scale = Fraction(pt.get((j, nu), 0))
    if any(a < 0 for r in entries for a in r):
        raise NotHullFeasible(f"negative entry in block ({j}, {nu})")
    if any(sum(r) != scale for r in entries) or any(sum(c) != scale for c in zip(*entries)):
        raise NotHullFeasible(f"block ({j}, {nu}) sums differ from y = {scale}")
    return StochasticBlock(j, nu, scale, entries, rows, cols)


def _perfect_matching(support: list[list[bool]]) -> list[int] | None:
    """Row -> column perfect matching on a boolean support (augmenting paths)."""
    m = len(support)
    match_col = [-1] * m

    def augment(r, seen):
        for c in range(m):
            if support[r][c] and not seen[c]:
                seen[c] = True
                if match_col[c] < 0 or augment(match_col[c], seen):
                    match_col[c] = r
                    return True
        return False

    for r in range(m):
        if not augment(r, [False] * m):
            return None
    perm = [0] * m
    for c, r in enumerate(match_col):
        perm[r] = c
    return perm


def birkhoff_decompose(block) -> list[tuple[Fraction, tuple[int, ...]]]:
    """Weighted permutations summing exactly to a scaled doubly stochastic matrix.

    Accepts a :class:`StochasticBlock` or a square nested sequence.  A term
    ``(w, p)`` stands for ``w`` times the matrix with ones at ``(r, p[r])``.
    """
    entries = block.entries if isinstance(block, StochasticBlock) else block
    rest = [[Fraction(a) for a in r] for r in entries]
    m = len(rest)
    if m == 0:
        return []
    scale = sum(rest[0])
    if any(sum(r) != scale for r in rest) or any(sum(c) != scale for c in zip(*rest)) \
            or any(a < 0 for r in rest for a in r):
        raise ValueError("block is not a scaled doubly stochastic matrix")
    terms = []
    while any(a for r in rest for a in r):
        perm = _perfect_matching([[a > 0 for a in r] for r in rest])
        if perm is None:
            raise ValueError("no perfect matching in the remaining support")
        lam = min(rest[r][perm[r]] for r in range(m))
        for r in range(m):
            rest[r][perm[r]] -= lam
        terms.append((lam, tuple(perm)))
    return terms


def permutation_matrix_sum(terms, m: int) -> list[list[Fraction]]:
    out = [[Fraction(0)] * m for _ in range(m)]
    for w, p in terms:
        for r in range(m):
            out[r][p[r]] += w
    return out


# -- global peeling --------------------------------------------------------------

def _search(pt: dict, n: int):
    """First permutation (lexicographic) whose guess lies in the support of ``pt``.

    Returns ``(perm, None)`` or ``(None, trace)`` where the trace describes the
    first dead end: the prefix, the position that could not be filled, and
    for each candidate vertex the earlier position whose box entry is zero
    (``None`` when the y entry itself is zero).
    """
    get = pt.get
    p: list[int] = []
    used = [False] * n
    first_dead: list = []

    def rec(i: int) -> bool:
        if i == n:
            return True
        blocked = []
        for mu in range(n):
            if used[mu]:
                continue
            if not get((i, mu), 0) > 0:
                blocked.append([mu, None])
                continue
            bad = next((k for k in range(i) if not get((k, i, p[k], mu), 0) > 0), None)
            if bad is not None:
                blocked.append([mu, bad])
                continue
            used[mu] = True
            p.append(mu)
            if rec(i + 1):
                return True
            p.pop()
            used[mu] = False
        if not first_dead:
            first_dead.append({"prefix": list(p), "position": i, "blocked": blocked})
        return False

    if rec(0):
        return tuple(p), None
    return None, (first_dead[0] if first_dead else {"prefix": [], "position": 0, "blocked": []})


def peel_guess(pt: dict, n: int | None = None) -> tuple[int, ...] | None:
    return _search(pt, n or point_size(pt))[0]


def guess_coordinates(p) -> list:
    n = len(p)
    return [(i, j, p[i], p[j]) for i in range(n) for j in range(i + 1, n)] + [(j, p[j]) for j in range(n)]


def decompose_point(pt: dict, n: int | None = None):
    """Greedy peeling into guesses.

    Returns a :class:`ConvexCombination` when the residual reaches zero and a
    :class:`DecompositionWitness` when some nonzero residual supports no guess.
    Greedy failure alone does not prove the point lies outside the hull; see
    :func:`hull_membership`.
    """
    n = n or point_size(pt)
    require_hull_feasible(pt, n)
    rest = _clean(pt)
    terms = []
    while rest:
        p, trace = _search(rest, n)
        if p is None:
            return DecompositionWitness(rest, trace, terms)
        coords = guess_coordinates(p)
        lam = min(rest[c] for c in coords)
        for c in coords:
            rest[c] -= lam
            if rest[c] == 0:
                del rest[c]
        terms.append((lam, p))
    return ConvexCombination(terms)


def combination_point(c: ConvexCombination) -> dict:
    out: dict = {}
    for w, p in c.terms:
        for v, a in guess_point(p).items():
            out[v] = out.get(v, 0) + w * a
    return _clean(out)


def verify_combination(pt: dict, c: ConvexCombination) -> bool:
    if not c.terms or any(w <= 0 for w, _ in c.terms) or sum(w for w, _ in c.terms) != 1:
        return False
    return combination_point(c) == _clean(pt)


def verify_witness(w: DecompositionWitness, n: int) -> bool:
    """No permutation has full positive support on the residual (exhaustive scan)."""
    if not w.residual:
        return False
    for p in itertools.permutations(range(n)):
        if all(w.residual.get(c, 0) > 0 for c in guess_coordinates(p)):
            return False
    return True


# -- exact membership ------------------------------------------------------------

@dataclass
class Separator:
    """Vector ``h`` over coordinates with ``h.guess >= 0`` for every guess and
    ``h.pt < 0``.  Coordinates not listed in ``h`` carry the value ``outside``.
    """

    h: dict
    outside: Fraction


def supported_permutations(pt: dict, n: int) -> list[tuple[int, ...]]:
    out = []
    get = pt.get
    p: list[int] = []
    used = [False] * n

    def rec(i):
        if i == n:
            out.append(tuple(p))
            return
        for mu in range(n):
            if used[mu] or not get((i, mu), 0) > 0:
                continue
            if all(get((k, i, p[k], mu), 0) > 0 for k in range(i)):
                used[mu] = True
                p.append(mu)
                rec(i + 1)
                p.pop()
                used[mu] = False

    rec(0)
    return out


def hull_membership(pt: dict, n: int | None = None):
    """Exact test of whether ``pt`` is a convex combination of guesses.

    Returns ``(ConvexCombination, None)`` or ``(None, Separator)``.
    """
    n = n or point_size(pt)
    require_hull_feasible(pt, n)
    pt = _clean(pt)
    support = sorted(pt, key=lambda v: (len(v), v))
    perms = supported_permutations(pt, n)
    if not perms:
        # every guess leaves the support, so it pays `outside` at least once
        h = {v: Fraction(-1) for v in support}
        return None, Separator(h, Fraction(len(guess_coordinates(range(n))) + 1))
    keys = [("perm", p) for p in perms]
    rows = []
    member = {v: [] for v in support}
    for key, p in zip(keys, perms):
        for c in guess_coordinates(p):
            member[c].append(key)
    for v in support:
        rows.append(Row(tuple((k, Fraction(1)) for k in member[v]), pt[v], f"coord:{v}"))
    rows.append(Row(tuple((k, Fraction(1)) for k in keys), Fraction(1), "mass"))
    sys = LinearSystem(n, tuple(keys), tuple(rows))
    out = solve_feasibility(sys)
    if not verify_certificate(sys, out):
        from .lpsolve import SolverAnomaly
        raise SolverAnomaly("membership outcome failed certificate verification")
    if out.status != INFEASIBLE:
        terms = [(out.point[k], k[1]) for k in keys if out.point.get(k, 0) > 0]
        return ConvexCombination(terms), None
    u = out.farkas
    h = {v: u[k] for k, v in enumerate(support)}
    mass = u[-1]
    for v in support:
        if not is_x(v):
            h[v] += mass / n
    outside = sum(abs(a) for a in h.values()) + 1
    return None, Separator(h, outside)


def verify_separator(pt: dict, sep: Separator, n: int) -> bool:
    """Check ``h.pt < 0`` and ``h.guess >= 0`` for all ``n!`` guesses."""
    pt = _clean(pt)
    if sum((sep.h.get(v, sep.outside) * a for v, a in pt.items()), Fraction(0)) >= 0:
        return False
    for p in itertools.permutations(range(n)):
        if sum((sep.h.get(c, sep.outside) for c in guess_coordinates(p)), Fraction(0)) < 0:
            return False
    return True
