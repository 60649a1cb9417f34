"""Compatibility boxes, the compatibility matrix, and solution grids.

Box (i, j) answers: can the digraph pair (mu, nu) be relabeled onto the cycle
positions (i, j) without breaking adjacency?  The matrix is stored densely as
an ``(n, n, n, n)`` 0/1 array indexed ``[i, j, mu, nu]``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .graph import Digraph, standard_cycle

GRID_GUARD = 9


class GuardExceeded(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class CompatMatrix:
    n: int
    boxes: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.boxes.setflags(write=False)

    def box(self, i: int, j: int) -> np.ndarray:
        return self.boxes[i, j]

    def __getitem__(self, idx) -> int:
        return int(self.boxes[idx])

    def block_matrix(self) -> np.ndarray:
        """The n^2 x n^2 matrix with box (i, j) at block row i, block column j."""
        n = self.n
        return self.boxes.transpose(0, 2, 1, 3).reshape(n * n, n * n)

    def dump(self) -> str:
        n = self.n
        lines = []
        for i in range(n):
            if i:
                lines.append("")
            for mu in range(n):
                parts = ["".join(str(int(v)) for v in self.boxes[i, j, mu]) for j in range(n)]
                lines.append(" ".join(parts))
        return "\n".join(lines) + "\n"


def build_box(g: Digraph, s: Digraph, i: int, j: int) -> np.ndarray:
    n = g.n
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"box index ({i}, {j}) out of range for n={n}")
    if i == j:
        # a position can only be relabeled onto a single vertex
        return np.eye(n, dtype=np.int8)
    a = g.array()
    sij, sji = s.adjacency[i][j], s.adjacency[j][i]
    ok = (sij <= a) & (sji <= a.T)
    np.fill_diagonal(ok, False)
    return ok.astype(np.int8)


def build_compat_matrix(g: Digraph) -> CompatMatrix:
    n = g.n
    s = standard_cycle(n)
    boxes = np.empty((n, n, n, n), dtype=np.int8)
    for i in range(n):
        for j in range(n):
            boxes[i, j] = build_box(g, s, i, j)
    return CompatMatrix(n, boxes)


def box_identity_violations(c: CompatMatrix) -> list[str]:
    """Entrywise check of C_ji = C_ij^T, C_ii = I and zero diagonals off the box diagonal."""
    n = c.n
    out = []
    eye = np.eye(n, dtype=np.int8)
    for i in range(n):
        if not np.array_equal(c.boxes[i, i], eye):
            out.append(f"C_{i + 1}{i + 1} is not the identity")
        for j in range(n):
            if not np.array_equal(c.boxes[j, i], c.boxes[i, j].T):
                out.append(f"C_{j + 1}{i + 1} != C_{i + 1}{j + 1}^T")
            if i != j and np.diagonal(c.boxes[i, j]).any():
                out.append(f"C_{i + 1}{j + 1} has a nonzero diagonal")
    return out


def check_solution_grid(p, c: CompatMatrix) -> bool:
    p = tuple(p)
    if len(p) != c.n:
        raise ValueError(f"permutation of size {len(p)} against compat matrix of size {c.n}")
    idx = np.array(p)
    # sub[i, j] = c[i, j, p(i), p(j)]
    sub = c.boxes[np.arange(c.n)[:, None], np.arange(c.n)[None, :], idx[:, None], idx[None, :]]
    return bool(sub.all())


def enumerate_solution_grids(c: CompatMatrix, limit: int | None = None) -> list[tuple[int, ...]]:
    """All permutations passing the grid test, in lexicographic order.

    Backtracks over p(0), p(1), ... and checks every box against the already
    placed positions, so a dead prefix is abandoned at its first zero entry.
    """
    n = c.n
    if limit is None and n > GRID_GUARD:
        raise GuardExceeded(f"grid enumeration guarded at n <= {GRID_GUARD}; pass a limit")
    b = c.boxes
    out: list[tuple[int, ...]] = []
    p: list[int] = []
    used = [False] * n

    def rec(i: int) -> bool:
        if i == n:
            out.append(tuple(p))
            return limit is not None and len(out) >= limit
        for mu in range(n):
            if used[mu]:
                continue
            if all(b[k, i, p[k], mu] for k in range(i)):
                used[mu] = True
                p.append(mu)
                stop = rec(i + 1)
                p.pop()
                used[mu] = False
                if stop:
                    return True
        return False

    rec(0)
    return out


def zero_indices(c: CompatMatrix) -> frozenset[tuple[int, int, int, int]]:
    """Quadruples (i, j, mu, nu), i != j, mu != nu, whose compatibility entry is 0."""
    n = c.n
    out = set()
    for i, j, mu, nu in itertools.product(range(n), repeat=4):
        if i != j and mu != nu and not c.boxes[i, j, mu, nu]:
            out.add((i, j, mu, nu))
    return frozenset(out)
