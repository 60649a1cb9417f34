"""Exact simplex for ``min c.x  s.t.  A x = b, x >= 0``.

The tableau is kept fraction-free: every entry is an integer equal to
``d`` times the rational tableau value, where ``d`` is the determinant of
the current basis (Edmonds/Bareiss pivoting).  Each pivot divides exactly by
the previous ``d``, so entries stay integral and small.  Arrays start as
``int64`` and switch to Python ``int`` objects before any product could
overflow.

Larger systems first ask HiGHS for an optimal basis.  The float answer is
only a nomination: the basic columns are solved exactly with FLINT and the
point and duals are checked in integer arithmetic.  When that check fails,
or for small systems, the exact tableau runs alone, crashed with the
nominated columns when there are any.  Its pricing is steepest edge with a
lexicographic ratio test, falling back to Bland's rule on long degenerate
stalls.  Runs are deterministic.

Every outcome carries a certificate that :func:`verify_certificate` checks
with ``Fraction`` arithmetic alone:

* Feasible / Optimal: a point; Optimal also a dual vector ``y`` with
  ``c - A^T y >= 0`` and ``b.y == c.x``.
* Infeasible: Farkas multipliers ``u`` with ``u^T A >= 0`` and ``u.b < 0``.
* Unbounded: a feasible point and a ray ``r >= 0`` with ``A r = 0``, ``c.r < 0``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

import flint
import highspy
import numpy as np

from .polytope import LinearSystem, evaluate_point

FEASIBLE = "Feasible"
INFEASIBLE = "Infeasible"
OPTIMAL = "Optimal"
UNBOUNDED = "Unbounded"

_SAFE = 2 ** 31
BLAND_AFTER = 1000
PRICING = "steepest"
EXACT_ONLY_BELOW = 40   # smaller systems skip the float seed


class SolverAnomaly(RuntimeError):
    """An outcome failed its own certificate check."""


@dataclass
class SolveOutcome:
    status: str
    point: dict | None = None
    objective: Fraction | None = None
    farkas: list | None = None
    dual: list | None = None
    ray: dict | None = None
    pivots: int = field(default=0, compare=False)


# -- presolve ----------------------------------------------------------------

class _Presolve:
    """Zero forcing: a homogeneous row whose live coefficients share one sign
    pins all of its live variables to 0.

    Each forcing event stores the row combination that proves it: a multiplier
    vector ``u`` with ``u.b = 0`` and ``u^T A >= 0`` everywhere, strictly
    positive on the forced variables.
    """

    def __init__(self, rows: list[dict], rhs: list[Fraction]):
        self.rows = rows
        self.rhs = rhs
        self.forced: dict = {}         # var -> event index
        self.events: list[tuple[dict, dict]] = []   # (u, u^T A)
        self.infeasible: dict | None = None

    def combo(self, u: dict) -> dict:
        vec: dict = {}
        for r, m in u.items():
            for v, a in self.rows[r].items():
                vec[v] = vec.get(v, 0) + m * a
        return vec

    def _lift(self, u: dict, vec: dict) -> tuple[dict, dict]:
        """Add proofs of forced variables until ``vec`` is >= 0 on them."""
        u, vec = dict(u), dict(vec)
        for v in list(self.forced):
            a = vec.get(v, 0)
            if a >= 0:
                continue
            pu, pvec = self.events[self.forced[v]]
            t = -a / pvec[v]
            for r, m in pu.items():
                u[r] = u.get(r, 0) + t * m
            for w, b in pvec.items():
                vec[w] = vec.get(w, 0) + t * b
        return u, vec

    def run(self) -> None:
        changed = True
        while changed and self.infeasible is None:
            changed = False
            for r, row in enumerate(self.rows):
                live = {v: a for v, a in row.items() if v not in self.forced and a != 0}
                b = self.rhs[r]
                signs = {a > 0 for a in live.values()}
                if b == 0:
                    if not live or len(signs) != 1:
                        continue
                    sign = 1 if True in signs else -1
                    u, vec = self._lift({r: Fraction(sign)}, self.combo({r: Fraction(sign)}))
                    self.events.append((u, vec))
                    for v in live:
                        self.forced[v] = len(self.events) - 1
                    changed = True
                elif not live or signs == {b < 0}:
                    # every live term has the wrong sign for a nonzero rhs
                    sign = Fraction(-1 if b > 0 else 1)
                    u, _ = self._lift({r: sign}, self.combo({r: sign}))
                    self.infeasible = u
                    return

    def lift_farkas(self, u: dict) -> dict:
        return self._lift(u, self.combo(u))[0]

    def lift_dual(self, y: dict, cost: dict) -> dict:
        """Lower ``y`` along forcing proofs until forced columns price out >= 0."""
        y = dict(y)
        vec = self.combo(y)
        for v in self.forced:
            slack = cost.get(v, 0) - vec.get(v, 0)
            if slack >= 0:
                continue
            pu, pvec = self.events[self.forced[v]]
            t = -slack / pvec[v]
            for r, m in pu.items():
                y[r] = y.get(r, 0) - t * m
            for w, b in pvec.items():
                vec[w] = vec.get(w, 0) - t * b
        return y


# -- fraction-free tableau -----------------------------------------------------

class _Tableau:
    def __init__(self, A: list[list[int]], b: list[int], ncols: int):
        m = len(A)
        big = max([abs(x) for row in A for x in row] + [abs(x) for x in b] + [1])
        dtype = np.int64 if big < _SAFE else object
        T = np.zeros((m + 1, ncols + m + 1), dtype=dtype)
        for r in range(m):
            T[r, :ncols] = A[r]
            T[r, ncols + r] = 1
            T[r, -1] = b[r]
        T[m, :ncols] = -T[:m, :ncols].sum(axis=0)
        T[m, -1] = -T[:m, -1].sum()
        self.T = T
        self.m = m
        self.N = ncols
        self.basis = [ncols + r for r in range(m)]
        self.width = m
        self.d = 1
        self.pivots = 0

    def pivot(self, r: int, j: int) -> None:
        T = self.T
        if T.dtype != object and int(np.abs(T).max()) >= _SAFE:
            T = self.T = T.astype(object)
        p = T[r, j]
        prow = T[r].copy()
        col = T[:, j].copy()
        num = T * p - np.outer(col, prow)
        if T.dtype != object:
            assert not (num % self.d).any(), "inexact fraction-free division"
        T = num // self.d
        T[r] = prow
        if p < 0:
            T = -T
            p = -p
        self.T = T
        self.d = int(p)
        self.basis[r] = j
        self.pivots += 1

    def run(self, allowed: int) -> int | None:
        """Simplex iterations on columns < ``allowed``; returns an unbounded column or None.

        Dantzig pricing (most negative reduced cost, lowest index on ties).
        After ``BLAND_AFTER`` consecutive degenerate pivots the rule switches
        to Bland's until the objective moves again, which rules out cycling.
        """
        m = self.m
        stall = 0
        while True:
            obj = self.T[m, :allowed]
            if stall >= BLAND_AFTER:
                neg = np.flatnonzero(obj < 0)
                if neg.size == 0:
                    return None
                j = int(neg[0])
            elif PRICING == "steepest":
                neg = np.flatnonzero(obj < 0)
                if neg.size == 0:
                    return None
                cols = self.T[:m, neg].astype(np.float64)
                score = obj[neg].astype(np.float64) ** 2 / (1.0 + (cols * cols).sum(axis=0))
                j = int(neg[int(np.argmax(score))])
            else:
                j = int(np.argmin(obj))
                if not obj[j] < 0:
                    return None
            col = self.T[:m, j]
            rhs = self.T[:m, -1]
            best = None
            for r in np.flatnonzero(col > 0):
                r = int(r)
                if best is None or self._before(r, best, j, stall < BLAND_AFTER):
                    best = r
            if best is None:
                return j
            stall = stall + 1 if rhs[best] == 0 else 0
            self.pivot(best, j)

    def crash(self, cols: list[int]) -> bool:
        """Pivot ``cols`` into the basis on artificial rows; True if the result is primal feasible."""
        for j in cols:
            for r in np.flatnonzero(self.T[:self.m, j] != 0):
                if self.basis[int(r)] >= self.N:
                    self.pivot(int(r), j)
                    break
        return bool((self.T[:self.m, -1] >= 0).all())

    def _before(self, r: int, best: int, j: int, lex: bool) -> bool:
        """Lexicographic ratio test: compare (rhs, B^-1) rows of ``r`` and ``best`` over column ``j``."""
        T = self.T
        a, b = int(T[r, j]), int(T[best, j])
        lhs, cur = int(T[r, -1]) * b, int(T[best, -1]) * a
        if lhs != cur:
            return lhs < cur
        for k in range(self.N, self.N + self.width) if lex else ():
            lhs, cur = int(T[r, k]) * b, int(T[best, k]) * a
            if lhs != cur:
                return lhs < cur
        return self.basis[r] < self.basis[best]

    def drop_row(self, r: int) -> None:
        self.T = np.delete(self.T, r, axis=0)
        del self.basis[r]
        self.m -= 1

    def value(self, r: int) -> Fraction:
        return Fraction(int(self.T[r, -1]), self.d)


def _integer_rows(sys: LinearSystem, index: dict):
    rows, rhs, scale = [], [], []
    for row in sys.rows:
        s = lcm(row.rhs.denominator, *(a.denominator for _, a in row.coeffs)) if row.coeffs else row.rhs.denominator
        rows.append({index[v]: int(a * s) for v, a in row.coeffs if a != 0})
        rhs.append(int(row.rhs * s))
        scale.append(s)
    return rows, rhs, scale


def _scaled(vals: list[Fraction]) -> tuple[np.ndarray, int]:
    """Integer vector ``v * L`` and ``L``, with ``L`` the common denominator."""
    L = lcm(*(v.denominator for v in vals))
    ints = [int(v * L) for v in vals]
    big = max([abs(v) for v in ints] + [1])
    return np.array(ints, dtype=np.int64 if big < 2 ** 40 else object), L


def _times(M: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Exact ``M v``: int64 when no partial sum can reach 2**62, else Python ints."""
    if v.dtype != object and M.dtype != object and M.size and np.abs(M).sum(axis=1).max() < 2 ** 21:
        return M.dot(v)
    return M.astype(object).dot(v.astype(object))


def _float_basis(A: np.ndarray, b: list[int], cost: list[int]):
    """HiGHS simplex on ``min cost.x, A x = b, x >= 0``: ``(basic columns, tight rows, value)`` or None.

    Tight rows are those whose slack is nonbasic; with the basic columns they
    index a square basis matrix.
    """
    m, N = A.shape
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("threads", 1)
    h.setOptionValue("random_seed", 0)
    lp = highspy.HighsLp()
    lp.num_col_, lp.num_row_ = N, m
    lp.col_cost_ = np.asarray(cost, dtype=np.float64)
    lp.col_lower_ = np.zeros(N)
    lp.col_upper_ = np.full(N, highspy.kHighsInf)
    lp.row_lower_ = lp.row_upper_ = np.asarray(b, dtype=np.float64)
    nz = A != 0
    lp.a_matrix_.format_ = highspy.MatrixFormat.kColwise
    lp.a_matrix_.start_ = np.r_[0, np.cumsum(nz.sum(axis=0))].astype(np.int32)
    rows, cols = np.nonzero(nz.T)
    lp.a_matrix_.index_ = cols.astype(np.int32)
    lp.a_matrix_.value_ = A.T[rows, cols].astype(np.float64)
    h.passModel(lp)
    h.run()
    if h.getModelStatus() != highspy.HighsModelStatus.kOptimal:
        return None
    basis = h.getBasis()
    if not basis.valid:
        return None
    basic = highspy.HighsBasisStatus.kBasic
    bcols = [j for j, st in enumerate(basis.col_status) if st == basic]
    trows = [i for i, st in enumerate(basis.row_status) if st != basic]
    if len(bcols) != len(trows):
        return None
    return bcols, trows, h.getInfo().objective_function_value


def _fractions(M) -> list[Fraction]:
    return [Fraction(int(M[i, 0].p), int(M[i, 0].q)) for i in range(M.nrows())]


def _basis_values(A: np.ndarray, b: list[int], cost: list[int] | None, bcols: list[int], trows: list[int]):
    """Exact basic solution and duals of a nominated basis.

    Returns ``(point, y)`` with ``point`` >= 0 satisfying every row exactly
    and ``y`` exactly dual feasible (when ``cost`` is given), else None.
    """
    m = A.shape[0]
    B = flint.fmpz_mat(A[trows][:, bcols].tolist()) if bcols else None
    try:
        xb = _fractions(B.solve(flint.fmpz_mat([[b[i]] for i in trows]))) if bcols else []
    except ZeroDivisionError:
        return None
    if any(v < 0 for v in xb):
        return None
    if xb:
        xv, L = _scaled(xb)
        if [int(t) for t in _times(A[:, bcols], xv)] != [q * L for q in b]:
            return None
    elif any(b):
        return None
    point = {c: v for c, v in zip(bcols, xb) if v}
    if cost is None:
        return point, None
    yr = _fractions(B.transpose().solve(flint.fmpz_mat([[cost[c]] for c in bcols]))) if bcols else []
    y = [Fraction(0)] * m
    for i, v in zip(trows, yr):
        y[i] = v
    yv, L = _scaled(y)
    if any(c * L - int(t) < 0 for c, t in zip(cost, _times(A.T, yv))):
        return None
    return point, y


def _guided(A: list[list[int]], b: list[int], cint: list | None):
    """Solve through a float hint: ``(result or None, crash columns)``.

    The float solver only nominates a basis.  Values are recomputed exactly
    and rejected unless they check exactly, so a wrong hint costs time,
    never correctness.
    """
    Ai = np.array(A, dtype=np.int64)
    m, N = Ai.shape
    if cint is not None:
        hint = _float_basis(Ai, b, cint)
        if hint is not None:
            found = _basis_values(Ai, b, cint, hint[0], hint[1])
            if found is not None:
                return _Result(OPTIMAL, 0, point=found[0], y=found[1]), None
            return None, hint[0]
    # phase-I shape: minimize the artificial sum over [A I]
    ext = np.hstack([Ai, np.eye(m, dtype=np.int64)])
    cost = [0] * N + [1] * m
    hint = _float_basis(ext, b, cost)
    if hint is None:
        return None, None
    crash = [c for c in hint[0] if c < N]
    if hint[2] < 0.5:
        if cint is not None:
            return None, crash
        found = _basis_values(ext, b, None, hint[0], hint[1])
        if found is None or any(c >= N for c in found[0]):
            return None, crash
        return _Result(FEASIBLE, 0, point=found[0]), crash
    found = _basis_values(ext, b, cost, hint[0], hint[1])
    if found is None:
        return None, crash
    return _Result(INFEASIBLE, 0, y=[-v for v in found[1]]), crash


def _solve(sys: LinearSystem, with_objective: bool) -> SolveOutcome:
    variables = list(sys.variables)
    index = {v: k for k, v in enumerate(variables)}
    irows, irhs, scale = _integer_rows(sys, index)

    cost = {}
    if with_objective:
        if sys.objective is None:
            raise ValueError("minimize needs a system with an objective")
        unknown = [v for v in sys.objective if v not in index]
        if unknown:
            raise ValueError(f"objective references unknown variables {unknown[:3]}")
        cost = {index[v]: Fraction(a) for v, a in sys.objective.items() if a != 0}

    pre = _Presolve([{v: Fraction(a) for v, a in r.items()} for r in irows], [Fraction(b) for b in irhs])
    pre.run()

    def farkas_out(u: dict, pivots: int = 0) -> SolveOutcome:
        vec = [Fraction(u.get(r, 0)) * scale[r] for r in range(len(irows))]
        return SolveOutcome(INFEASIBLE, farkas=vec, pivots=pivots)

    if pre.infeasible is not None:
        return farkas_out(pre.infeasible)

    live = [k for k in range(len(variables)) if k not in pre.forced]
    keep = []
    for r, row in enumerate(irows):
        if any(k not in pre.forced for k in row):
            keep.append(r)
        elif irhs[r] != 0:
            raise AssertionError("presolve left an unsatisfiable empty row")
    flip = [(-1 if irhs[r] < 0 else 1) for r in keep]
    A = [[flip[i] * irows[r].get(k, 0) for k in live] for i, r in enumerate(keep)]
    b = [flip[i] * irhs[r] for i, r in enumerate(keep)]
    s_c = lcm(*(a.denominator for a in cost.values())) if cost else 1
    cint = [int(cost.get(k, 0) * s_c) for k in live]

    ci = cint if with_objective else None
    res, crash = None, None
    if len(live) > EXACT_ONLY_BELOW:
        res, crash = _guided(A, b, ci)
    if res is None:
        res = _exact(A, b, ci, crash)
    if res.kind == UNBOUNDED:
        point = {variables[live[c]]: v for c, v in res.point.items()}
        ray = {variables[live[c]]: v for c, v in res.ray.items()}
        return SolveOutcome(UNBOUNDED, point=point, ray=ray, pivots=res.pivots)
    # row multipliers in the integer-row space of the kept rows
    y = {keep[k]: res.y[k] * flip[k] for k in range(len(keep))} if res.y is not None else {}
    if res.kind == INFEASIBLE:
        return farkas_out(pre.lift_farkas(y), res.pivots)
    point = {variables[live[c]]: v for c, v in res.point.items()}
    if not with_objective:
        return SolveOutcome(FEASIBLE, point=point, pivots=res.pivots)
    y = {r: m / s_c for r, m in y.items()}
    dual_y = pre.lift_dual(y, cost)
    obj = sum((a * point.get(variables[k], 0) for k, a in cost.items()), Fraction(0))
    dual = [Fraction(dual_y.get(r, 0)) * scale[r] for r in range(len(irows))]
    return SolveOutcome(OPTIMAL, point=point, objective=obj, dual=dual, pivots=res.pivots)


@dataclass
class _Result:
    kind: str
    pivots: int
    point: dict | None = None      # column -> value
    y: list | None = None          # multipliers of the kept rows (flipped space)
    ray: dict | None = None


def _exact(A: list[list[int]], b: list[int], cint: list | None, crash: list | None = None) -> _Result:
    """Exact two-phase simplex on ``A x = b`` (``b >= 0``).

    ``crash`` lists columns to pivot into the starting basis first; the
    start is discarded if it is not primal feasible.  Infeasible gives Farkas
    multipliers ``u`` (``u^T A >= 0``, ``u.b < 0``); Optimal gives duals ``y``
    in units of the integer costs ``cint``.
    """
    m0 = len(A)
    N = len(A[0]) if A else 0
    tab = _Tableau(A, b, N)
    if crash and not tab.crash(crash):
        tab = _Tableau(A, b, N)
    if tab.T[tab.m, -1] != 0:
        tab.run(N + tab.m)
    if tab.T[tab.m, -1] != 0:
        # phase-I optimum positive; u_k = reduced cost of artificial k minus 1
        u = [Fraction(int(tab.T[tab.m, N + k]), tab.d) - 1 for k in range(m0)]
        return _Result(INFEASIBLE, tab.pivots, y=u)

    # drive remaining artificials out of the basis, dropping redundant rows
    r = 0
    while r < tab.m:
        if tab.basis[r] >= N:
            nz = np.flatnonzero(tab.T[r, :N] != 0)
            if nz.size:
                tab.pivot(r, int(nz[0]))
            else:
                tab.drop_row(r)
                continue
        r += 1

    if cint is None:
        return _Result(FEASIBLE, tab.pivots, point=_point(tab, N))

    c_ext = np.zeros(tab.T.shape[1], dtype=object)
    c_ext[:N] = cint
    cb = np.array([c_ext[bv] for bv in tab.basis], dtype=object)
    objrow = c_ext * tab.d - cb.dot(tab.T[:tab.m].astype(object))
    if tab.T.dtype != object and max(abs(int(x)) for x in objrow) >= _SAFE:
        tab.T = tab.T.astype(object)
    tab.T[tab.m] = objrow
    ray_col = tab.run(N)
    if ray_col is not None:
        ray = {ray_col: Fraction(1)}
        for r in range(tab.m):
            a = int(tab.T[r, ray_col])
            if a and tab.basis[r] < N:
                ray[tab.basis[r]] = Fraction(-a, tab.d)
        return _Result(UNBOUNDED, tab.pivots, point=_point(tab, N), ray=ray)
    y = [-Fraction(int(tab.T[tab.m, N + k]), tab.d) for k in range(m0)]
    return _Result(OPTIMAL, tab.pivots, point=_point(tab, N), y=y)


def _point(tab: _Tableau, N: int) -> dict:
    point = {}
    for r in range(tab.m):
        bv = tab.basis[r]
        if bv < N:
            val = tab.value(r)
            if val:
                point[bv] = val
    return point


def solve_feasibility(sys: LinearSystem) -> SolveOutcome:
    return _solve(sys, with_objective=False)


def minimize(sys: LinearSystem) -> SolveOutcome:
    return _solve(sys, with_objective=True)


# -- certificate checks --------------------------------------------------------

def _column_sums(sys: LinearSystem, mult) -> dict:
    out: dict = {}
    for r, row in enumerate(sys.rows):
        m = mult[r]
        if m:
            for v, a in row.coeffs:
                out[v] = out.get(v, 0) + m * a
    return out


def verify_certificate(sys: LinearSystem, out: SolveOutcome) -> bool:
    """Re-check every claim of ``out`` against ``sys`` in exact arithmetic."""
    if out.status in (FEASIBLE, OPTIMAL, UNBOUNDED):
        if out.point is None or not evaluate_point(sys, out.point).feasible:
            return False
    if out.status == FEASIBLE:
        return True
    if out.status == INFEASIBLE:
        u = out.farkas
        if u is None or len(u) != len(sys.rows):
            return False
        sums = _column_sums(sys, u)
        if any(sums.get(v, 0) < 0 for v in sys.variables):
            return False
        return sum((m * r.rhs for m, r in zip(u, sys.rows)), Fraction(0)) < 0
    if sys.objective is None:
        return False
    cost = sys.objective
    if out.status == OPTIMAL:
        y = out.dual
        if y is None or len(y) != len(sys.rows):
            return False
        sums = _column_sums(sys, y)
        if any(cost.get(v, 0) - sums.get(v, 0) < 0 for v in sys.variables):
            return False
        primal = sum((a * out.point.get(v, 0) for v, a in cost.items()), Fraction(0))
        dual = sum((m * r.rhs for m, r in zip(y, sys.rows)), Fraction(0))
        return primal == dual == out.objective
    if out.status == UNBOUNDED:
        ray = out.ray or {}
        if any(a < 0 for a in ray.values()) or any(v not in set(sys.variables) for v in ray):
            return False
        for row in sys.rows:
            if sum((a * ray.get(v, 0) for v, a in row.coeffs), Fraction(0)) != 0:
                return False
        return sum((a * ray.get(v, 0) for v, a in cost.items()), Fraction(0)) < 0
    return False


def checked(sys: LinearSystem, out: SolveOutcome) -> SolveOutcome:
    if not verify_certificate(sys, out):
        raise SolverAnomaly(f"{out.status} outcome failed certificate verification")
    return out
