"""The guess polytope as an exact linear system, its cuts and objective.

Variables are keyed by tuples.  An X variable is ``(i, j, mu, nu)`` with
``i < j``; the mirrored coordinate ``(j, i, nu, mu)`` is the same variable, so
the symmetry of the box matrix never appears as a constraint row.  A Y
variable is ``(j, nu)``.  All indices are 0-based.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field, replace
from decimal import Decimal
from fractions import Fraction
from typing import Hashable, Iterable, Mapping

from .graph import INF, Digraph, WeightMatrix, format_rational, parse_rational, standard_cycle

RationalPoint = dict

FAMILY_PAIR = "pair"      # sum over mu of x(i,j,mu,nu) = y(j,nu)
FAMILY_POSITION = "pos"   # sum over i of x(i,j,mu,nu) = y(j,nu)
FAMILY_SIMPLEX = "simplex"  # sum over nu of y(j,nu) = 1


def xvar(i: int, j: int, mu: int, nu: int) -> tuple[int, int, int, int]:
    """Canonical key of x(i,j,mu,nu)."""
    if i == j or mu == nu:
        raise ValueError(f"x({i},{j},{mu},{nu}) needs i != j and mu != nu")
    return (i, j, mu, nu) if i < j else (j, i, nu, mu)


def yvar(j: int, nu: int) -> tuple[int, int]:
    return (j, nu)


def is_x(v) -> bool:
    return len(v) == 4


def var_name(v) -> str:
    return ("x_" if is_x(v) else "y_") + "_".join(str(k + 1) for k in v)


def parse_var_name(name: str):
    kind, *idx = name.split("_")
    key = tuple(int(k) - 1 for k in idx)
    if (kind, len(key)) not in (("x", 4), ("y", 2)):
        raise ValueError(f"bad variable name {name!r}")
    return key


def x_variables(n: int) -> list[tuple[int, int, int, int]]:
    return [(i, j, mu, nu) for i in range(n) for j in range(i + 1, n)
            for mu in range(n) for nu in range(n) if mu != nu]


def y_variables(n: int) -> list[tuple[int, int]]:
    return [(j, nu) for j in range(n) for nu in range(n)]


@dataclass(frozen=True)
class Row:
    coeffs: tuple[tuple[Hashable, Fraction], ...]
    rhs: Fraction
    label: str = field(default="", compare=False)


@dataclass(frozen=True)
class LinearSystem:
    """Equalities ``A x = b`` over ``variables`` with ``x >= 0`` throughout.

    ``fixed_zero`` lists variables removed by substitution; ``objective`` maps
    variables to rational costs and is minimized when present.
    """

    n: int
    variables: tuple
    rows: tuple[Row, ...]
    objective: Mapping | None = None
    fixed_zero: frozenset = field(default=frozenset(), compare=False)
    reading: str | None = field(default=None, compare=False)

    def row_family_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for r in self.rows:
            fam = r.label.split(":")[0]
            out[fam] = out.get(fam, 0) + 1
        return out


def build_hull_system(n: int) -> LinearSystem:
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    one, neg = Fraction(1), Fraction(-1)
    rows = []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            for nu in range(n):
                coeffs = tuple((xvar(i, j, mu, nu), one) for mu in range(n) if mu != nu)
                rows.append(Row(coeffs + ((yvar(j, nu), neg),), Fraction(0),
                                f"{FAMILY_PAIR}:{i + 1},{j + 1},{nu + 1}"))
    for j in range(n):
        for mu in range(n):
            for nu in range(n):
                if mu == nu:
                    continue
                coeffs = tuple((xvar(i, j, mu, nu), one) for i in range(n) if i != j)
                rows.append(Row(coeffs + ((yvar(j, nu), neg),), Fraction(0),
                                f"{FAMILY_POSITION}:{j + 1},{mu + 1},{nu + 1}"))
    for j in range(n):
        rows.append(Row(tuple((yvar(j, nu), one) for nu in range(n)), one, f"{FAMILY_SIMPLEX}:{j + 1}"))

    variables = tuple(x_variables(n)) + tuple(y_variables(n))
    sys = LinearSystem(n, variables, tuple(rows))
    counts = sys.row_family_counts()
    assert len(variables) == n * n * (n - 1) ** 2 // 2 + n * n
    assert counts == {FAMILY_PAIR: n * n * (n - 1), FAMILY_POSITION: n * n * (n - 1), FAMILY_SIMPLEX: n}
    return sys


def apply_cuts(sys: LinearSystem, zeros: Iterable[tuple[int, int, int, int]]) -> LinearSystem:
    """Fix every listed x variable to zero by eliminating it."""
    present = set(sys.variables)
    cut = set()
    for q in zeros:
        i, j, mu, nu = q
        if not (0 <= min(q) and max(q) < sys.n):
            raise ValueError(f"cut index {q} out of range for n={sys.n}")
        v = xvar(i, j, mu, nu)
        if v not in present and v not in sys.fixed_zero:
            raise ValueError(f"cut index {q} is not an x variable")
        cut.add(v)
    if not cut:
        return sys
    variables = tuple(v for v in sys.variables if v not in cut)
    rows = tuple(Row(tuple((v, a) for v, a in r.coeffs if v not in cut), r.rhs, r.label) for r in sys.rows)
    objective = None
    if sys.objective is not None:
        objective = {v: a for v, a in sys.objective.items() if v not in cut}
    return replace(sys, variables=variables, rows=rows, objective=objective,
                   fixed_zero=sys.fixed_zero | cut)


def objective_coefficients(n: int, w: WeightMatrix, reading: str = "restricted") -> dict:
    """Cost of every canonical x variable under the chosen reading of the weights.

    ``restricted``: x(i,j,mu,nu) pays w[mu][nu] when (i, j) is an arc of the
    standard cycle and w[nu][mu] when (j, i) is, so a guess pays exactly the
    weight of its tour.  ``literal``: x(i,j,mu,nu) pays w[i][j] (and the
    mirrored copy w[j][i]), which is the same constant for every guess.
    """
    s = standard_cycle(n)
    out = {}
    for v in x_variables(n):
        i, j, mu, nu = v
        if reading == "restricted":
            terms = []
            if s.adjacency[i][j]:
                terms.append(w[mu, nu])
            if s.adjacency[j][i]:
                terms.append(w[nu, mu])
        elif reading == "literal":
            terms = [w[i, j], w[j, i]]
        else:
            raise ValueError(f"unknown objective reading {reading!r}")
        total = Fraction(0)
        for t in terms:
            total = total + t
        out[v] = total
    return out


def build_objective(sys: LinearSystem, w: WeightMatrix, reading: str = "restricted") -> LinearSystem:
    if w.n != sys.n:
        raise ValueError("weight matrix size does not match the system")
    present = set(sys.variables)
    coeffs = {}
    for v, a in objective_coefficients(sys.n, w, reading).items():
        if v not in present or a == 0:
            continue
        if a is INF:
            raise ValueError(f"+inf cost on surviving variable {var_name(v)}")
        coeffs[v] = a
    return replace(sys, objective=coeffs, reading=reading)


def guess_point(p) -> RationalPoint:
    p = tuple(p)
    n = len(p)
    pt = {}
    for i in range(n):
        for j in range(i + 1, n):
            pt[(i, j, p[i], p[j])] = Fraction(1)
        pt[(i, p[i])] = Fraction(1)
    return pt


def center_point(n: int) -> RationalPoint:
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    xv, yv = Fraction(1, n * (n - 1)), Fraction(1, n)
    pt = {v: xv for v in x_variables(n)}
    pt.update({v: yv for v in y_variables(n)})
    return pt


def squared_norm(pt: RationalPoint) -> Fraction:
    """Squared Euclidean norm of the full box matrix (both mirrored copies of x)."""
    return sum((2 * a * a if is_x(v) else a * a) for v, a in pt.items())


@dataclass
class Residuals:
    rows: list[Fraction]
    negative: list
    fixed_violations: list
    unknown: list
    objective: Fraction | None

    @property
    def feasible(self) -> bool:
        return (not self.negative and not self.fixed_violations and not self.unknown
                and all(r == 0 for r in self.rows))

    def nonzero_rows(self) -> list[int]:
        return [k for k, r in enumerate(self.rows) if r != 0]


def evaluate_point(sys: LinearSystem, pt: Mapping) -> Residuals:
    get = pt.get
    rows = [sum((a * get(v, 0) for v, a in r.coeffs), Fraction(0)) - r.rhs for r in sys.rows]
    present = set(sys.variables)
    negative = sorted(v for v, a in pt.items() if a < 0)
    fixed = sorted(v for v in sys.fixed_zero if get(v, 0) != 0)
    unknown = sorted((v for v, a in pt.items() if a != 0 and v not in present and v not in sys.fixed_zero),
                     key=repr)
    obj = None
    if sys.objective is not None:
        obj = sum((a * get(v, 0) for v, a in sys.objective.items()), Fraction(0))
    return Residuals(rows, negative, fixed, unknown, obj)


def objective_value(coeffs: Mapping, pt: Mapping):
    total = Fraction(0)
    for v, a in coeffs.items():
        x = pt.get(v, 0)
        if x:
            total = total + a * x
    return total


# -- export ------------------------------------------------------------------

def to_native_json(sys: LinearSystem) -> str:
    doc = {
        "n": sys.n,
        "vars": [var_name(v) for v in sys.variables],
        "rows": [{"coeffs": [[var_name(v), format_rational(a)] for v, a in r.coeffs],
                  "rhs": format_rational(r.rhs)} for r in sys.rows],
        "objective": None if sys.objective is None else
        [[var_name(v), format_rational(a)] for v, a in sys.objective.items()],
    }
    return json.dumps(doc, indent=1) + "\n"


def from_native_json(text: str) -> LinearSystem:
    doc = json.loads(text)
    variables = tuple(parse_var_name(s) for s in doc["vars"])
    rows = tuple(Row(tuple((parse_var_name(v), parse_rational(a)) for v, a in r["coeffs"]),
                     parse_rational(r["rhs"])) for r in doc["rows"])
    obj = doc.get("objective")
    objective = None if obj is None else {parse_var_name(v): parse_rational(a) for v, a in obj}
    return LinearSystem(int(doc["n"]), variables, rows, objective)


def _decimal(a: Fraction) -> str:
    q = a.denominator
    for f in (2, 5):
        while q % f == 0:
            q //= f
    if q != 1:
        raise ValueError(f"{a} has no exact decimal expansion")
    d = Decimal(a.numerator) / Decimal(a.denominator)
    text = format(d.normalize(), "f")
    return text


def _lp_terms(coeffs) -> str:
    parts = []
    for k, (v, a) in enumerate(coeffs):
        sign = "-" if a < 0 else "+"
        mag = abs(a)
        term = var_name(v) if mag == 1 else f"{_decimal(mag)} {var_name(v)}"
        if k == 0:
            parts.append(term if sign == "+" else f"- {term}")
        else:
            parts.append(f"{sign} {term}")
    return " ".join(parts) if parts else "0"


def to_lp_text(sys: LinearSystem) -> str:
    """CPLEX LP text.  Rejects coefficients without an exact decimal form."""
    lines = ["\\ hamlp linear system", "Minimize"]
    obj = list(sys.objective.items()) if sys.objective else []
    lines.append(" obj:" + (" " + _lp_terms(obj) if obj else ""))
    lines.append("Subject To")
    for k, r in enumerate(sys.rows, start=1):
        lines.append(f" r{k}: {_lp_terms(r.coeffs)} = {_decimal(r.rhs)}")
    lines.append("Bounds")
    for v in sys.variables:
        lines.append(f" {var_name(v)} >= 0")
    lines.append("End")
    return "\n".join(lines) + "\n"


def export_lp(sys: LinearSystem, fmt: str = "native-json") -> str:
    if fmt == "native-json":
        return to_native_json(sys)
    if fmt == "lp-text":
        return to_lp_text(sys)
    raise ValueError(f"unknown export format {fmt!r}")


def digraph_system(g: Digraph, w: WeightMatrix | None = None, reading: str = "restricted") -> LinearSystem:
    """Hull system of size n with the cuts of ``g`` and, if given, the objective from ``w``."""
    from .compat import build_compat_matrix, zero_indices

    sys = apply_cuts(build_hull_system(g.n), zero_indices(build_compat_matrix(g)))
    if w is not None:
        sys = build_objective(sys, w, reading)
    return sys


def all_permutations(n: int):
    return itertools.permutations(range(n))
