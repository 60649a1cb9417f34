# A weighted 4-vertex instance whose LP optimum sits strictly below the best tour.
from hamlp.graph import Digraph, parse_weights
from hamlp.oracle import held_karp, enumerate_cycles
from hamlp.polytope import digraph_system
from hamlp.lpsolve import minimize, verify_certificate
from hamlp.decompose import decompose_point, hull_membership, verify_separator
from hamlp.harness import point_json

g = Digraph.from_arcs(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 0), (2, 3), (3, 0), (3, 1)])
w = parse_weights("4\ninf 5 2 -1\ninf inf 9 -5\n7 inf inf -2\n-9 -6 inf inf\n", g)

for c in enumerate_cycles(g).cycles:
    print("tour", c.labels())
hk = held_karp(g, w)
print("best tour", hk.optimal_cycle.labels(), "weight", hk.optimum)

sys = digraph_system(g, w)
out = minimize(sys)
print("LP", out.status, out.objective, "certificate ok:", verify_certificate(sys, out))

# the optimal vertex, nonzero coordinates only
for k, v in sorted(point_json(out.point).items()):
    print(" ", k, v)

# greedy peeling stalls; the membership LP then proves the vertex is outside the guess hull
print(type(decompose_point(out.point, 4)).__name__)
comb, sep = hull_membership(out.point, 4)
print("separator verified:", sep is not None and verify_separator(out.point, sep, 4))
