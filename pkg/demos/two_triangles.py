# Two disjoint directed triangles: no Hamiltonian cycle, yet the cut system is feasible.
from hamlp.graph import Digraph
from hamlp.harness import verify_instance, minimize_witness
from hamlp.oracle import enumerate_cycles
from hamlp.polytope import digraph_system, evaluate_point
from hamlp.lpsolve import solve_feasibility, verify_certificate
from hamlp.decompose import hull_membership, verify_separator

# triangles 1->5->6->1 and 2->4->3->2 (0-based arcs below)
g = Digraph.from_arcs(6, [(0, 4), (4, 5), (5, 0), (1, 3), (3, 2), (2, 1)])
print(g.serialize())

print("oracle cycle count:", enumerate_cycles(g).cycle_count)

sys = digraph_system(g)
print("variables after cuts:", len(sys.variables), "rows:", len(sys.rows))

out = solve_feasibility(sys)
print("solver status:", out.status, "certificate ok:", verify_certificate(sys, out))
print("point residuals all zero:", evaluate_point(sys, out.point).feasible)

# the point is not a mixture of guesses; the separator is checked on all 720 permutations
comb, sep = hull_membership(out.point, 6)
print("decomposable:", comb is not None)
if sep is not None:
    print("separator verified:", verify_separator(out.point, sep, 6))

rep = verify_instance(g)
print("verdicts:", rep.statuses())

# no arc can be dropped without losing the violation
print("arc-minimal:", minimize_witness(g) == g)
