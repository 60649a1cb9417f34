"""Compatibility-matrix linear programs for directed Hamiltonian cycles and ATSP.

The package builds the guess polytope of a digraph, cuts it down with the
compatibility matrix, solves the result with an exact simplex, and compares
every answer with brute-force ground truth.
"""
from .compat import (CompatMatrix, build_box, build_compat_matrix, check_solution_grid,
                     enumerate_solution_grids, zero_indices)
from .decompose import (birkhoff_decompose, decompose_point, extract_block, hull_membership,
                        peel_guess, verify_combination)
from .graph import (INF, Digraph, WeightMatrix, complete_digraph, digraph_fingerprint, empty_digraph,
                    parse_digraph, parse_weights, permutation_to_cycle, standard_cycle)
from .harness import minimize_witness, sweep_exhaustive, sweep_random, verify_instance
from .lpsolve import minimize, solve_feasibility, verify_certificate
from .oracle import count_grids_vs_cycles, enumerate_cycles, held_karp
from .polytope import (apply_cuts, build_hull_system, build_objective, center_point, evaluate_point,
                       export_lp, guess_point)

__version__ = "0.1.0"
