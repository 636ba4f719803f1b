"""Discrete-time coined quantum-walk search with multiple marked vertices.

Builds arc-indexed graphs, evolves search states under ``U' = S C Q``,
constructs the stationary states that make certain marked configurations
exceptional, and bounds the marked probability they allow.
"""

from .bounds import BoundResult, empirical_pm_max, maximize_pm_bruteforce, pair_pm_bound
from .graphs import (ArcRef, Graph, build_clique_gadget, build_complete, build_hypercube,
                     build_torus_grid, from_edge_list, grid_vertex)
from .stationary import (MarkedConfig, StationaryState, check_general_conditions,
                         clique_state, find_exceptional_partition, is_stationary,
                         pair_state, partition_state, solve_correction_weights,
                         triangle_state)
from .walk import (WalkState, apply_coin, apply_query, apply_shift, evolve,
                   marked_probability, overlap, step, uniform_state)

__version__ = "0.1.0"
