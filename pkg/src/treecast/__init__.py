"""Adversarial broadcast on dynamic rooted trees.

Simulate tree schedules against boolean reachability matrices, search the
exact worst-case broadcast time for small ``n``, and check results against
the linear bound window.
"""

__version__ = "0.1.0"

from ._backend import BACKEND
from .adversary import (
    BroadcastTrace,
    FixedTreeAdversary,
    GreedyMinGrowth,
    RandomAdversary,
    make_adversary,
    replay_trace_as_schedule,
    run_adversary,
    run_schedule,
)
from .matrix import (
    ReachMatrix,
    canonical_form,
    compose,
    has_broadcaster,
    identity,
    permute,
    popcount,
)
from .search import (
    SearchResult,
    bound_window,
    brute_force_tstar,
    exact_tstar,
    lower_bound,
    upper_bound,
    verify_bounds,
)
from .trees import (
    RootedTree,
    Schedule,
    enumerate_trees,
    path_tree,
    prufer_decode,
    random_tree,
    tree_to_matrix,
    validate_tree,
)

__all__ = [
    "BACKEND",
    "BroadcastTrace",
    "FixedTreeAdversary",
    "GreedyMinGrowth",
    "RandomAdversary",
    "ReachMatrix",
    "RootedTree",
    "Schedule",
    "SearchResult",
    "bound_window",
    "brute_force_tstar",
    "canonical_form",
    "compose",
    "enumerate_trees",
    "exact_tstar",
    "has_broadcaster",
    "identity",
    "lower_bound",
    "make_adversary",
    "path_tree",
    "permute",
    "popcount",
    "prufer_decode",
    "random_tree",
    "replay_trace_as_schedule",
    "run_adversary",
    "run_schedule",
    "tree_to_matrix",
    "upper_bound",
    "validate_tree",
]
