"""Efficient assignment solvers for permutation-invariant separation
objectives.

Separation losses that are invariant to the target-to-output assignment
can be split into a score matrix plus a strictly increasing wrapper, so
the best assignment is found by minimizing a sum of matrix entries:
with the Hungarian algorithm when utterances and channels pair up
one-to-one, or by coloring the temporal overlap graph when several
utterances share a channel.
"""

from .core import (
    Assignment,
    Interval,
    ScoreMatrix,
    SignalMatrix,
    SolveResult,
    UtteranceLayout,
    assignment_score,
    intervals_overlap,
    mixture,
)
from .errors import (
    DimensionMismatch,
    Infeasible,
    InvalidParams,
    PitAssignError,
    ProblemFormatError,
    ZeroTargetEnergy,
)
from .graph import (
    OverlapGraph,
    build_overlap_graph,
    connected_components,
    frontier,
    is_valid_coloring,
)
from .graphpit import (
    enumerate_colorings,
    graphpit_loss,
    solve_graphpit_branch_bound,
    solve_graphpit_brute_force,
    solve_graphpit_dfs,
    solve_graphpit_dp,
    solve_graphpit_unoptimized,
    solve_per_component,
)
from .losses import (
    DecompositionKind,
    LossDecomposition,
    a_sdr_loss,
    sa_sdr_loss,
    score_matrix_pairwise_sdr,
    score_matrix_sa_sdr_dot,
    score_matrix_sa_sdr_mse,
    sdr_loss,
    targets_from_assignment,
)
from .problem import Problem, load_problem, save_problem
from .synth import (
    SyntheticMeetingSpec,
    chain_layout,
    generate_meeting,
    measured_overlap_ratio,
    noise_targets,
    planted_estimates,
    random_layout,
    random_score_matrix,
)
from .upit import solve_upit, solve_upit_brute_force, solve_upit_hungarian

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "DecompositionKind",
    "DimensionMismatch",
    "Infeasible",
    "Interval",
    "InvalidParams",
    "LossDecomposition",
    "OverlapGraph",
    "PitAssignError",
    "Problem",
    "ProblemFormatError",
    "ScoreMatrix",
    "SignalMatrix",
    "SolveResult",
    "SyntheticMeetingSpec",
    "UtteranceLayout",
    "ZeroTargetEnergy",
    "a_sdr_loss",
    "assignment_score",
    "build_overlap_graph",
    "chain_layout",
    "connected_components",
    "enumerate_colorings",
    "frontier",
    "generate_meeting",
    "graphpit_loss",
    "intervals_overlap",
    "is_valid_coloring",
    "load_problem",
    "measured_overlap_ratio",
    "mixture",
    "noise_targets",
    "planted_estimates",
    "random_layout",
    "random_score_matrix",
    "sa_sdr_loss",
    "save_problem",
    "score_matrix_pairwise_sdr",
    "score_matrix_sa_sdr_dot",
    "score_matrix_sa_sdr_mse",
    "sdr_loss",
    "solve_graphpit_branch_bound",
    "solve_graphpit_brute_force",
    "solve_graphpit_dfs",
    "solve_graphpit_dp",
    "solve_graphpit_unoptimized",
    "solve_per_component",
    "solve_upit",
    "solve_upit_brute_force",
    "solve_upit_hungarian",
    "targets_from_assignment",
    "__version__",
]
