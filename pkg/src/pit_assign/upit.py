"""Permutation solvers for the square utterance-to-channel problem.

Both solvers minimize ``Tr(M P)`` over all permutation matrices ``P``;
scores tie-break toward the lexicographically smallest color vector.
"""

from __future__ import annotations

import itertools

from scipy.optimize import linear_sum_assignment

from .core import Assignment, ScoreMatrix, SignalMatrix, SolveResult, assignment_score
from .errors import DimensionMismatch
from .losses import DecompositionKind, LossDecomposition

__all__ = [
    "solve_upit_brute_force",
    "solve_upit_hungarian",
    "solve_upit",
]


def _check_square(score_matrix: ScoreMatrix) -> int:
    if score_matrix.num_channels != score_matrix.num_utterances:
        raise DimensionMismatch(
            f"permutation problems need a square score matrix, got "
            f"{score_matrix.num_channels} x {score_matrix.num_utterances}"
        )
    return score_matrix.num_channels


def solve_upit_brute_force(score_matrix: ScoreMatrix) -> SolveResult:
    """Exhaustive search over all ``C!`` permutations.

    Deliberately plain: this is the reference the fast solver is checked
    against, so it stays a direct enumeration. The first minimum in
    lexicographic order wins, which realizes the tie-break rule.
    """
    channels = _check_square(score_matrix)
    rows = score_matrix.values.tolist()
    indices = range(channels)
    best_score = float("inf")
    best: tuple[int, ...] | None = None
    count = 0
    for perm in itertools.permutations(indices):
        count += 1
        score = 0.0
        for u in indices:
            score += rows[perm[u]][u]
        if score < best_score:
            best_score = score
            best = perm
    assert best is not None
    return SolveResult(
        assignment=Assignment(best, channels),
        score=best_score,
        optimal=True,
        nodes_expanded=count,
    )


def solve_upit_hungarian(score_matrix: ScoreMatrix) -> SolveResult:
    """Optimal permutation via the Hungarian linear-sum-assignment
    algorithm, polynomial in the channel count.

    The score is recomputed from the chosen assignment in canonical
    utterance order, so it compares bitwise equal with the brute-force
    score whenever the optimum is unique.
    """
    _check_square(score_matrix)
    row_ind, col_ind = linear_sum_assignment(score_matrix.values)
    colors = [0] * score_matrix.num_utterances
    for channel, utterance in zip(row_ind, col_ind):
        colors[int(utterance)] = int(channel)
    assignment = Assignment(tuple(colors), score_matrix.num_channels)
    return SolveResult(
        assignment=assignment,
        score=assignment_score(score_matrix, assignment),
        optimal=True,
    )


def solve_upit(
    estimates: SignalMatrix,
    targets: SignalMatrix,
    kind: DecompositionKind = DecompositionKind.SA_SDR_DOT,
) -> SolveResult:
    """Solve a square separation problem end to end.

    Builds the score matrix and wrapper for the chosen decomposition,
    finds the optimal permutation with the Hungarian algorithm, and maps
    the optimal score back to the loss in dB.
    """
    decomposition = LossDecomposition.build(kind, estimates, targets)
    result = solve_upit_hungarian(decomposition.score_matrix)
    return SolveResult(
        assignment=result.assignment,
        score=result.score,
        loss=decomposition.loss_from_score(result.score),
        optimal=True,
    )
