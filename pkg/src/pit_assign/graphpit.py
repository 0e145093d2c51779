"""Assignment solvers for the utterances-to-channels coloring problem.

All solvers minimize ``Tr(M P)`` over the valid colorings of the
overlap graph: utterances that overlap in time must land on different
output channels. They share the canonical start-sorted vertex order and
accumulate scores left to right, so the exact solvers agree bitwise on
the optimal score, and all of them break score ties toward the
lexicographically smallest color vector.
"""

from __future__ import annotations

import math
from typing import Callable, Iterator

import numpy as np

from .core import (
    Assignment,
    ScoreMatrix,
    SignalMatrix,
    SolveResult,
    UtteranceLayout,
    assignment_score,
)
from .errors import DimensionMismatch, Infeasible, InvalidParams, ZeroTargetEnergy
from .graph import OverlapGraph, build_overlap_graph, connected_components
from .losses import ERROR_FLOOR_RATIO, score_matrix_sa_sdr_dot

__all__ = [
    "enumerate_colorings",
    "solve_graphpit_unoptimized",
    "solve_graphpit_brute_force",
    "solve_graphpit_dfs",
    "solve_graphpit_branch_bound",
    "solve_graphpit_dp",
    "solve_per_component",
    "graphpit_loss",
    "GRAPHPIT_SOLVERS",
]


def _check_matrix(score_matrix: ScoreMatrix, graph: OverlapGraph, num_channels: int) -> None:
    if score_matrix.num_utterances != graph.num_vertices:
        raise DimensionMismatch(
            f"score matrix covers {score_matrix.num_utterances} utterances "
            f"but the graph has {graph.num_vertices} vertices"
        )
    if score_matrix.num_channels != num_channels:
        raise DimensionMismatch(
            f"score matrix has {score_matrix.num_channels} channel rows, "
            f"expected {num_channels}"
        )


def _check_feasible(graph: OverlapGraph, num_channels: int) -> None:
    # Overlap graphs are interval graphs, so the peak concurrency equals
    # the chromatic number: exceeding the channel count is a hard no.
    if graph.max_concurrency > num_channels:
        raise Infeasible(
            f"{graph.max_concurrency} utterances overlap at the same time "
            f"but only {num_channels} channels are available"
        )


def enumerate_colorings(graph: OverlapGraph, num_channels: int) -> Iterator[Assignment]:
    """Yield every valid coloring exactly once, in lexicographic order."""
    if num_channels < 1:
        return
    count = graph.num_vertices
    earlier = graph.earlier_neighbors
    colors = [0] * count

    def extend(u: int) -> Iterator[Assignment]:
        if u == count:
            yield Assignment(tuple(colors), num_channels)
            return
        for c in range(num_channels):
            blocked = False
            for v in earlier[u]:
                if colors[v] == c:
                    blocked = True
                    break
            if not blocked:
                colors[u] = c
                yield from extend(u + 1)

    yield from extend(0)


def solve_graphpit_unoptimized(
    estimates: SignalMatrix,
    targets: SignalMatrix,
    layout: UtteranceLayout,
    num_channels: int,
) -> SolveResult:
    """Ground-truth solver: evaluate the direct source-aggregated SDR
    loss of every valid coloring and keep the best.

    No score matrix is involved; each candidate's channel signals are
    built from scratch and scored. ``score`` equals the returned loss.
    Exponential in the utterance count, intended as an oracle and as the
    unoptimized baseline for benchmarks.
    """
    if estimates.num_columns != num_channels:
        raise DimensionMismatch(
            f"estimates have {estimates.num_columns} channels, expected {num_channels}"
        )
    if estimates.num_samples != layout.total_length:
        raise DimensionMismatch(
            f"estimates cover {estimates.num_samples} samples but the layout "
            f"covers {layout.total_length}"
        )
    targets.validate_supports(layout)
    graph = build_overlap_graph(layout)
    _check_feasible(graph, num_channels)

    total_target_energy = float(np.sum(targets.data * targets.data))
    if total_target_energy == 0.0:
        raise ZeroTargetEnergy("total target energy is zero")

    intervals = layout.intervals
    # Columns are zero outside their spans, so adding the active slice
    # reproduces the full column add.
    slices = [targets.data[iv.start : iv.end, u] for u, iv in enumerate(intervals)]
    estimate_data = estimates.data
    num_samples = layout.total_length

    best_loss = float("inf")
    best: Assignment | None = None
    count = 0
    for assignment in enumerate_colorings(graph, num_channels):
        count += 1
        summed = np.zeros((num_samples, num_channels), dtype=np.float64)
        for u, c in enumerate(assignment.colors):
            iv = intervals[u]
            summed[iv.start : iv.end, c] += slices[u]
        flat = summed.ravel()
        target_energy = float(np.dot(flat, flat))
        summed -= estimate_data
        error_energy = float(np.dot(flat, flat))
        floored = max(error_energy, ERROR_FLOOR_RATIO * target_energy)
        loss = -10.0 * math.log10(target_energy / floored)
        if loss < best_loss:
            best_loss = loss
            best = assignment
    if best is None:
        raise Infeasible("no valid coloring exists")
    return SolveResult(
        assignment=best,
        score=best_loss,
        loss=best_loss,
        optimal=True,
        nodes_expanded=count,
    )


def solve_graphpit_brute_force(
    score_matrix: ScoreMatrix, graph: OverlapGraph, num_channels: int
) -> SolveResult:
    """Exhaustive search over all valid colorings in lexicographic order."""
    _check_matrix(score_matrix, graph, num_channels)
    _check_feasible(graph, num_channels)
    count = graph.num_vertices
    earlier = graph.earlier_neighbors
    rows = score_matrix.values.tolist()
    colors = [0] * count
    best_score = float("inf")
    best: tuple[int, ...] | None = None
    nodes = 0

    def walk(u: int, partial: float) -> None:
        nonlocal best_score, best, nodes
        last = u + 1 == count
        for c in range(num_channels):
            blocked = False
            for v in earlier[u]:
                if colors[v] == c:
                    blocked = True
                    break
            if blocked:
                continue
            nodes += 1
            score = partial + rows[c][u]
            colors[u] = c
            if last:
                if score < best_score:
                    best_score = score
                    best = tuple(colors)
            else:
                walk(u + 1, score)

    walk(0, 0.0)
    if best is None:
        raise Infeasible("no valid coloring exists")
    return SolveResult(
        assignment=Assignment(best, num_channels),
        score=best_score,
        optimal=True,
        nodes_expanded=nodes,
    )


def _greedy_order(rows, u: int, num_channels: int) -> list[int]:
    return sorted(range(num_channels), key=lambda c: (rows[c][u], c))


def solve_graphpit_dfs(
    score_matrix: ScoreMatrix, graph: OverlapGraph, num_channels: int
) -> SolveResult:
    """Greedy depth-first search: at each utterance try the channels in
    ascending added-score order and return the first complete coloring.

    Backtracks out of dead ends, so it finds a valid coloring whenever
    one exists, but the result is not necessarily optimal (``optimal``
    is ``False``). Best case linear in the utterance count.
    """
    _check_matrix(score_matrix, graph, num_channels)
    _check_feasible(graph, num_channels)
    count = graph.num_vertices
    earlier = graph.earlier_neighbors
    rows = score_matrix.values.tolist()
    colors = [0] * count
    nodes = 0

    def walk(u: int, partial: float) -> float | None:
        nonlocal nodes
        for c in _greedy_order(rows, u, num_channels):
            blocked = False
            for v in earlier[u]:
                if colors[v] == c:
                    blocked = True
                    break
            if blocked:
                continue
            nodes += 1
            score = partial + rows[c][u]
            colors[u] = c
            if u + 1 == count:
                return score
            found = walk(u + 1, score)
            if found is not None:
                return found
        return None

    score = walk(0, 0.0)
    if score is None:
        raise Infeasible("no valid coloring exists")
    return SolveResult(
        assignment=Assignment(tuple(colors), num_channels),
        score=score,
        optimal=False,
        nodes_expanded=nodes,
    )


def solve_graphpit_branch_bound(
    score_matrix: ScoreMatrix, graph: OverlapGraph, num_channels: int
) -> SolveResult:
    """Exact greedy-first search that discards partial colorings scoring
    worse than the best complete one found so far.

    Internally the matrix is shifted by its smallest entry so every
    increment is nonnegative and the running sum is a valid lower bound.
    Incumbent scores are recomputed from the raw entries in canonical
    order, so the returned score compares bitwise equal with the other
    exact solvers.
    """
    _check_matrix(score_matrix, graph, num_channels)
    _check_feasible(graph, num_channels)
    count = graph.num_vertices
    earlier = graph.earlier_neighbors
    raw_rows = score_matrix.values.tolist()
    shift = float(score_matrix.values.min())
    rows = (score_matrix.values - shift).tolist()
    colors = [0] * count
    nodes = 0
    best_shifted = float("inf")
    best_key: tuple[float, tuple[int, ...]] | None = None

    def raw_score(coloring: tuple[int, ...]) -> float:
        total = 0.0
        for u, c in enumerate(coloring):
            total += raw_rows[c][u]
        return total

    def walk(u: int, partial: float) -> None:
        nonlocal nodes, best_shifted, best_key
        last = u + 1 == count
        for c in _greedy_order(rows, u, num_channels):
            blocked = False
            for v in earlier[u]:
                if colors[v] == c:
                    blocked = True
                    break
            if blocked:
                continue
            score = partial + rows[c][u]
            if score > best_shifted:
                # Channels are tried in ascending added-score order, so
                # every remaining sibling is at least as expensive.
                break
            nodes += 1
            colors[u] = c
            if last:
                coloring = tuple(colors)
                key = (raw_score(coloring), coloring)
                if score < best_shifted:
                    best_shifted = score
                    best_key = key
                elif best_key is None or key < best_key:
                    best_key = key
            else:
                walk(u + 1, score)

    walk(0, 0.0)
    if best_key is None:
        raise Infeasible("no valid coloring exists")
    score, coloring = best_key
    return SolveResult(
        assignment=Assignment(coloring, num_channels),
        score=score,
        optimal=True,
        nodes_expanded=nodes,
    )


def solve_graphpit_dp(
    score_matrix: ScoreMatrix,
    layout: UtteranceLayout,
    graph: OverlapGraph,
    num_channels: int,
) -> SolveResult:
    """Exact dynamic program over the start-sorted utterances.

    Colorings that give the same colors to the utterances still active
    at the next start (the frontier) are interchangeable from there on,
    so only the best of each group survives. The state count is bounded
    by ``C^(C-1)`` at every step, making the solve linear in the number
    of utterances.
    """
    _check_matrix(score_matrix, graph, num_channels)
    if graph.num_vertices != layout.num_utterances:
        raise DimensionMismatch(
            f"graph has {graph.num_vertices} vertices but the layout has "
            f"{layout.num_utterances} utterances"
        )
    count = graph.num_vertices
    earlier = graph.earlier_neighbors
    rows = score_matrix.values.tolist()

    # state: frontier-color key -> (accumulated score, color prefix);
    # per key only the minimum (score, prefix) survives, which keeps the
    # lexicographic tie-break exact because same-key states share all
    # future choices.
    states: dict[tuple[int, ...], tuple[float, tuple[int, ...]]] = {(): (0.0, ())}
    max_states = 1
    total_generated = 0
    for u in range(count):
        next_frontier = earlier[u + 1] if u + 1 < count else ()
        new_states: dict[tuple[int, ...], tuple[float, tuple[int, ...]]] = {}
        generated = 0
        for key, (score, prefix) in states.items():
            used = set(key)
            for c in range(num_channels):
                if c in used:
                    continue
                generated += 1
                candidate = (score + rows[c][u], prefix + (c,))
                new_key = tuple(candidate[1][v] for v in next_frontier)
                incumbent = new_states.get(new_key)
                if incumbent is None or candidate < incumbent:
                    new_states[new_key] = candidate
        if not new_states:
            raise Infeasible(
                f"no valid coloring survives at utterance {u}: all "
                f"{num_channels} channels are occupied by its overlaps"
            )
        states = new_states
        total_generated += generated
        if generated > max_states:
            max_states = generated

    (score, coloring) = min(states.values())
    return SolveResult(
        assignment=Assignment(coloring, num_channels),
        score=score,
        optimal=True,
        nodes_expanded=total_generated,
        max_states=max_states,
    )


def _call_solver(
    solver: Callable[..., SolveResult],
    score_matrix: ScoreMatrix,
    layout: UtteranceLayout,
    graph: OverlapGraph,
    num_channels: int,
) -> SolveResult:
    if solver is solve_graphpit_dp:
        return solver(score_matrix, layout, graph, num_channels)
    return solver(score_matrix, graph, num_channels)


def solve_per_component(
    solver: Callable[..., SolveResult],
    score_matrix: ScoreMatrix,
    layout: UtteranceLayout,
    graph: OverlapGraph,
    num_channels: int,
) -> SolveResult:
    """Solve each connected component of the overlap graph independently
    and concatenate the assignments.

    Utterances in different components never overlap, so their channel
    choices do not interact and the optimal score is the sum of the
    component optima. Turns one exponential solve into many small ones
    for exact inner solvers.
    """
    _check_matrix(score_matrix, graph, num_channels)
    if graph.num_vertices != layout.num_utterances:
        raise DimensionMismatch(
            f"graph has {graph.num_vertices} vertices but the layout has "
            f"{layout.num_utterances} utterances"
        )
    colors = [0] * graph.num_vertices
    optimal = True
    nodes_total = 0
    have_nodes = False
    max_states = 0
    have_states = False
    for index, component in enumerate(connected_components(graph)):
        sub_layout = UtteranceLayout(
            tuple(layout.intervals[v] for v in component), layout.total_length
        )
        sub_graph = build_overlap_graph(sub_layout)
        sub_matrix = ScoreMatrix(score_matrix.values[:, component])
        try:
            result = _call_solver(solver, sub_matrix, sub_layout, sub_graph, num_channels)
        except Infeasible as exc:
            raise Infeasible(f"component {index} (vertices {component}): {exc}") from exc
        for v, c in zip(component, result.assignment.colors):
            colors[v] = c
        optimal = optimal and result.optimal
        if result.nodes_expanded is not None:
            nodes_total += result.nodes_expanded
            have_nodes = True
        if result.max_states is not None:
            have_states = True
            if result.max_states > max_states:
                max_states = result.max_states
    assignment = Assignment(tuple(colors), num_channels)
    return SolveResult(
        assignment=assignment,
        score=assignment_score(score_matrix, assignment),
        optimal=optimal,
        nodes_expanded=nodes_total if have_nodes else None,
        max_states=max_states if have_states else None,
    )


GRAPHPIT_SOLVERS: dict[str, Callable[..., SolveResult]] = {
    "bf": solve_graphpit_brute_force,
    "brute-force": solve_graphpit_brute_force,
    "dfs": solve_graphpit_dfs,
    "bnb": solve_graphpit_branch_bound,
    "branch-bound": solve_graphpit_branch_bound,
    "dp": solve_graphpit_dp,
    "dynamic-programming": solve_graphpit_dp,
}


def graphpit_loss(
    estimates: SignalMatrix,
    targets: SignalMatrix,
    layout: UtteranceLayout,
    num_channels: int,
    algorithm: str = "dp",
    per_component: bool = False,
) -> tuple[float, Assignment]:
    """Loss in dB of the best utterance-to-channel assignment, plus that
    assignment.

    Builds the dot-product score matrix (the only decomposition that
    covers unequal utterance and channel counts), solves with the chosen
    algorithm, and maps the optimal score back through the wrapper.
    With ``algorithm="dfs"`` the returned loss is an upper bound.
    """
    if estimates.num_columns != num_channels:
        raise DimensionMismatch(
            f"estimates have {estimates.num_columns} channels, expected {num_channels}"
        )
    if targets.num_columns != layout.num_utterances:
        raise DimensionMismatch(
            f"{targets.num_columns} target columns for "
            f"{layout.num_utterances} utterances"
        )
    if estimates.num_samples != layout.total_length:
        raise DimensionMismatch(
            f"estimates cover {estimates.num_samples} samples but the layout "
            f"covers {layout.total_length}"
        )
    if algorithm in ("unopt", "unoptimized"):
        result = solve_graphpit_unoptimized(estimates, targets, layout, num_channels)
        assert result.loss is not None
        return result.loss, result.assignment
    try:
        solver = GRAPHPIT_SOLVERS[algorithm]
    except KeyError:
        raise InvalidParams(
            f"unknown algorithm {algorithm!r}; choose one of "
            f"{sorted(set(GRAPHPIT_SOLVERS) | {'unopt'})}"
        ) from None
    decomposition = score_matrix_sa_sdr_dot(estimates, targets)
    graph = build_overlap_graph(layout)
    if per_component:
        result = solve_per_component(
            solver, decomposition.score_matrix, layout, graph, num_channels
        )
    else:
        result = _call_solver(
            solver, decomposition.score_matrix, layout, graph, num_channels
        )
    return decomposition.loss_from_score(result.score), result.assignment
