"""Temporal overlap graph over the utterances of a layout.

Vertices are utterance indices in the canonical start-sorted order; an
edge connects two utterances whose half-open spans share a sample.
Utterances joined by an edge must sit on different output channels, so
the assignment problem is a graph coloring problem restricted to this
graph.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .core import Assignment, UtteranceLayout, intervals_overlap
from .errors import DimensionMismatch, InvalidParams

__all__ = [
    "OverlapGraph",
    "build_overlap_graph",
    "is_valid_coloring",
    "connected_components",
    "frontier",
]


@dataclass(frozen=True, eq=False)
class OverlapGraph:
    """Undirected overlap graph in adjacency-list form.

    ``earlier_neighbors[u]`` lists the neighbors of ``u`` that precede it
    in the vertex order; for start-sorted intervals these are exactly the
    utterances still active when utterance ``u`` begins, which is what
    the sequential solvers iterate over. ``max_concurrency`` is the
    largest number of simultaneously active utterances; the instance is
    feasible for ``C`` channels iff it does not exceed ``C``.
    """

    num_vertices: int
    edges: tuple[tuple[int, int], ...]
    neighbors: tuple[tuple[int, ...], ...]
    earlier_neighbors: tuple[tuple[int, ...], ...]
    max_concurrency: int

    def adjacency_matrix(self) -> np.ndarray:
        """Dense symmetric 0/1 matrix, materialized on demand."""
        matrix = np.zeros((self.num_vertices, self.num_vertices), dtype=np.int64)
        for u, v in self.edges:
            matrix[u, v] = 1
            matrix[v, u] = 1
        return matrix


def build_overlap_graph(layout: UtteranceLayout) -> OverlapGraph:
    """Build the overlap graph of a start-sorted layout."""
    intervals = layout.intervals
    count = len(intervals)

    edges: list[tuple[int, int]] = []
    neighbor_sets: list[list[int]] = [[] for _ in range(count)]
    for u in range(count):
        end_u = intervals[u].end
        for v in range(u + 1, count):
            # Start-sorted order: v overlaps u iff it starts before u ends,
            # and no later vertex can once this fails.
            if intervals[v].start >= end_u:
                break
            edges.append((u, v))
            neighbor_sets[u].append(v)
            neighbor_sets[v].append(u)

    # Sweep the interval endpoints; ends sort before starts at equal times
    # so touching intervals do not count as concurrent.
    events = []
    for interval in intervals:
        events.append((interval.start, 1))
        events.append((interval.end, -1))
    events.sort()
    active = 0
    max_concurrency = 0
    for _, delta in events:
        active += delta
        if active > max_concurrency:
            max_concurrency = active

    neighbors = tuple(tuple(sorted(adj)) for adj in neighbor_sets)
    earlier = tuple(tuple(v for v in adj if v < u) for u, adj in enumerate(neighbors))
    return OverlapGraph(
        num_vertices=count,
        edges=tuple(sorted(edges)),
        neighbors=neighbors,
        earlier_neighbors=earlier,
        max_concurrency=max_concurrency,
    )


def frontier(layout: UtteranceLayout, u: int) -> set[int]:
    """Earlier utterances still active when utterance ``u`` starts.

    For start-sorted intervals the frontier plus ``u`` always forms a
    clique, and successive frontiers satisfy
    ``frontier(u + 1) <= frontier(u) | {u}``; the dynamic program keys
    its states on these sets.
    """
    if not 0 <= u < layout.num_utterances:
        raise InvalidParams(f"utterance index {u} out of range")
    target = layout.intervals[u]
    return {v for v in range(u) if intervals_overlap(layout.intervals[v], target)}


def is_valid_coloring(graph: OverlapGraph, assignment: Assignment) -> bool:
    """True iff no two adjacent utterances share a channel."""
    if assignment.num_utterances != graph.num_vertices:
        raise DimensionMismatch(
            f"assignment covers {assignment.num_utterances} utterances but "
            f"the graph has {graph.num_vertices} vertices"
        )
    colors = assignment.colors
    for u, v in graph.edges:
        if colors[u] == colors[v]:
            return False
    return True


def connected_components(graph: OverlapGraph) -> list[list[int]]:
    """Connected components as sorted vertex lists, ordered by smallest
    member. Components can be solved independently and their optima
    summed."""
    seen = [False] * graph.num_vertices
    components: list[list[int]] = []
    for start in range(graph.num_vertices):
        if seen[start]:
            continue
        seen[start] = True
        queue = deque([start])
        component = []
        while queue:
            u = queue.popleft()
            component.append(u)
            for v in graph.neighbors[u]:
                if not seen[v]:
                    seen[v] = True
                    queue.append(v)
        components.append(sorted(component))
    return components
