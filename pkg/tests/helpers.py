"""Shared test utilities: independent oracles and instance generators.

The oracles here deliberately avoid the package's own graph and solver
code paths (plain pairs, itertools enumeration, recursive counting,
union-find) so that agreement with the library is meaningful.
"""

import itertools
import math

import numpy as np

from pit_assign import (
    SignalMatrix,
    UtteranceLayout,
    noise_targets,
    random_layout,
)

# Verdict lines collected by the acceptance tests; a terminal-summary hook
# prints them after the run so they survive pytest's output capture.
ACCEPTANCE_LINES: list[str] = []


def pairs_of(layout: UtteranceLayout) -> list[tuple[int, int]]:
    return [(iv.start, iv.end) for iv in layout.intervals]


def two_burst_layout() -> UtteranceLayout:
    # Five utterances in two separate bursts: a pair that overlaps, then a
    # chain of three with consecutive overlaps.  Two connected components.
    pairs = [(0, 200), (100, 300), (400, 600), (500, 800), (700, 900)]
    return UtteranceLayout.from_pairs(pairs, total_length=900)


def overlapping_pairs(pairs: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Index pairs (i, j), i < j, whose half-open spans share a sample."""
    out = []
    for i in range(len(pairs)):
        for j in range(i + 1, len(pairs)):
            if max(pairs[i][0], pairs[j][0]) < min(pairs[i][1], pairs[j][1]):
                out.append((i, j))
    return out


def product_colorings(pairs: list[tuple[int, int]], num_channels: int) -> list[tuple[int, ...]]:
    """Every valid coloring, by filtering the full channel product against a
    direct pairwise overlap test.  Lexicographic order by construction."""
    conflicts = overlapping_pairs(pairs)
    out = []
    for colors in itertools.product(range(num_channels), repeat=len(pairs)):
        if all(colors[i] != colors[j] for i, j in conflicts):
            out.append(colors)
    return out


def coloring_count_formula(pairs: list[tuple[int, int]], num_channels: int) -> int:
    """Product-form count of valid colorings for an interval conflict set:
    each utterance may avoid the colors of its earlier overlapping peers."""
    total = 1
    for j in range(len(pairs)):
        earlier = sum(
            1
            for i in range(j)
            if max(pairs[i][0], pairs[j][0]) < min(pairs[i][1], pairs[j][1])
        )
        total *= max(num_channels - earlier, 0)
    return total


def count_colorings_recursive(num_vertices: int, edges, num_channels: int) -> int:
    """Backtracking count of proper colorings of an arbitrary graph."""
    neighbors = {v: set() for v in range(num_vertices)}
    for a, b in edges:
        neighbors[a].add(b)
        neighbors[b].add(a)

    def count(u: int, colors: dict) -> int:
        if u == num_vertices:
            return 1
        total = 0
        for c in range(num_channels):
            if all(colors.get(v) != c for v in neighbors[u]):
                colors[u] = c
                total += count(u + 1, colors)
                del colors[u]
        return total

    return count(0, {})


def union_find_components(num_vertices: int, edges) -> list[list[int]]:
    parent = list(range(num_vertices))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra
    groups: dict[int, list[int]] = {}
    for v in range(num_vertices):
        groups.setdefault(find(v), []).append(v)
    return sorted((sorted(g) for g in groups.values()), key=lambda g: g[0])


def permutation_table(num_channels: int) -> np.ndarray:
    """All permutations of range(num_channels) as an array of color rows."""
    perms = list(itertools.permutations(range(num_channels)))
    return np.array(perms, dtype=np.intp)


def permutation_scores(values: np.ndarray, perms: np.ndarray) -> np.ndarray:
    """Score of every permutation: sum over columns u of values[perm[u], u]."""
    return values[perms, np.arange(values.shape[1])].sum(axis=1)


def recursive_min_permutation(rows: list[list[float]]) -> tuple[tuple[int, ...], float]:
    """Recursive exhaustive search over permutations; left-to-right sums,
    first strictly better candidate wins so ties keep the lexicographically
    smallest color vector."""
    size = len(rows)
    best_score = math.inf
    best_perm: tuple[int, ...] = ()

    def walk(u: int, used: frozenset, acc: float, perm: tuple[int, ...]) -> None:
        nonlocal best_score, best_perm
        if u == size:
            if acc < best_score:
                best_score = acc
                best_perm = perm
            return
        for c in range(size):
            if c not in used:
                walk(u + 1, used | {c}, acc + rows[c][u], perm + (c,))

    walk(0, frozenset(), 0.0, ())
    return best_perm, best_score


def min_coloring_score(values: np.ndarray, colorings) -> tuple[tuple[int, ...], float]:
    """Exhaustive minimum of the assignment score over given colorings,
    summed left to right in utterance order."""
    best_score = math.inf
    best_colors: tuple[int, ...] = ()
    for colors in colorings:
        acc = 0.0
        for u, c in enumerate(colors):
            acc += float(values[c, u])
        if acc < best_score:
            best_score = acc
            best_colors = tuple(colors)
    return best_colors, best_score


def pad_layout(layout: UtteranceLayout, num_samples: int) -> UtteranceLayout:
    total = max(layout.total_length, num_samples)
    return UtteranceLayout.from_pairs(pairs_of(layout), total_length=total)


def draw_layout(
    rng: np.random.Generator,
    max_utterances: int,
    num_channels: int,
    num_samples: int = 1600,
    max_colorings: int | None = None,
) -> UtteranceLayout:
    """Feasible random layout, redrawn until the coloring count is positive
    and (optionally) small enough for exhaustive enumeration."""
    while True:
        count = int(rng.integers(1, max_utterances + 1))
        layout = random_layout(count, num_channels, rng)
        colorings = coloring_count_formula(pairs_of(layout), num_channels)
        if colorings == 0:
            continue
        if max_colorings is not None and colorings > max_colorings:
            continue
        return pad_layout(layout, num_samples)


def random_signals(
    rng: np.random.Generator, layout: UtteranceLayout, num_channels: int
) -> tuple[SignalMatrix, SignalMatrix]:
    targets = noise_targets(layout, rng)
    estimates = SignalMatrix(rng.standard_normal((layout.total_length, num_channels)))
    return targets, estimates
