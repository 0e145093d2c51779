"""Randomized self-verification suite.

Re-checks the package's core claims on seeded random instances: the
score-matrix decomposition reproduces the direct loss on every
assignment, the exact solvers agree bitwise, the dynamic program stays
within its state bound, and greedy search stays sound. The CLI `verify`
subcommand runs this and turns the report into an exit code.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .core import Assignment, SignalMatrix, UtteranceLayout, assignment_score
from .graph import build_overlap_graph, is_valid_coloring
from .graphpit import (
    enumerate_colorings,
    solve_graphpit_branch_bound,
    solve_graphpit_brute_force,
    solve_graphpit_dfs,
    solve_graphpit_dp,
    solve_per_component,
)
from .losses import (
    DecompositionKind,
    LossDecomposition,
    sa_sdr_loss,
    score_matrix_sa_sdr_dot,
    score_matrix_sa_sdr_mse,
    targets_from_assignment,
)
from .synth import noise_targets, planted_estimates, random_layout, random_score_matrix

__all__ = ["PropertyStats", "VerifyReport", "run_verification", "IDENTITY_TOLERANCE_DB"]

IDENTITY_TOLERANCE_DB = 1e-9


@dataclass
class PropertyStats:
    """Pass/fail tally for one verified property."""

    passed: int = 0
    failed: int = 0
    first_failure: str | None = None

    def record(self, ok: bool, detail: str) -> None:
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if self.first_failure is None:
                self.first_failure = detail


@dataclass
class VerifyReport:
    """Per-property tallies for one verification run."""

    trials: int
    properties: dict[str, PropertyStats] = field(default_factory=dict)

    def stats(self, name: str) -> PropertyStats:
        return self.properties.setdefault(name, PropertyStats())

    @property
    def all_passed(self) -> bool:
        return all(stats.failed == 0 for stats in self.properties.values())

    @property
    def total_checks(self) -> int:
        return sum(s.passed + s.failed for s in self.properties.values())

    def format_lines(self) -> list[str]:
        lines = []
        for name in sorted(self.properties):
            stats = self.properties[name]
            total = stats.passed + stats.failed
            lines.append(f"{name}: {stats.passed}/{total} passed")
            if stats.first_failure is not None:
                lines.append(f"  first failure: {stats.first_failure}")
        verdict = "all properties passed" if self.all_passed else "FAILURES detected"
        lines.append(f"{verdict} ({self.total_checks} checks over {self.trials} trials)")
        return lines


def _identity_check(
    decomposition: LossDecomposition,
    estimates: SignalMatrix,
    targets: SignalMatrix,
    assignments,
) -> tuple[bool, str]:
    worst = 0.0
    for assignment in assignments:
        mixed = targets_from_assignment(targets, assignment)
        direct = sa_sdr_loss(estimates, mixed)
        via_matrix = decomposition.loss_from_score(
            assignment_score(decomposition.score_matrix, assignment)
        )
        worst = max(worst, abs(direct - via_matrix))
    return worst <= IDENTITY_TOLERANCE_DB, f"max deviation {worst:.3e} dB"


def run_verification(
    trials: int = 1000,
    seed: int = 0,
    max_utterances: int = 8,
    channels: tuple[int, ...] = (2, 3),
    num_samples: int = 1600,
    identity_limit: int = 100,
    max_colorings: int = 1500,
    dot_builder=score_matrix_sa_sdr_dot,
) -> VerifyReport:
    """Run the randomized property suite and tally the results.

    Every trial draws a fresh feasible layout (instances with more than
    ``max_colorings`` valid colorings are redrawn so exhaustive checks
    stay cheap) and records one check per property. The decomposition
    identity is evaluated on up to ``identity_limit`` colorings per
    trial. ``dot_builder`` exists so tests can inject a broken builder
    and watch the identity property fail.
    """
    master = np.random.default_rng(seed)
    report = VerifyReport(trials=trials)
    for trial in range(trials):
        rng = np.random.default_rng(master.integers(2**63))
        num_channels = channels[trial % len(channels)]

        while True:
            count = int(rng.integers(1, max_utterances + 1))
            layout = random_layout(count, num_channels, rng, mean_utterance_samples=max(2, num_samples // max(count, 4)))
            layout = _rescale(layout, num_samples)
            graph = build_overlap_graph(layout)
            colorings = 1
            for nbrs in graph.earlier_neighbors:
                colorings *= num_channels - len(nbrs)
            if 1 <= colorings <= max_colorings:
                break

        targets = noise_targets(layout, rng)
        estimates, _ = planted_estimates(layout, targets, num_channels, rng)
        tag = f"trial {trial} (seed path {seed}->{trial}, U={count}, C={num_channels})"

        # Decomposition identity: matrix-plus-wrapper equals the direct loss.
        decomposition = dot_builder(estimates, targets)
        assignments = itertools.islice(
            enumerate_colorings(graph, num_channels), identity_limit
        )
        ok, detail = _identity_check(decomposition, estimates, targets, assignments)
        report.stats("decomposition-identity").record(ok, f"{tag}: {detail}")
        if layout.num_utterances == num_channels and num_channels <= 4:
            square = score_matrix_sa_sdr_mse(estimates, targets)
            perms = (
                Assignment(tuple(perm), num_channels)
                for perm in itertools.permutations(range(num_channels))
            )
            ok, detail = _identity_check(square, estimates, targets, perms)
            report.stats("decomposition-identity").record(ok, f"{tag} (mse): {detail}")

        # Exact solvers must agree bitwise; alternate between the signal
        # matrix and an adversarial random one.
        if trial % 2 == 0:
            matrix = decomposition.score_matrix
        else:
            matrix = random_score_matrix(
                num_channels, layout.num_utterances, int(rng.integers(2**31))
            )
        bf = solve_graphpit_brute_force(matrix, graph, num_channels)
        bnb = solve_graphpit_branch_bound(matrix, graph, num_channels)
        dp = solve_graphpit_dp(matrix, layout, graph, num_channels)
        per_comp = solve_per_component(
            solve_graphpit_dp, matrix, layout, graph, num_channels
        )
        scores = {bf.score, bnb.score, dp.score, per_comp.score}
        report.stats("solver-score-equality").record(
            len(scores) == 1, f"{tag}: scores {sorted(scores)}"
        )

        bound = num_channels ** (num_channels - 1)
        report.stats("dp-state-bound").record(
            dp.max_states is not None and dp.max_states <= bound,
            f"{tag}: {dp.max_states} states > bound {bound}",
        )

        dfs = solve_graphpit_dfs(matrix, graph, num_channels)
        dfs_ok = (
            is_valid_coloring(graph, dfs.assignment)
            and not dfs.optimal
            and dfs.score >= bf.score
        )
        report.stats("dfs-soundness").record(
            dfs_ok, f"{tag}: dfs score {dfs.score} vs optimal {bf.score}"
        )
    return report


def _rescale(layout: UtteranceLayout, num_samples: int) -> UtteranceLayout:
    """Pad a layout's total length so signal synthesis has a stable
    minimum size; intervals always fit already."""
    total = max(num_samples, max(iv.end for iv in layout.intervals))
    return UtteranceLayout(layout.intervals, total)
