"""Wall-clock benchmark harness for the assignment solvers.

Times each algorithm on chain-layout instances of growing utterance
count and emits CSV rows (plus an optional gnuplot-friendly table).
Score-matrix construction is timed as its own pseudo-algorithm
``score_matrix`` so solver curves can be read against the cost of
building their input.
"""

from __future__ import annotations

import csv
import statistics
import time
from dataclasses import dataclass

import numpy as np

from .core import ScoreMatrix, SignalMatrix, UtteranceLayout
from .errors import InvalidParams
from .graph import OverlapGraph, build_overlap_graph
from .graphpit import (
    solve_graphpit_branch_bound,
    solve_graphpit_brute_force,
    solve_graphpit_dfs,
    solve_graphpit_dp,
    solve_graphpit_unoptimized,
)
from .losses import score_matrix_sa_sdr_dot
from .synth import chain_layout, noise_targets, planted_estimates

__all__ = [
    "BenchRow",
    "ChainInstance",
    "make_chain_instance",
    "run_benchmark",
    "write_csv",
    "write_gnuplot",
    "BENCH_ALGORITHMS",
    "DEFAULT_CAPS",
]

# Exponential algorithms stop at these utterance counts unless the
# caller lifts the caps; beyond them a single sweep stops being a
# desk-scale run.
DEFAULT_CAPS: dict[str, int] = {"unopt": 12, "bf": 18, "bnb": 29}

BENCH_ALGORITHMS = ("score_matrix", "dp", "dfs", "bnb", "bf", "unopt")


@dataclass(frozen=True)
class BenchRow:
    algorithm: str
    num_utterances: int
    num_channels: int
    mean_runtime_s: float
    std_runtime_s: float
    reps: int


@dataclass(frozen=True)
class ChainInstance:
    """One prebuilt benchmark problem; solvers are timed against it."""

    layout: UtteranceLayout
    graph: OverlapGraph
    targets: SignalMatrix
    estimates: SignalMatrix
    score_matrix: ScoreMatrix


def make_chain_instance(
    num_utterances: int,
    num_channels: int,
    utterance_seconds: float = 2.0,
    overlap_seconds: float = 0.5,
    sample_rate: int = 8000,
    seed: int = 0,
) -> ChainInstance:
    """Chain layout with noise targets and planted noisy estimates.

    The estimates follow a known valid assignment, so the score matrix
    has the structure a trained separator would produce.
    """
    rng = np.random.default_rng(seed)
    layout = chain_layout(num_utterances, utterance_seconds, overlap_seconds, sample_rate)
    targets = noise_targets(layout, rng)
    estimates, _ = planted_estimates(
        layout, targets, num_channels, rng, noise_amplitude=0.3
    )
    decomposition = score_matrix_sa_sdr_dot(estimates, targets)
    return ChainInstance(
        layout=layout,
        graph=build_overlap_graph(layout),
        targets=targets,
        estimates=estimates,
        score_matrix=decomposition.score_matrix,
    )


def _solver_call(instance: ChainInstance, algorithm: str, num_channels: int):
    if algorithm == "score_matrix":
        return lambda: score_matrix_sa_sdr_dot(instance.estimates, instance.targets)
    if algorithm == "unopt":
        return lambda: solve_graphpit_unoptimized(
            instance.estimates, instance.targets, instance.layout, num_channels
        )
    matrix_solvers = {
        "bf": solve_graphpit_brute_force,
        "dfs": solve_graphpit_dfs,
        "bnb": solve_graphpit_branch_bound,
    }
    if algorithm in matrix_solvers:
        solver = matrix_solvers[algorithm]
        return lambda: solver(instance.score_matrix, instance.graph, num_channels)
    if algorithm == "dp":
        return lambda: solve_graphpit_dp(
            instance.score_matrix, instance.layout, instance.graph, num_channels
        )
    raise InvalidParams(
        f"unknown benchmark algorithm {algorithm!r}; choose from {BENCH_ALGORITHMS}"
    )


def _time_call(call, reps: int, warmup: int) -> tuple[float, float]:
    for _ in range(warmup):
        call()
    times = []
    for _ in range(reps):
        begin = time.perf_counter()
        call()
        times.append(time.perf_counter() - begin)
    return statistics.fmean(times), statistics.pstdev(times)


def run_benchmark(
    algorithms=BENCH_ALGORITHMS,
    utterance_counts=range(2, 18),
    num_channels: int = 3,
    reps: int = 50,
    warmup: int = 3,
    utterance_seconds: float = 2.0,
    overlap_seconds: float = 0.5,
    sample_rate: int = 8000,
    seed: int = 0,
    caps: dict[str, int] | None = None,
) -> list[BenchRow]:
    """Time the chosen algorithms over a range of utterance counts.

    Returns one row per (algorithm, count) pair, in that nesting order.
    ``caps`` limits the exponential algorithms' maximum count (defaults
    to :data:`DEFAULT_CAPS`; pass ``{}`` to lift all caps); capped-out
    pairs are skipped rather than timed.
    """
    if reps < 1 or warmup < 0:
        raise InvalidParams("reps must be >= 1 and warmup >= 0")
    counts = sorted(set(int(u) for u in utterance_counts))
    if not counts or counts[0] < 1:
        raise InvalidParams("utterance counts must be positive")
    if caps is None:
        caps = DEFAULT_CAPS
    # Fail fast on typos before spending time on instance setup.
    probe = make_chain_instance(
        1, num_channels, utterance_seconds, overlap_seconds, sample_rate, seed
    )
    for algorithm in algorithms:
        _solver_call(probe, algorithm, num_channels)

    rows: list[BenchRow] = []
    instances = {
        count: make_chain_instance(
            count, num_channels, utterance_seconds, overlap_seconds, sample_rate, seed + count
        )
        for count in counts
    }
    for algorithm in algorithms:
        cap = caps.get(algorithm)
        for count in counts:
            if cap is not None and count > cap:
                continue
            call = _solver_call(instances[count], algorithm, num_channels)
            mean, std = _time_call(call, reps, warmup)
            rows.append(
                BenchRow(
                    algorithm=algorithm,
                    num_utterances=count,
                    num_channels=num_channels,
                    mean_runtime_s=mean,
                    std_runtime_s=std,
                    reps=reps,
                )
            )
    return rows


CSV_HEADER = ["algorithm", "U", "C", "mean_runtime_s", "std_runtime_s", "reps"]


def write_csv(rows: list[BenchRow], fp) -> None:
    """Write rows as CSV with the fixed header to an open text file."""
    writer = csv.writer(fp)
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(
            [
                row.algorithm,
                row.num_utterances,
                row.num_channels,
                f"{row.mean_runtime_s:.9f}",
                f"{row.std_runtime_s:.9f}",
                row.reps,
            ]
        )


def write_gnuplot(rows: list[BenchRow], fp) -> None:
    """Write rows as a gnuplot data file: one indexed block per
    algorithm with columns ``U mean std``."""
    by_algorithm: dict[str, list[BenchRow]] = {}
    for row in rows:
        by_algorithm.setdefault(row.algorithm, []).append(row)
    first = True
    for algorithm, algorithm_rows in by_algorithm.items():
        if not first:
            fp.write("\n\n")
        first = False
        fp.write(f"# {algorithm}\n")
        for row in sorted(algorithm_rows, key=lambda r: r.num_utterances):
            fp.write(
                f"{row.num_utterances} {row.mean_runtime_s:.9f} {row.std_runtime_s:.9f}\n"
            )
