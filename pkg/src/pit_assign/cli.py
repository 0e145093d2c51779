"""Command-line interface.

    pit-assign solve PROBLEM [--algorithm dp] [--per-component] [--out FILE]
    pit-assign verify [--trials 1000] [--seed N] ...
    pit-assign bench [--algorithms ...] [--utterances 2:17] [--out FILE] ...
    pit-assign synth chain|meeting|matrix --out FILE ...

Problems are JSON files (see :mod:`pit_assign.problem`). The default
seed is 0 everywhere; the ``PIT_ASSIGN_SEED`` environment variable
overrides it when no ``--seed`` flag is given.

Exit codes: 0 success, 1 bad input or I/O failure, 2 infeasible problem.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .bench import BENCH_ALGORITHMS, run_benchmark, write_csv, write_gnuplot
from .core import SolveResult
from .errors import Infeasible, PitAssignError
from .graph import build_overlap_graph
from .graphpit import (
    GRAPHPIT_SOLVERS,
    solve_graphpit_unoptimized,
    solve_per_component,
)
from .losses import score_matrix_sa_sdr_dot
from .problem import Problem, load_problem, save_problem
from .synth import (
    SyntheticMeetingSpec,
    chain_layout,
    generate_meeting,
    noise_targets,
    planted_estimates,
    random_score_matrix,
)
from .upit import solve_upit_hungarian
from .verify import run_verification

DEFAULT_SEED = 0

SOLVE_ALGORITHMS = ("dp", "bf", "dfs", "bnb", "unopt", "hungarian")


def _resolve_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("PIT_ASSIGN_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise PitAssignError(f"PIT_ASSIGN_SEED must be an integer, got {env!r}") from None
    return DEFAULT_SEED


def _parse_counts(text: str) -> list[int]:
    """Parse a count range: "2:17" (inclusive) or "2,5,9"."""
    text = text.strip()
    if ":" in text:
        lo_text, _, hi_text = text.partition(":")
        lo, hi = int(lo_text), int(hi_text)
        if lo > hi:
            raise ValueError(f"empty range {text!r}")
        return list(range(lo, hi + 1))
    return [int(part) for part in text.split(",") if part]


def _solve_problem(problem: Problem, algorithm: str, per_component: bool) -> SolveResult:
    if algorithm == "unopt":
        if not problem.has_signals:
            raise PitAssignError(
                "the unoptimized solver needs targets and estimates, but the "
                "problem file only carries a score matrix"
            )
        return solve_graphpit_unoptimized(
            problem.estimates, problem.targets, problem.layout, problem.num_channels
        )

    decomposition = None
    if problem.score_matrix is not None:
        matrix = problem.score_matrix
    else:
        decomposition = score_matrix_sa_sdr_dot(problem.estimates, problem.targets)
        matrix = decomposition.score_matrix

    if algorithm == "hungarian":
        result = solve_upit_hungarian(matrix)
    else:
        solver = GRAPHPIT_SOLVERS[algorithm]
        graph = build_overlap_graph(problem.layout)
        if per_component:
            result = solve_per_component(
                solver, matrix, problem.layout, graph, problem.num_channels
            )
        elif algorithm == "dp":
            result = solver(matrix, problem.layout, graph, problem.num_channels)
        else:
            result = solver(matrix, graph, problem.num_channels)

    loss = result.loss
    if loss is None and decomposition is not None:
        loss = decomposition.loss_from_score(result.score)
    return SolveResult(
        assignment=result.assignment,
        score=result.score,
        loss=loss,
        optimal=result.optimal,
        nodes_expanded=result.nodes_expanded,
        max_states=result.max_states,
    )


def cmd_solve(args) -> int:
    try:
        problem = load_problem(args.problem)
        result = _solve_problem(problem, args.algorithm, args.per_component)
    except Infeasible as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 2
    except (PitAssignError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    print(f"algorithm: {args.algorithm}")
    print(f"assignment: {' '.join(str(c) for c in result.assignment.colors)}")
    print(f"score: {result.score!r}")
    if result.loss is not None:
        print(f"loss_db: {result.loss!r}")
    print(f"optimal: {str(result.optimal).lower()}")
    if result.nodes_expanded is not None:
        print(f"nodes_expanded: {result.nodes_expanded}")
    if result.max_states is not None:
        print(f"max_states: {result.max_states}")

    if args.out:
        payload = {
            "algorithm": args.algorithm,
            "assignment": list(result.assignment.colors),
            "num_channels": result.assignment.num_channels,
            "score": result.score,
            "loss_db": result.loss,
            "optimal": result.optimal,
            "nodes_expanded": result.nodes_expanded,
            "max_states": result.max_states,
        }
        try:
            with open(args.out, "w", encoding="ascii") as fp:
                json.dump(payload, fp, indent=2)
                fp.write("\n")
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
    return 0


def cmd_verify(args) -> int:
    try:
        seed = _resolve_seed(args.seed)
        channels = tuple(_parse_counts(args.channels))
        report = run_verification(
            trials=args.trials,
            seed=seed,
            max_utterances=args.max_utterances,
            channels=channels,
        )
    except (PitAssignError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for line in report.format_lines():
        print(line)
    return 0 if report.all_passed else 1


def cmd_bench(args) -> int:
    try:
        seed = _resolve_seed(args.seed)
        counts = _parse_counts(args.utterances)
        algorithms = [a for a in args.algorithms.split(",") if a]
        rows = run_benchmark(
            algorithms=algorithms,
            utterance_counts=counts,
            num_channels=args.channels,
            reps=args.reps,
            warmup=args.warmup,
            utterance_seconds=args.utterance_seconds,
            overlap_seconds=args.overlap_seconds,
            sample_rate=args.sample_rate,
            seed=seed,
            caps={} if args.no_caps else None,
        )
    except (PitAssignError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        if args.out:
            with open(args.out, "w", encoding="ascii", newline="") as fp:
                write_csv(rows, fp)
        else:
            write_csv(rows, sys.stdout)
        if args.gnuplot:
            with open(args.gnuplot, "w", encoding="ascii") as fp:
                write_gnuplot(rows, fp)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def cmd_synth(args) -> int:
    try:
        seed = _resolve_seed(args.seed)
        rng = np.random.default_rng(seed)
        if args.kind == "chain":
            layout = chain_layout(
                args.utterances,
                args.utterance_seconds,
                args.overlap_seconds,
                args.sample_rate,
            )
            targets = noise_targets(layout, rng)
        elif args.kind == "meeting":
            spec = SyntheticMeetingSpec(
                num_speakers=args.speakers,
                duration_seconds=args.duration,
                overlap_ratio=(args.overlap_low, args.overlap_high),
                gain_db=(args.gain_low, args.gain_high),
                sample_rate=args.sample_rate,
                seed=seed,
            )
            layout, targets = generate_meeting(spec, channel_bound=args.channels)
        else:  # matrix
            layout = chain_layout(
                args.utterances,
                args.utterance_seconds,
                args.overlap_seconds,
                args.sample_rate,
            )
            matrix = random_score_matrix(args.channels, layout.num_utterances, seed)
            problem = Problem(
                layout=layout, num_channels=args.channels, score_matrix=matrix
            )
            save_problem(args.out, problem, include_edges=args.edges)
            print(f"wrote {args.out}")
            return 0
        estimates, _ = planted_estimates(
            layout, targets, args.channels, rng, noise_amplitude=args.noise_amplitude
        )
        problem = Problem(
            layout=layout,
            num_channels=args.channels,
            targets=targets,
            estimates=estimates,
        )
        save_problem(args.out, problem, include_edges=args.edges)
    except (PitAssignError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pit-assign",
        description=(
            "Assignment solvers for permutation-invariant separation "
            "objectives: solve problem files, verify solver properties, "
            "benchmark runtime scaling, and generate synthetic problems."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve a problem file")
    p_solve.add_argument("problem", help="path to a problem JSON file")
    p_solve.add_argument(
        "--algorithm",
        default="dp",
        choices=SOLVE_ALGORITHMS,
        help="solver to use (default: dp)",
    )
    p_solve.add_argument(
        "--per-component",
        action="store_true",
        help="solve each overlap-graph component independently",
    )
    p_solve.add_argument("--out", help="also write the result as JSON to this path")
    p_solve.set_defaults(func=cmd_solve)

    p_verify = sub.add_parser("verify", help="run the randomized property suite")
    p_verify.add_argument("--trials", type=int, default=1000)
    p_verify.add_argument("--seed", type=int, default=None)
    p_verify.add_argument("--max-utterances", type=int, default=8)
    p_verify.add_argument(
        "--channels", default="2,3", help='channel counts to cycle through, e.g. "2,3"'
    )
    p_verify.set_defaults(func=cmd_verify)

    p_bench = sub.add_parser("bench", help="benchmark solver runtimes on chain layouts")
    p_bench.add_argument(
        "--algorithms",
        default=",".join(BENCH_ALGORITHMS),
        help=f"comma list among {','.join(BENCH_ALGORITHMS)}",
    )
    p_bench.add_argument(
        "--utterances", default="2:17", help='utterance counts: "lo:hi" or comma list'
    )
    p_bench.add_argument("--channels", type=int, default=3)
    p_bench.add_argument("--reps", type=int, default=50, help="timed repetitions (500 for full averaging)")
    p_bench.add_argument("--warmup", type=int, default=3)
    p_bench.add_argument("--utterance-seconds", type=float, default=2.0)
    p_bench.add_argument("--overlap-seconds", type=float, default=0.5)
    p_bench.add_argument("--sample-rate", type=int, default=8000)
    p_bench.add_argument("--seed", type=int, default=None)
    p_bench.add_argument("--out", help="CSV output path (default: stdout)")
    p_bench.add_argument("--gnuplot", help="also write a gnuplot data file here")
    p_bench.add_argument(
        "--no-caps",
        action="store_true",
        help="time exponential algorithms beyond their default utterance caps",
    )
    p_bench.set_defaults(func=cmd_bench)

    p_synth = sub.add_parser("synth", help="generate a synthetic problem file")
    p_synth.add_argument("kind", choices=("chain", "meeting", "matrix"))
    p_synth.add_argument("--out", required=True, help="output problem JSON path")
    p_synth.add_argument("--channels", type=int, default=3)
    p_synth.add_argument("--utterances", type=int, default=8, help="chain/matrix: utterance count")
    p_synth.add_argument("--utterance-seconds", type=float, default=2.0)
    p_synth.add_argument("--overlap-seconds", type=float, default=0.5)
    p_synth.add_argument("--sample-rate", type=int, default=8000)
    p_synth.add_argument("--speakers", type=int, default=6, help="meeting: speaker count")
    p_synth.add_argument("--duration", type=float, default=120.0, help="meeting: seconds")
    p_synth.add_argument("--overlap-low", type=float, default=0.2)
    p_synth.add_argument("--overlap-high", type=float, default=0.4)
    p_synth.add_argument("--gain-low", type=float, default=0.0)
    p_synth.add_argument("--gain-high", type=float, default=5.0)
    p_synth.add_argument("--noise-amplitude", type=float, default=0.1)
    p_synth.add_argument("--seed", type=int, default=None)
    p_synth.add_argument(
        "--edges", action="store_true", help="include overlap-graph edges for debugging"
    )
    p_synth.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
