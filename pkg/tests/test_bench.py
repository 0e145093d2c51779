"""Benchmark harness structure (curve shapes are covered in acceptance)."""

import csv
import io

import pytest

from pit_assign import InvalidParams, build_overlap_graph
from pit_assign.bench import (
    BENCH_ALGORITHMS,
    CSV_HEADER,
    DEFAULT_CAPS,
    make_chain_instance,
    run_benchmark,
    write_csv,
    write_gnuplot,
)

FAST_KWARGS = dict(
    utterance_seconds=0.02,
    overlap_seconds=0.005,
    sample_rate=8000,
    reps=2,
    warmup=1,
)


class TestMakeChainInstance:
    def test_builds_a_consistent_instance(self):
        instance = make_chain_instance(5, 3, utterance_seconds=0.02, overlap_seconds=0.005)
        assert instance.layout.num_utterances == 5
        assert instance.graph.edges == tuple((u, u + 1) for u in range(4))
        assert instance.targets.num_columns == 5
        assert instance.estimates.num_columns == 3
        assert instance.score_matrix.values.shape == (3, 5)

    def test_deterministic_per_seed(self):
        import numpy as np

        first = make_chain_instance(4, 2, seed=3, utterance_seconds=0.02, overlap_seconds=0.005)
        second = make_chain_instance(4, 2, seed=3, utterance_seconds=0.02, overlap_seconds=0.005)
        assert np.array_equal(first.score_matrix.values, second.score_matrix.values)


class TestRunBenchmark:
    def test_rows_are_algorithm_major_and_complete(self):
        rows = run_benchmark(
            algorithms=("score_matrix", "dp", "dfs"),
            utterance_counts=(3, 2),
            **FAST_KWARGS,
        )
        labels = [(row.algorithm, row.num_utterances) for row in rows]
        assert labels == [
            ("score_matrix", 2),
            ("score_matrix", 3),
            ("dp", 2),
            ("dp", 3),
            ("dfs", 2),
            ("dfs", 3),
        ]
        for row in rows:
            assert row.mean_runtime_s >= 0.0
            assert row.std_runtime_s >= 0.0
            assert row.num_channels == 3
            assert row.reps == 2

    def test_single_rep_has_zero_std(self):
        rows = run_benchmark(
            algorithms=("dp",),
            utterance_counts=(4,),
            utterance_seconds=0.02,
            overlap_seconds=0.005,
            reps=1,
            warmup=0,
        )
        assert len(rows) == 1
        assert rows[0].std_runtime_s == 0.0

    def test_default_caps_skip_expensive_points(self):
        rows = run_benchmark(
            algorithms=("unopt", "dp"),
            utterance_counts=(DEFAULT_CAPS["unopt"], DEFAULT_CAPS["unopt"] + 1),
            **FAST_KWARGS,
        )
        unopt_counts = [r.num_utterances for r in rows if r.algorithm == "unopt"]
        dp_counts = [r.num_utterances for r in rows if r.algorithm == "dp"]
        assert unopt_counts == [DEFAULT_CAPS["unopt"]]
        assert dp_counts == [DEFAULT_CAPS["unopt"], DEFAULT_CAPS["unopt"] + 1]

    def test_empty_caps_lift_the_limits(self):
        rows = run_benchmark(
            algorithms=("unopt",),
            utterance_counts=(DEFAULT_CAPS["unopt"] + 1,),
            caps={},
            **FAST_KWARGS,
        )
        assert [r.num_utterances for r in rows] == [DEFAULT_CAPS["unopt"] + 1]

    def test_unknown_algorithm_fails_fast(self):
        with pytest.raises(InvalidParams):
            run_benchmark(algorithms=("simplex",), utterance_counts=(2,), **FAST_KWARGS)

    def test_rejects_bad_reps_and_counts(self):
        with pytest.raises(InvalidParams):
            run_benchmark(algorithms=("dp",), utterance_counts=(2,), reps=0)
        with pytest.raises(InvalidParams):
            run_benchmark(algorithms=("dp",), utterance_counts=(0,), reps=1)

    def test_known_algorithm_set(self):
        assert BENCH_ALGORITHMS == ("score_matrix", "dp", "dfs", "bnb", "bf", "unopt")


class TestWriters:
    def build_rows(self):
        return run_benchmark(
            algorithms=("dp", "dfs"), utterance_counts=(2, 3), **FAST_KWARGS
        )

    def test_csv_layout(self):
        rows = self.build_rows()
        buffer = io.StringIO()
        write_csv(rows, buffer)
        parsed = list(csv.reader(io.StringIO(buffer.getvalue())))
        assert parsed[0] == CSV_HEADER
        assert len(parsed) == 1 + len(rows)
        for line, row in zip(parsed[1:], rows):
            assert line[0] == row.algorithm
            assert int(line[1]) == row.num_utterances
            assert int(line[2]) == row.num_channels
            assert float(line[3]) == pytest.approx(row.mean_runtime_s, abs=1e-9)
            assert int(line[5]) == row.reps

    def test_gnuplot_layout(self):
        rows = self.build_rows()
        buffer = io.StringIO()
        write_gnuplot(rows, buffer)
        text = buffer.getvalue()
        # Gnuplot index blocks are separated by two blank lines.
        blocks = [b.strip() for b in text.split("\n\n") if b.strip()]
        assert len(blocks) == 2
        assert blocks[0].startswith("# dp")
        assert blocks[1].startswith("# dfs")
        for block in blocks:
            data_lines = [l for l in block.splitlines() if not l.startswith("#")]
            assert [int(l.split()[0]) for l in data_lines] == [2, 3]
            assert all(len(l.split()) == 3 for l in data_lines)
