"""Shared domain types for assignment-based separation objectives.

Everything here is a value type: instances are immutable after
construction and validate their invariants eagerly, so the solvers and
loss builders can trust their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidParams

__all__ = [
    "Interval",
    "UtteranceLayout",
    "SignalMatrix",
    "ScoreMatrix",
    "Assignment",
    "SolveResult",
    "intervals_overlap",
    "mixture",
    "assignment_score",
]


@dataclass(frozen=True, order=True)
class Interval:
    """Half-open activity span ``[start, end)`` in samples."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if not isinstance(self.start, int) or not isinstance(self.end, int):
            raise InvalidParams("interval bounds must be integers")
        if self.start < 0:
            raise InvalidParams(f"interval start must be >= 0, got {self.start}")
        if self.end <= self.start:
            raise InvalidParams(f"empty interval [{self.start}, {self.end})")

    @property
    def length(self) -> int:
        return self.end - self.start


def intervals_overlap(a: Interval, b: Interval) -> bool:
    """True iff the half-open spans share at least one sample.

    Touching intervals like [0, 5) and [5, 9) do not overlap.
    """
    return max(a.start, b.start) < min(a.end, b.end)


@dataclass(frozen=True)
class UtteranceLayout:
    """Activity spans of the utterances within a recording.

    The interval order is canonical: ascending by ``(start, end)``.
    Column ``u`` of an attached :class:`SignalMatrix` of targets belongs
    to ``intervals[u]``, and solver determinism relies on this order.
    """

    intervals: tuple[Interval, ...]
    total_length: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "intervals", tuple(self.intervals))
        if not self.intervals:
            raise InvalidParams("a layout needs at least one utterance")
        if self.total_length <= 0:
            raise InvalidParams("total_length must be positive")
        previous = None
        for interval in self.intervals:
            if not isinstance(interval, Interval):
                raise InvalidParams("layout entries must be Interval instances")
            if interval.end > self.total_length:
                raise InvalidParams(
                    f"interval [{interval.start}, {interval.end}) exceeds "
                    f"total_length {self.total_length}"
                )
            if previous is not None and (interval.start, interval.end) < previous:
                raise InvalidParams("intervals must be sorted by (start, end)")
            previous = (interval.start, interval.end)

    @property
    def num_utterances(self) -> int:
        return len(self.intervals)

    @classmethod
    def from_pairs(cls, pairs, total_length: int) -> "UtteranceLayout":
        """Build a layout from ``(start, end)`` pairs, sorting them into
        the canonical order."""
        intervals = sorted(Interval(int(s), int(e)) for s, e in pairs)
        return cls(tuple(intervals), int(total_length))


@dataclass(frozen=True, eq=False)
class SignalMatrix:
    """A ``T x N`` stack of equally long column signals.

    Columns are full-length, zero-padded signals (separator outputs or
    utterance targets). Data is coerced to float64 and frozen.
    """

    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.data, dtype=np.float64, copy=True)
        if arr.ndim != 2:
            raise InvalidParams(f"signal matrix must be 2-D, got {arr.ndim}-D")
        if arr.shape[0] == 0 or arr.shape[1] == 0:
            raise InvalidParams("signal matrix must have at least one sample and one column")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def num_samples(self) -> int:
        return self.data.shape[0]

    @property
    def num_columns(self) -> int:
        return self.data.shape[1]

    def column(self, index: int) -> np.ndarray:
        return self.data[:, index]

    @classmethod
    def from_columns(cls, columns) -> "SignalMatrix":
        return cls(np.column_stack([np.asarray(col, dtype=np.float64) for col in columns]))

    def validate_supports(self, layout: UtteranceLayout) -> None:
        """Check that column ``u`` is zero outside ``layout.intervals[u]``.

        Raises :class:`InvalidParams` on the first offending column.
        """
        if layout.num_utterances != self.num_columns:
            raise DimensionMismatch(
                f"layout has {layout.num_utterances} utterances but the "
                f"matrix has {self.num_columns} columns"
            )
        if layout.total_length != self.num_samples:
            raise DimensionMismatch(
                f"layout covers {layout.total_length} samples but the "
                f"matrix has {self.num_samples}"
            )
        for u, interval in enumerate(layout.intervals):
            col = self.data[:, u]
            if np.count_nonzero(col[: interval.start]) or np.count_nonzero(col[interval.end :]):
                raise InvalidParams(
                    f"column {u} is non-zero outside its span "
                    f"[{interval.start}, {interval.end})"
                )


def mixture(signals: SignalMatrix) -> np.ndarray:
    """Sum of all columns: the single-channel mixture of the signals."""
    return np.sum(signals.data, axis=1)


@dataclass(frozen=True, eq=False)
class ScoreMatrix:
    """A ``C x U`` matrix of assignment scores.

    Entry ``[c, u]`` is the cost of putting utterance ``u`` on output
    channel ``c``; solvers minimize the sum of the chosen entries.
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=np.float64, copy=True)
        if arr.ndim != 2:
            raise InvalidParams(f"score matrix must be 2-D, got {arr.ndim}-D")
        if arr.shape[0] == 0 or arr.shape[1] == 0:
            raise InvalidParams("score matrix must have at least one row and one column")
        if not np.all(np.isfinite(arr)):
            raise InvalidParams("score matrix entries must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def num_channels(self) -> int:
        return self.values.shape[0]

    @property
    def num_utterances(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class Assignment:
    """A color vector mapping each utterance to an output channel."""

    colors: tuple[int, ...]
    num_channels: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "colors", tuple(int(c) for c in self.colors))
        if not self.colors:
            raise InvalidParams("an assignment needs at least one utterance")
        if self.num_channels < 1:
            raise InvalidParams("num_channels must be >= 1")
        for u, c in enumerate(self.colors):
            if not 0 <= c < self.num_channels:
                raise InvalidParams(
                    f"utterance {u} assigned to channel {c}, outside "
                    f"[0, {self.num_channels})"
                )

    @property
    def num_utterances(self) -> int:
        return len(self.colors)

    @property
    def is_permutation(self) -> bool:
        """True iff the assignment is a bijection (square and one-to-one)."""
        return (
            self.num_utterances == self.num_channels
            and len(set(self.colors)) == self.num_utterances
        )

    def to_matrix(self) -> np.ndarray:
        """Dense ``U x C`` 0/1 matrix with a single one per row."""
        matrix = np.zeros((self.num_utterances, self.num_channels), dtype=np.float64)
        matrix[np.arange(self.num_utterances), list(self.colors)] = 1.0
        return matrix

    @classmethod
    def from_matrix(cls, matrix) -> "Assignment":
        """Inverse of :meth:`to_matrix`; validates the one-hot rows."""
        arr = np.asarray(matrix, dtype=np.float64)
        if arr.ndim != 2:
            raise InvalidParams("assignment matrix must be 2-D")
        if not np.all((arr == 0.0) | (arr == 1.0)):
            raise InvalidParams("assignment matrix entries must be 0 or 1")
        if not np.all(arr.sum(axis=1) == 1.0):
            raise InvalidParams("each utterance row must select exactly one channel")
        return cls(tuple(int(c) for c in arr.argmax(axis=1)), arr.shape[1])


def assignment_score(score_matrix: ScoreMatrix, assignment: Assignment) -> float:
    """Sum of the selected score entries, accumulated left to right.

    This is the canonical recomputation of a solver score: all exact
    solvers accumulate in the same utterance order, so equal optima
    compare bitwise equal.
    """
    if assignment.num_utterances != score_matrix.num_utterances:
        raise DimensionMismatch(
            f"assignment covers {assignment.num_utterances} utterances but "
            f"the score matrix has {score_matrix.num_utterances}"
        )
    if assignment.num_channels != score_matrix.num_channels:
        raise DimensionMismatch(
            f"assignment uses {assignment.num_channels} channels but the "
            f"score matrix has {score_matrix.num_channels}"
        )
    values = score_matrix.values
    total = 0.0
    for u, c in enumerate(assignment.colors):
        total += float(values[c, u])
    return total


@dataclass(frozen=True)
class SolveResult:
    """Outcome of one solver run.

    ``score`` is the minimized objective (the score-matrix trace for
    matrix-based solvers, the direct loss for the exhaustive direct
    solver). ``loss`` carries the loss in dB when the solver had enough
    information to compute it. ``nodes_expanded`` counts search-tree
    nodes for tree solvers; ``max_states`` is the peak intermediate
    state count for the dynamic program.
    """

    assignment: Assignment
    score: float
    loss: float | None = None
    optimal: bool = True
    nodes_expanded: int | None = None
    max_states: int | None = None
