"""Problem-file I/O.

A problem is a JSON object with the utterance layout, the channel
count, and either a precomputed score matrix or the raw signals:

    {
      "total_length": int,
      "intervals": [[start, end], ...],
      "num_channels": int,
      "score_matrix": [[...], ...],        # row-major, one row per channel
      "targets": [<base64>, ...],          # little-endian float32, one block per column
      "estimates": [<base64>, ...]
    }

Exactly one of ``score_matrix`` or the ``targets``/``estimates`` pair
must be present. An optional ``edges`` list (overlap-graph edges) may be
written for debugging; it is ignored on load.
"""

from __future__ import annotations

import base64
import binascii
import json
from dataclasses import dataclass

import numpy as np

from .core import ScoreMatrix, SignalMatrix, UtteranceLayout
from .errors import PitAssignError, ProblemFormatError
from .graph import build_overlap_graph

__all__ = ["Problem", "load_problem", "save_problem"]


@dataclass(frozen=True)
class Problem:
    """A solvable instance: layout plus a score matrix or signals."""

    layout: UtteranceLayout
    num_channels: int
    score_matrix: ScoreMatrix | None = None
    targets: SignalMatrix | None = None
    estimates: SignalMatrix | None = None

    @property
    def has_signals(self) -> bool:
        return self.targets is not None and self.estimates is not None


def _encode_columns(signals: SignalMatrix) -> list[str]:
    return [
        base64.b64encode(
            np.ascontiguousarray(signals.column(i), dtype="<f4").tobytes()
        ).decode("ascii")
        for i in range(signals.num_columns)
    ]


def _decode_columns(blocks, total_length: int, field: str) -> SignalMatrix:
    if not isinstance(blocks, list) or not blocks:
        raise ProblemFormatError(f'"{field}" must be a non-empty list of base64 strings')
    columns = []
    for i, block in enumerate(blocks):
        if not isinstance(block, str):
            raise ProblemFormatError(f'"{field}"[{i}] is not a string')
        try:
            raw = base64.b64decode(block.encode("ascii"), validate=True)
        except (binascii.Error, ValueError) as exc:
            raise ProblemFormatError(f'"{field}"[{i}] is not valid base64: {exc}') from exc
        if len(raw) != 4 * total_length:
            raise ProblemFormatError(
                f'"{field}"[{i}] holds {len(raw) // 4} samples, expected {total_length}'
            )
        columns.append(np.frombuffer(raw, dtype="<f4").astype(np.float64))
    return SignalMatrix.from_columns(columns)


def save_problem(path, problem: Problem, include_edges: bool = False) -> None:
    """Write a problem to ``path`` in the JSON format above."""
    payload: dict = {
        "total_length": problem.layout.total_length,
        "intervals": [[iv.start, iv.end] for iv in problem.layout.intervals],
        "num_channels": problem.num_channels,
    }
    if problem.score_matrix is not None:
        payload["score_matrix"] = problem.score_matrix.values.tolist()
    if problem.targets is not None:
        payload["targets"] = _encode_columns(problem.targets)
    if problem.estimates is not None:
        payload["estimates"] = _encode_columns(problem.estimates)
    if include_edges:
        payload["edges"] = [list(edge) for edge in build_overlap_graph(problem.layout).edges]
    with open(path, "w", encoding="ascii") as fp:
        json.dump(payload, fp)
        fp.write("\n")


def _require(obj: dict, field: str):
    if field not in obj:
        raise ProblemFormatError(f'missing required field "{field}"')
    return obj[field]


def load_problem(path) -> Problem:
    """Read and validate a problem file.

    Raises :class:`ProblemFormatError` for anything that does not match
    the documented schema.
    """
    try:
        with open(path, "r", encoding="utf-8") as fp:
            obj = json.load(fp)
    except json.JSONDecodeError as exc:
        raise ProblemFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ProblemFormatError("top-level JSON value must be an object")

    total_length = _require(obj, "total_length")
    if not isinstance(total_length, int) or total_length <= 0:
        raise ProblemFormatError('"total_length" must be a positive integer')
    intervals = _require(obj, "intervals")
    if not isinstance(intervals, list) or not intervals:
        raise ProblemFormatError('"intervals" must be a non-empty list of [start, end] pairs')
    pairs = []
    for i, pair in enumerate(intervals):
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(x, int) for x in pair)
        ):
            raise ProblemFormatError(f'"intervals"[{i}] must be a pair of integers')
        pairs.append((pair[0], pair[1]))
    num_channels = _require(obj, "num_channels")
    if not isinstance(num_channels, int) or num_channels < 1:
        raise ProblemFormatError('"num_channels" must be a positive integer')

    try:
        layout = UtteranceLayout.from_pairs(pairs, total_length)
    except PitAssignError as exc:
        raise ProblemFormatError(f"bad intervals: {exc}") from exc

    has_matrix = "score_matrix" in obj
    has_signals = "targets" in obj or "estimates" in obj
    if has_matrix == has_signals:
        raise ProblemFormatError(
            'exactly one of "score_matrix" or "targets"+"estimates" must be present'
        )

    score_matrix = None
    targets = None
    estimates = None
    if has_matrix:
        rows = obj["score_matrix"]
        if (
            not isinstance(rows, list)
            or not rows
            or not all(isinstance(row, list) for row in rows)
        ):
            raise ProblemFormatError('"score_matrix" must be a list of rows')
        if len(rows) != num_channels:
            raise ProblemFormatError(
                f'"score_matrix" has {len(rows)} rows, expected {num_channels}'
            )
        if any(len(row) != layout.num_utterances for row in rows):
            raise ProblemFormatError(
                f'every "score_matrix" row must have {layout.num_utterances} entries'
            )
        try:
            score_matrix = ScoreMatrix(np.asarray(rows, dtype=np.float64))
        except (PitAssignError, ValueError) as exc:
            raise ProblemFormatError(f"bad score matrix: {exc}") from exc
    else:
        if "targets" not in obj or "estimates" not in obj:
            raise ProblemFormatError('"targets" and "estimates" must be given together')
        targets = _decode_columns(obj["targets"], total_length, "targets")
        estimates = _decode_columns(obj["estimates"], total_length, "estimates")
        if targets.num_columns != layout.num_utterances:
            raise ProblemFormatError(
                f'{targets.num_columns} target columns for '
                f"{layout.num_utterances} intervals"
            )
        if estimates.num_columns != num_channels:
            raise ProblemFormatError(
                f'{estimates.num_columns} estimate columns for '
                f"{num_channels} channels"
            )
    return Problem(
        layout=layout,
        num_channels=num_channels,
        score_matrix=score_matrix,
        targets=targets,
        estimates=estimates,
    )
