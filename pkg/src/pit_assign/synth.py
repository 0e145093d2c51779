"""Synthetic problem generators: chain layouts for benchmarks,
meeting-like layouts, and random score matrices for solver tests.

Real speech is intentionally out of scope; runtime and correctness
depend only on signal lengths and on the layout, so seeded white noise
stands in for utterance content.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Assignment, Interval, ScoreMatrix, SignalMatrix, UtteranceLayout
from .errors import InvalidParams
from .graph import build_overlap_graph
from .losses import targets_from_assignment

__all__ = [
    "SyntheticMeetingSpec",
    "chain_layout",
    "generate_meeting",
    "random_layout",
    "random_score_matrix",
    "measured_overlap_ratio",
    "noise_targets",
    "planted_estimates",
]

# Utterance lengths for generated meetings, in seconds.
MIN_UTTERANCE_SECONDS = 1.5
MAX_UTTERANCE_SECONDS = 4.5


def chain_layout(
    num_utterances: int,
    utterance_seconds: float = 2.0,
    overlap_seconds: float = 0.5,
    sample_rate: int = 8000,
) -> UtteranceLayout:
    """Back-to-back utterances of equal length with a fixed overlap.

    Utterance ``u`` starts at ``u * (length - overlap)``, so each one
    overlaps only its direct neighbors and the overlap graph is a path
    (an edgeless graph when the overlap is zero).
    """
    if num_utterances < 1:
        raise InvalidParams("need at least one utterance")
    if sample_rate <= 0:
        raise InvalidParams("sample_rate must be positive")
    if utterance_seconds <= 0:
        raise InvalidParams("utterance_seconds must be positive")
    if not 0 <= overlap_seconds < utterance_seconds:
        raise InvalidParams("overlap must be >= 0 and shorter than an utterance")
    length = round(utterance_seconds * sample_rate)
    overlap = round(overlap_seconds * sample_rate)
    if overlap >= length:
        raise InvalidParams("overlap rounds to the full utterance length")
    hop = length - overlap
    intervals = tuple(
        Interval(u * hop, u * hop + length) for u in range(num_utterances)
    )
    return UtteranceLayout(intervals, intervals[-1].end)


@dataclass(frozen=True)
class SyntheticMeetingSpec:
    """Parameters of a generated meeting.

    ``overlap_ratio`` bounds the ratio of doubly-active time to total
    speech time; gains are drawn log-uniformly (uniform in dB) from
    ``gain_db``. Output is deterministic per seed.
    """

    num_speakers: int = 6
    duration_seconds: float = 120.0
    overlap_ratio: tuple[float, float] = (0.2, 0.4)
    gain_db: tuple[float, float] = (0.0, 5.0)
    sample_rate: int = 8000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.num_speakers < 2:
            raise InvalidParams("a meeting needs at least two speakers")
        if self.duration_seconds * self.sample_rate < 2 * MAX_UTTERANCE_SECONDS * self.sample_rate:
            raise InvalidParams("duration too short for a meeting")
        low, high = self.overlap_ratio
        if not 0.0 <= low <= high < 1.0:
            raise InvalidParams("overlap_ratio must satisfy 0 <= low <= high < 1")
        if self.gain_db[0] > self.gain_db[1]:
            raise InvalidParams("gain_db range must be ordered")
        if self.sample_rate <= 0:
            raise InvalidParams("sample_rate must be positive")


def generate_meeting(
    spec: SyntheticMeetingSpec, channel_bound: int = 2
) -> tuple[UtteranceLayout, SignalMatrix]:
    """Generate a meeting-like layout plus white-noise utterance signals.

    Consecutive utterances come from different speakers and overlap by a
    randomized fraction targeting the requested overlap ratio. Onsets
    are clipped so that at most ``channel_bound`` utterances are active
    at once and a speaker never overlaps themselves.
    """
    if channel_bound < 2:
        raise InvalidParams("channel_bound must be >= 2")
    rng = np.random.default_rng(spec.seed)
    rate = spec.sample_rate
    total_length = round(spec.duration_seconds * rate)
    ratio = float(rng.uniform(*spec.overlap_ratio))
    # An overlap of o between consecutive utterances of length L yields
    # an overlap ratio of roughly o / (L - o): solve for the fraction.
    fraction = ratio / (1.0 + ratio)

    spans: list[tuple[int, int]] = []
    speaker_last_end = [0] * spec.num_speakers
    previous_speaker = -1
    previous_end = 0
    latest_ends: list[int] = []  # ends of all placed utterances, kept sorted
    while True:
        length = round(float(rng.uniform(MIN_UTTERANCE_SECONDS, MAX_UTTERANCE_SECONDS)) * rate)
        if previous_speaker < 0:
            speaker = int(rng.integers(spec.num_speakers))
            start = 0
        else:
            others = [k for k in range(spec.num_speakers) if k != previous_speaker]
            speaker = others[int(rng.integers(len(others)))]
            overlap = fraction * length * float(rng.uniform(0.9, 1.1))
            start = previous_end - round(overlap)
            # Keep concurrency under the channel bound: wait until fewer
            # than channel_bound utterances are still active.
            if len(latest_ends) >= channel_bound:
                start = max(start, latest_ends[-channel_bound])
            start = max(start, speaker_last_end[speaker], 0)
        end = start + length
        if end > total_length:
            break
        spans.append((start, end))
        speaker_last_end[speaker] = end
        previous_speaker = speaker
        previous_end = end
        latest_ends.append(end)
        latest_ends.sort()
    if not spans:
        raise InvalidParams("duration too short to place a single utterance")

    order = sorted(range(len(spans)), key=lambda i: spans[i])
    intervals = tuple(Interval(*spans[i]) for i in order)
    layout = UtteranceLayout(intervals, total_length)

    gains_db = rng.uniform(spec.gain_db[0], spec.gain_db[1], size=len(spans))
    signals = np.zeros((total_length, len(spans)), dtype=np.float64)
    for u, interval in enumerate(intervals):
        gain = 10.0 ** (gains_db[u] / 20.0)
        signals[interval.start : interval.end, u] = gain * rng.standard_normal(
            interval.length
        )
    return layout, SignalMatrix(signals)


def measured_overlap_ratio(layout: UtteranceLayout) -> float:
    """Overlapped-time over total-speech-time, measured by an endpoint
    sweep (time with >= 2 active utterances over time with >= 1)."""
    events: list[tuple[int, int]] = []
    for interval in layout.intervals:
        events.append((interval.start, 1))
        events.append((interval.end, -1))
    events.sort()
    active = 0
    speech = 0
    overlapped = 0
    previous = events[0][0]
    for time, delta in events:
        span = time - previous
        if active >= 1:
            speech += span
        if active >= 2:
            overlapped += span
        active += delta
        previous = time
    return overlapped / speech


def random_layout(
    num_utterances: int,
    max_active: int,
    rng: np.random.Generator,
    mean_utterance_samples: int = 400,
) -> UtteranceLayout:
    """Random layout with at most ``max_active`` concurrent utterances.

    Onsets walk forward with randomized overlaps into the previous
    utterance; gaps appear when the drawn overlap is negative, which
    splits the overlap graph into several components.
    """
    if num_utterances < 1:
        raise InvalidParams("need at least one utterance")
    if max_active < 1:
        raise InvalidParams("max_active must be >= 1")
    low = max(2, mean_utterance_samples // 2)
    high = max(low + 1, 2 * mean_utterance_samples)
    spans: list[tuple[int, int]] = []
    ends: list[int] = []
    previous_end = 0
    for u in range(num_utterances):
        length = int(rng.integers(low, high))
        if u == 0 or max_active == 1:
            start = previous_end if u else 0
        else:
            overlap = int(rng.integers(-length // 2, length))
            start = max(previous_end - overlap, 0)
            if len(ends) >= max_active:
                start = max(start, ends[-max_active])
        end = start + length
        spans.append((start, end))
        previous_end = end
        ends.append(end)
        ends.sort()
    spans.sort()
    total_length = max(end for _, end in spans)
    return UtteranceLayout(tuple(Interval(s, e) for s, e in spans), total_length)


def noise_targets(layout: UtteranceLayout, rng: np.random.Generator) -> SignalMatrix:
    """White-noise target columns, zero outside their utterance spans."""
    signals = np.zeros((layout.total_length, layout.num_utterances), dtype=np.float64)
    for u, interval in enumerate(layout.intervals):
        signals[interval.start : interval.end, u] = rng.standard_normal(interval.length)
    return SignalMatrix(signals)


def random_score_matrix(num_channels: int, num_utterances: int, seed: int) -> ScoreMatrix:
    """Score matrix with i.i.d. uniform entries in [-1, 1]."""
    if num_channels < 1 or num_utterances < 1:
        raise InvalidParams("matrix dimensions must be >= 1")
    rng = np.random.default_rng(seed)
    return ScoreMatrix(rng.uniform(-1.0, 1.0, size=(num_channels, num_utterances)))


def planted_estimates(
    layout: UtteranceLayout,
    targets: SignalMatrix,
    num_channels: int,
    rng: np.random.Generator,
    noise_amplitude: float = 0.1,
):
    """Fake separator outputs: the targets summed onto channels along a
    known valid assignment, plus white noise.

    The planted assignment is the first-fit coloring (each utterance
    takes the lowest channel free among its earlier overlaps), which is
    valid whenever the layout is feasible for ``num_channels``. Returns
    ``(estimates, planted_assignment)``.
    """
    graph = build_overlap_graph(layout)
    if graph.max_concurrency > num_channels:
        raise InvalidParams(
            f"layout needs {graph.max_concurrency} channels, got {num_channels}"
        )
    colors = []
    for u in range(graph.num_vertices):
        used = {colors[v] for v in graph.earlier_neighbors[u]}
        colors.append(min(c for c in range(num_channels) if c not in used))
    assignment = Assignment(tuple(colors), num_channels)
    mixed = targets_from_assignment(targets, assignment)
    noisy = mixed.data + noise_amplitude * rng.standard_normal(mixed.data.shape)
    return SignalMatrix(noisy), assignment
