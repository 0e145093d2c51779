"""SDR-family losses and their score-matrix decompositions.

The solvers in this package minimize ``Tr(M P)`` over assignment
matrices ``P``. Each loss here either is that trace directly (the
pairwise form) or is recovered from it through a strictly increasing
scalar map ``f``, so minimizing the trace minimizes the loss.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import Assignment, ScoreMatrix, SignalMatrix
from .errors import DimensionMismatch, ZeroTargetEnergy

__all__ = [
    "ERROR_FLOOR_RATIO",
    "DecompositionKind",
    "LossDecomposition",
    "sdr_loss",
    "a_sdr_loss",
    "sa_sdr_loss",
    "targets_from_assignment",
    "score_matrix_pairwise_sdr",
    "score_matrix_sa_sdr_mse",
    "score_matrix_sa_sdr_dot",
]

# Error energies are floored at this fraction of the target energy, so a
# perfect reconstruction reports -100 dB instead of diverging. The same
# floor is applied inside the wrappers f and the direct losses, which
# keeps them equal on every assignment.
ERROR_FLOOR_RATIO = 1e-10


def _energy(x: np.ndarray) -> float:
    flat = np.ravel(x)
    return float(np.dot(flat, flat))


def _ratio_db(target_energy: float, error_energy: float) -> float:
    floored = max(error_energy, ERROR_FLOOR_RATIO * target_energy)
    return -10.0 * math.log10(target_energy / floored)


def sdr_loss(estimate, target) -> float:
    """Negated SDR in dB of ``estimate`` against ``target``.

    More negative is better; the value bottoms out at -100 dB.
    """
    est = np.asarray(estimate, dtype=np.float64)
    tgt = np.asarray(target, dtype=np.float64)
    if est.shape != tgt.shape:
        raise DimensionMismatch(f"estimate shape {est.shape} != target shape {tgt.shape}")
    target_energy = _energy(tgt)
    if target_energy == 0.0:
        raise ZeroTargetEnergy("target signal has zero energy")
    return _ratio_db(target_energy, _energy(tgt - est))


def _check_same_shape(estimates: SignalMatrix, targets: SignalMatrix) -> None:
    if estimates.data.shape != targets.data.shape:
        raise DimensionMismatch(
            f"estimates shape {estimates.data.shape} != targets shape "
            f"{targets.data.shape}"
        )


def a_sdr_loss(estimates: SignalMatrix, targets: SignalMatrix) -> float:
    """Mean over channels of the per-channel SDR loss."""
    _check_same_shape(estimates, targets)
    total = 0.0
    for c in range(targets.num_columns):
        tgt = targets.column(c)
        target_energy = _energy(tgt)
        if target_energy == 0.0:
            raise ZeroTargetEnergy(f"target channel {c} has zero energy")
        total += _ratio_db(target_energy, _energy(tgt - estimates.column(c)))
    return total / targets.num_columns


def sa_sdr_loss(estimates: SignalMatrix, targets: SignalMatrix) -> float:
    """Source-aggregated SDR loss: one energy ratio over all channels.

    Unlike the per-channel mean, quiet channels cannot dominate: both
    energies are summed before the ratio is taken.
    """
    _check_same_shape(estimates, targets)
    target_energy = _energy(targets.data)
    if target_energy == 0.0:
        raise ZeroTargetEnergy("total target energy is zero")
    error_energy = _energy(targets.data - estimates.data)
    return _ratio_db(target_energy, error_energy)


def targets_from_assignment(signals: SignalMatrix, assignment: Assignment) -> SignalMatrix:
    """Sum the utterance columns onto their assigned channels (``S P``)."""
    if signals.num_columns != assignment.num_utterances:
        raise DimensionMismatch(
            f"{signals.num_columns} utterance columns but the assignment "
            f"covers {assignment.num_utterances}"
        )
    out = np.zeros((signals.num_samples, assignment.num_channels), dtype=np.float64)
    for u, c in enumerate(assignment.colors):
        out[:, c] += signals.data[:, u]
    return SignalMatrix(out)


class DecompositionKind(enum.Enum):
    """Available score-matrix decompositions.

    ``A_SDR_PAIRWISE`` and ``SA_SDR_MSE`` require as many utterances as
    channels (square problems); ``SA_SDR_DOT`` also covers the
    rectangular utterance-to-channel case.
    """

    A_SDR_PAIRWISE = "a-sdr-pairwise"
    SA_SDR_MSE = "sa-sdr-mse"
    SA_SDR_DOT = "sa-sdr-dot"


@dataclass(frozen=True, eq=False)
class LossDecomposition:
    """A score matrix plus the strictly increasing wrapper ``f``.

    ``loss_from_score`` maps the minimized trace back to the loss in dB.
    Unpacks as the pair ``(score_matrix, loss_from_score)``.
    """

    kind: DecompositionKind
    score_matrix: ScoreMatrix
    target_energy: float
    estimate_energy: float
    num_samples: int
    num_channels: int

    def __iter__(self):
        return iter((self.score_matrix, self.loss_from_score))

    def loss_from_score(self, score: float) -> float:
        """The wrapper ``f``: loss in dB for a given assignment score."""
        if self.kind is DecompositionKind.A_SDR_PAIRWISE:
            return score / self.num_channels
        if self.kind is DecompositionKind.SA_SDR_MSE:
            return _ratio_db(self.target_energy, self.num_samples * score)
        error_energy = self.target_energy + self.estimate_energy + 2.0 * score
        return _ratio_db(self.target_energy, error_energy)

    @classmethod
    def build(
        cls, kind: DecompositionKind, estimates: SignalMatrix, targets: SignalMatrix
    ) -> "LossDecomposition":
        if kind is DecompositionKind.A_SDR_PAIRWISE:
            matrix = score_matrix_pairwise_sdr(estimates, targets)
            return cls(
                kind=kind,
                score_matrix=matrix,
                target_energy=_energy(targets.data),
                estimate_energy=_energy(estimates.data),
                num_samples=targets.num_samples,
                num_channels=estimates.num_columns,
            )
        if kind is DecompositionKind.SA_SDR_MSE:
            return score_matrix_sa_sdr_mse(estimates, targets)
        if kind is DecompositionKind.SA_SDR_DOT:
            return score_matrix_sa_sdr_dot(estimates, targets)
        raise ValueError(f"unknown decomposition kind: {kind!r}")


def _check_square(estimates: SignalMatrix, targets: SignalMatrix, what: str) -> None:
    if estimates.num_samples != targets.num_samples:
        raise DimensionMismatch(
            f"estimates cover {estimates.num_samples} samples but targets "
            f"cover {targets.num_samples}"
        )
    if estimates.num_columns != targets.num_columns:
        raise DimensionMismatch(
            f"{what} needs as many targets as channels, got "
            f"{targets.num_columns} targets for {estimates.num_columns} channels"
        )


def score_matrix_pairwise_sdr(estimates: SignalMatrix, targets: SignalMatrix) -> ScoreMatrix:
    """Square matrix of pairwise SDR losses: entry ``[c, u]`` scores
    estimate channel ``c`` against target ``u``.

    The per-channel averaging lives in the wrapper (``f(x) = x / C``),
    so the entries are the raw pairwise losses.
    """
    _check_square(estimates, targets, "the pairwise decomposition")
    channels = estimates.num_columns
    values = np.empty((channels, channels), dtype=np.float64)
    for u in range(channels):
        tgt = targets.column(u)
        if _energy(tgt) == 0.0:
            raise ZeroTargetEnergy(f"target {u} has zero energy")
        for c in range(channels):
            values[c, u] = sdr_loss(estimates.column(c), tgt)
    return ScoreMatrix(values)


def score_matrix_sa_sdr_mse(
    estimates: SignalMatrix, targets: SignalMatrix
) -> LossDecomposition:
    """Decomposition of the source-aggregated SDR loss with mean squared
    errors as scores: entry ``[c, u] = (1/T) * ||s_u - s_hat_c||^2``.

    Only valid when each channel receives exactly one utterance, i.e.
    for square permutation problems.
    """
    _check_square(estimates, targets, "the MSE decomposition")
    target_energy = _energy(targets.data)
    if target_energy == 0.0:
        raise ZeroTargetEnergy("total target energy is zero")
    channels = estimates.num_columns
    num_samples = targets.num_samples
    values = np.empty((channels, channels), dtype=np.float64)
    for u in range(channels):
        tgt = targets.column(u)
        for c in range(channels):
            values[c, u] = _energy(tgt - estimates.column(c)) / num_samples
    return LossDecomposition(
        kind=DecompositionKind.SA_SDR_MSE,
        score_matrix=ScoreMatrix(values),
        target_energy=target_energy,
        estimate_energy=_energy(estimates.data),
        num_samples=num_samples,
        num_channels=channels,
    )


def score_matrix_sa_sdr_dot(
    estimates: SignalMatrix, targets: SignalMatrix
) -> LossDecomposition:
    """Decomposition of the source-aggregated SDR loss with negated dot
    products as scores: one dense matrix product builds the whole matrix.

    Works for any utterance count, which makes it the decomposition of
    choice when utterances merely need disjoint activity per channel:
    the cross terms that would break the identity vanish for signals
    with disjoint support.
    """
    if estimates.num_samples != targets.num_samples:
        raise DimensionMismatch(
            f"estimates cover {estimates.num_samples} samples but targets "
            f"cover {targets.num_samples}"
        )
    target_energy = _energy(targets.data)
    if target_energy == 0.0:
        raise ZeroTargetEnergy("total target energy is zero")
    values = -(estimates.data.T @ targets.data)
    return LossDecomposition(
        kind=DecompositionKind.SA_SDR_DOT,
        score_matrix=ScoreMatrix(values),
        target_energy=target_energy,
        estimate_energy=_energy(estimates.data),
        num_samples=targets.num_samples,
        num_channels=estimates.num_columns,
    )
