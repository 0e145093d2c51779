"""Losses, score-matrix decompositions, and the strictly monotone wrappers."""

import math

import numpy as np
import pytest

import helpers
from pit_assign import (
    Assignment,
    DecompositionKind,
    DimensionMismatch,
    LossDecomposition,
    SignalMatrix,
    UtteranceLayout,
    ZeroTargetEnergy,
    a_sdr_loss,
    sa_sdr_loss,
    score_matrix_pairwise_sdr,
    score_matrix_sa_sdr_dot,
    score_matrix_sa_sdr_mse,
    sdr_loss,
    solve_upit_hungarian,
    targets_from_assignment,
)

FLOOR_DB = -100.0


class TestSdrLoss:
    def test_zero_estimate_scores_zero_db(self):
        assert sdr_loss([0.0, 0.0], [1.0, 0.0]) == 0.0

    def test_ten_percent_amplitude_error(self):
        loss = sdr_loss([0.9, 0.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0])
        assert loss == pytest.approx(-20.0, abs=1e-12)

    def test_perfect_reconstruction_hits_floor(self):
        assert sdr_loss([1.0, 2.0], [1.0, 2.0]) == FLOOR_DB

    def test_zero_target_energy_is_an_error(self):
        with pytest.raises(ZeroTargetEnergy):
            sdr_loss([1.0, 0.0], [0.0, 0.0])

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            sdr_loss([1.0, 0.0, 0.0], [1.0, 0.0])


def two_channel_pair(ratios):
    """Targets/estimates whose per-channel energy ratios are as requested."""
    targets = []
    estimates = []
    for ratio in ratios:
        target_energy = 1.0
        error_energy = target_energy / ratio
        targets.append([1.0, 0.0])
        estimates.append([1.0, math.sqrt(error_energy)])
    return (
        SignalMatrix.from_columns(estimates),
        SignalMatrix.from_columns(targets),
    )


class TestASdrLoss:
    def test_mean_of_two_ratios(self):
        estimates, targets = two_channel_pair([10.0, 30.0])
        loss = a_sdr_loss(estimates, targets)
        expected = (-10.0 * math.log10(10.0) - 10.0 * math.log10(30.0)) / 2.0
        assert loss == pytest.approx(expected, abs=1e-12)
        assert round(loss, 3) == -12.386

    def test_duplicated_channel_equals_single_channel_sdr(self):
        column = [0.4, -1.2, 0.8]
        estimate = [0.5, -1.0, 0.9]
        signals = SignalMatrix.from_columns([column, column])
        estimates = SignalMatrix.from_columns([estimate, estimate])
        assert a_sdr_loss(estimates, signals) == pytest.approx(
            sdr_loss(estimate, column), abs=1e-12
        )

    def test_matches_scalar_loop_oracle(self):
        rng = np.random.default_rng(3)
        targets = SignalMatrix(rng.standard_normal((64, 3)))
        estimates = SignalMatrix(rng.standard_normal((64, 3)))
        expected = 0.0
        for c in range(3):
            tgt = targets.data[:, c]
            err = tgt - estimates.data[:, c]
            expected += -10.0 * math.log10(float(tgt @ tgt) / float(err @ err))
        expected /= 3.0
        assert a_sdr_loss(estimates, targets) == pytest.approx(expected, abs=1e-12)

    def test_zero_energy_channel_is_named(self):
        targets = SignalMatrix.from_columns([[1.0, 0.0], [0.0, 0.0]])
        estimates = SignalMatrix(np.ones((2, 2)))
        with pytest.raises(ZeroTargetEnergy, match="channel 1"):
            a_sdr_loss(estimates, targets)


class TestSaSdrLoss:
    def test_aggregated_ratio(self):
        # Per-channel target energies 1 and 3 with error energy 0.1 each:
        # one aggregate ratio 4 / 0.2.
        targets = SignalMatrix.from_columns([[1.0, 0.0], [math.sqrt(3.0), 0.0]])
        estimates = SignalMatrix.from_columns(
            [[1.0, math.sqrt(0.1)], [math.sqrt(3.0), math.sqrt(0.1)]]
        )
        loss = sa_sdr_loss(estimates, targets)
        assert loss == pytest.approx(-10.0 * math.log10(4.0 / 0.2), abs=1e-12)
        assert round(loss, 4) == -13.0103

    def test_equal_ratios_match_per_channel_mean(self):
        estimates, targets = two_channel_pair([10.0, 10.0])
        assert sa_sdr_loss(estimates, targets) == pytest.approx(
            a_sdr_loss(estimates, targets), abs=1e-12
        )

    def test_perfect_reconstruction_hits_floor(self):
        targets = SignalMatrix(np.ones((4, 2)))
        assert sa_sdr_loss(targets, targets) == FLOOR_DB

    def test_zero_total_target_energy_is_an_error(self):
        targets = SignalMatrix(np.zeros((4, 2)))
        estimates = SignalMatrix(np.ones((4, 2)))
        with pytest.raises(ZeroTargetEnergy):
            sa_sdr_loss(estimates, targets)


class TestTargetsFromAssignment:
    def test_identity_permutation_keeps_signals(self):
        rng = np.random.default_rng(9)
        signals = SignalMatrix(rng.standard_normal((16, 3)))
        merged = targets_from_assignment(signals, Assignment((0, 1, 2), num_channels=3))
        assert np.array_equal(merged.data, signals.data)

    def test_matches_dense_matrix_product(self):
        rng = np.random.default_rng(10)
        for _ in range(50):
            samples = int(rng.integers(2, 30))
            utterances = int(rng.integers(1, 8))
            channels = int(rng.integers(1, 5))
            signals = SignalMatrix(rng.standard_normal((samples, utterances)))
            colors = tuple(int(c) for c in rng.integers(0, channels, size=utterances))
            assignment = Assignment(colors, num_channels=channels)
            merged = targets_from_assignment(signals, assignment)
            expected = signals.data @ assignment.to_matrix()
            assert np.allclose(merged.data, expected, atol=1e-12)

    def test_rejects_column_mismatch(self):
        signals = SignalMatrix(np.ones((4, 3)))
        with pytest.raises(DimensionMismatch):
            targets_from_assignment(signals, Assignment((0, 1), num_channels=2))


class TestPairwiseSdrMatrix:
    def test_perfect_estimates_put_floor_on_diagonal(self):
        rng = np.random.default_rng(21)
        targets = SignalMatrix(rng.standard_normal((32, 2)))
        matrix = score_matrix_pairwise_sdr(targets, targets)
        assert matrix.values[0, 0] == FLOOR_DB
        assert matrix.values[1, 1] == FLOOR_DB
        assert matrix.values[0, 1] > FLOOR_DB
        assert matrix.values[1, 0] > FLOOR_DB

    def test_swapped_estimates_make_hungarian_swap(self):
        rng = np.random.default_rng(22)
        targets = SignalMatrix(rng.standard_normal((32, 2)))
        noise = 0.01 * rng.standard_normal((32, 2))
        estimates = SignalMatrix(targets.data[:, ::-1] + noise)
        matrix = score_matrix_pairwise_sdr(estimates, targets)
        result = solve_upit_hungarian(matrix)
        assert result.assignment.colors == (1, 0)

    def test_entries_match_scalar_oracle(self):
        rng = np.random.default_rng(23)
        targets = SignalMatrix(rng.standard_normal((24, 4)))
        estimates = SignalMatrix(rng.standard_normal((24, 4)))
        matrix = score_matrix_pairwise_sdr(estimates, targets)
        for c in range(4):
            for u in range(4):
                expected = sdr_loss(estimates.data[:, c], targets.data[:, u])
                assert matrix.values[c, u] == expected

    def test_requires_square_problem(self):
        with pytest.raises(DimensionMismatch):
            score_matrix_pairwise_sdr(
                SignalMatrix(np.ones((8, 2))), SignalMatrix(np.ones((8, 3)))
            )

    def test_wrapper_divides_by_channel_count(self):
        rng = np.random.default_rng(24)
        targets = SignalMatrix(rng.standard_normal((32, 3)))
        estimates = SignalMatrix(rng.standard_normal((32, 3)))
        decomposition = LossDecomposition.build(
            DecompositionKind.A_SDR_PAIRWISE, estimates, targets
        )
        assert decomposition.loss_from_score(6.0) == pytest.approx(2.0, abs=1e-15)
        # At the identity assignment the wrapped trace is the a-SDR loss.
        trace = float(np.trace(decomposition.score_matrix.values))
        assert decomposition.loss_from_score(trace) == pytest.approx(
            a_sdr_loss(estimates, targets), abs=1e-12
        )


class TestMseDecomposition:
    def test_hand_case_and_optimal_swap(self):
        targets = SignalMatrix.from_columns([[1.0, 0.0], [0.0, 1.0]])
        estimates = SignalMatrix.from_columns([[0.0, 1.0], [1.0, 0.0]])
        score_matrix, wrapper = score_matrix_sa_sdr_mse(estimates, targets)
        assert score_matrix.values.tolist() == [[1.0, 0.0], [0.0, 1.0]]
        result = solve_upit_hungarian(score_matrix)
        assert result.assignment.colors == (1, 0)
        assert result.score == 0.0
        assert wrapper(result.score) == FLOOR_DB

    def test_perfect_estimates_clamp(self):
        rng = np.random.default_rng(31)
        targets = SignalMatrix(rng.standard_normal((16, 3)))
        score_matrix, wrapper = score_matrix_sa_sdr_mse(targets, targets)
        assert float(np.trace(score_matrix.values)) == 0.0
        assert wrapper(0.0) == FLOOR_DB

    def test_identity_against_direct_loss_over_all_permutations(self):
        rng = np.random.default_rng(32)
        perms = helpers.permutation_table(3)
        for _ in range(20):
            targets = SignalMatrix(rng.standard_normal((40, 3)))
            estimates = SignalMatrix(rng.standard_normal((40, 3)))
            score_matrix, wrapper = score_matrix_sa_sdr_mse(estimates, targets)
            wrapped = []
            direct = []
            for perm in perms:
                assignment = Assignment(tuple(int(c) for c in perm), num_channels=3)
                score = sum(
                    float(score_matrix.values[c, u])
                    for u, c in enumerate(assignment.colors)
                )
                wrapped.append(wrapper(score))
                merged = targets_from_assignment(targets, assignment)
                direct.append(sa_sdr_loss(estimates, merged))
            assert np.allclose(wrapped, direct, atol=1e-9)
            assert min(wrapped) == pytest.approx(min(direct), abs=1e-9)

    def test_requires_square_problem(self):
        with pytest.raises(DimensionMismatch):
            score_matrix_sa_sdr_mse(
                SignalMatrix(np.ones((8, 2))), SignalMatrix(np.ones((8, 3)))
            )

    def test_zero_targets_rejected(self):
        with pytest.raises(ZeroTargetEnergy):
            score_matrix_sa_sdr_mse(
                SignalMatrix(np.ones((8, 2))), SignalMatrix(np.zeros((8, 2)))
            )


class TestDotDecomposition:
    def test_perfect_estimates_hit_floor(self):
        rng = np.random.default_rng(41)
        targets = SignalMatrix(rng.standard_normal((16, 3)))
        score_matrix, wrapper = score_matrix_sa_sdr_dot(targets, targets)
        identity_score = sum(
            float(score_matrix.values[u, u]) for u in range(3)
        )
        assert wrapper(identity_score) == FLOOR_DB

    def test_orthogonal_estimate_scores_zero(self):
        targets = SignalMatrix.from_columns([[1.0, 0.0, 0.0, 0.0]])
        estimates = SignalMatrix.from_columns([[0.0, 1.0, 0.0, 0.0]])
        score_matrix, wrapper = score_matrix_sa_sdr_dot(estimates, targets)
        assert score_matrix.values.tolist() == [[0.0]]
        expected = -10.0 * math.log10(1.0 / (1.0 + 1.0))
        assert wrapper(0.0) == pytest.approx(expected, abs=1e-12)

    def test_entries_match_scalar_dot_oracle(self):
        rng = np.random.default_rng(42)
        targets = SignalMatrix(rng.standard_normal((20, 5)))
        estimates = SignalMatrix(rng.standard_normal((20, 3)))
        score_matrix, _ = score_matrix_sa_sdr_dot(estimates, targets)
        assert score_matrix.values.shape == (3, 5)
        for c in range(3):
            for u in range(5):
                expected = -float(
                    np.dot(estimates.data[:, c], targets.data[:, u])
                )
                assert score_matrix.values[c, u] == pytest.approx(expected, abs=1e-12)

    def test_identity_over_every_valid_assignment(self):
        rng = np.random.default_rng(43)
        pairs = [(0, 40), (20, 70), (60, 100), (90, 130), (120, 160)]
        layout = UtteranceLayout.from_pairs(pairs, total_length=160)
        targets, estimates = helpers.random_signals(rng, layout, 3)
        score_matrix, wrapper = score_matrix_sa_sdr_dot(estimates, targets)
        colorings = helpers.product_colorings(pairs, 3)
        assert colorings
        for colors in colorings:
            assignment = Assignment(colors, num_channels=3)
            score = sum(
                float(score_matrix.values[c, u]) for u, c in enumerate(colors)
            )
            merged = targets_from_assignment(targets, assignment)
            direct = sa_sdr_loss(estimates, merged)
            assert wrapper(score) == pytest.approx(direct, abs=1e-9)

    def test_zero_targets_rejected(self):
        with pytest.raises(ZeroTargetEnergy):
            score_matrix_sa_sdr_dot(
                SignalMatrix(np.ones((8, 2))), SignalMatrix(np.zeros((8, 4)))
            )

    def test_sample_count_mismatch_rejected(self):
        with pytest.raises(DimensionMismatch):
            score_matrix_sa_sdr_dot(
                SignalMatrix(np.ones((8, 2))), SignalMatrix(np.ones((9, 4)))
            )


class TestWrapperMonotonicity:
    def test_wrappers_strictly_increase_above_the_floor(self):
        rng = np.random.default_rng(51)
        targets = SignalMatrix(rng.standard_normal((32, 3)))
        estimates = SignalMatrix(rng.standard_normal((32, 3)))
        for kind in DecompositionKind:
            decomposition = LossDecomposition.build(kind, estimates, targets)
            # Scores chosen so every wrapped value sits above the clamp.
            grid = np.linspace(1.0, 50.0, 25)
            wrapped = [decomposition.loss_from_score(float(x)) for x in grid]
            assert all(a < b for a, b in zip(wrapped, wrapped[1:]))

    def test_unpacks_as_matrix_and_wrapper(self):
        rng = np.random.default_rng(52)
        targets = SignalMatrix(rng.standard_normal((16, 2)))
        estimates = SignalMatrix(rng.standard_normal((16, 2)))
        score_matrix, wrapper = score_matrix_sa_sdr_dot(estimates, targets)
        assert score_matrix.values.shape == (2, 2)
        assert callable(wrapper)
