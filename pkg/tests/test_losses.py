import math
import random

import pytest

from glyphkit.geometry import Line
from glyphkit.losses import (
    CostMatrix,
    LossComponents,
    LossWeights,
    kl_gaussian,
    loss_alignment,
    loss_args,
    loss_aux_render,
    loss_cmd,
    loss_consistency,
    loss_continuity,
    loss_visibility,
    total_loss,
)
from glyphkit.model import Command, Path

IDENTITY_W = CostMatrix(((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)))
G1_ROW = (0.05, 0.90, 0.05)
W_DEFAULT = CostMatrix()


def row_entropy(row):
    return -sum(w * math.log(w) for w in row if w > 0)


class TestLossContinuity:
    def test_one_hot_identity_rows_zero(self):
        probs = [[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]
        assert loss_continuity(probs, [0, 2], IDENTITY_W) == pytest.approx(0.0)

    def test_row_as_prediction_gives_row_entropy(self):
        w = CostMatrix(((0.9, 0.08, 0.02), G1_ROW, (0.02, 0.08, 0.9)))
        value = loss_continuity([list(G1_ROW)], [1], w)
        assert value == pytest.approx(row_entropy(G1_ROW), abs=1e-12)
        # closed form: -(2 * 0.05 ln 0.05 + 0.9 ln 0.9)
        assert value == pytest.approx(0.3943976914474428, abs=1e-9)

    def test_uniform_prediction_gives_log3(self):
        assert loss_continuity([[1 / 3] * 3], [1], W_DEFAULT) == pytest.approx(
            math.log(3.0), abs=1e-12
        )

    def test_minimum_at_soft_target_row(self):
        # grid search over the probability simplex at resolution 0.01;
        # simplex corners legitimately trip the log clamp
        import warnings

        y = 1
        target = W_DEFAULT[y]
        best = None
        n = 100
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            for i in range(n + 1):
                for j in range(n + 1 - i):
                    p = (i / n, j / n, (n - i - j) / n)
                    val = loss_continuity([list(p)], [y], W_DEFAULT)
                    if best is None or val < best[0]:
                        best = (val, p)
        val, p = best
        assert p == pytest.approx(target, abs=1 / n)
        assert val >= row_entropy(target) - 1e-9
        assert val == pytest.approx(row_entropy(target), abs=1e-3)

    def test_zero_probability_clamped_with_warning(self):
        with pytest.warns(RuntimeWarning, match="clamped"):
            value = loss_continuity([[0.0, 1.0, 0.0]], [0], W_DEFAULT)
        assert value > 1.0  # dominated by the clamp penalty

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            loss_continuity([], [], W_DEFAULT)


class TestLossAlignment:
    def test_perfect(self):
        assert loss_alignment([[0, 1, 0], [1, 0, 0]], [1, 0]) == pytest.approx(0.0, abs=1e-9)

    def test_uniform(self):
        assert loss_alignment([[1 / 3] * 3], [2]) == pytest.approx(math.log(3.0))

    def test_half_confidence(self):
        probs = [[0.5, 0.25, 0.25]] * 3
        assert loss_alignment(probs, [0, 0, 0]) == pytest.approx(math.log(2.0))


class TestLossConsistency:
    def test_chained_path_zero(self):
        p = Path(
            (
                Command.move((0, 0)),
                Command.line((0, 0), (1, 0)),
                Command.line((1, 0), (1, 1)),
            )
        )
        assert loss_consistency(p) == pytest.approx(0.0)

    def test_single_gap(self):
        p = Path(
            (
                Command.move((0, 0)),
                Command.line((0, 0), (1, 0)),
                Command.line((1.3, 0.4), (2, 1)),
            )
        )
        assert loss_consistency(p) == pytest.approx(0.25)

    def test_two_junction_mean(self):
        p = Path(
            (
                Command.move((0, 0)),
                Command.line((0, 0), (1, 0)),
                Command.line((1, 0), (2, 0)),
                Command.line((3, 0), (4, 0)),
            )
        )
        assert loss_consistency(p) == pytest.approx(0.5)

    def test_too_short_rejected(self):
        p = Path((Command.move((0, 0)), Command.line((0, 0), (1, 0))))
        with pytest.raises(ValueError):
            loss_consistency(p)


class TestMaskedLosses:
    def test_all_perfect_zero(self):
        assert loss_args([1.0, 2.0], [1.0, 2.0], [1, 1]) == pytest.approx(0.0)
        assert loss_cmd([[0, 1, 0, 0]], [1]) == pytest.approx(0.0, abs=1e-9)
        assert loss_visibility([1.0, 0.0], [1, 0]) == pytest.approx(0.0, abs=1e-9)

    def test_single_unmasked_coordinate(self):
        assert loss_args([0.5, 9.9], [0.0, 0.0], [1, 0]) == pytest.approx(0.5)

    def test_all_zero_mask_defined_as_zero(self):
        assert loss_args([5.0], [1.0], [0]) == 0.0

    def test_squared_variant(self):
        assert loss_args([0.5, 1.5], [0.0, 0.0], [1, 1], squared=True) == pytest.approx(
            (0.25 + 2.25) / 2
        )

    def test_visibility_half(self):
        assert loss_visibility([0.5, 0.5], [1, 0]) == pytest.approx(math.log(2.0))

    def test_nested_and_numpy_inputs(self):
        import numpy as np

        pred = np.array([[0.5, 0.0], [1.0, 1.0]])
        gt = np.zeros((2, 2))
        mask = np.array([[1, 0], [1, 1]])
        assert loss_args(pred, gt, mask) == pytest.approx((0.5 + 1.0 + 1.0) / 3)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError):
            loss_args([1.0], [1.0, 2.0], [1, 1])


class TestAuxRender:
    def test_identical_zero(self):
        a = Line((0, 0), (2, 0))
        assert loss_aux_render(a, a, 5) == pytest.approx(0.0)

    def test_parallel_offset_is_squared_norm(self):
        a = Line((0, 0), (2, 0))
        b = Line((0, 1), (2, 1))
        assert loss_aux_render(a, b, 7) == pytest.approx(1.0)

    def test_stretched_line_example(self):
        a = Line((0, 0), (2, 0))
        b = Line((0, 0), (4, 0))
        assert loss_aux_render(a, b, 3) == pytest.approx(5 / 3)

    def test_count_validated(self):
        with pytest.raises(ValueError):
            loss_aux_render(Line((0, 0), (1, 0)), Line((0, 0), (1, 0)), 1)


class TestKlGaussian:
    def test_prior_is_zero(self):
        assert kl_gaussian([0.0], [1.0]) == pytest.approx(0.0)

    def test_unit_mean(self):
        assert kl_gaussian([1.0], [1.0]) == pytest.approx(0.5)

    def test_wide_sigma(self):
        assert kl_gaussian([0.0], [2.0]) == pytest.approx(0.8068528194400547, abs=1e-12)

    def test_positive_away_from_prior(self):
        rng = random.Random(61)
        for _ in range(100):
            mu = [rng.uniform(-2, 2) for _ in range(3)]
            sigma = [rng.uniform(0.2, 3.0) for _ in range(3)]
            if all(abs(m) < 1e-12 for m in mu) and all(abs(s - 1) < 1e-12 for s in sigma):
                continue
            assert kl_gaussian(mu, sigma) > 0.0

    def test_nonpositive_sigma_rejected(self):
        with pytest.raises(ValueError):
            kl_gaussian([0.0], [0.0])


class TestTotalLoss:
    def test_kl_silent_at_step_zero(self):
        comps = LossComponents(kl=123.0)
        assert total_loss(comps, LossWeights(), 0) == pytest.approx(0.0)

    def test_ramp_midpoint(self):
        w = LossWeights()
        assert w.kl_at(5000) == pytest.approx(5.0)
        assert w.kl_at(10000) == pytest.approx(10.0)
        assert w.kl_at(20000) == pytest.approx(10.0)

    def test_zero_weights_equal_rec(self):
        comps = LossComponents(
            cmd=1.0, args=2.0, visibility=3.0, consistency=4.0, aux_render=5.0,
            kl=99.0, continuity=88.0, alignment=77.0,
        )
        w = LossWeights(lambda_cont=0.0, lambda_align=0.0, lambda_kl_end=0.0)
        assert total_loss(comps, w, 12345) == pytest.approx(15.0)

    def test_negative_step_rejected(self):
        with pytest.raises(ValueError):
            total_loss(LossComponents(), LossWeights(), -1)

    def test_weights_validated(self):
        with pytest.raises(ValueError):
            LossWeights(lambda_cont=-1.0)
        with pytest.raises(ValueError):
            LossWeights(kl_ramp_steps=0)


class TestCostMatrix:
    def test_default_valid(self):
        w = CostMatrix()
        for row in w.rows:
            assert sum(row) == pytest.approx(1.0)

    def test_row_sum_enforced(self):
        with pytest.raises(ValueError, match="sum"):
            CostMatrix(((0.5, 0.4, 0.0), (0.05, 0.9, 0.05), (0.02, 0.08, 0.9)))

    def test_far_confusion_mass_enforced(self):
        with pytest.raises(ValueError, match="far confusions"):
            CostMatrix(((0.8, 0.05, 0.15), (0.05, 0.9, 0.05), (0.15, 0.05, 0.8)))

    def test_negative_rejected(self):
        with pytest.raises(ValueError, match="nonnegative"):
            CostMatrix(((1.1, -0.05, -0.05), (0.05, 0.9, 0.05), (0.02, 0.08, 0.9)))

    def test_literal_mode_allows_cost_style_matrix(self):
        w = CostMatrix(((1.0, 2.0, 5.0), (2.0, 1.0, 2.0), (5.0, 2.0, 1.0)), validate=False)
        value = loss_continuity([[0.5, 0.3, 0.2]], [0], w)
        expected = -(1.0 * math.log(0.5) + 2.0 * math.log(0.3) + 5.0 * math.log(0.2))
        assert value == pytest.approx(expected)
