"""Rate-distortion scoring: entropy, bits per pixel, and the J cost."""

import math

import numpy as np
import pytest

from helpers import bpp_oracle, entropy_oracle, noise_image, smooth_image, weave_image
from qwio.codec import codec_roundtrip
from qwio.objective import (
    DEFAULT_LAMBDA,
    bpp_estimate,
    mse,
    rd_cost,
    rd_objective,
    symbol_entropy,
)
from qwio.tables import BandParams, baseline_table, build_table


class TestMse:
    def test_identical_is_zero(self):
        a = noise_image(16, seed=0)
        assert mse(a, a) == 0.0

    def test_hand_value(self):
        a = np.zeros((2, 2))
        b = np.array([[2.0, 0.0], [0.0, 0.0]])
        assert mse(a, b) == 1.0  # 4 / 4

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            mse(np.zeros((2, 2)), np.zeros((2, 3)))


class TestEntropy:
    def test_constant_symbols(self):
        blocks = np.zeros((3, 8, 8), dtype=np.int64)
        assert symbol_entropy(blocks) == 0.0

    def test_two_equiprobable_symbols(self):
        blocks = np.zeros((2, 8, 8), dtype=np.int64)
        blocks[1] = 1
        assert symbol_entropy(blocks) == pytest.approx(1.0, abs=1e-12)

    def test_three_symbol_hand_value(self):
        # frequencies 1/2, 1/4, 1/4 -> H = 1.5 bits
        blocks = np.zeros((2, 8, 8), dtype=np.int64)
        blocks[1, :4] = 7
        blocks[1, 4:] = -7
        assert symbol_entropy(blocks) == pytest.approx(1.5, abs=1e-12)

    def test_uniform_symbols(self):
        blocks = np.arange(64, dtype=np.int64).reshape(1, 8, 8)
        assert symbol_entropy(blocks) == pytest.approx(6.0, abs=1e-12)

    def test_matches_counter_oracle(self):
        rng = np.random.default_rng(20)
        for _ in range(100):
            n = int(rng.integers(1, 6))
            spread = int(rng.integers(2, 60))
            blocks = rng.integers(-spread, spread, (n, 8, 8))
            assert symbol_entropy(blocks) == pytest.approx(
                entropy_oracle(blocks), abs=1e-12
            )

    def test_value_relabeling_invariance(self):
        rng = np.random.default_rng(21)
        blocks = rng.integers(-40, 40, (4, 8, 8))
        assert symbol_entropy(blocks) == pytest.approx(
            symbol_entropy(blocks + 1000), abs=1e-12
        )

    def test_wide_range_fallback_matches(self):
        # values spanning more than 2^22 force the sorted-unique path;
        # it must agree with the oracle exactly
        rng = np.random.default_rng(22)
        blocks = rng.integers(-(2**24), 2**24, (2, 8, 8))
        assert symbol_entropy(blocks) == pytest.approx(
            entropy_oracle(blocks), abs=1e-12
        )

    def test_float_blocks_rejected(self):
        with pytest.raises(ValueError):
            symbol_entropy(np.zeros((1, 8, 8)))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            symbol_entropy(np.zeros((0, 8, 8), dtype=np.int64))


class TestBpp:
    def test_hand_value(self):
        # two blocks, symbols half zeros half ones: H = 1 bit; a 9x8
        # image needs two padded blocks, so 128 coded samples / 72 pixels
        blocks = np.zeros((2, 8, 8), dtype=np.int64)
        blocks[1] = 1
        assert bpp_estimate(blocks, width=8, height=9) == pytest.approx(
            128.0 / 72.0, abs=1e-12
        )

    def test_matches_oracle(self):
        rng = np.random.default_rng(23)
        blocks = rng.integers(-9, 9, (6, 8, 8))
        assert bpp_estimate(blocks, 21, 17) == pytest.approx(
            bpp_oracle(blocks, 21, 17), abs=1e-12
        )

    def test_constant_symbols_cost_nothing(self):
        blocks = np.zeros((4, 8, 8), dtype=np.int64)
        assert bpp_estimate(blocks, 16, 16) == 0.0

    def test_bad_dimensions(self):
        blocks = np.zeros((1, 8, 8), dtype=np.int64)
        with pytest.raises(ValueError):
            bpp_estimate(blocks, 0, 8)


class TestRdCost:
    def test_flat_plane_costs_nothing(self):
        plane = np.full((16, 16), 128.0)
        cost, report = rd_cost(plane, baseline_table())
        assert cost == 0.0
        assert report.mse == 0.0 and report.bpp == 0.0
        assert math.isinf(report.psnr)

    def test_lambda_zero_reduces_to_mse(self):
        plane = noise_image(32, seed=5)
        cost, report = rd_cost(plane, baseline_table(), lam=0.0)
        assert cost == report.mse

    def test_cost_composition_is_exact(self):
        plane = smooth_image(48, seed=6)
        cost, report = rd_cost(plane, baseline_table(), lam=7.5)
        assert cost == report.mse + 7.5 * report.bpp
        assert report.cost_j == cost
        assert report.lam == 7.5

    def test_default_lambda(self):
        assert DEFAULT_LAMBDA == 50.0
        plane = noise_image(16, seed=7)
        _, report = rd_cost(plane, baseline_table())
        assert report.lam == 50.0

    def test_ssim_nan_below_window_size(self):
        plane = noise_image(8, seed=8)
        _, report = rd_cost(plane, baseline_table())
        assert math.isnan(report.ssim)

    def test_report_dict_keys(self):
        plane = noise_image(16, seed=9)
        _, report = rd_cost(plane, baseline_table())
        assert list(report.to_dict()) == [
            "mse",
            "psnr_db",
            "ssim",
            "bpp",
            "cost_j",
            "lambda",
        ]

    def test_negative_lambda_rejected(self):
        with pytest.raises(ValueError):
            rd_cost(noise_image(16, seed=1), baseline_table(), lam=-1.0)

    def test_report_consistent_with_codec(self):
        plane = weave_image(64, seed=30)
        table = baseline_table()
        cost, report = rd_cost(plane, table, lam=DEFAULT_LAMBDA)
        rec, z = codec_roundtrip(plane, table)
        assert report.mse == mse(plane, rec)
        assert report.bpp == bpp_estimate(z, plane.shape[1], plane.shape[0])


class TestRdObjective:
    def test_matches_rd_cost_bitwise(self):
        # the cached-coefficient fast path must agree with the plain
        # per-call route down to the last bit
        plane = weave_image(96, seed=31)
        base = baseline_table()
        objective = rd_objective(plane, base, lam=DEFAULT_LAMBDA)
        rng = np.random.default_rng(24)
        for _ in range(5):
            vec = rng.uniform(0.5, 2.0, 16)
            table = build_table(BandParams.from_vector(vec), base)
            cost, _ = rd_cost(plane, table, lam=DEFAULT_LAMBDA)
            assert objective(vec) == cost

    def test_identity_vector_scores_baseline(self):
        plane = smooth_image(40, seed=32)
        base = baseline_table()
        objective = rd_objective(plane, base)
        cost, _ = rd_cost(plane, base)
        assert objective(BandParams.identity().to_vector()) == cost

    def test_multi_plane_mean(self):
        planes = [smooth_image(40, seed=33), noise_image(40, seed=34)]
        base = baseline_table()
        objective = rd_objective(planes, base, lam=2.0)
        vec = BandParams.identity().to_vector()
        costs = [rd_cost(p, base, lam=2.0)[0] for p in planes]
        assert objective(vec) == pytest.approx(np.mean(costs), rel=0, abs=1e-12)

    def test_odd_sizes_use_padding(self):
        plane = smooth_image(40, seed=35)[:37, :29]
        base = baseline_table()
        objective = rd_objective(plane, base)
        cost, _ = rd_cost(plane, base)
        assert objective(BandParams.identity().to_vector()) == cost

    def test_empty_input_rejected(self):
        with pytest.raises(ValueError):
            rd_objective([], baseline_table())
