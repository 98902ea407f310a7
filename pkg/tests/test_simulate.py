"""Monte Carlo sampler tests: reproducibility and statistical consistency."""
import math
from fractions import Fraction as F

import numpy as np
import pytest

from cvarmdp.gadgets import example
from cvarmdp.model import ModelError, memoryless
from cvarmdp.simulate import (
    SimConfig,
    empirical_distribution,
    empirical_measures,
    sample_payoffs,
    summary_json,
    write_samples_csv,
)


def mix_three_quarters():
    return memoryless({"s0": {"a": F(3, 4), "b": F(1, 4)}})


class TestConfig:
    def test_bad_values_rejected(self):
        with pytest.raises(ModelError):
            SimConfig(runs=0)
        with pytest.raises(ModelError):
            SimConfig(horizon=0)
        with pytest.raises(ModelError):
            SimConfig(horizon=10, burn_in=10)


class TestSampling:
    def test_identical_seed_bit_exact(self):
        mdp, _ = example("choice")
        cfg = SimConfig(runs=500, horizon=50, seed=7, burn_in=0)
        a = sample_payoffs(mdp, mix_three_quarters(), "reach", cfg)
        b = sample_payoffs(mdp, mix_three_quarters(), "reach", cfg)
        assert np.array_equal(a, b)

    def test_seed_changes_samples(self):
        mdp, _ = example("choice")
        a = sample_payoffs(
            mdp, mix_three_quarters(), "reach", SimConfig(runs=500, horizon=50, seed=1, burn_in=0)
        )
        b = sample_payoffs(
            mdp, mix_three_quarters(), "reach", SimConfig(runs=500, horizon=50, seed=2, burn_in=0)
        )
        assert not np.array_equal(a, b)

    def test_pure_strategy_constant_samples(self):
        mdp, _ = example("choice")
        sigma = memoryless({"s0": {"a": F(1)}})
        samples = sample_payoffs(
            mdp, sigma, "reach", SimConfig(runs=100, horizon=20, seed=0, burn_in=0)
        )
        assert set(samples.tolist()) == {5.0}

    def test_mean_pure_loop(self):
        mdp, _ = example("loop")
        sigma = memoryless({"s0": {"a": F(1)}})
        samples = sample_payoffs(
            mdp, sigma, "mean", SimConfig(runs=30, horizon=100, seed=0, burn_in=10)
        )
        assert set(samples.tolist()) == {5.0}

    def test_absorption_frequency_within_three_sigma(self):
        mdp, _ = example("choice")
        n = 100_000
        samples = sample_payoffs(
            mdp,
            mix_three_quarters(),
            "reach",
            SimConfig(runs=n, horizon=100, seed=2024, burn_in=0),
        )
        frac5 = float(np.mean(samples == 5.0))
        se = math.sqrt(0.75 * 0.25 / n)
        assert abs(frac5 - 0.75) <= 3 * se


class TestEmpiricalMeasures:
    def test_constant_samples(self):
        e, v, c = empirical_measures([3.0] * 10, F(1, 2), F(1, 2))
        assert (e, v, c) == (3, 3, 3)

    def test_two_point_even_split(self):
        samples = [0.0] * 50 + [10.0] * 50
        e, v, c = empirical_measures(samples, F(1, 2), F(1, 2))
        assert e == 5
        assert c == 0  # lowest half of the mass is all zeros

    def test_empty_rejected(self):
        with pytest.raises(ModelError):
            empirical_distribution([])


class TestExport:
    def test_csv_and_summary(self, tmp_path):
        path = tmp_path / "out.csv"
        write_samples_csv(str(path), [1.0, 2.5])
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "run,payoff"
        assert len(lines) == 3
        text = summary_json([1.0, 2.5], SimConfig(runs=2, horizon=10, seed=0, burn_in=1), F(1, 2), F(1, 2))
        assert '"mean"' in text and '"cvar"' in text
