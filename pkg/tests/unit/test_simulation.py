"""Unit tests for the temporal Gaussian-blob generator."""

import numpy as np
import pytest
from pydantic import ValidationError

from src.domain.entities.simulation import SimulatedDataset, SimulationConfig
from src.domain.exceptions import InvalidArgumentError
from src.domain.services.simulation import (
    NULL_CLASS,
    SIGNAL_CLASS,
    class_mean,
    gamma_norm,
    generate_dataset,
    sample_agent_effect,
    sample_orthogonal,
)
from tests.fixtures.tensor_builders import create_dataset, create_simulation_config


class TestClassMeans:
    """Test suite for class means and their normalization."""

    @pytest.mark.unit
    @pytest.mark.parametrize("tau", [0.1, 0.5, 1.0])
    def test_gamma_equalizes_norms(self, tau: float) -> None:
        """Test the signal-class mean keeps its norm across timepoints."""
        config = create_simulation_config(effect_size=tau, scale=2.0, decay=0.7)

        before = class_mean(1, SIGNAL_CLASS, config)
        after = class_mean(2, SIGNAL_CLASS, config)

        assert np.linalg.norm(after) == pytest.approx(np.linalg.norm(before), rel=1e-12)
        assert not np.allclose(before, after)

    @pytest.mark.unit
    def test_no_effect_keeps_mean(self) -> None:
        """Test tau = 0 leaves the signal-class mean unchanged."""
        config = create_simulation_config(effect_size=0.0)

        assert np.array_equal(class_mean(1, SIGNAL_CLASS, config), class_mean(2, SIGNAL_CLASS, config))

    @pytest.mark.unit
    def test_front_loaded_profile(self) -> None:
        """Test the first-timepoint mean is alpha * exp(-beta i) on the signal dims."""
        config = create_simulation_config(scale=1.5, decay=0.5)

        mean = class_mean(1, SIGNAL_CLASS, config)

        assert np.allclose(mean[:3], 1.5 * np.exp(-0.5 * np.arange(3)))
        assert np.all(mean[3:] == 0.0)

    @pytest.mark.unit
    def test_full_effect_reverses_profile(self) -> None:
        """Test tau = 1 moves to the back-loaded profile."""
        config = create_simulation_config(effect_size=1.0)

        before = class_mean(1, SIGNAL_CLASS, config)[:3]
        after = class_mean(2, SIGNAL_CLASS, config)[:3]

        assert np.allclose(after, before[::-1])

    @pytest.mark.unit
    def test_null_class_is_zero(self) -> None:
        """Test the null class sits at the origin at both timepoints."""
        config = create_simulation_config(effect_size=1.0)

        assert np.all(class_mean(1, NULL_CLASS, config) == 0.0)
        assert np.all(class_mean(2, NULL_CLASS, config) == 0.0)

    @pytest.mark.unit
    def test_gamma_half_effect(self) -> None:
        """Test gamma at tau = 1/2 is |front| over |(front + back) / 2|."""
        front = np.exp(-0.5 * np.arange(3))

        expected = np.linalg.norm(front) / np.linalg.norm(0.5 * front + 0.5 * front[::-1])

        assert gamma_norm(0.5, 3, 0.5, 1.0) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.unit
    def test_gamma_domain(self) -> None:
        """Test gamma is undefined for tau = 0."""
        with pytest.raises(InvalidArgumentError):
            gamma_norm(0.0, 3, 0.5, 1.0)

    @pytest.mark.unit
    def test_invalid_timepoint(self) -> None:
        """Test only timepoints 1 and 2 exist."""
        with pytest.raises(InvalidArgumentError):
            class_mean(3, SIGNAL_CLASS, create_simulation_config())


class TestSampleOrthogonal:
    """Test suite for Haar rotations."""

    @pytest.mark.unit
    @pytest.mark.parametrize("p", [1, 2, 5, 12])
    def test_is_rotation(self, p: int) -> None:
        """Test O^T O = I and det(O) = 1."""
        o = sample_orthogonal(np.random.default_rng(p), p)

        assert np.allclose(o.T @ o, np.eye(p), atol=1e-12)
        assert np.linalg.det(o) == pytest.approx(1.0)

    @pytest.mark.unit
    def test_invalid_dimension(self) -> None:
        """Test p = 0 is rejected."""
        with pytest.raises(InvalidArgumentError):
            sample_orthogonal(np.random.default_rng(0), 0)


class TestSampleAgentEffect:
    """Test suite for sample_agent_effect."""

    @pytest.mark.unit
    def test_scaled_draws_on_signal_dims(self) -> None:
        """Test the effect is sqrt(agent_var) times standard normals, zero elsewhere."""
        config = create_simulation_config(dim=8, signal_dims=3, agent_var=4.0)

        effect = sample_agent_effect(np.random.default_rng(5), config)

        expected = 2.0 * np.random.default_rng(5).standard_normal(3)
        np.testing.assert_allclose(effect[:3], expected, rtol=0, atol=1e-15)
        assert not effect[3:].any()

    @pytest.mark.unit
    def test_empirical_variance(self) -> None:
        """Test many draws have per-coordinate variance close to agent_var."""
        config = create_simulation_config(dim=8, signal_dims=3, agent_var=0.5)
        rng = np.random.default_rng(17)

        draws = np.stack([sample_agent_effect(rng, config) for _ in range(10_000)])

        variances = draws[:, :3].var(axis=0)
        assert np.all((variances >= 0.45) & (variances <= 0.55))

    @pytest.mark.unit
    def test_zero_variance(self) -> None:
        """Test agent_var = 0 gives no effect."""
        config = create_simulation_config(agent_var=0.0)

        assert not sample_agent_effect(np.random.default_rng(0), config).any()


class TestGenerateDataset:
    """Test suite for generate_dataset."""

    @pytest.mark.unit
    def test_shape(self, small_dataset: SimulatedDataset) -> None:
        """Test the tensor has two timepoints and the configured counts."""
        assert small_dataset.tensor.values.shape == (2, 8, 3, 6, 8)
        assert small_dataset.orthogonals.shape == (3, 8, 8)

    @pytest.mark.unit
    def test_deterministic(self) -> None:
        """Test one seed always gives the same dataset."""
        first = create_dataset(seed=11)
        second = create_dataset(seed=11)

        assert np.array_equal(first.tensor.values, second.tensor.values)
        assert first.labels == second.labels

    @pytest.mark.unit
    def test_explicit_seed_overrides_config(self) -> None:
        """Test a seed argument replaces the configured one."""
        config = create_simulation_config(seed=1)

        assert np.array_equal(
            generate_dataset(config, seed=2).tensor.values,
            create_dataset(seed=2).tensor.values,
        )
        assert not np.array_equal(
            generate_dataset(config).tensor.values, create_dataset(seed=2).tensor.values
        )

    @pytest.mark.unit
    def test_agent_effects_live_on_signal_dims(self, small_dataset: SimulatedDataset) -> None:
        """Test agent traits vanish outside the first p_s coordinates."""
        assert np.all(small_dataset.agent_effects[:, 3:] == 0.0)
        assert np.any(small_dataset.agent_effects[:, :3] != 0.0)

    @pytest.mark.unit
    @pytest.mark.parametrize(("class_prob", "label"), [(0.0, SIGNAL_CLASS), (1.0, NULL_CLASS)])
    def test_label_rule(self, class_prob: float, label: int) -> None:
        """Test an agent is null with probability class_prob."""
        dataset = create_dataset(class_prob=class_prob)

        assert set(dataset.labels) == {label}

    @pytest.mark.unit
    def test_noiseless_responses_are_rotated_means(self) -> None:
        """Test zero variances leave every replicate at O_m mu."""
        dataset = create_dataset(effect_size=1.0, noise_var=0.0, agent_var=0.0)
        agent = dataset.labels.index(SIGNAL_CLASS) if SIGNAL_CLASS in dataset.labels else 0
        label = dataset.labels[agent]

        for t in (0, 1):
            expected = dataset.orthogonals[1] @ dataset.class_means[label, t]
            assert np.allclose(dataset.tensor.values[t, agent, 1], expected[np.newaxis, :])

    @pytest.mark.unit
    def test_signal_dims_cannot_exceed_dim(self) -> None:
        """Test the configuration refuses p_s > p."""
        with pytest.raises(ValidationError):
            SimulationConfig(dim=3, signal_dims=4)
