"""Pytest configuration and shared fixtures.

This module provides common fixtures for all tests.
"""

import logging
from collections.abc import Iterator
from pathlib import Path

import numpy as np
import pytest

from src.adapters.csv_report_adapter import CsvReportAdapter
from src.adapters.tensor_file_adapter import TensorFileAdapter
from src.config.settings import Settings
from src.domain.entities.embedding import BlockDistanceMatrix, TdkpsEmbedding
from src.domain.entities.response_tensor import ResponseTensor, TensorManifest
from src.domain.entities.simulation import SimulatedDataset
from src.domain.services.embedding import cmds, pairwise_block_distances
from tests.fixtures.tensor_builders import (
    create_dataset,
    create_random_tensor,
    create_shifted_tensor,
)


@pytest.fixture
def test_settings() -> Settings:
    """Provide test settings.

    Returns:
        Settings instance with test values
    """
    return Settings(
        default_permutations=49,
        alpha=0.05,
        dim_request="auto",
        threads=1,
        log_level="DEBUG",
        log_format="text",
    )


@pytest.fixture
def small_tensor() -> ResponseTensor:
    """Provide a 2 x 4 x 3 x 5 x 4 tensor of seeded normal draws."""
    return create_random_tensor()


@pytest.fixture
def shifted_tensor() -> ResponseTensor:
    """Provide a tensor whose agent 0 moves strongly between timepoints."""
    return create_shifted_tensor()


@pytest.fixture
def small_distances(small_tensor: ResponseTensor) -> BlockDistanceMatrix:
    """Provide the block distance matrix of ``small_tensor``."""
    return pairwise_block_distances(small_tensor)


@pytest.fixture
def small_embedding(small_distances: BlockDistanceMatrix) -> TdkpsEmbedding:
    """Provide a three-dimensional embedding of ``small_tensor``."""
    return cmds(small_distances, 3)


@pytest.fixture
def small_dataset() -> SimulatedDataset:
    """Provide a small simulated dataset with no effect."""
    return create_dataset()


@pytest.fixture
def signal_dataset() -> SimulatedDataset:
    """Provide a small simulated dataset at full effect size and low noise."""
    return create_dataset(effect_size=1.0, scale=3.0, noise_var=0.05, agent_var=0.05)


@pytest.fixture
def tensor_store() -> TensorFileAdapter:
    """Provide the filesystem tensor store."""
    return TensorFileAdapter()


@pytest.fixture
def report_writer() -> CsvReportAdapter:
    """Provide the CSV report writer."""
    return CsvReportAdapter()


@pytest.fixture
def saved_dataset(
    tmp_path: Path, tensor_store: TensorFileAdapter, signal_dataset: SimulatedDataset
) -> Path:
    """Save ``signal_dataset`` with manifest and ground truth; return the tensor path."""
    path = tmp_path / "sim.tdkp"
    manifest = TensorManifest(
        agent_ids=[f"agent-{n}" for n in range(signal_dataset.tensor.n_agents)],
        time_labels=["t1", "t2"],
        group_labels=list(signal_dataset.labels),
        seed=signal_dataset.config.seed,
    )
    tensor_store.save(signal_dataset.tensor, manifest, path)
    tensor_store.save_truth(signal_dataset, path)
    return path


@pytest.fixture
def rng() -> np.random.Generator:
    """Provide a seeded generator for building test inputs."""
    return np.random.default_rng(12345)


@pytest.fixture(autouse=True)
def reset_logging() -> Iterator[None]:
    """Drop handlers installed by setup_logging so they never outlive a test's streams."""
    yield
    logging.getLogger().handlers.clear()
