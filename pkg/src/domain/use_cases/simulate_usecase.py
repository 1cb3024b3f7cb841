"""Simulate use case.

This module implements generating a simulated tensor and persisting it
together with its manifest and ground truth.
"""

import logging
from pathlib import Path
from typing import Optional

from src.domain.entities.response_tensor import TensorManifest
from src.domain.entities.simulation import SimulatedDataset, SimulationConfig
from src.domain.services.simulation import generate_dataset
from src.domain.services.streams import GENERATOR_NAME
from src.ports.tensor_store_port import TensorStorePort

logger = logging.getLogger(__name__)


class SimulateUseCase:
    """Use case for drawing a two-timepoint dataset and saving it."""

    def __init__(self, tensor_store: TensorStorePort):
        """Initialize the use case.

        Args:
            tensor_store: Port for persisting tensors
        """
        self.tensor_store = tensor_store

    def execute(
        self, config: SimulationConfig, output_path: Path, seed: Optional[int] = None
    ) -> SimulatedDataset:
        """Execute the simulate use case.

        Args:
            config: Generator parameters
            output_path: Tensor file to write
            seed: Overrides ``config.seed`` when given

        Returns:
            The generated dataset
        """
        if seed is not None:
            config = config.model_copy(update={"seed": seed})
        logger.info(
            "Executing simulate use case",
            extra={
                "seed": config.seed,
                "n_agents": config.n_agents,
                "effect_size": config.effect_size,
                "output_path": str(output_path),
            },
        )

        dataset = generate_dataset(config)
        tensor = dataset.tensor
        # Class labels double as group labels; a lone agent cannot carry label 1.
        groups = list(dataset.labels) if tensor.n_agents > 1 else None
        manifest = TensorManifest(
            agent_ids=[f"agent-{n}" for n in range(tensor.n_agents)],
            time_labels=["t1", "t2"],
            group_labels=groups,
            seed=config.seed,
            generator=GENERATOR_NAME,
        )
        self.tensor_store.save(tensor, manifest, output_path)
        self.tensor_store.save_truth(dataset, output_path)

        logger.info(
            "Simulation saved",
            extra={"output_path": str(output_path), "labels": list(dataset.labels)},
        )
        return dataset
