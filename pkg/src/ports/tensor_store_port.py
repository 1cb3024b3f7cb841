"""Tensor store port (interface) for hexagonal architecture.

This module defines the abstract interface for persisting response
tensors, their manifests and simulation ground truth.
"""

from abc import ABC, abstractmethod
from pathlib import Path

from src.domain.entities.response_tensor import ResponseTensor, TensorManifest
from src.domain.entities.simulation import SimulatedDataset


class TensorStorePort(ABC):
    """Abstract interface for tensor persistence.

    Implementations must round-trip tensors bit-exactly.
    """

    @abstractmethod
    def load(self, path: Path) -> tuple[ResponseTensor, TensorManifest]:
        """Load a tensor and its manifest.

        Args:
            path: Tensor file path

        Returns:
            Tuple of (tensor, manifest); a positional manifest is built when
            no sidecar exists

        Raises:
            TensorFormatError: If the header is not recognized
            PayloadLengthError: If the payload is truncated or oversized
            TensorValidationError: If the payload holds non-finite values
            TensorStoreError: If the file cannot be read
        """
        pass

    @abstractmethod
    def save(self, tensor: ResponseTensor, manifest: TensorManifest, path: Path) -> None:
        """Write a tensor and its manifest sidecar.

        Raises:
            TensorValidationError: If the manifest does not match the tensor
            TensorStoreError: If the file cannot be written
        """
        pass

    @abstractmethod
    def load_truth(self, path: Path, tensor: ResponseTensor) -> SimulatedDataset:
        """Load the ground truth stored next to a simulated tensor.

        Raises:
            MissingGroundTruthError: If no ground-truth sidecar exists
            DimensionMismatchError: If the truth does not fit the tensor
        """
        pass

    @abstractmethod
    def save_truth(self, dataset: SimulatedDataset, path: Path) -> None:
        """Write the ground truth of a simulated dataset next to its tensor."""
        pass
