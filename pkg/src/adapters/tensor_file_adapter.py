"""Binary tensor file adapter.

This module implements TensorStorePort on the local filesystem. A tensor
file is a fixed little-endian header ("TDKP", version, dtype flag, counts
N, T, M, R, p) followed by the values in [t][n][m][r][p] order. The
manifest lives in a JSON sidecar and simulation ground truth in an .npz
sidecar.
"""

import json
import logging
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from src.domain.entities.response_tensor import ResponseTensor, TensorManifest
from src.domain.entities.simulation import SimulatedDataset, SimulationConfig
from src.domain.exceptions import (
    DimensionMismatchError,
    MissingGroundTruthError,
    PayloadLengthError,
    TensorFormatError,
    TensorStoreError,
    TensorValidationError,
)
from src.ports.tensor_store_port import TensorStorePort

logger = logging.getLogger(__name__)

MAGIC = b"TDKP"
FORMAT_VERSION = 1

HEADER_DTYPE = np.dtype(
    [("magic", "S4"), ("version", "<u2"), ("dtype_flag", "u1"), ("counts", "<u8", (5,))]
)
HEADER_SIZE = HEADER_DTYPE.itemsize

_DTYPE_FLAGS = {0: ("float32", np.dtype("<f4")), 1: ("float64", np.dtype("<f8"))}
_PRECISION_FLAGS = {name: flag for flag, (name, _) in _DTYPE_FLAGS.items()}


def manifest_path(path: Path) -> Path:
    """Sidecar path of the manifest: the tensor path with '.manifest.json' appended."""
    return path.with_name(path.name + ".manifest.json")


def truth_path(path: Path) -> Path:
    """Sidecar path of the simulation ground truth."""
    return path.with_name(path.name + ".truth.npz")


def encode_tensor(tensor: ResponseTensor) -> bytes:
    """Header and payload bytes of a tensor."""
    flag = _PRECISION_FLAGS[tensor.precision]
    header = np.zeros((), dtype=HEADER_DTYPE)
    header["magic"] = MAGIC
    header["version"] = FORMAT_VERSION
    header["dtype_flag"] = flag
    header["counts"] = tensor.counts
    payload = np.ascontiguousarray(tensor.values, dtype=_DTYPE_FLAGS[flag][1])
    return header.tobytes() + payload.tobytes()


def decode_tensor(data: bytes) -> ResponseTensor:
    """Parse tensor file bytes.

    Raises:
        TensorFormatError: If magic, version or dtype flag is not recognized
        PayloadLengthError: If the payload size disagrees with the counts
        TensorValidationError: If the values are not all finite
    """
    if len(data) < HEADER_SIZE:
        raise TensorFormatError(f"file holds {len(data)} bytes, header needs {HEADER_SIZE}")
    header = np.frombuffer(data, dtype=HEADER_DTYPE, count=1)[0]
    if bytes(header["magic"]) != MAGIC:
        raise TensorFormatError(f"bad magic {bytes(header['magic'])!r}")
    if int(header["version"]) != FORMAT_VERSION:
        raise TensorFormatError(f"unsupported format version {int(header['version'])}")
    flag = int(header["dtype_flag"])
    if flag not in _DTYPE_FLAGS:
        raise TensorFormatError(f"unknown dtype flag {flag}")
    precision, dtype = _DTYPE_FLAGS[flag]

    n, t, m, r, p = (int(c) for c in header["counts"])
    if min(n, t, m, r, p) < 1:
        raise TensorFormatError(f"counts must be >= 1, got {(n, t, m, r, p)}")
    expected = n * t * m * r * p * dtype.itemsize
    actual = len(data) - HEADER_SIZE
    if actual != expected:
        raise PayloadLengthError(expected, actual)

    values = np.frombuffer(data, dtype=dtype, offset=HEADER_SIZE).reshape(t, n, m, r, p)
    try:
        return ResponseTensor(values=values, precision=precision)
    except ValidationError as e:
        raise TensorValidationError(f"invalid tensor payload: {e.errors()[0]['msg']}") from e


class TensorFileAdapter(TensorStorePort):
    """Filesystem implementation of TensorStorePort."""

    def load(self, path: Path) -> tuple[ResponseTensor, TensorManifest]:
        """Load a tensor file and its manifest sidecar."""
        logger.debug("Loading tensor", extra={"path": str(path)})
        try:
            data = path.read_bytes()
        except OSError as e:
            raise TensorStoreError(f"cannot read tensor file {path}: {e}") from e
        tensor = decode_tensor(data)

        sidecar = manifest_path(path)
        if not sidecar.exists():
            return tensor, TensorManifest.default_for(tensor)
        try:
            manifest = TensorManifest.model_validate_json(sidecar.read_text(encoding="utf-8"))
        except OSError as e:
            raise TensorStoreError(f"cannot read manifest {sidecar}: {e}") from e
        except ValidationError as e:
            raise TensorFormatError(f"invalid manifest {sidecar}: {e.errors()[0]['msg']}") from e
        if not manifest.matches(tensor):
            raise TensorValidationError(
                f"manifest {sidecar} does not match tensor counts {tensor.counts}"
            )
        return tensor, manifest

    def save(self, tensor: ResponseTensor, manifest: TensorManifest, path: Path) -> None:
        """Write the tensor file and its manifest sidecar."""
        if not manifest.matches(tensor):
            raise TensorValidationError(
                f"manifest lists {len(manifest.agent_ids)} agents and "
                f"{len(manifest.time_labels)} timepoints, tensor counts are {tensor.counts}"
            )
        data = encode_tensor(tensor)
        try:
            path.write_bytes(data)
            manifest_path(path).write_text(
                manifest.model_dump_json(indent=2, exclude_none=True) + "\n", encoding="utf-8"
            )
        except OSError as e:
            raise TensorStoreError(f"cannot write tensor file {path}: {e}") from e
        logger.info(
            "Tensor saved",
            extra={"path": str(path), "bytes": len(data), "precision": tensor.precision},
        )

    def load_truth(self, path: Path, tensor: ResponseTensor) -> SimulatedDataset:
        """Rebuild the simulated dataset from the ground-truth sidecar."""
        sidecar = truth_path(path)
        if not sidecar.exists():
            raise MissingGroundTruthError(
                f"oracle methods need simulation ground truth; {sidecar} does not exist"
            )
        try:
            with np.load(sidecar, allow_pickle=False) as archive:
                config = SimulationConfig.model_validate_json(str(archive["config"][()]))
                labels = tuple(int(y) for y in archive["labels"])
                class_means = archive["class_means"]
                agent_effects = archive["agent_effects"]
                orthogonals = archive["orthogonals"]
        except OSError as e:
            raise TensorStoreError(f"cannot read ground truth {sidecar}: {e}") from e
        except (KeyError, ValueError) as e:
            raise TensorFormatError(f"invalid ground truth {sidecar}: {e}") from e

        shape = (2, config.n_agents, config.n_queries, config.n_replicates, config.dim)
        if tensor.values.shape != shape:
            raise DimensionMismatchError(
                f"ground truth describes a tensor of shape {shape}, "
                f"loaded tensor has {tensor.values.shape}"
            )
        try:
            return SimulatedDataset(
                tensor=tensor,
                labels=labels,
                class_means=class_means,
                agent_effects=agent_effects,
                orthogonals=orthogonals,
                config=config,
            )
        except ValidationError as e:
            raise TensorFormatError(f"invalid ground truth {sidecar}: {e.errors()[0]['msg']}") from e

    def save_truth(self, dataset: SimulatedDataset, path: Path) -> None:
        """Write labels, class means, agent effects, rotations and config."""
        sidecar = truth_path(path)
        try:
            with sidecar.open("wb") as handle:
                np.savez(
                    handle,
                    labels=np.asarray(dataset.labels, dtype=np.int64),
                    class_means=dataset.class_means,
                    agent_effects=dataset.agent_effects,
                    orthogonals=dataset.orthogonals,
                    config=np.asarray(json.dumps(dataset.config.model_dump(), sort_keys=True)),
                )
        except OSError as e:
            raise TensorStoreError(f"cannot write ground truth {sidecar}: {e}") from e
        logger.debug("Ground truth saved", extra={"path": str(sidecar)})
