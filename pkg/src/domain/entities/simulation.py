"""Simulation entities for domain layer.

This module defines the configuration of the temporal Gaussian-blob
generator and the dataset it produces, ground truth included.
"""

from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.domain.entities.arrays import FloatArray, readonly_float_array
from src.domain.entities.response_tensor import ResponseTensor


class SimulationConfig(BaseModel):
    """Parameters of the two-timepoint, two-class generator.

    Defaults follow the agent-level setting scaled to a desk-sized ambient
    dimension (p = 50).

    Example:
        {
            "n_agents": 20, "dim": 50, "signal_dims": 5, "n_queries": 10,
            "n_replicates": 25, "effect_size": 1.0, "scale": 1.0,
            "decay": 0.5, "class_prob": 0.5, "agent_var": 0.5,
            "noise_var": 0.5, "seed": 7
        }
    """

    n_agents: int = Field(default=20, description="Number of agents N", ge=1)
    dim: int = Field(default=50, description="Ambient dimension p", ge=1)
    signal_dims: int = Field(default=5, description="Signal dimensions p_s", ge=1)
    n_queries: int = Field(default=10, description="Number of queries M", ge=1)
    n_replicates: int = Field(default=25, description="Replicates per query R", ge=1)
    effect_size: float = Field(
        default=0.0, description="Effect size tau", ge=0.0, le=1.0
    )
    scale: float = Field(default=1.0, description="Signal scale alpha", gt=0.0)
    decay: float = Field(default=0.5, description="Decay rate beta")
    class_prob: float = Field(
        default=0.5, description="P(y_n = 1), the null class", ge=0.0, le=1.0
    )
    agent_var: float = Field(default=0.5, description="Agent-effect variance", ge=0.0)
    noise_var: float = Field(default=0.5, description="Measurement variance", ge=0.0)
    seed: int = Field(default=0, description="Master seed", ge=0)

    model_config = ConfigDict(frozen=True, extra="forbid")

    @model_validator(mode="after")
    def _check_signal_dims(self) -> "SimulationConfig":
        if self.signal_dims > self.dim:
            raise ValueError(
                f"signal_dims ({self.signal_dims}) cannot exceed dim ({self.dim})"
            )
        return self


class SimulatedDataset(BaseModel):
    """A two-timepoint tensor together with the truth that generated it.

    ``class_means[y, t]`` is mu_y at timepoint index t (0 or 1).
    """

    tensor: ResponseTensor = Field(description="Tensor of shape (2, N, M, R, p)")
    labels: tuple[int, ...] = Field(description="Class label y_n per agent")
    class_means: FloatArray = Field(description="Array of shape (2, 2, p)")
    agent_effects: FloatArray = Field(description="Array of shape (N, p)")
    orthogonals: FloatArray = Field(description="Array of shape (M, p, p)")
    config: SimulationConfig = Field(description="Generating configuration")

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("class_means", "orthogonals", mode="before")
    @classmethod
    def _coerce_rank3(cls, value: Any) -> FloatArray:
        return readonly_float_array(value, ndim=3, name="ground truth")

    @field_validator("agent_effects", mode="before")
    @classmethod
    def _coerce_effects(cls, value: Any) -> FloatArray:
        return readonly_float_array(value, ndim=2, name="agent_effects")

    @model_validator(mode="after")
    def _check_truth(self) -> "SimulatedDataset":
        cfg = self.config
        if self.tensor.n_times != 2:
            raise ValueError("simulated tensors have exactly two timepoints")
        if len(self.labels) != self.tensor.n_agents or any(
            y not in (0, 1) for y in self.labels
        ):
            raise ValueError("labels must be 0/1, one per agent")
        if self.orthogonals.shape != (cfg.n_queries, cfg.dim, cfg.dim):
            raise ValueError("orthogonals must have shape (M, p, p)")
        identity = np.eye(cfg.dim)
        for o in self.orthogonals:
            if np.max(np.abs(o.T @ o - identity)) > 1e-10:
                raise ValueError("orthogonal matrix fails O^T O = I")
            if abs(np.linalg.det(o) - 1.0) > 1e-8:
                raise ValueError("orthogonal matrix is not a rotation")
        if np.any(self.agent_effects[:, cfg.signal_dims :] != 0.0):
            raise ValueError("agent effects must vanish outside the signal dimensions")
        return self

    def agents_in_class(self, label: int) -> list[int]:
        """Indices of agents with the given class label."""
        return [n for n, y in enumerate(self.labels) if y == label]
