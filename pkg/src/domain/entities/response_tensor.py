"""Response tensor entities for domain layer.

This module defines the embedded query-response tensor, the metadata
manifest that travels with it, and the per-slot mean-response matrix.
"""

from typing import Any, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.domain.entities.arrays import FloatArray, readonly_float_array


class ResponseTensor(BaseModel):
    """Domain entity holding embedded responses X[t][n][m][r][p].

    Values are always held in 64-bit floats. When the on-disk precision is
    32-bit the values are rounded through float32 at construction so that a
    save/load round trip is bit-exact.
    """

    values: FloatArray = Field(description="Array of shape (T, N, M, R, p)")
    precision: Literal["float32", "float64"] = Field(
        default="float64", description="On-disk float precision"
    )

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("values", mode="before")
    @classmethod
    def _coerce_values(cls, value: Any) -> FloatArray:
        array = readonly_float_array(value, ndim=5, name="values")
        if min(array.shape) < 1:
            raise ValueError(f"all tensor counts must be >= 1, got {array.shape}")
        return array

    @model_validator(mode="after")
    def _round_to_precision(self) -> "ResponseTensor":
        if self.precision == "float32":
            rounded = self.values.astype(np.float32).astype(np.float64)
            if not np.all(np.isfinite(rounded)):
                raise ValueError("values overflow 32-bit float precision")
            rounded.setflags(write=False)
            object.__setattr__(self, "values", rounded)
        return self

    @property
    def n_times(self) -> int:
        return int(self.values.shape[0])

    @property
    def n_agents(self) -> int:
        return int(self.values.shape[1])

    @property
    def n_queries(self) -> int:
        return int(self.values.shape[2])

    @property
    def n_replicates(self) -> int:
        return int(self.values.shape[3])

    @property
    def dim(self) -> int:
        return int(self.values.shape[4])

    @property
    def counts(self) -> tuple[int, int, int, int, int]:
        """Counts in header order (N, T, M, R, p)."""
        return (
            self.n_agents,
            self.n_times,
            self.n_queries,
            self.n_replicates,
            self.dim,
        )

    def slot(self, time: int, agent: int) -> int:
        """Row of slot (t, n) in the block layout: t * N + n."""
        return time * self.n_agents + agent


class TensorManifest(BaseModel):
    """Metadata sidecar for a response tensor.

    Group labels live here rather than in the binary payload so that agents
    can be regrouped without rewriting the tensor.
    """

    agent_ids: list[str] = Field(description="One identifier per agent")
    time_labels: list[str] = Field(description="One label per timepoint")
    group_labels: Optional[list[int]] = Field(
        default=None, description="Group index per agent"
    )
    seed: Optional[int] = Field(default=None, description="Generating seed, if any")
    generator: Optional[str] = Field(
        default=None, description="Name of the random generator behind the seed"
    )

    model_config = ConfigDict(frozen=True, extra="forbid")

    @model_validator(mode="after")
    def _check_groups(self) -> "TensorManifest":
        if self.group_labels is not None:
            if len(self.group_labels) != len(self.agent_ids):
                raise ValueError("group_labels must have one entry per agent")
            if any(g < 0 or g >= len(self.agent_ids) for g in self.group_labels):
                raise ValueError("group labels must lie in [0, N)")
        return self

    @classmethod
    def default_for(
        cls, tensor: ResponseTensor, seed: Optional[int] = None
    ) -> "TensorManifest":
        """Build a manifest with positional identifiers."""
        return cls(
            agent_ids=[f"agent-{n}" for n in range(tensor.n_agents)],
            time_labels=[f"t{t}" for t in range(tensor.n_times)],
            seed=seed,
        )

    def matches(self, tensor: ResponseTensor) -> bool:
        """Whether list lengths agree with the tensor counts."""
        return (
            len(self.agent_ids) == tensor.n_agents
            and len(self.time_labels) == tensor.n_times
        )

    def group_members(self, group: int) -> list[int]:
        """Agent indices carrying the given group label."""
        if self.group_labels is None:
            return []
        return [n for n, g in enumerate(self.group_labels) if g == group]


class MeanResponseMatrix(BaseModel):
    """Average embedded response of one (agent, time) slot, shape (M, p)."""

    values: FloatArray = Field(description="Array of shape (M, p)")

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("values", mode="before")
    @classmethod
    def _coerce_values(cls, value: Any) -> FloatArray:
        return readonly_float_array(value, ndim=2, name="values")

    @property
    def rows(self) -> int:
        return int(self.values.shape[0])

    @property
    def cols(self) -> int:
        return int(self.values.shape[1])
