"""Embedding entities for domain layer.

This module defines the block distance matrix over all (time, agent)
slots, the frozen spectral basis of a classical MDS fit, and the joint
embedding itself.
"""

from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.domain.entities.arrays import FloatArray, readonly_float_array

SYMMETRY_TOLERANCE = 1e-12
ORTHONORMAL_TOLERANCE = 1e-10


class BlockDistanceMatrix(BaseModel):
    """TN x TN matrix of Frobenius distances between mean-response matrices.

    Slot (t, n) lives at row t * N + n.
    """

    values: FloatArray = Field(description="Array of shape (T*N, T*N)")
    n_agents: int = Field(description="Number of agents N", ge=1)
    n_times: int = Field(description="Number of timepoints T", ge=1)

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("values", mode="before")
    @classmethod
    def _coerce_values(cls, value: Any) -> FloatArray:
        return readonly_float_array(value, ndim=2, name="values")

    @model_validator(mode="after")
    def _check_distance_matrix(self) -> "BlockDistanceMatrix":
        size = self.n_agents * self.n_times
        if self.values.shape != (size, size):
            raise ValueError(
                f"distance matrix must be {size}x{size}, got {self.values.shape}"
            )
        scale = max(1.0, float(np.max(np.abs(self.values), initial=0.0)))
        if np.max(np.abs(self.values - self.values.T)) > SYMMETRY_TOLERANCE * scale:
            raise ValueError("distance matrix is not symmetric")
        if np.any(np.diag(self.values) != 0.0):
            raise ValueError("distance matrix diagonal must be zero")
        if np.any(self.values < 0.0):
            raise ValueError("distances must be nonnegative")
        return self

    @property
    def size(self) -> int:
        return self.n_agents * self.n_times

    def index(self, time: int, agent: int) -> int:
        """Row of slot (t, n)."""
        return time * self.n_agents + agent


class EmbeddingBasis(BaseModel):
    """Frozen spectral basis of a classical MDS fit.

    Holds the retained eigenvalues (Sigma) and eigenvectors (V) of the
    centered Gram matrix; V Sigma^{-1/2} projects any centered Gram matrix
    of the same size into the original coordinate system.
    """

    singular_values: FloatArray = Field(description="Retained eigenvalues, shape (d,)")
    basis_vectors: FloatArray = Field(description="Eigenvectors, shape (T*N, d)")
    all_eigenvalues: FloatArray = Field(
        description="Full nonincreasing spectrum of the centered Gram matrix"
    )

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("singular_values", "all_eigenvalues", mode="before")
    @classmethod
    def _coerce_vectors(cls, value: Any) -> FloatArray:
        return readonly_float_array(value, ndim=1, name="eigenvalues")

    @field_validator("basis_vectors", mode="before")
    @classmethod
    def _coerce_basis(cls, value: Any) -> FloatArray:
        return readonly_float_array(value, ndim=2, name="basis_vectors")

    @model_validator(mode="after")
    def _check_basis(self) -> "EmbeddingBasis":
        d = self.singular_values.shape[0]
        if d < 1 or self.basis_vectors.shape[1] != d:
            raise ValueError("basis must retain at least one matching eigenpair")
        if np.any(self.singular_values <= 0.0):
            raise ValueError("retained eigenvalues must be strictly positive")
        if np.any(np.diff(self.singular_values) > 0.0):
            raise ValueError("retained eigenvalues must be nonincreasing")
        gram = self.basis_vectors.T @ self.basis_vectors
        if np.max(np.abs(gram - np.eye(d))) > ORTHONORMAL_TOLERANCE:
            raise ValueError("basis vectors are not orthonormal")
        return self

    @property
    def dim(self) -> int:
        return int(self.singular_values.shape[0])

    @property
    def size(self) -> int:
        return int(self.basis_vectors.shape[0])

    def projection(self) -> FloatArray:
        """The fixed projection V Sigma^{-1/2}."""
        result: FloatArray = self.basis_vectors / np.sqrt(self.singular_values)
        return result


class TdkpsEmbedding(BaseModel):
    """Joint embedding of every (time, agent) slot; row t * N + n holds psi_n^(t)."""

    coords: FloatArray = Field(description="Coordinates, shape (T*N, d)")
    basis: EmbeddingBasis = Field(description="Spectral basis used for re-embedding")
    n_agents: int = Field(description="Number of agents N", ge=1)
    n_times: int = Field(description="Number of timepoints T", ge=1)
    dim_clamped: bool = Field(
        default=False,
        description="Requested dimension exceeded the positive spectrum and was clamped",
    )
    negative_mass_fraction: float = Field(
        default=0.0,
        description="Share of absolute spectral mass on negative eigenvalues",
        ge=0.0,
        le=1.0,
    )

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("coords", mode="before")
    @classmethod
    def _coerce_coords(cls, value: Any) -> FloatArray:
        return readonly_float_array(value, ndim=2, name="coords")

    @model_validator(mode="after")
    def _check_shape(self) -> "TdkpsEmbedding":
        size = self.n_agents * self.n_times
        if self.coords.shape != (size, self.basis.dim):
            raise ValueError(
                f"coords must be {size}x{self.basis.dim}, got {self.coords.shape}"
            )
        return self

    @property
    def dim(self) -> int:
        return self.basis.dim

    def index(self, time: int, agent: int) -> int:
        """Row of slot (t, n)."""
        return time * self.n_agents + agent

    def point(self, time: int, agent: int) -> FloatArray:
        """Coordinates psi_n^(t)."""
        row: FloatArray = self.coords[self.index(time, agent)]
        return row
