"""Joint embedding of all (time, agent) slots by classical MDS.

Builds the block distance matrix of Frobenius distances between
mean-response matrices, double-centers it, keeps the leading positive
eigenpairs, and re-embeds perturbed matrices through the frozen basis.
"""

import logging
from typing import Union

import numpy as np
from scipy import linalg
from scipy.stats import norm

from src.domain.entities.arrays import FloatArray
from src.domain.entities.embedding import (
    BlockDistanceMatrix,
    EmbeddingBasis,
    TdkpsEmbedding,
)
from src.domain.entities.response_tensor import MeanResponseMatrix, ResponseTensor
from src.domain.entities.test_spec import DimRequest
from src.domain.exceptions import (
    DegenerateInputError,
    DimensionMismatchError,
    InvalidArgumentError,
)
from src.domain.services.tensor import check_agent_time, flattened_slot_means

logger = logging.getLogger(__name__)

VARIANCE_FLOOR = 1e-12
# Upper bound on elements materialized per distance chunk.
_CHUNK_ELEMENTS = 4_000_000


def _distance_rows(points: FloatArray, targets: FloatArray) -> FloatArray:
    """Euclidean distances from each of ``points`` to every row of ``targets``.

    Every entry is sqrt(sum((target - point) ** 2)) reduced along the
    contiguous last axis, so the same pair always yields the same bits.
    """
    width = max(1, targets.shape[0] * targets.shape[1])
    step = max(1, _CHUNK_ELEMENTS // width)
    out = np.empty((points.shape[0], targets.shape[0]))
    for start in range(0, points.shape[0], step):
        chunk = points[start : start + step]
        diff = targets[np.newaxis, :, :] - chunk[:, np.newaxis, :]
        out[start : start + step] = np.sqrt(np.square(diff).sum(axis=2))
    return out


def distances_from_slot_means(
    slot_means: FloatArray, n_agents: int, n_times: int
) -> BlockDistanceMatrix:
    """Block distance matrix from flattened slot means of shape (T*N, M*p)."""
    values = _distance_rows(slot_means, slot_means)
    np.fill_diagonal(values, 0.0)
    return BlockDistanceMatrix(values=values, n_agents=n_agents, n_times=n_times)


def pairwise_block_distances(tensor: ResponseTensor) -> BlockDistanceMatrix:
    """Frobenius distances between the mean-response matrices of all slots.

    Entry (t*N + n, t'*N + n') is ||Xbar_n^(t) - Xbar_n'^(t')||_F.
    """
    distances = distances_from_slot_means(
        flattened_slot_means(tensor), tensor.n_agents, tensor.n_times
    )
    logger.debug("Block distance matrix built", extra={"size": distances.size})
    return distances


def double_center(distances: Union[BlockDistanceMatrix, FloatArray]) -> FloatArray:
    """Centered Gram matrix B = -1/2 J (D o D) J with J = I - 11^T / n.

    Args:
        distances: Square symmetric distance matrix

    Returns:
        Symmetric matrix whose rows and columns sum to zero
    """
    d = distances.values if isinstance(distances, BlockDistanceMatrix) else distances
    squared = np.square(np.asarray(d, dtype=np.float64))
    if squared.ndim != 2 or squared.shape[0] != squared.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got {squared.shape}")
    row = squared.mean(axis=1)
    col = squared.mean(axis=0)
    gram = -0.5 * (squared - row[:, np.newaxis] - col[np.newaxis, :] + squared.mean())
    centered: FloatArray = 0.5 * (gram + gram.T)
    return centered


def select_dimension(eigenvalues: Union[FloatArray, list[float]]) -> int:
    """Embedding dimension by the Zhu-Ghodsi profile likelihood.

    Splits the nonincreasing sequence into a leading and a trailing group,
    fits two Gaussians sharing one variance, and returns the split size of
    the leading group with the largest log-likelihood. Ties go to the
    smallest split.
    """
    values = np.asarray(eigenvalues, dtype=np.float64)
    n = values.shape[0]
    if n < 2:
        return 1
    best_split = 1
    best_loglik = -np.inf
    for split in range(1, n):
        head, tail = values[:split], values[split:]
        sum_squares = np.square(head - head.mean()).sum() + np.square(
            tail - tail.mean()
        ).sum()
        scale = np.sqrt(max(sum_squares / n, VARIANCE_FLOOR))
        loglik = float(
            norm.logpdf(head, head.mean(), scale).sum()
            + norm.logpdf(tail, tail.mean(), scale).sum()
        )
        if loglik > best_loglik:
            best_loglik = loglik
            best_split = split
    return best_split


def _orient(vectors: FloatArray) -> FloatArray:
    """Flip each column so its largest-magnitude entry is positive."""
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    oriented: FloatArray = vectors * signs
    return oriented


def cmds(distances: BlockDistanceMatrix, dim_request: DimRequest = "auto") -> TdkpsEmbedding:
    """Classical MDS of the block distance matrix.

    Args:
        distances: Block distance matrix over all slots
        dim_request: Explicit dimension, or "auto" for profile likelihood

    Returns:
        Embedding whose coordinates are eigenvectors scaled by the square
        roots of their eigenvalues

    Raises:
        DegenerateInputError: If the centered Gram matrix has no positive
            eigenvalue
        InvalidArgumentError: If an explicit dimension is below 1
    """
    if dim_request != "auto" and (not isinstance(dim_request, int) or dim_request < 1):
        raise InvalidArgumentError(f"dimension must be >= 1 or 'auto', got {dim_request}")

    gram = double_center(distances)
    eigenvalues, eigenvectors = linalg.eigh(gram)
    order = np.argsort(eigenvalues)[::-1]
    eigenvalues = eigenvalues[order]
    eigenvectors = eigenvectors[:, order]

    tolerance = max(float(np.max(np.abs(eigenvalues))), 0.0) * gram.shape[0] * np.finfo(
        np.float64
    ).eps
    n_positive = int(np.sum(eigenvalues > tolerance))
    if n_positive == 0:
        raise DegenerateInputError("centered Gram matrix has no positive eigenvalues")

    clamped = False
    if dim_request == "auto":
        dim = select_dimension(eigenvalues[:n_positive])
    elif dim_request > n_positive:
        logger.warning(
            "Requested dimension exceeds positive spectrum; clamping",
            extra={"requested": dim_request, "available": n_positive},
        )
        dim = n_positive
        clamped = True
    else:
        dim = dim_request

    total_mass = float(np.abs(eigenvalues).sum())
    negative_mass = float(np.abs(eigenvalues[eigenvalues < 0.0]).sum())
    negative_fraction = negative_mass / total_mass if total_mass > 0.0 else 0.0

    vectors = _orient(eigenvectors[:, :dim])
    kept = eigenvalues[:dim]
    basis = EmbeddingBasis(
        singular_values=kept, basis_vectors=vectors, all_eigenvalues=eigenvalues
    )
    logger.debug(
        "Embedding fitted",
        extra={"dim": dim, "positive": n_positive, "negative_mass": negative_fraction},
    )
    return TdkpsEmbedding(
        coords=vectors * np.sqrt(kept),
        basis=basis,
        n_agents=distances.n_agents,
        n_times=distances.n_times,
        dim_clamped=clamped,
        negative_mass_fraction=min(1.0, negative_fraction),
    )


def reembed_fixed_basis(
    distances: BlockDistanceMatrix, basis: EmbeddingBasis
) -> TdkpsEmbedding:
    """Project a perturbed distance matrix through the frozen basis V Sigma^{-1/2}.

    The perturbed matrix is recentered with its own means before projection.

    Raises:
        DimensionMismatchError: If the matrix size differs from the basis size
    """
    if distances.size != basis.size:
        raise DimensionMismatchError(
            f"distance matrix has {distances.size} slots, basis has {basis.size}"
        )
    return TdkpsEmbedding(
        coords=double_center(distances) @ basis.projection(),
        basis=basis,
        n_agents=distances.n_agents,
        n_times=distances.n_times,
    )


def update_agent_distances(
    distances: BlockDistanceMatrix,
    tensor: ResponseTensor,
    replacement_means_t: MeanResponseMatrix,
    replacement_means_t2: MeanResponseMatrix,
    agent: int,
    t: int,
    t2: int,
    slot_means: Union[FloatArray, None] = None,
) -> BlockDistanceMatrix:
    """Recompute the rows and columns of slots (t, n) and (t2, n) only.

    Args:
        distances: Current block distance matrix
        tensor: Tensor the matrix was built from
        replacement_means_t: New mean-response matrix for slot (t, n)
        replacement_means_t2: New mean-response matrix for slot (t2, n)
        agent: Agent index n
        t: First time index
        t2: Second time index
        slot_means: Cached flattened slot means of ``tensor``, if available

    Returns:
        A copy of ``distances`` in which only the two affected rows and
        columns differ
    """
    check_agent_time(tensor, agent, t)
    check_agent_time(tensor, agent, t2)
    if t == t2:
        raise InvalidArgumentError("the two time indices must differ")
    means = flattened_slot_means(tensor) if slot_means is None else slot_means
    replacements = np.stack(
        [replacement_means_t.values.ravel(), replacement_means_t2.values.ravel()]
    )
    if replacements.shape[1] != means.shape[1]:
        raise DimensionMismatchError(
            f"replacement means have {replacements.shape[1]} entries, "
            f"slots have {means.shape[1]}"
        )

    first, second = distances.index(t, agent), distances.index(t2, agent)
    rows = _distance_rows(replacements, means)
    mutual = _distance_rows(replacements[:1], replacements[1:])[0, 0]

    values = np.array(distances.values, copy=True)
    for slot, row in ((first, rows[0]), (second, rows[1])):
        values[slot, :] = row
        values[:, slot] = row
    values[first, second] = values[second, first] = mutual
    values[first, first] = values[second, second] = 0.0
    return BlockDistanceMatrix(
        values=values, n_agents=distances.n_agents, n_times=distances.n_times
    )
