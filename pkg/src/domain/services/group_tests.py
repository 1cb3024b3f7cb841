"""Group-level change detection.

Paired energy distance on the joint embedding with a per-agent label-flip
null, the paired Hotelling oracle, and two distance-correlation baselines
(raw replicate means and embedding rows).
"""

import logging

import numpy as np
from scipy.spatial.distance import pdist, squareform

from src.domain.entities.arrays import FloatArray
from src.domain.entities.embedding import TdkpsEmbedding
from src.domain.entities.response_tensor import ResponseTensor
from src.domain.entities.simulation import SimulatedDataset
from src.domain.entities.test_result import TestResult
from src.domain.entities.test_spec import GroupTestSpec
from src.domain.exceptions import IndexBoundsError, InvalidArgumentError
from src.domain.services.stats import (
    dcorr_perm_test,
    energy_distance,
    hotelling_paired,
    perm_pvalue,
)
from src.domain.services.streams import derive_stream, map_ordered
from src.domain.services.tensor import check_agent_time

logger = logging.getLogger(__name__)


def _check_group(n_agents: int, n_times: int, spec: GroupTestSpec) -> None:
    for agent in spec.group:
        if not 0 <= agent < n_agents:
            raise IndexBoundsError("agent", agent, n_agents)
    for time in (spec.time_a, spec.time_b):
        if not 0 <= time < n_times:
            raise IndexBoundsError("time", time, n_times)


def _group_rows(embedding: TdkpsEmbedding, spec: GroupTestSpec) -> FloatArray:
    """Group embedding rows: agents at time_a first, then at time_b, same order."""
    rows = [embedding.index(spec.time_a, n) for n in spec.group]
    rows += [embedding.index(spec.time_b, n) for n in spec.group]
    selected: FloatArray = embedding.coords[rows]
    return selected


def group_distance_matrix(points: FloatArray) -> FloatArray:
    """Euclidean distance matrix between the rows of ``points``."""
    result: FloatArray = squareform(pdist(points))
    return result


def flip_indices(flips: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Slot rows of each agent after swapping the flagged agents' timepoints.

    Agent i occupies row i at the first timepoint and row n + i at the second.
    """
    n = flips.shape[0]
    own = np.arange(n)
    first = np.where(flips, own + n, own)
    second = np.where(flips, own, own + n)
    return first, second


def pe_tdkps_group_test(
    embedding: TdkpsEmbedding,
    spec: GroupTestSpec,
    threads: int = 1,
    keep_null: bool = False,
    include_same_agent_cross: bool = False,
) -> TestResult:
    """Paired energy test on the group's embedding rows.

    The 2n x 2n distance matrix is built once. Permutation b flips each
    agent's two slots with probability 1/2 using the substream (spec.seed, b)
    and re-evaluates the statistic on the cached matrix. The p-value is
    two-tailed.

    Args:
        embedding: Joint embedding fit on every agent and timepoint
        spec: Group, timepoints, permutation count and seed
        threads: Worker count for the permutation loop
        keep_null: Whether to retain the permuted statistics
        include_same_agent_cross: Use the all-pairs cross term

    Raises:
        IndexBoundsError: If a group agent or timepoint is outside the embedding
        DegenerateGroupError: If the group has fewer than two agents
    """
    _check_group(embedding.n_agents, embedding.n_times, spec)
    dist = group_distance_matrix(_group_rows(embedding, spec))
    n = spec.size
    first, second = flip_indices(np.zeros(n, dtype=bool))
    observed = energy_distance(dist, first, second, include_same_agent_cross)

    def permuted(index: int) -> float:
        flips = derive_stream(spec.seed, index).random(n) < 0.5
        idx_t, idx_t2 = flip_indices(flips)
        return energy_distance(dist, idx_t, idx_t2, include_same_agent_cross)

    nulls = map_ordered(permuted, range(spec.n_permutations), threads)
    result = TestResult(
        statistic=observed,
        p_value=perm_pvalue(observed, nulls, two_tailed=True),
        n_permutations=spec.n_permutations,
        null_sample=tuple(nulls) if keep_null else None,
        method_name="pe_tdkps",
    )
    logger.debug(
        "Group test finished",
        extra={"group_size": n, "statistic": observed, "p_value": result.p_value},
    )
    return result


def _signal_means(dataset: SimulatedDataset, agent: int, time: int) -> FloatArray:
    """Unrotated signal coordinates of one slot averaged over queries and replicates."""
    k = dataset.config.signal_dims
    responses = dataset.tensor.values[time, agent]
    unrotated = np.einsum("mrp,mpq->mrq", responses, dataset.orthogonals)
    mean: FloatArray = unrotated[:, :, :k].mean(axis=(0, 1))
    return mean


def oracle_group_test(dataset: SimulatedDataset, spec: GroupTestSpec) -> TestResult:
    """Paired Hotelling T-squared on per-agent signal-mean differences.

    Raises:
        InvalidArgumentError: If the group is not larger than the signal dimension
        SingularCovarianceError: If the difference covariance is singular
    """
    tensor = dataset.tensor
    _check_group(tensor.n_agents, tensor.n_times, spec)
    k = dataset.config.signal_dims
    if spec.size <= k:
        raise InvalidArgumentError(
            f"oracle group test needs more agents than signal dims ({spec.size} <= {k})"
        )
    diffs = np.stack(
        [
            _signal_means(dataset, n, spec.time_b) - _signal_means(dataset, n, spec.time_a)
            for n in spec.group
        ]
    )
    result = hotelling_paired(diffs)
    return result.model_copy(update={"method_name": "oracle_group"})


def _binary_labels(n: int) -> FloatArray:
    labels: FloatArray = np.repeat([0.0, 1.0], n)
    return labels


def dcorr_group_test(
    tensor: ResponseTensor, spec: GroupTestSpec, threads: int = 1
) -> TestResult:
    """Distance correlation between flattened replicate means and timepoint labels.

    Raises:
        IndexBoundsError: If a group agent or timepoint is outside the tensor
        ZeroVarianceError: If all flattened means coincide
    """
    for n in spec.group:
        check_agent_time(tensor, n, spec.time_a)
        check_agent_time(tensor, n, spec.time_b)
    means = tensor.values.mean(axis=3)
    rows = np.stack(
        [means[spec.time_a, n].ravel() for n in spec.group]
        + [means[spec.time_b, n].ravel() for n in spec.group]
    )
    result = dcorr_perm_test(
        rows, _binary_labels(spec.size), spec.n_permutations, seed=spec.seed, threads=threads
    )
    return result.model_copy(update={"method_name": "dcorr_group"})


def dcorr_tdkps_group_test(
    embedding: TdkpsEmbedding, spec: GroupTestSpec, threads: int = 1
) -> TestResult:
    """Distance correlation between the group's embedding rows and timepoint labels.

    Treats the rows as independent samples although they come from one
    shared fit.
    """
    _check_group(embedding.n_agents, embedding.n_times, spec)
    result = dcorr_perm_test(
        _group_rows(embedding, spec),
        _binary_labels(spec.size),
        spec.n_permutations,
        seed=spec.seed,
        threads=threads,
    )
    return result.model_copy(update={"method_name": "dcorr_tdkps"})
