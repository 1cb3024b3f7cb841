"""Scans over many agents and timepoints sharing one embedding."""

import logging
from collections.abc import Mapping, Sequence

import numpy as np

from src.domain.entities.embedding import TdkpsEmbedding
from src.domain.entities.response_tensor import ResponseTensor
from src.domain.entities.shift import (
    AgentShift,
    GroupAgreement,
    GroupScan,
    GroupShift,
    PairShift,
    ShiftRanking,
)
from src.domain.entities.test_result import TestResult
from src.domain.entities.test_spec import AgentTestSpec, DimRequest, GroupTestSpec
from src.domain.exceptions import IndexBoundsError, InvalidArgumentError, ZeroVarianceError
from src.domain.services.agent_tests import tdkps_agent_test
from src.domain.services.embedding import cmds, pairwise_block_distances
from src.domain.services.group_tests import pe_tdkps_group_test
from src.domain.services.stats import fisher_combine, kendall_tau
from src.domain.services.streams import derive_int_seed

logger = logging.getLogger(__name__)

# Group seeds sit on three-part keys; agent seeds use (agent, t).
GROUP_SCAN_STREAM = 1


def scan_agent_shifts(
    tensor: ResponseTensor,
    n_permutations: int,
    seed: int,
    dim_request: DimRequest = "auto",
    threads: int = 1,
) -> list[AgentShift]:
    """Agent-level test for every agent at every consecutive timepoint pair.

    One distance matrix and one embedding serve all N (T - 1) tests. The
    test for agent n between t and t + 1 uses the seed derived from
    (seed, n, t).

    Raises:
        InvalidArgumentError: If the tensor has a single timepoint
    """
    if tensor.n_times < 2:
        raise InvalidArgumentError("a shift scan needs at least two timepoints")
    if n_permutations < 1:
        raise InvalidArgumentError("at least one permutation is required")
    distances = pairwise_block_distances(tensor)
    embedding = cmds(distances, dim_request)
    shifts = []
    for t in range(tensor.n_times - 1):
        for agent in range(tensor.n_agents):
            spec = AgentTestSpec(
                agent=agent,
                time_a=t,
                time_b=t + 1,
                n_permutations=n_permutations,
                seed=derive_int_seed(seed, agent, t),
                dim_request=dim_request,
            )
            result = tdkps_agent_test(
                tensor, spec, threads=threads, distances=distances, embedding=embedding
            )
            shifts.append(AgentShift(agent=agent, time_a=t, time_b=t + 1, result=result))
    logger.debug("Shift scan finished", extra={"tests": len(shifts)})
    return shifts


def standardized_statistic(result: TestResult) -> float:
    """Observed statistic in standard deviations of its permutation null.

    A null sample with zero spread gives 0.

    Raises:
        InvalidArgumentError: If the result kept no null sample
    """
    if result.null_sample is None:
        raise InvalidArgumentError("standardizing a statistic needs its null sample")
    null = np.asarray(result.null_sample, dtype=np.float64)
    spread = float(null.std())
    if spread == 0.0:
        return 0.0
    return (result.statistic - float(null.mean())) / spread


def scan_group_shifts(
    tensor: ResponseTensor,
    groups: Mapping[str, Sequence[int]],
    n_permutations: int,
    seed: int,
    dim_request: DimRequest = "auto",
    threads: int = 1,
) -> GroupScan:
    """Paired energy test for every group at every consecutive timepoint pair.

    One distance matrix and one embedding serve every test. Each member
    agent is also tested on the seed scan_agent_shifts gives it, each agent
    once per pair however many groups contain it, and the group's agent
    p-values are combined by Fisher's method. Group g between t and t + 1
    uses the seed derived from (seed, GROUP_SCAN_STREAM, g, t).

    Raises:
        InvalidArgumentError: If the tensor has a single timepoint or no group is given
        IndexBoundsError: If a group agent is outside the tensor
    """
    if tensor.n_times < 2:
        raise InvalidArgumentError("a shift scan needs at least two timepoints")
    if not groups:
        raise InvalidArgumentError("a group scan needs at least one group")
    if n_permutations < 1:
        raise InvalidArgumentError("at least one permutation is required")
    distances = pairwise_block_distances(tensor)
    embedding = cmds(distances, dim_request)
    agent_results: dict[tuple[int, int], TestResult] = {}

    def agent_result(agent: int, t: int) -> TestResult:
        if (agent, t) not in agent_results:
            spec = AgentTestSpec(
                agent=agent,
                time_a=t,
                time_b=t + 1,
                n_permutations=n_permutations,
                seed=derive_int_seed(seed, agent, t),
                dim_request=dim_request,
            )
            agent_results[(agent, t)] = tdkps_agent_test(
                tensor,
                spec,
                threads=threads,
                keep_null=True,
                distances=distances,
                embedding=embedding,
            )
        return agent_results[(agent, t)]

    shifts = []
    for t in range(tensor.n_times - 1):
        for index, (name, members) in enumerate(groups.items()):
            spec = GroupTestSpec(
                group=tuple(members),
                time_a=t,
                time_b=t + 1,
                n_permutations=n_permutations,
                seed=derive_int_seed(seed, GROUP_SCAN_STREAM, index, t),
                dim_request=dim_request,
            )
            result = pe_tdkps_group_test(embedding, spec, threads=threads, keep_null=True)
            agents = [agent_result(n, t) for n in spec.group]
            shifts.append(
                GroupShift(
                    group=name,
                    size=spec.size,
                    time_a=t,
                    time_b=t + 1,
                    result=result,
                    normalized_statistic=standardized_statistic(result),
                    agent_normalized_statistic=float(
                        np.mean([standardized_statistic(r) for r in agents])
                    ),
                    agent_combined_p_value=fisher_combine([r.p_value for r in agents]),
                )
            )
    agreements = tuple(
        group_agreement(name, [s for s in shifts if s.group == name]) for name in groups
    )
    logger.debug(
        "Group scan finished",
        extra={"group_tests": len(shifts), "agent_tests": len(agent_results)},
    )
    return GroupScan(shifts=tuple(shifts), agreements=agreements)


def group_agreement(name: str, shifts: Sequence[GroupShift]) -> GroupAgreement:
    """Kendall tau between one group's p-values and its combined agent p-values."""
    if len(shifts) < 2:
        return GroupAgreement(group=name, pairs=len(shifts))
    try:
        tau, p_value = kendall_tau(
            [s.result.p_value for s in shifts], [s.agent_combined_p_value for s in shifts]
        )
    except ZeroVarianceError:
        logger.warning("Constant p-values; agreement undefined", extra={"group": name})
        return GroupAgreement(group=name, pairs=len(shifts))
    return GroupAgreement(group=name, pairs=len(shifts), kendall_tau=tau, p_value=p_value)


def shift_rank_analysis(embedding: TdkpsEmbedding, reference_index: int) -> ShiftRanking:
    """Correlate consecutive-pair shift ranks with distance from a reference time.

    Pairs are ranked so the largest mean shift gets rank 1; ties keep
    temporal order. The temporal distance of pair (t, t + 1) is
    |t + 1 - reference_index|.

    Raises:
        InvalidArgumentError: If the embedding has fewer than three timepoints
        IndexBoundsError: If the reference index is not a timepoint
        ZeroVarianceError: If every pair shares one temporal distance
    """
    if embedding.n_times < 3:
        raise InvalidArgumentError("shift ranking needs at least three timepoints")
    if not 0 <= reference_index < embedding.n_times:
        raise IndexBoundsError("time", reference_index, embedding.n_times)

    n = embedding.n_agents
    coords = embedding.coords.reshape(embedding.n_times, n, -1)
    means = np.linalg.norm(coords[1:] - coords[:-1], axis=2).mean(axis=1)
    order = np.argsort(-means, kind="stable")
    ranks = np.empty(len(means), dtype=np.int64)
    ranks[order] = np.arange(1, len(means) + 1)
    distances = [abs(t + 1 - reference_index) for t in range(len(means))]

    tau, p_value = kendall_tau(ranks.astype(np.float64), distances)
    pairs = tuple(
        PairShift(
            time_a=t,
            time_b=t + 1,
            mean_shift=float(means[t]),
            rank=int(ranks[t]),
            temporal_distance=distances[t],
        )
        for t in range(len(means))
    )
    return ShiftRanking(
        reference_index=reference_index, pairs=pairs, kendall_tau=tau, p_value=p_value
    )
