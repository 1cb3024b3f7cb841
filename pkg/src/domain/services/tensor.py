"""Replicate averaging over response tensors."""

import numpy as np

from src.domain.entities.arrays import FloatArray
from src.domain.entities.response_tensor import MeanResponseMatrix, ResponseTensor
from src.domain.exceptions import IndexBoundsError


def check_agent_time(tensor: ResponseTensor, agent: int, time: int) -> None:
    """Raise IndexBoundsError unless (agent, time) addresses a slot of ``tensor``."""
    if not 0 <= agent < tensor.n_agents:
        raise IndexBoundsError("agent", agent, tensor.n_agents)
    if not 0 <= time < tensor.n_times:
        raise IndexBoundsError("time", time, tensor.n_times)


def mean_responses(tensor: ResponseTensor, agent: int, time: int) -> MeanResponseMatrix:
    """Average the R replicates of every query for slot (time, agent).

    Args:
        tensor: Response tensor
        agent: Agent index n
        time: Time index t

    Returns:
        M x p matrix whose row m is the replicate mean for query m

    Raises:
        IndexBoundsError: If either index is out of range
    """
    check_agent_time(tensor, agent, time)
    return MeanResponseMatrix(values=tensor.values[time, agent].mean(axis=1))


def flattened_slot_means(tensor: ResponseTensor) -> FloatArray:
    """Replicate means of every slot, flattened to shape (T*N, M*p).

    Row t * N + n holds the mean-response matrix of slot (t, n) in row-major
    order, so Euclidean distances between rows are Frobenius distances.
    """
    means = tensor.values.mean(axis=3)
    flat: FloatArray = np.ascontiguousarray(
        means.reshape(tensor.n_times * tensor.n_agents, -1)
    )
    return flat
