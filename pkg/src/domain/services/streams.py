"""Deterministic random substreams and ordered fan-out.

Every random draw in the toolkit comes from a substream keyed by the
master seed and an entity path (permutation index, query, agent, trial).
Results therefore do not depend on how work is split across workers.
"""

import logging
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar, Union

import numpy as np

logger = logging.getLogger(__name__)

GENERATOR_NAME = "numpy.PCG64"

SeedLike = Union[int, np.random.SeedSequence]

T = TypeVar("T")
R = TypeVar("R")


def derive_seed_sequence(seed: SeedLike, *key: int) -> np.random.SeedSequence:
    """Seed sequence for the entity path ``key`` below ``seed``."""
    if isinstance(seed, np.random.SeedSequence):
        return np.random.SeedSequence(
            entropy=seed.entropy,
            spawn_key=tuple(seed.spawn_key) + tuple(int(k) for k in key),
        )
    return np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))


def derive_stream(seed: SeedLike, *key: int) -> np.random.Generator:
    """Independent generator for the entity path ``key`` below ``seed``."""
    return np.random.Generator(np.random.PCG64(derive_seed_sequence(seed, *key)))


def derive_int_seed(seed: SeedLike, *key: int) -> int:
    """A 63-bit integer seed reconstructible from (seed, key)."""
    state = derive_seed_sequence(seed, *key).generate_state(1, dtype=np.uint64)
    return int(state[0] >> np.uint64(1))


def map_ordered(
    fn: Callable[[T], R], items: Iterable[T], threads: int = 1
) -> list[R]:
    """Apply ``fn`` to every item, in parallel when threads > 1.

    The returned list is always in input order.
    """
    work: Sequence[T] = list(items)
    if threads <= 1 or len(work) <= 1:
        return [fn(item) for item in work]
    logger.debug("Fanning out work", extra={"items": len(work), "threads": threads})
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, work))
