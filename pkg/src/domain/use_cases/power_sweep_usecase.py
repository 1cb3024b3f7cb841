"""Power sweep use case.

This module runs the Monte-Carlo experiment behind power and Type I error
curves: for every sweep value and trial it simulates a dataset, runs each
requested test on the signal and null classes, and aggregates rejections
with Wilson intervals.
"""

import logging
import time
from collections import defaultdict
from collections.abc import Callable
from dataclasses import dataclass
from functools import partial
from pathlib import Path
from typing import Optional

from src.domain.entities.embedding import BlockDistanceMatrix, TdkpsEmbedding
from src.domain.entities.simulation import SimulatedDataset
from src.domain.entities.test_result import TestResult
from src.domain.entities.test_spec import AgentTestSpec, GroupTestSpec
from src.domain.exceptions import DegenerateInputError
from src.domain.services.agent_tests import (
    dcorr_agent_test,
    oracle_agent_test,
    tdkps_agent_test,
)
from src.domain.services.embedding import cmds, pairwise_block_distances
from src.domain.services.group_tests import (
    dcorr_group_test,
    dcorr_tdkps_group_test,
    oracle_group_test,
    pe_tdkps_group_test,
)
from src.domain.services.simulation import NULL_CLASS, SIGNAL_CLASS, generate_dataset
from src.domain.services.stats import wilson_interval
from src.domain.services.streams import derive_int_seed, derive_stream, map_ordered
from src.ports.report_writer_port import ReportWriterPort
from src.schemas.inputs import AGENT_METHODS, GROUP_METHODS, ExperimentConfig
from src.schemas.outputs import PowerRow

logger = logging.getLogger(__name__)

CLASS_LABELS = (SIGNAL_CLASS, NULL_CLASS)
MAX_RESAMPLES = 1000

# Substream keys below a trial seed; 0-3 belong to the generator.
_SELECTION_STREAM = 4
_AGENT_TEST_STREAM = 5
_GROUP_TEST_STREAM = 6


@dataclass(frozen=True)
class Outcome:
    """One test run inside a trial."""

    method: str
    class_label: int
    rejected: bool
    runtime_ms: float


def trial_seed(config: ExperimentConfig, value_index: int, trial: int, attempt: int) -> int:
    """Dataset seed of a trial, reconstructible from the master seed."""
    return derive_int_seed(config.seed, value_index, trial, attempt)


def _usable(dataset: SimulatedDataset, config: ExperimentConfig) -> bool:
    """Whether both classes are large enough for every requested method."""
    sizes = [len(dataset.agents_in_class(label)) for label in CLASS_LABELS]
    needed = 1
    if any(m in GROUP_METHODS for m in config.methods):
        needed = 2
    if "oracle_group" in config.methods:
        needed = max(needed, dataset.config.signal_dims + 1)
    return min(sizes) >= needed


def _timed(run: Callable[[], TestResult]) -> tuple[TestResult, float]:
    started = time.perf_counter()
    result = run()
    return result, (time.perf_counter() - started) * 1000.0


class _Trial:
    """State of one trial: the dataset and its lazily shared embedding."""

    def __init__(self, dataset: SimulatedDataset, config: ExperimentConfig, seed: int):
        self.dataset = dataset
        self.config = config
        self.seed = seed
        self._distances: Optional[BlockDistanceMatrix] = None
        self._embedding: Optional[TdkpsEmbedding] = None

    def embedding(self) -> tuple[BlockDistanceMatrix, TdkpsEmbedding]:
        if self._distances is None or self._embedding is None:
            self._distances = pairwise_block_distances(self.dataset.tensor)
            self._embedding = cmds(self._distances, self.config.dim_request)
        return self._distances, self._embedding

    def agent_outcomes(self, method: str) -> list[Outcome]:
        selector = derive_stream(self.seed, _SELECTION_STREAM)
        outcomes = []
        for label in CLASS_LABELS:
            members = self.dataset.agents_in_class(label)
            count = min(self.config.agents_per_trial, len(members))
            chosen = selector.choice(members, size=count, replace=False)
            for agent in sorted(int(a) for a in chosen):
                spec = AgentTestSpec(
                    agent=agent,
                    n_permutations=self.config.n_permutations,
                    seed=derive_int_seed(self.seed, _AGENT_TEST_STREAM, agent),
                    dim_request=self.config.dim_request,
                )
                result, runtime = _timed(partial(self._run_agent, method, spec))
                outcomes.append(
                    Outcome(method, label, result.rejects(self.config.alpha), runtime)
                )
        return outcomes

    def _run_agent(self, method: str, spec: AgentTestSpec) -> TestResult:
        if method == "tdkps":
            distances, embedding = self.embedding()
            return tdkps_agent_test(
                self.dataset.tensor, spec, distances=distances, embedding=embedding
            )
        if method == "oracle":
            return oracle_agent_test(self.dataset, spec)
        return dcorr_agent_test(self.dataset.tensor, spec)

    def group_outcomes(self, method: str) -> list[Outcome]:
        outcomes = []
        for label in CLASS_LABELS:
            spec = GroupTestSpec(
                group=tuple(self.dataset.agents_in_class(label)),
                n_permutations=self.config.n_permutations,
                seed=derive_int_seed(self.seed, _GROUP_TEST_STREAM, label),
                dim_request=self.config.dim_request,
            )
            result, runtime = _timed(partial(self._run_group, method, spec))
            outcomes.append(Outcome(method, label, result.rejects(self.config.alpha), runtime))
        return outcomes

    def _run_group(self, method: str, spec: GroupTestSpec) -> TestResult:
        if method == "oracle_group":
            return oracle_group_test(self.dataset, spec)
        if method == "dcorr_group":
            return dcorr_group_test(self.dataset.tensor, spec)
        _, embedding = self.embedding()
        if method == "pe_tdkps":
            return pe_tdkps_group_test(embedding, spec)
        return dcorr_tdkps_group_test(embedding, spec)


def run_trial(config: ExperimentConfig, value_index: int, trial: int) -> list[Outcome]:
    """Simulate one dataset and run every requested method on both classes.

    A dataset whose classes are too small is redrawn with the next attempt
    index in its seed.

    Raises:
        DegenerateInputError: If no usable dataset appears within MAX_RESAMPLES
    """
    sim_config = config.config_for(config.sweep_values[value_index])
    for attempt in range(MAX_RESAMPLES):
        seed = trial_seed(config, value_index, trial, attempt)
        dataset = generate_dataset(sim_config, seed=seed)
        if _usable(dataset, config):
            break
    else:
        raise DegenerateInputError(
            f"no dataset with usable class sizes after {MAX_RESAMPLES} draws "
            f"({config.sweep_parameter}={config.sweep_values[value_index]})"
        )
    if attempt > 0:
        logger.warning(
            "Trial resampled",
            extra={"value_index": value_index, "trial": trial, "resamples": attempt},
        )
    logger.info(
        "Trial dataset drawn",
        extra={"value_index": value_index, "trial": trial, "attempt": attempt, "seed": seed},
    )

    state = _Trial(dataset, config, seed)
    outcomes: list[Outcome] = []
    for method in config.methods:
        if method in AGENT_METHODS:
            outcomes.extend(state.agent_outcomes(method))
        else:
            outcomes.extend(state.group_outcomes(method))
    return outcomes


def run_power_sweep(config: ExperimentConfig) -> list[PowerRow]:
    """Rejection rates per (method, sweep value, class) with 95% Wilson intervals.

    Trials fan out over ``config.threads`` workers; the rows do not depend
    on the worker count. Runtimes are reported as 0 unless
    ``config.record_runtime`` is set.
    """
    jobs = [
        (v, i) for v in range(len(config.sweep_values)) for i in range(config.trials)
    ]
    results = map_ordered(lambda job: run_trial(config, *job), jobs, config.threads)

    rejections: dict[tuple[str, int, int], int] = defaultdict(int)
    counts: dict[tuple[str, int, int], int] = defaultdict(int)
    runtimes: dict[tuple[str, int, int], float] = defaultdict(float)
    for (value_index, _), outcomes in zip(jobs, results):
        for outcome in outcomes:
            key = (outcome.method, value_index, outcome.class_label)
            counts[key] += 1
            rejections[key] += int(outcome.rejected)
            runtimes[key] += outcome.runtime_ms

    rows = []
    for method, value_index, label in sorted(counts):
        key = (method, value_index, label)
        low, high = wilson_interval(rejections[key], counts[key])
        rows.append(
            PowerRow(
                method=method,
                parameter=config.sweep_parameter,
                value=float(config.sweep_values[value_index]),
                class_label=label,
                trials=counts[key],
                rejections=rejections[key],
                rejection_rate=rejections[key] / counts[key],
                ci_low=low,
                ci_high=high,
                mean_runtime_ms=runtimes[key] / counts[key] if config.record_runtime else 0.0,
            )
        )
    return sorted(rows, key=PowerRow.sort_key)


class PowerSweepUseCase:
    """Use case for running a power sweep and writing its CSV."""

    def __init__(self, report_writer: ReportWriterPort):
        """Initialize the use case.

        Args:
            report_writer: Port for writing the power CSV
        """
        self.report_writer = report_writer

    def execute(self, config: ExperimentConfig, output_path: Path) -> list[PowerRow]:
        """Execute the sweep and write one CSV row per (method, value, class)."""
        logger.info(
            "Executing power sweep use case",
            extra={
                "sweep_parameter": config.sweep_parameter,
                "sweep_values": config.sweep_values,
                "methods": list(config.methods),
                "trials": config.trials,
                "seed": config.seed,
                "threads": config.threads,
            },
        )
        started = time.perf_counter()
        rows = run_power_sweep(config)
        self.report_writer.write_power_rows(rows, output_path)
        logger.info(
            "Power sweep complete",
            extra={
                "rows": len(rows),
                "output_path": str(output_path),
                "elapsed_ms": (time.perf_counter() - started) * 1000.0,
            },
        )
        return rows
