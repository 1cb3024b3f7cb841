"""Group shift scan use case."""

import logging
from pathlib import Path
from typing import Optional

from src.domain.entities.response_tensor import TensorManifest
from src.domain.entities.test_spec import DimRequest
from src.domain.exceptions import DegenerateGroupError
from src.domain.services.shift_analysis import scan_group_shifts
from src.ports.report_writer_port import ReportWriterPort
from src.ports.tensor_store_port import TensorStorePort
from src.schemas.outputs import GroupAgreementEntry, GroupScanReport, GroupScanRow

logger = logging.getLogger(__name__)

ALL_AGENTS = "all"


def scan_groups(
    manifest: TensorManifest, n_agents: int, labels: Optional[list[int]] = None
) -> dict[str, list[int]]:
    """Named groups to scan: every agent, then each manifest group label.

    Without ``labels`` every label carried by at least two agents is used.

    Raises:
        DegenerateGroupError: If the tensor or a requested label has fewer than two agents
    """
    if n_agents < 2:
        raise DegenerateGroupError(f"a group scan needs at least two agents, got {n_agents}")
    groups = {ALL_AGENTS: list(range(n_agents))}
    if labels is None:
        present = sorted(set(manifest.group_labels or []))
        labels = [g for g in present if len(manifest.group_members(g)) >= 2]
    else:
        for label in labels:
            count = len(manifest.group_members(label))
            if count < 2:
                raise DegenerateGroupError(
                    f"group {label} has {count} agents; at least two are needed"
                )
    for label in labels:
        groups[f"group-{label}"] = manifest.group_members(label)
    return groups


class ScanGroupsUseCase:
    """Use case for testing every group at every consecutive timepoint pair."""

    def __init__(self, tensor_store: TensorStorePort, report_writer: ReportWriterPort):
        self.tensor_store = tensor_store
        self.report_writer = report_writer

    def execute(
        self,
        data_path: Path,
        output_path: Path,
        n_permutations: int,
        seed: int,
        dim_request: DimRequest = "auto",
        threads: int = 1,
        group_labels: Optional[list[int]] = None,
    ) -> GroupScanReport:
        """Run the group scan, write one CSV row per (pair, group) and summarize agreement."""
        logger.info(
            "Executing group scan use case",
            extra={
                "data_path": str(data_path),
                "n_permutations": n_permutations,
                "seed": seed,
                "group_labels": group_labels,
            },
        )
        tensor, manifest = self.tensor_store.load(data_path)
        groups = scan_groups(manifest, tensor.n_agents, group_labels)
        scan = scan_group_shifts(tensor, groups, n_permutations, seed, dim_request, threads)
        rows = [
            GroupScanRow(
                group=s.group,
                group_size=s.size,
                time_a=manifest.time_labels[s.time_a],
                time_b=manifest.time_labels[s.time_b],
                statistic=s.result.statistic,
                normalized_statistic=s.normalized_statistic,
                p_value=s.result.p_value,
                agent_normalized_statistic=s.agent_normalized_statistic,
                agent_combined_p_value=s.agent_combined_p_value,
                n_permutations=s.result.n_permutations,
            )
            for s in scan.shifts
        ]
        self.report_writer.write_group_scan(rows, output_path)
        agreements = [
            GroupAgreementEntry(
                group=a.group, pairs=a.pairs, kendall_tau=a.kendall_tau, p_value=a.p_value
            )
            for a in scan.agreements
        ]
        logger.info(
            "Group scan complete", extra={"tests": len(rows), "groups": len(groups)}
        )
        return GroupScanReport(rows=rows, agreements=agreements)
