"""Shift scan use case."""

import logging
from pathlib import Path

from src.domain.entities.test_spec import DimRequest
from src.domain.services.shift_analysis import scan_agent_shifts
from src.ports.report_writer_port import ReportWriterPort
from src.ports.tensor_store_port import TensorStorePort
from src.schemas.outputs import AgentScanRow

logger = logging.getLogger(__name__)


class ScanAgentsUseCase:
    """Use case for testing every agent at every consecutive timepoint pair."""

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
    ) -> list[AgentScanRow]:
        """Run the scan and write one CSV row per (agent, pair)."""
        logger.info(
            "Executing scan use case",
            extra={"data_path": str(data_path), "n_permutations": n_permutations, "seed": seed},
        )
        tensor, manifest = self.tensor_store.load(data_path)
        shifts = scan_agent_shifts(tensor, n_permutations, seed, dim_request, threads)
        rows = [
            AgentScanRow(
                agent_index=s.agent,
                agent_id=manifest.agent_ids[s.agent],
                time_a=s.time_a,
                time_b=s.time_b,
                statistic=s.result.statistic,
                p_value=s.result.p_value,
                n_permutations=s.result.n_permutations,
            )
            for s in shifts
        ]
        self.report_writer.write_scan(rows, output_path)
        logger.info("Scan complete", extra={"tests": len(rows)})
        return rows
