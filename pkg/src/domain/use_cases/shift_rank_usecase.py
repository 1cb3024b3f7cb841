"""Shift rank use case."""

import logging
from pathlib import Path

from src.domain.entities.test_spec import DimRequest
from src.domain.services.embedding import cmds, pairwise_block_distances
from src.domain.services.shift_analysis import shift_rank_analysis
from src.ports.tensor_store_port import TensorStorePort
from src.schemas.outputs import ShiftRankEntry, ShiftRankReport

logger = logging.getLogger(__name__)


class ShiftRankUseCase:
    """Use case for relating shift size to distance from a reference timepoint."""

    def __init__(self, tensor_store: TensorStorePort):
        self.tensor_store = tensor_store

    def execute(
        self, data_path: Path, reference_index: int, dim_request: DimRequest = "auto"
    ) -> ShiftRankReport:
        """Embed the tensor and rank consecutive-pair shifts."""
        logger.info(
            "Executing shift rank use case",
            extra={"data_path": str(data_path), "reference_index": reference_index},
        )
        tensor, manifest = self.tensor_store.load(data_path)
        embedding = cmds(pairwise_block_distances(tensor), dim_request)
        ranking = shift_rank_analysis(embedding, reference_index)
        labels = manifest.time_labels
        report = ShiftRankReport(
            reference=labels[reference_index],
            kendall_tau=ranking.kendall_tau,
            p_value=ranking.p_value,
            pairs=[
                ShiftRankEntry(
                    time_a=labels[p.time_a],
                    time_b=labels[p.time_b],
                    mean_shift=p.mean_shift,
                    rank=p.rank,
                    temporal_distance=p.temporal_distance,
                )
                for p in ranking.pairs
            ],
            dim=embedding.dim,
        )
        logger.info(
            "Shift rank complete",
            extra={"kendall_tau": report.kendall_tau, "p_value": report.p_value},
        )
        return report
