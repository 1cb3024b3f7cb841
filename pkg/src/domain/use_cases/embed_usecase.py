"""Embed use case."""

import logging
from pathlib import Path

from src.domain.entities.embedding import TdkpsEmbedding
from src.domain.entities.test_spec import DimRequest
from src.domain.services.embedding import cmds, pairwise_block_distances
from src.ports.report_writer_port import ReportWriterPort
from src.ports.tensor_store_port import TensorStorePort

logger = logging.getLogger(__name__)


class EmbedUseCase:
    """Use case for embedding every (time, agent) slot of a stored tensor."""

    def __init__(self, tensor_store: TensorStorePort, report_writer: ReportWriterPort):
        self.tensor_store = tensor_store
        self.report_writer = report_writer

    def execute(
        self, data_path: Path, dim_request: DimRequest, output_path: Path
    ) -> TdkpsEmbedding:
        """Embed the tensor at ``data_path`` and write the coordinates as CSV."""
        logger.info(
            "Executing embed use case",
            extra={"data_path": str(data_path), "dim_request": dim_request},
        )
        tensor, _ = self.tensor_store.load(data_path)
        embedding = cmds(pairwise_block_distances(tensor), dim_request)
        self.report_writer.write_embedding(embedding, output_path)
        logger.info(
            "Embedding complete",
            extra={
                "dim": embedding.dim,
                "dim_clamped": embedding.dim_clamped,
                "negative_mass_fraction": embedding.negative_mass_fraction,
            },
        )
        return embedding
