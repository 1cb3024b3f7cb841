"""Report writer port (interface) for hexagonal architecture."""

from abc import ABC, abstractmethod
from collections.abc import Sequence
from pathlib import Path

from src.domain.entities.embedding import TdkpsEmbedding
from src.schemas.outputs import AgentScanRow, GroupScanRow, PowerRow


class ReportWriterPort(ABC):
    """Abstract interface for tabular result files.

    Implementations must produce byte-identical files for identical inputs.
    """

    @abstractmethod
    def write_power_rows(self, rows: Sequence[PowerRow], path: Path) -> None:
        """Write power-sweep rows sorted by (method, value, class).

        Raises:
            TensorStoreError: If the file cannot be written
        """
        pass

    @abstractmethod
    def write_embedding(self, embedding: TdkpsEmbedding, path: Path) -> None:
        """Write one row per (time, agent) slot with its coordinates."""
        pass

    @abstractmethod
    def write_scan(self, rows: Sequence[AgentScanRow], path: Path) -> None:
        """Write shift-scan rows in the order given."""
        pass

    @abstractmethod
    def write_group_scan(self, rows: Sequence[GroupScanRow], path: Path) -> None:
        """Write group-scan rows in the order given."""
        pass
