"""CSV report adapter.

Implements ReportWriterPort with the csv module. Reals are written with 17
significant digits and rows in a fixed order so reruns are byte-identical.
"""

import csv
import logging
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Union

from src.domain.entities.embedding import TdkpsEmbedding
from src.domain.exceptions import TensorStoreError
from src.ports.report_writer_port import ReportWriterPort
from src.schemas.outputs import (
    GROUP_SCAN_CSV_HEADER,
    POWER_CSV_HEADER,
    SCAN_CSV_HEADER,
    AgentScanRow,
    GroupScanRow,
    PowerRow,
)

logger = logging.getLogger(__name__)

Cell = Union[str, int, float]


def format_cell(value: Cell) -> str:
    """Render one CSV cell; floats use 17 significant digits."""
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _write_rows(path: Path, header: Sequence[str], rows: Iterable[Sequence[Cell]]) -> int:
    count = 0
    try:
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_cell(v) for v in row])
                count += 1
    except OSError as e:
        raise TensorStoreError(f"cannot write report {path}: {e}") from e
    return count


def power_row_cells(row: PowerRow) -> list[Cell]:
    return [
        row.method,
        row.parameter,
        row.value,
        row.class_label,
        row.trials,
        row.rejections,
        row.rejection_rate,
        row.ci_low,
        row.ci_high,
        row.mean_runtime_ms,
    ]


class CsvReportAdapter(ReportWriterPort):
    """Filesystem CSV implementation of ReportWriterPort."""

    def write_power_rows(self, rows: Sequence[PowerRow], path: Path) -> None:
        ordered = sorted(rows, key=PowerRow.sort_key)
        count = _write_rows(
            path, POWER_CSV_HEADER.split(","), (power_row_cells(r) for r in ordered)
        )
        logger.info("Power rows written", extra={"path": str(path), "rows": count})

    def write_embedding(self, embedding: TdkpsEmbedding, path: Path) -> None:
        header = ["time_index", "agent_index"] + [f"c{j}" for j in range(embedding.dim)]

        def cells() -> Iterable[list[Cell]]:
            for t in range(embedding.n_times):
                for n in range(embedding.n_agents):
                    coords = [float(c) for c in embedding.point(t, n)]
                    yield [t, n, *coords]

        count = _write_rows(path, header, cells())
        logger.info("Embedding written", extra={"path": str(path), "rows": count})

    def write_scan(self, rows: Sequence[AgentScanRow], path: Path) -> None:
        count = _write_rows(
            path,
            SCAN_CSV_HEADER.split(","),
            (
                [
                    r.agent_index,
                    r.agent_id,
                    r.time_a,
                    r.time_b,
                    r.statistic,
                    r.p_value,
                    r.n_permutations,
                ]
                for r in rows
            ),
        )
        logger.info("Scan rows written", extra={"path": str(path), "rows": count})

    def write_group_scan(self, rows: Sequence[GroupScanRow], path: Path) -> None:
        count = _write_rows(
            path,
            GROUP_SCAN_CSV_HEADER.split(","),
            (
                [
                    r.group,
                    r.group_size,
                    r.time_a,
                    r.time_b,
                    r.statistic,
                    r.normalized_statistic,
                    r.p_value,
                    r.agent_normalized_statistic,
                    r.agent_combined_p_value,
                    r.n_permutations,
                ]
                for r in rows
            ),
        )
        logger.info("Group scan rows written", extra={"path": str(path), "rows": count})


def emit_csv(rows: Sequence[PowerRow], path: Path) -> None:
    """Write power-sweep rows to ``path`` with the standard header."""
    CsvReportAdapter().write_power_rows(rows, path)
