"""Unit tests for the CSV report adapter."""

from pathlib import Path

import pytest

from src.adapters.csv_report_adapter import CsvReportAdapter, emit_csv, format_cell
from src.domain.entities.embedding import TdkpsEmbedding
from src.domain.exceptions import TensorStoreError
from src.schemas.outputs import (
    GROUP_SCAN_CSV_HEADER,
    POWER_CSV_HEADER,
    SCAN_CSV_HEADER,
    AgentScanRow,
    GroupScanRow,
    PowerRow,
)


def _row(method: str, value: float, label: int) -> PowerRow:
    return PowerRow(
        method=method,
        parameter="effect_size",
        value=value,
        class_label=label,
        trials=2,
        rejections=1,
        rejection_rate=0.5,
        ci_low=0.1,
        ci_high=0.9,
        mean_runtime_ms=0.0,
    )


class TestFormatCell:
    """Test suite for format_cell."""

    @pytest.mark.unit
    def test_floats_use_seventeen_digits(self) -> None:
        """Test reals round-trip through their text form."""
        assert format_cell(0.1) == "0.10000000000000001"
        assert float(format_cell(1 / 3)) == 1 / 3

    @pytest.mark.unit
    def test_integers_and_strings(self) -> None:
        """Test non-floats are written as-is."""
        assert format_cell(7) == "7"
        assert format_cell("tdkps") == "tdkps"


class TestCsvReportAdapter:
    """Test suite for CsvReportAdapter."""

    @pytest.mark.unit
    def test_power_header_exact(
        self, tmp_path: Path, report_writer: CsvReportAdapter
    ) -> None:
        """Test an empty sweep writes the header line only."""
        path = tmp_path / "power.csv"

        report_writer.write_power_rows([], path)

        assert path.read_text(encoding="utf-8") == (
            "method,parameter,value,class_label,trials,rejections,"
            "rejection_rate,ci_low,ci_high,mean_runtime_ms\n"
        )
        assert POWER_CSV_HEADER == path.read_text(encoding="utf-8").strip()

    @pytest.mark.unit
    def test_one_row_gives_two_lines(self, tmp_path: Path) -> None:
        """Test a single row is written below the header."""
        path = tmp_path / "power.csv"

        emit_csv([_row("tdkps", 0.5, 0)], path)

        lines = path.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 2
        assert lines[1] == "tdkps,effect_size,0.5,0,2,1,0.5,0.10000000000000001,0.90000000000000002,0"

    @pytest.mark.unit
    def test_rows_sorted(self, tmp_path: Path, report_writer: CsvReportAdapter) -> None:
        """Test rows are ordered by method, value and class."""
        path = tmp_path / "power.csv"
        rows = [_row("tdkps", 1.0, 0), _row("dcorr", 0.0, 1), _row("dcorr", 0.0, 0)]

        report_writer.write_power_rows(rows, path)

        keys = [line.split(",")[:4] for line in path.read_text(encoding="utf-8").splitlines()[1:]]
        assert keys == [
            ["dcorr", "effect_size", "0", "0"],
            ["dcorr", "effect_size", "0", "1"],
            ["tdkps", "effect_size", "1", "0"],
        ]

    @pytest.mark.unit
    def test_embedding_columns(
        self, tmp_path: Path, report_writer: CsvReportAdapter, small_embedding: TdkpsEmbedding
    ) -> None:
        """Test one row per slot with time, agent and d coordinates."""
        path = tmp_path / "embedding.csv"

        report_writer.write_embedding(small_embedding, path)

        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "time_index,agent_index,c0,c1,c2"
        assert len(lines) == 1 + small_embedding.n_agents * small_embedding.n_times
        assert lines[5].startswith("1,0,")
        assert float(lines[1].split(",")[2]) == small_embedding.point(0, 0)[0]

    @pytest.mark.unit
    def test_scan_rows(self, tmp_path: Path, report_writer: CsvReportAdapter) -> None:
        """Test scan rows keep their order below the scan header."""
        path = tmp_path / "scan.csv"
        rows = [
            AgentScanRow(
                agent_index=1, agent_id="b", time_a=0, time_b=1, statistic=2.0, p_value=0.5, n_permutations=9
            )
        ]

        report_writer.write_scan(rows, path)

        assert path.read_text(encoding="utf-8").splitlines() == [SCAN_CSV_HEADER, "1,b,0,1,2,0.5,9"]

    @pytest.mark.unit
    def test_group_scan_rows(self, tmp_path: Path, report_writer: CsvReportAdapter) -> None:
        """Test group scan rows keep their order below the group scan header."""
        path = tmp_path / "groups.csv"
        row = GroupScanRow(
            group="all",
            group_size=4,
            time_a="t0",
            time_b="t1",
            statistic=2.0,
            normalized_statistic=-1.5,
            p_value=0.5,
            agent_normalized_statistic=0.25,
            agent_combined_p_value=0.125,
            n_permutations=9,
        )

        report_writer.write_group_scan([row], path)

        assert path.read_text(encoding="utf-8").splitlines() == [
            GROUP_SCAN_CSV_HEADER,
            "all,4,t0,t1,2,-1.5,0.5,0.25,0.125,9",
        ]

    @pytest.mark.unit
    def test_unwritable_path(self, tmp_path: Path, report_writer: CsvReportAdapter) -> None:
        """Test a missing directory raises TensorStoreError."""
        with pytest.raises(TensorStoreError):
            report_writer.write_power_rows([], tmp_path / "missing" / "power.csv")
