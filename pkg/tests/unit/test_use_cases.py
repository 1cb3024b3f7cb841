"""Unit tests for use cases.

Tests orchestration in use cases with mocked ports.
"""

from pathlib import Path
from unittest.mock import MagicMock

import numpy as np
import pytest
from pytest_mock import MockerFixture

from src.domain.entities.response_tensor import ResponseTensor, TensorManifest
from src.domain.entities.simulation import SimulatedDataset
from src.domain.entities.test_spec import AgentTestSpec
from src.domain.exceptions import (
    DegenerateGroupError,
    MissingGroundTruthError,
    UnknownMethodError,
)
from src.domain.services.streams import GENERATOR_NAME
from src.domain.use_cases import test_group_usecase as group_usecase_module
from src.domain.use_cases.embed_usecase import EmbedUseCase
from src.domain.use_cases.scan_agents_usecase import ScanAgentsUseCase
from src.domain.use_cases.scan_groups_usecase import ScanGroupsUseCase, scan_groups
from src.domain.use_cases.shift_rank_usecase import ShiftRankUseCase
from src.domain.use_cases.simulate_usecase import SimulateUseCase
from src.domain.use_cases.test_agent_usecase import TestAgentUseCase
from src.domain.use_cases.test_group_usecase import TestGroupUseCase
from src.ports.report_writer_port import ReportWriterPort
from src.ports.tensor_store_port import TensorStorePort
from tests.fixtures.tensor_builders import create_random_tensor, create_simulation_config

DATA = Path("data.tdkp")
OUT = Path("out.csv")


@pytest.fixture
def mock_store(mocker: MockerFixture) -> MagicMock:
    """Provide a mocked tensor store.

    Returns:
        Autospecced TensorStorePort
    """
    store: MagicMock = mocker.create_autospec(TensorStorePort, instance=True)
    return store


@pytest.fixture
def mock_writer(mocker: MockerFixture) -> MagicMock:
    """Provide a mocked report writer.

    Returns:
        Autospecced ReportWriterPort
    """
    writer: MagicMock = mocker.create_autospec(ReportWriterPort, instance=True)
    return writer


def _grouped_manifest(tensor: ResponseTensor, groups: list[int]) -> TensorManifest:
    return TensorManifest(
        agent_ids=[f"a{n}" for n in range(tensor.n_agents)],
        time_labels=[f"t{t}" for t in range(tensor.n_times)],
        group_labels=groups,
    )


class TestSimulateUseCase:
    """Test suite for SimulateUseCase."""

    @pytest.mark.unit
    def test_saves_tensor_manifest_and_truth(self, mock_store: MagicMock) -> None:
        """Test the dataset is persisted with labels as groups."""
        dataset = SimulateUseCase(mock_store).execute(create_simulation_config(), DATA)

        tensor, manifest, path = mock_store.save.call_args.args
        assert path == DATA
        assert tensor is dataset.tensor
        assert manifest.group_labels == list(dataset.labels)
        assert manifest.time_labels == ["t1", "t2"]
        assert manifest.generator == GENERATOR_NAME
        mock_store.save_truth.assert_called_once_with(dataset, DATA)

    @pytest.mark.unit
    def test_seed_override(self, mock_store: MagicMock) -> None:
        """Test an explicit seed replaces the configured one."""
        dataset = SimulateUseCase(mock_store).execute(create_simulation_config(seed=1), DATA, seed=9)

        assert dataset.config.seed == 9
        assert mock_store.save.call_args.args[1].seed == 9

    @pytest.mark.unit
    def test_single_agent_has_no_groups(self, mock_store: MagicMock) -> None:
        """Test a one-agent population is saved without group labels."""
        SimulateUseCase(mock_store).execute(create_simulation_config(n_agents=1), DATA)

        assert mock_store.save.call_args.args[1].group_labels is None


class TestEmbedUseCase:
    """Test suite for EmbedUseCase."""

    @pytest.mark.unit
    def test_embeds_and_writes(
        self, mock_store: MagicMock, mock_writer: MagicMock, small_tensor: ResponseTensor
    ) -> None:
        """Test the embedding is written through the report port."""
        mock_store.load.return_value = (small_tensor, TensorManifest.default_for(small_tensor))

        embedding = EmbedUseCase(mock_store, mock_writer).execute(DATA, 2, OUT)

        assert embedding.dim == 2
        mock_writer.write_embedding.assert_called_once_with(embedding, OUT)


class TestTestAgentUseCase:
    """Test suite for TestAgentUseCase."""

    @pytest.mark.unit
    def test_unknown_method(self, mock_store: MagicMock) -> None:
        """Test an unknown method fails before loading data."""
        with pytest.raises(UnknownMethodError):
            TestAgentUseCase(mock_store).execute(DATA, AgentTestSpec(agent=0), "bogus")

        mock_store.load.assert_not_called()

    @pytest.mark.unit
    def test_tdkps_report(self, mock_store: MagicMock, small_tensor: ResponseTensor) -> None:
        """Test the report carries the method, p-value and permutation count."""
        mock_store.load.return_value = (small_tensor, TensorManifest.default_for(small_tensor))
        spec = AgentTestSpec(agent=1, n_permutations=19, seed=2, dim_request=2)

        report = TestAgentUseCase(mock_store).execute(DATA, spec, "tdkps")

        assert report.method == "tdkps"
        assert report.n_permutations == 19
        assert 1.0 / 20.0 <= report.p_value <= 1.0
        assert report.runtime_ms >= 0.0

    @pytest.mark.unit
    def test_oracle_loads_truth(
        self, mock_store: MagicMock, signal_dataset: SimulatedDataset
    ) -> None:
        """Test the oracle reads ground truth from the store."""
        tensor = signal_dataset.tensor
        mock_store.load.return_value = (tensor, TensorManifest.default_for(tensor))
        mock_store.load_truth.return_value = signal_dataset

        report = TestAgentUseCase(mock_store).execute(DATA, AgentTestSpec(agent=0), "oracle")

        mock_store.load_truth.assert_called_once_with(DATA, tensor)
        assert report.method == "oracle"
        assert report.n_permutations == 0

    @pytest.mark.unit
    def test_oracle_without_truth(self, mock_store: MagicMock, small_tensor: ResponseTensor) -> None:
        """Test a missing ground truth propagates."""
        mock_store.load.return_value = (small_tensor, TensorManifest.default_for(small_tensor))
        mock_store.load_truth.side_effect = MissingGroundTruthError("no truth")

        with pytest.raises(MissingGroundTruthError):
            TestAgentUseCase(mock_store).execute(DATA, AgentTestSpec(agent=0), "oracle")


class TestTestGroupUseCase:
    """Test suite for TestGroupUseCase."""

    @pytest.mark.unit
    def test_members_come_from_manifest(
        self, mock_store: MagicMock, small_tensor: ResponseTensor, mocker: MockerFixture
    ) -> None:
        """Test the group is the set of agents carrying the label."""
        mock_store.load.return_value = (small_tensor, _grouped_manifest(small_tensor, [1, 0, 1, 1]))
        spy = mocker.spy(group_usecase_module, "pe_tdkps_group_test")

        report = TestGroupUseCase(mock_store).execute(
            DATA, group_label=1, time_a=0, time_b=1, method="pe_tdkps", n_permutations=9, seed=0
        )

        assert spy.call_args.args[1].group == (0, 2, 3)
        assert report.method == "pe_tdkps"

    @pytest.mark.unit
    def test_small_group(self, mock_store: MagicMock, small_tensor: ResponseTensor) -> None:
        """Test a label held by one agent raises DegenerateGroupError."""
        mock_store.load.return_value = (small_tensor, _grouped_manifest(small_tensor, [1, 0, 0, 0]))

        with pytest.raises(DegenerateGroupError):
            TestGroupUseCase(mock_store).execute(
                DATA, group_label=1, time_a=0, time_b=1, method="dcorr", n_permutations=9, seed=0
            )

    @pytest.mark.unit
    def test_dcorr_method_name(self, mock_store: MagicMock, small_tensor: ResponseTensor) -> None:
        """Test the raw-means baseline reports its own name."""
        mock_store.load.return_value = (small_tensor, _grouped_manifest(small_tensor, [0, 0, 0, 1]))

        report = TestGroupUseCase(mock_store).execute(
            DATA, group_label=0, time_a=0, time_b=1, method="dcorr", n_permutations=9, seed=0
        )

        assert report.method == "dcorr_group"

    @pytest.mark.unit
    def test_unknown_method(self, mock_store: MagicMock) -> None:
        """Test agent-only methods are refused."""
        with pytest.raises(UnknownMethodError):
            TestGroupUseCase(mock_store).execute(
                DATA, group_label=0, time_a=0, time_b=1, method="tdkps", n_permutations=9, seed=0
            )


class TestScanAndRankUseCases:
    """Test suite for ScanAgentsUseCase and ShiftRankUseCase."""

    @pytest.mark.unit
    def test_scan_rows_use_manifest_ids(
        self, mock_store: MagicMock, mock_writer: MagicMock
    ) -> None:
        """Test scan rows carry agent identifiers and are written once."""
        tensor = create_random_tensor(n_times=3, n_agents=2)
        mock_store.load.return_value = (tensor, _grouped_manifest(tensor, [0, 0]))

        rows = ScanAgentsUseCase(mock_store, mock_writer).execute(DATA, OUT, 9, 0, 2)

        assert [r.agent_id for r in rows] == ["a0", "a1", "a0", "a1"]
        mock_writer.write_scan.assert_called_once_with(rows, OUT)

    @pytest.mark.unit
    def test_rank_uses_time_labels(self, mock_store: MagicMock) -> None:
        """Test the report names timepoints by their manifest labels."""
        tensor = create_random_tensor(n_times=4, n_agents=3)
        values = np.array(tensor.values, copy=True)
        values[3] += 4.0
        tensor = ResponseTensor(values=values)
        mock_store.load.return_value = (tensor, _grouped_manifest(tensor, [0, 0, 0]))

        report = ShiftRankUseCase(mock_store).execute(DATA, reference_index=3, dim_request=2)

        assert report.reference == "t3"
        assert [(p.time_a, p.time_b) for p in report.pairs] == [("t0", "t1"), ("t1", "t2"), ("t2", "t3")]
        assert report.pairs[2].rank == 1
        assert report.dim == 2


class TestScanGroupsUseCase:
    """Test suite for ScanGroupsUseCase and scan_groups."""

    @pytest.mark.unit
    def test_default_groups_skip_singletons(self) -> None:
        """Test every agent comes first, then each label carried by two or more agents."""
        tensor = create_random_tensor(n_agents=5)
        manifest = _grouped_manifest(tensor, [1, 0, 1, 2, 0])

        groups = scan_groups(manifest, tensor.n_agents)

        assert groups == {"all": [0, 1, 2, 3, 4], "group-0": [1, 4], "group-1": [0, 2]}

    @pytest.mark.unit
    def test_requested_singleton_rejected(self) -> None:
        """Test asking for a one-agent label raises DegenerateGroupError."""
        tensor = create_random_tensor(n_agents=3)

        with pytest.raises(DegenerateGroupError):
            scan_groups(_grouped_manifest(tensor, [0, 0, 1]), tensor.n_agents, labels=[1])

    @pytest.mark.unit
    def test_rows_use_time_labels_and_are_written_once(
        self, mock_store: MagicMock, mock_writer: MagicMock
    ) -> None:
        """Test rows name timepoints by label and the agreement covers each group."""
        tensor = create_random_tensor(n_times=3, n_agents=4)
        mock_store.load.return_value = (tensor, _grouped_manifest(tensor, [0, 0, 1, 1]))

        report = ScanGroupsUseCase(mock_store, mock_writer).execute(
            DATA, OUT, 9, 0, 2, group_labels=[1]
        )

        assert [(r.group, r.time_a, r.time_b) for r in report.rows] == [
            ("all", "t0", "t1"),
            ("group-1", "t0", "t1"),
            ("all", "t1", "t2"),
            ("group-1", "t1", "t2"),
        ]
        assert [a.group for a in report.agreements] == ["all", "group-1"]
        mock_writer.write_group_scan.assert_called_once_with(report.rows, OUT)
