"""Output schemas for command results.

This module defines Pydantic models for everything a command reports:
power-sweep rows, single test reports, agent and group scan rows and shift
rankings.
"""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

POWER_CSV_HEADER = (
    "method,parameter,value,class_label,trials,rejections,"
    "rejection_rate,ci_low,ci_high,mean_runtime_ms"
)
SCAN_CSV_HEADER = "agent_index,agent_id,time_a,time_b,statistic,p_value,n_permutations"
GROUP_SCAN_CSV_HEADER = (
    "group,group_size,time_a,time_b,statistic,normalized_statistic,p_value,"
    "agent_normalized_statistic,agent_combined_p_value,n_permutations"
)


class PowerRow(BaseModel):
    """Aggregated rejections of one method at one sweep value and class.

    Example:
        {
            "method": "tdkps", "parameter": "effect_size", "value": 1.0,
            "class_label": 0, "trials": 50, "rejections": 46,
            "rejection_rate": 0.92, "ci_low": 0.81, "ci_high": 0.97,
            "mean_runtime_ms": 0.0
        }
    """

    method: str = Field(description="Test name")
    parameter: str = Field(description="Swept generator parameter")
    value: float = Field(description="Sweep value")
    class_label: int = Field(description="0 for the signal class, 1 for the null class", ge=0)
    trials: int = Field(description="Trials run", ge=1)
    rejections: int = Field(description="Trials rejected at level alpha", ge=0)
    rejection_rate: float = Field(description="rejections / trials", ge=0.0, le=1.0)
    ci_low: float = Field(description="Lower 95% Wilson bound", ge=0.0, le=1.0)
    ci_high: float = Field(description="Upper 95% Wilson bound", ge=0.0, le=1.0)
    mean_runtime_ms: float = Field(description="Mean test runtime in milliseconds", ge=0.0)

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_counts(self) -> "PowerRow":
        if self.rejections > self.trials:
            raise ValueError("rejections cannot exceed trials")
        if self.rejection_rate != self.rejections / self.trials:
            raise ValueError("rejection_rate must equal rejections / trials")
        if self.ci_low > self.ci_high:
            raise ValueError("ci_low cannot exceed ci_high")
        return self

    def sort_key(self) -> tuple[str, float, int]:
        return (self.method, self.value, self.class_label)


class TestReport(BaseModel):
    """Result of a single agent- or group-level test as printed by the CLI."""

    __test__ = False  # not a pytest class

    method: str = Field(description="Test name")
    statistic: float = Field(description="Observed statistic")
    p_value: float = Field(description="p-value", gt=0.0, le=1.0)
    n_permutations: int = Field(description="Permutation count (0 if analytic)", ge=0)
    runtime_ms: float = Field(description="Wall-clock runtime in milliseconds", ge=0.0)

    model_config = ConfigDict(frozen=True)

    def result_lines(self) -> list[str]:
        """Deterministic output lines; the runtime is reported separately."""
        return [
            f"method={self.method}",
            f"statistic={self.statistic:.17g}",
            f"p_value={self.p_value:.17g}",
            f"permutations={self.n_permutations}",
        ]


class AgentScanRow(BaseModel):
    """One agent-level test of a shift scan."""

    agent_index: int = Field(description="Agent index", ge=0)
    agent_id: str = Field(description="Agent identifier from the manifest")
    time_a: int = Field(description="Earlier timepoint", ge=0)
    time_b: int = Field(description="Later timepoint", ge=0)
    statistic: float = Field(description="Observed embedding displacement", ge=0.0)
    p_value: float = Field(description="Permutation p-value", gt=0.0, le=1.0)
    n_permutations: int = Field(description="Permutation count", ge=1)

    model_config = ConfigDict(frozen=True)


class ShiftRankEntry(BaseModel):
    """One consecutive timepoint pair of a shift ranking."""

    time_a: str = Field(description="Label of the earlier timepoint")
    time_b: str = Field(description="Label of the later timepoint")
    mean_shift: float = Field(description="Mean embedding displacement over agents", ge=0.0)
    rank: int = Field(description="1 for the largest mean shift", ge=1)
    temporal_distance: int = Field(description="Distance from the reference timepoint", ge=0)

    model_config = ConfigDict(frozen=True)


class ShiftRankReport(BaseModel):
    """Kendall tau between shift rank and distance from a reference timepoint.

    Example:
        {
            "reference": "t3", "kendall_tau": 0.51, "p_value": 0.014,
            "pairs": [...]
        }
    """

    reference: str = Field(description="Label of the reference timepoint")
    kendall_tau: float = Field(description="Kendall tau-b", ge=-1.0, le=1.0)
    p_value: float = Field(description="Two-sided p-value", ge=0.0, le=1.0)
    pairs: list[ShiftRankEntry] = Field(description="Per-pair table")
    dim: Optional[int] = Field(default=None, description="Embedding dimension used")

    model_config = ConfigDict(frozen=True)


class GroupScanRow(BaseModel):
    """One group at one consecutive timepoint pair of a group scan."""

    group: str = Field(description="Group name")
    group_size: int = Field(description="Agents in the group", ge=2)
    time_a: str = Field(description="Label of the earlier timepoint")
    time_b: str = Field(description="Label of the later timepoint")
    statistic: float = Field(description="Observed paired energy statistic")
    normalized_statistic: float = Field(description="Statistic in null standard deviations")
    p_value: float = Field(description="Group permutation p-value", gt=0.0, le=1.0)
    agent_normalized_statistic: float = Field(
        description="Mean normalized agent-level statistic over the group"
    )
    agent_combined_p_value: float = Field(
        description="Fisher-combined agent-level p-value", gt=0.0, le=1.0
    )
    n_permutations: int = Field(description="Permutation count", ge=1)

    model_config = ConfigDict(frozen=True)


class GroupAgreementEntry(BaseModel):
    """Agreement between group-level and combined agent-level p-values of one group."""

    group: str = Field(description="Group name")
    pairs: int = Field(description="Consecutive pairs compared", ge=1)
    kendall_tau: Optional[float] = Field(default=None, description="Kendall tau-b")
    p_value: Optional[float] = Field(default=None, description="Two-sided p-value")

    model_config = ConfigDict(frozen=True)


class GroupScanReport(BaseModel):
    """Rows written by a group scan and the per-group agreement summary."""

    rows: list[GroupScanRow] = Field(description="Ordered by timepoint, then group")
    agreements: list[GroupAgreementEntry] = Field(description="One entry per group")

    model_config = ConfigDict(frozen=True)
