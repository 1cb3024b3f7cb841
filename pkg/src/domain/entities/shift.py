"""Shift scan entities for domain layer."""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from src.domain.entities.test_result import TestResult


class AgentShift(BaseModel):
    """Agent-level test of one agent between two consecutive timepoints."""

    agent: int = Field(description="Agent index n", ge=0)
    time_a: int = Field(description="Earlier timepoint", ge=0)
    time_b: int = Field(description="Later timepoint", ge=0)
    result: TestResult = Field(description="Outcome of the agent-level test")

    model_config = ConfigDict(frozen=True)


class PairShift(BaseModel):
    """Mean embedding displacement between timepoints t and t + 1."""

    time_a: int = Field(description="Earlier timepoint", ge=0)
    time_b: int = Field(description="Later timepoint", ge=0)
    mean_shift: float = Field(description="Mean over agents of ||psi^(t) - psi^(t+1)||", ge=0.0)
    rank: int = Field(description="1 for the largest mean shift", ge=1)
    temporal_distance: int = Field(
        description="|time_b - reference index|", ge=0
    )

    model_config = ConfigDict(frozen=True)


class ShiftRanking(BaseModel):
    """Rank correlation between shift size and distance from a reference timepoint."""

    reference_index: int = Field(description="Reference timepoint", ge=0)
    pairs: tuple[PairShift, ...] = Field(description="One entry per consecutive pair")
    kendall_tau: float = Field(description="Kendall tau-b of rank vs temporal distance")
    p_value: float = Field(description="Two-sided p-value of tau", ge=0.0, le=1.0)

    model_config = ConfigDict(frozen=True)


class GroupShift(BaseModel):
    """Group-level test between consecutive timepoints next to its agents' tests.

    Normalized statistics are the observed value in standard deviations of
    its own permutation null, which puts group and agent tests on one scale.
    """

    group: str = Field(description="Group name")
    size: int = Field(description="Number of agents in the group", ge=2)
    time_a: int = Field(description="Earlier timepoint", ge=0)
    time_b: int = Field(description="Later timepoint", ge=0)
    result: TestResult = Field(description="Outcome of the paired energy test")
    normalized_statistic: float = Field(description="Standardized group statistic")
    agent_normalized_statistic: float = Field(
        description="Mean standardized agent-level statistic over the group"
    )
    agent_combined_p_value: float = Field(
        description="Fisher combination of the group's agent-level p-values", gt=0.0, le=1.0
    )

    model_config = ConfigDict(frozen=True)


class GroupAgreement(BaseModel):
    """Kendall tau between group p-values and combined agent p-values over pairs.

    Undefined (None) when the group has fewer than two pairs or either
    p-value sequence is constant.
    """

    group: str = Field(description="Group name")
    pairs: int = Field(description="Consecutive pairs compared", ge=1)
    kendall_tau: Optional[float] = Field(
        default=None, description="Kendall tau-b", ge=-1.0, le=1.0
    )
    p_value: Optional[float] = Field(
        default=None, description="Two-sided p-value", ge=0.0, le=1.0
    )

    model_config = ConfigDict(frozen=True)


class GroupScan(BaseModel):
    """Every group at every consecutive pair, with per-group agreement."""

    shifts: tuple[GroupShift, ...] = Field(description="Ordered by timepoint, then group")
    agreements: tuple[GroupAgreement, ...] = Field(description="One entry per group")

    model_config = ConfigDict(frozen=True)
