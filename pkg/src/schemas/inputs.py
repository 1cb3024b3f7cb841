"""Input schemas for experiment runs.

This module defines Pydantic models for validating experiment
configuration files. All inputs are validated before being passed to use
cases; unknown keys are rejected.
"""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.domain.entities.simulation import SimulationConfig
from src.domain.entities.test_spec import DimRequest
from src.domain.exceptions import ConfigError

SweepParameter = Literal["effect_size", "n_agents", "n_queries", "n_replicates"]
MethodName = Literal[
    "tdkps", "oracle", "dcorr", "pe_tdkps", "dcorr_group", "dcorr_tdkps", "oracle_group"
]

AGENT_METHODS: tuple[str, ...] = ("tdkps", "oracle", "dcorr")
GROUP_METHODS: tuple[str, ...] = ("pe_tdkps", "oracle_group", "dcorr_group", "dcorr_tdkps")

_INTEGER_PARAMETERS = ("n_agents", "n_queries", "n_replicates")


class ExperimentConfig(BaseModel):
    """Monte-Carlo power sweep over one generator parameter.

    Example:
        {
            "base": {"n_agents": 20, "dim": 50, "n_queries": 10, "n_replicates": 25},
            "sweep_parameter": "effect_size",
            "sweep_values": [0.0, 0.5, 1.0],
            "methods": ["tdkps", "oracle", "dcorr"],
            "trials": 50,
            "alpha": 0.05,
            "n_permutations": 200,
            "seed": 7,
            "threads": 4
        }
    """

    base: SimulationConfig = Field(
        default_factory=SimulationConfig, description="Generator parameters held fixed"
    )
    sweep_parameter: SweepParameter = Field(description="Generator parameter to vary")
    sweep_values: list[float] = Field(description="Values of the swept parameter", min_length=1)
    methods: list[MethodName] = Field(description="Tests to run per trial", min_length=1)
    trials: int = Field(default=50, description="Trials per sweep value", ge=1)
    alpha: float = Field(default=0.05, description="Significance level", gt=0.0, lt=1.0)
    n_permutations: int = Field(default=1000, description="Permutation count B", ge=1)
    seed: int = Field(default=0, description="Master seed", ge=0)
    threads: int = Field(default=1, description="Worker count for trials", ge=1)
    agents_per_trial: int = Field(
        default=1, description="Agents tested per class per trial (agent-level methods)", ge=1
    )
    dim_request: DimRequest = Field(default="auto", description="Embedding dimension or 'auto'")
    record_runtime: bool = Field(
        default=False,
        description="Write measured runtimes to the CSV (breaks byte-identical reruns)",
    )

    model_config = ConfigDict(frozen=True, extra="forbid")

    @field_validator("methods")
    @classmethod
    def _unique_methods(cls, value: list[str]) -> list[str]:
        if len(set(value)) != len(value):
            raise ValueError("methods must not repeat")
        return value

    @model_validator(mode="after")
    def _check_sweep(self) -> "ExperimentConfig":
        if self.sweep_parameter in _INTEGER_PARAMETERS:
            for value in self.sweep_values:
                if value != int(value) or value < 1:
                    raise ValueError(
                        f"{self.sweep_parameter} values must be positive integers, got {value}"
                    )
        else:
            for value in self.sweep_values:
                if not 0.0 <= value <= 1.0:
                    raise ValueError(f"effect_size values must lie in [0, 1], got {value}")
        if isinstance(self.dim_request, int) and self.dim_request < 1:
            raise ValueError("dim_request must be >= 1 or 'auto'")
        return self

    def config_for(self, value: float) -> SimulationConfig:
        """Generator configuration at one sweep value."""
        swept: float | int = (
            int(value) if self.sweep_parameter in _INTEGER_PARAMETERS else float(value)
        )
        data = self.base.model_dump()
        data[self.sweep_parameter] = swept
        return SimulationConfig.model_validate(data)


_AGENT_BASE = {
    "signal_dims": 5,
    "scale": 1.0,
    "decay": 0.5,
    "class_prob": 0.5,
    "agent_var": 0.5,
    "noise_var": 0.5,
}
_GROUP_BASE = {
    "signal_dims": 5,
    "scale": 0.75,
    "decay": 0.5,
    "class_prob": 0.5,
    "agent_var": 1.0,
    "noise_var": 1.0,
}

# name -> (level, fixed overrides, swept parameter, grid)
_PRESETS: dict[str, tuple[str, dict[str, float], str, list[float]]] = {
    "agent-effect-size": (
        "agent",
        {"n_agents": 99, "n_queries": 10, "n_replicates": 25},
        "effect_size",
        [0.0, 0.143, 0.286, 0.429, 0.571, 0.714, 0.857, 1.0],
    ),
    "agent-agents": (
        "agent",
        {"n_queries": 10, "n_replicates": 25, "effect_size": 0.2},
        "n_agents",
        [2, 5, 10, 20, 50, 100],
    ),
    "agent-queries": (
        "agent",
        {"n_agents": 50, "n_replicates": 25, "effect_size": 0.2},
        "n_queries",
        [5, 10, 25, 50, 100],
    ),
    "agent-replicates": (
        "agent",
        {"n_agents": 50, "n_queries": 10, "effect_size": 0.2},
        "n_replicates",
        [5, 10, 25, 50, 100],
    ),
    "group-effect-size": (
        "group",
        {"n_agents": 80, "n_queries": 25, "n_replicates": 10},
        "effect_size",
        [round(0.1 * k, 1) for k in range(11)],
    ),
    "group-queries": (
        "group",
        {"n_agents": 80, "n_replicates": 10, "effect_size": 0.2},
        "n_queries",
        [2, 4, 8, 16, 32],
    ),
    "group-replicates": (
        "group",
        {"n_agents": 80, "n_queries": 25, "effect_size": 0.2},
        "n_replicates",
        [1, 2, 4, 8, 16, 32],
    ),
    # Agents per group doubled into the population size.
    "group-agents": (
        "group",
        {"n_queries": 25, "n_replicates": 10, "effect_size": 0.2},
        "n_agents",
        [2 * k for k in (10, 20, 30, 40, 50, 60, 70, 80)],
    ),
}

PRESET_NAMES: tuple[str, ...] = tuple(_PRESETS)


def build_preset(name: str, dim: int = 50, seed: int = 0) -> ExperimentConfig:
    """Experiment configuration reproducing one of the standard sweeps.

    Args:
        name: One of PRESET_NAMES
        dim: Ambient dimension p (200 for the full-scale setting)
        seed: Master seed

    Raises:
        ConfigError: If the preset name is unknown
    """
    if name not in _PRESETS:
        raise ConfigError(f"unknown preset '{name}'; valid presets: {', '.join(PRESET_NAMES)}")
    level, fixed, parameter, grid = _PRESETS[name]
    shared = _AGENT_BASE if level == "agent" else _GROUP_BASE
    base = SimulationConfig.model_validate({**shared, **fixed, "dim": dim, "seed": seed})
    return ExperimentConfig(
        base=base,
        sweep_parameter=parameter,  # type: ignore[arg-type]
        sweep_values=[float(v) for v in grid],
        methods=list(AGENT_METHODS if level == "agent" else GROUP_METHODS),  # type: ignore[arg-type]
        trials=50 if level == "agent" else 200,
        n_permutations=1000,
        seed=seed,
    )
