"""Command-line adapter.

This module exposes the use cases as argparse subcommands. Command results
go to stdout; logs and runtimes go to stderr.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, TextIO, TypeVar

from pydantic import BaseModel, ValidationError

from src.config.settings import Settings
from src.domain.entities.simulation import SimulationConfig
from src.domain.entities.test_spec import AgentTestSpec, parse_dim_request
from src.domain.exceptions import ConfigError, InvalidArgumentError
from src.domain.use_cases.embed_usecase import EmbedUseCase
from src.domain.use_cases.power_sweep_usecase import PowerSweepUseCase
from src.domain.use_cases.scan_agents_usecase import ScanAgentsUseCase
from src.domain.use_cases.scan_groups_usecase import ScanGroupsUseCase
from src.domain.use_cases.shift_rank_usecase import ShiftRankUseCase
from src.domain.use_cases.simulate_usecase import SimulateUseCase
from src.domain.use_cases.test_agent_usecase import TestAgentUseCase
from src.domain.use_cases.test_group_usecase import TestGroupUseCase
from src.schemas.inputs import PRESET_NAMES, ExperimentConfig, build_preset
from src.schemas.outputs import TestReport

logger = logging.getLogger(__name__)

ModelT = TypeVar("ModelT", bound=BaseModel)


def load_json_config(path: Path, model: type[ModelT]) -> ModelT:
    """Validate a JSON configuration file against ``model``.

    Raises:
        ConfigError: If the file cannot be read or does not validate
    """
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    try:
        return model.model_validate_json(text)
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first["loc"]) or "<root>"
        raise ConfigError(f"invalid config {path}: {location}: {first['msg']}") from e


def _optional(value: Optional[float]) -> str:
    return "nan" if value is None else format(value, ".17g")


def _validated(model: type[ModelT], **fields: object) -> ModelT:
    try:
        return model.model_validate(fields)
    except ValidationError as e:
        raise InvalidArgumentError(str(e.errors()[0]["msg"])) from e


class CliAdapter:
    """argparse front end over the use cases."""

    def __init__(
        self,
        settings: Settings,
        simulate_uc: SimulateUseCase,
        embed_uc: EmbedUseCase,
        test_agent_uc: TestAgentUseCase,
        test_group_uc: TestGroupUseCase,
        power_uc: PowerSweepUseCase,
        scan_uc: ScanAgentsUseCase,
        shift_rank_uc: ShiftRankUseCase,
        scan_group_uc: ScanGroupsUseCase,
        stdout: Optional[TextIO] = None,
        stderr: Optional[TextIO] = None,
    ):
        self.settings = settings
        self.simulate_uc = simulate_uc
        self.embed_uc = embed_uc
        self.test_agent_uc = test_agent_uc
        self.test_group_uc = test_group_uc
        self.power_uc = power_uc
        self.scan_uc = scan_uc
        self.shift_rank_uc = shift_rank_uc
        self.scan_group_uc = scan_group_uc
        self.stdout = stdout if stdout is not None else sys.stdout
        self.stderr = stderr if stderr is not None else sys.stderr

    def build_parser(self) -> argparse.ArgumentParser:
        """Parser with one subcommand per use case; defaults come from settings."""
        s = self.settings
        default_dim = parse_dim_request(s.dim_request)
        parser = argparse.ArgumentParser(
            prog="tdkps", description="Perspective-shift detection for multi-agent systems"
        )
        sub = parser.add_subparsers(dest="command", required=True)

        simulate = sub.add_parser("simulate", help="Draw a simulated two-timepoint tensor")
        simulate.add_argument("--config", type=Path, required=True)
        simulate.add_argument("--out", type=Path, required=True)
        simulate.add_argument("--seed", type=int, default=None)

        embed = sub.add_parser("embed", help="Embed every (time, agent) slot")
        embed.add_argument("--data", type=Path, required=True)
        embed.add_argument("--dim", type=parse_dim_request, default=default_dim)
        embed.add_argument("--out", type=Path, required=True)

        agent = sub.add_parser("test-agent", help="Test one agent for a change")
        agent.add_argument("--data", type=Path, required=True)
        agent.add_argument("--agent", type=int, required=True)
        agent.add_argument("--t", dest="time_a", type=int, default=0)
        agent.add_argument("--t-prime", dest="time_b", type=int, default=1)
        agent.add_argument("--method", default="tdkps")
        agent.add_argument("--permutations", type=int, default=s.default_permutations)
        agent.add_argument("--seed", type=int, default=0)
        agent.add_argument("--dim", type=parse_dim_request, default=default_dim)
        agent.add_argument("--threads", type=int, default=s.threads)

        group = sub.add_parser("test-group", help="Test one labelled group for a change")
        group.add_argument("--data", type=Path, required=True)
        group.add_argument("--group-label", type=int, required=True)
        group.add_argument("--t", dest="time_a", type=int, default=0)
        group.add_argument("--t-prime", dest="time_b", type=int, default=1)
        group.add_argument("--method", default="pe_tdkps")
        group.add_argument("--permutations", type=int, default=s.default_permutations)
        group.add_argument("--seed", type=int, default=0)
        group.add_argument("--dim", type=parse_dim_request, default=default_dim)
        group.add_argument("--threads", type=int, default=s.threads)

        power = sub.add_parser("power", help="Run a Monte-Carlo power sweep")
        source = power.add_mutually_exclusive_group(required=True)
        source.add_argument("--config", type=Path)
        source.add_argument("--preset", choices=PRESET_NAMES)
        power.add_argument("--out", type=Path, required=True)
        power.add_argument("--threads", type=int, default=None)
        power.add_argument("--ambient-dim", type=int, default=50)
        power.add_argument("--seed", type=int, default=None)
        power.add_argument("--trials", type=int, default=None)
        power.add_argument("--permutations", type=int, default=None)

        scan = sub.add_parser("scan", help="Test every agent at consecutive timepoints")
        scan.add_argument("--data", type=Path, required=True)
        scan.add_argument("--out", type=Path, required=True)
        scan.add_argument("--permutations", type=int, default=s.default_permutations)
        scan.add_argument("--seed", type=int, default=0)
        scan.add_argument("--dim", type=parse_dim_request, default=default_dim)
        scan.add_argument("--threads", type=int, default=s.threads)

        scan_group = sub.add_parser(
            "scan-group", help="Test every group at consecutive timepoints against its agents"
        )
        scan_group.add_argument("--data", type=Path, required=True)
        scan_group.add_argument("--out", type=Path, required=True)
        scan_group.add_argument(
            "--group-label", dest="group_labels", type=int, action="append", default=None
        )
        scan_group.add_argument("--permutations", type=int, default=s.default_permutations)
        scan_group.add_argument("--seed", type=int, default=0)
        scan_group.add_argument("--dim", type=parse_dim_request, default=default_dim)
        scan_group.add_argument("--threads", type=int, default=s.threads)

        rank = sub.add_parser("shift-rank", help="Rank shifts against a reference timepoint")
        rank.add_argument("--data", type=Path, required=True)
        rank.add_argument("--reference", type=int, required=True)
        rank.add_argument("--dim", type=parse_dim_request, default=default_dim)

        return parser

    def run(self, argv: Optional[list[str]] = None) -> int:
        """Parse arguments and dispatch; domain errors propagate to the caller."""
        args = self.build_parser().parse_args(argv)
        handler = {
            "simulate": self._simulate,
            "embed": self._embed,
            "test-agent": self._test_agent,
            "test-group": self._test_group,
            "power": self._power,
            "scan": self._scan,
            "scan-group": self._scan_group,
            "shift-rank": self._shift_rank,
        }[args.command]
        handler(args)
        return 0

    def _emit(self, *lines: str) -> None:
        for line in lines:
            self.stdout.write(line + "\n")

    def _emit_report(self, report: TestReport) -> None:
        rejected = str(report.p_value <= self.settings.alpha).lower()
        self._emit(*report.result_lines(), f"rejected={rejected}")
        self.stderr.write(f"runtime_ms={report.runtime_ms:.3f}\n")

    def _simulate(self, args: argparse.Namespace) -> None:
        config = load_json_config(args.config, SimulationConfig)
        dataset = self.simulate_uc.execute(config, args.out, seed=args.seed)
        tensor = dataset.tensor
        self._emit(
            f"wrote={args.out}",
            "counts=" + ",".join(str(c) for c in tensor.counts),
            f"signal_agents={len(dataset.agents_in_class(0))}",
            f"null_agents={len(dataset.agents_in_class(1))}",
        )

    def _embed(self, args: argparse.Namespace) -> None:
        embedding = self.embed_uc.execute(args.data, args.dim, args.out)
        self._emit(
            f"dim={embedding.dim}",
            f"dim_clamped={str(embedding.dim_clamped).lower()}",
            f"negative_mass_fraction={embedding.negative_mass_fraction:.17g}",
            f"wrote={args.out}",
        )

    def _test_agent(self, args: argparse.Namespace) -> None:
        spec = _validated(
            AgentTestSpec,
            agent=args.agent,
            time_a=args.time_a,
            time_b=args.time_b,
            n_permutations=args.permutations,
            seed=args.seed,
            dim_request=args.dim,
        )
        report = self.test_agent_uc.execute(args.data, spec, args.method, threads=args.threads)
        self._emit_report(report)

    def _test_group(self, args: argparse.Namespace) -> None:
        if args.permutations < 1:
            raise InvalidArgumentError("--permutations must be >= 1")
        report = self.test_group_uc.execute(
            args.data,
            group_label=args.group_label,
            time_a=args.time_a,
            time_b=args.time_b,
            method=args.method,
            n_permutations=args.permutations,
            seed=args.seed,
            dim_request=args.dim,
            threads=args.threads,
        )
        self._emit_report(report)

    def _power(self, args: argparse.Namespace) -> None:
        if args.config is not None:
            config = load_json_config(args.config, ExperimentConfig)
        else:
            config = build_preset(
                args.preset, dim=args.ambient_dim, seed=args.seed if args.seed is not None else 0
            )
        overrides = {
            "threads": args.threads,
            "seed": args.seed,
            "trials": args.trials,
            "n_permutations": args.permutations,
        }
        updates = {k: v for k, v in overrides.items() if v is not None}
        if updates:
            config = _validated(ExperimentConfig, **{**config.model_dump(), **updates})
        rows = self.power_uc.execute(config, args.out)
        self._emit(f"rows={len(rows)}", f"wrote={args.out}")

    def _scan(self, args: argparse.Namespace) -> None:
        rows = self.scan_uc.execute(
            args.data, args.out, args.permutations, args.seed, args.dim, args.threads
        )
        self._emit(f"tests={len(rows)}", f"wrote={args.out}")

    def _scan_group(self, args: argparse.Namespace) -> None:
        if args.permutations < 1:
            raise InvalidArgumentError("--permutations must be >= 1")
        report = self.scan_group_uc.execute(
            args.data,
            args.out,
            args.permutations,
            args.seed,
            args.dim,
            args.threads,
            group_labels=args.group_labels,
        )
        lines = [
            f"tests={len(report.rows)}",
            f"wrote={args.out}",
            "group,pairs,kendall_tau,p_value",
        ]
        lines += [
            f"{a.group},{a.pairs},{_optional(a.kendall_tau)},{_optional(a.p_value)}"
            for a in report.agreements
        ]
        self._emit(*lines)

    def _shift_rank(self, args: argparse.Namespace) -> None:
        report = self.shift_rank_uc.execute(args.data, args.reference, args.dim)
        lines = [
            f"reference={report.reference}",
            f"kendall_tau={report.kendall_tau:.17g}",
            f"p_value={report.p_value:.17g}",
            "time_a,time_b,mean_shift,rank,temporal_distance",
        ]
        lines += [
            f"{p.time_a},{p.time_b},{p.mean_shift:.17g},{p.rank},{p.temporal_distance}"
            for p in report.pairs
        ]
        self._emit(*lines)
