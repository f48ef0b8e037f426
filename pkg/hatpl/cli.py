"""
cli.py

Command-line front-end: parse, validate, plan, split into streams, filter and
export.

    hatpl plan --domain dwr.hatp --problem dwr.hatpp --optimize --out out/
    hatpl validate --domain dwr.hatp --problem dwr.hatpp
    hatpl export classical --domain dwr.hatp --problem dwr.hatpp
    hatpl export graph --domain dwr.hatp --problem dwr.hatpp

Exit codes: 0 success, 1 no solution, 2 input errors (unreadable files,
diagnostics, invalid filter configuration).

The output directory defaults to HATPL_OUT_DIR from the environment or a
.env file, else "hatpl_out".
"""

import argparse
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Literal, Optional, Sequence, Tuple

from dotenv import dotenv_values

from .dsl.parser import parse_domain, parse_goal, parse_problem
from .dsl.validate import validate
from .errors import HatplError, NoSolutionError, ParseError
from .extern.registry import FunctionRegistry
from .logger import setup_logger
from .planner.plan import Plan, SearchOptions
from .planner.search import Planner
from .return_schema import PlanRecord, StreamsRecord, plans_json
from .social.config import FilterConfig
from .social.filters import FilterReport, filter_plans
from .streams.check import check_linearizations
from .streams.graph import export_graph
from .streams.split import split
from .utils import format_rational
from .world.classical import atoms_json, format_atoms
from .world.state import init_state

logger = setup_logger(__name__)

EXIT_OK = 0
EXIT_NO_SOLUTION = 1
EXIT_INPUT_ERROR = 2


def default_out_dir() -> Path:
    env_vars = dotenv_values()
    return Path(os.environ.get("HATPL_OUT_DIR") or env_vars.get("HATPL_OUT_DIR") or "hatpl_out")


@dataclass
class RunConfig:
    command: Literal["plan", "validate", "export"]
    domain: Path
    problem: Path
    goal: Optional[str] = None
    mode: Literal["first", "optimal", "all"] = "first"
    limit: Optional[int] = None
    filters: Optional[Path] = None
    output_format: Literal["text", "json", "graph"] = "text"
    out: Path = field(default_factory=default_out_dir)
    seed: int = 0
    max_nodes: int = 1_000_000
    max_depth: int = 10_000
    export: Optional[Literal["classical", "graph"]] = None

    @property
    def search_options(self) -> SearchOptions:
        return SearchOptions(mode=self.mode, limit=self.limit, max_depth=self.max_depth, max_nodes=self.max_nodes)


class _Inputs:
    """
    Parsed and validated inputs of a run.
    """

    def __init__(self, config: RunConfig):
        domain_text = Path(config.domain).read_text(encoding="utf-8")
        problem_text = Path(config.problem).read_text(encoding="utf-8")
        self.domain = parse_domain(domain_text, source=str(config.domain))
        self.problem = parse_problem(problem_text, self.domain, source=str(config.problem))
        self.registry = FunctionRegistry.from_problem(self.problem).freeze()
        self.diagnostics = validate(
            self.domain, self.problem, self.registry, str(config.domain), str(config.problem)
        )
        self.s0 = init_state(self.problem, self.domain)
        self.goal = (
            parse_goal(config.goal, self.domain, self.problem, source="--goal") if config.goal else self.problem.goal
        )


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info(f"Wrote {path}")


def _error(message: str):
    print(message, file=sys.stderr)


def _search(config: RunConfig, inputs: _Inputs) -> Tuple[Plan, List[Plan], object, Optional[FilterReport]]:
    """
    Runs the search (and the filters, if configured); returns the chosen
    plan, all returned plans, the statistics and the filter report.
    """
    planner = Planner(inputs.domain, inputs.registry)
    if config.filters is None:
        result = planner.plan(inputs.s0, inputs.goal, config.search_options)
        return result.plans[0], result.plans, result.stats, None

    filter_config = FilterConfig.from_file(config.filters)
    options = SearchOptions(mode="all", limit=config.limit, max_depth=config.max_depth, max_nodes=config.max_nodes)
    result = planner.plan(inputs.s0, inputs.goal, options)
    accepted, report = filter_plans(result.plans, filter_config, inputs.domain, inputs.s0, inputs.registry)
    if not accepted:
        raise NoSolutionError("all plans rejected by filters", result.stats)
    if config.mode == "optimal":
        chosen = min(accepted, key=lambda p: p.total_cost)
    else:
        chosen = accepted[0]
    return chosen, accepted, result.stats, report


def cmd_plan(config: RunConfig) -> int:
    """
    Plans, splits the chosen plan into streams and writes the artifacts
    plan.json, streams.json, streams.graph (and filters.json, plans.json).
    """
    inputs = _Inputs(config)
    if inputs.diagnostics:
        for d in inputs.diagnostics:
            _error(str(d))
        return EXIT_INPUT_ERROR

    chosen, plans, stats, report = _search(config, inputs)
    stream_plan = split(chosen, inputs.domain, inputs.s0, inputs.registry)
    check = check_linearizations(stream_plan, inputs.s0, inputs.domain, inputs.registry, seed=config.seed)
    if not check:
        logger.warning(f"Stream constraints failed the linearization check: {check.reason}")

    plan_record = PlanRecord.from_plan(chosen, stats)
    graph = export_graph(stream_plan)
    out = Path(config.out)
    _write(out / "plan.json", plan_record.to_json())
    _write(out / "streams.json", StreamsRecord.from_stream_plan(stream_plan, config.seed, check).to_json())
    _write(out / "streams.graph", graph)
    if report is not None:
        _write(out / "filters.json", report.to_record().to_json())
    if config.mode == "all":
        _write(out / "plans.json", plans_json(plans))

    if config.output_format == "json":
        print(plan_record.to_json(), end="")
    elif config.output_format == "graph":
        print(graph, end="")
    else:
        print(chosen)
        print(f"streams: {', '.join(stream_plan.streams)}; causal links: {len(stream_plan.causal_links)}")
        if config.mode == "all":
            print(f"plans: {len(plans)}")
        if report is not None:
            print(report.to_df().to_string(index=False))
        print(
            f"stats: nodes={stats.nodes_expanded} backtracks={stats.backtracks} "
            f"linearizations={stats.linearizations_generated} externalCalls={stats.external_calls}"
        )
    logger.info(f"Plan with {len(chosen)} steps, total cost {format_rational(chosen.total_cost)}")
    return EXIT_OK


def cmd_validate(config: RunConfig) -> int:
    inputs = _Inputs(config)
    for d in inputs.diagnostics:
        _error(str(d))
    if inputs.diagnostics:
        return EXIT_INPUT_ERROR
    print("ok")
    return EXIT_OK


def cmd_export(config: RunConfig, what: str) -> int:
    """
    Writes classical.atoms / classical.json (initial state) or streams.graph
    (from a fresh planning run).
    """
    inputs = _Inputs(config)
    if inputs.diagnostics:
        for d in inputs.diagnostics:
            _error(str(d))
        return EXIT_INPUT_ERROR
    out = Path(config.out)
    if what == "classical":
        _write(out / "classical.atoms", format_atoms(inputs.s0))
        _write(out / "classical.json", atoms_json(inputs.s0))
        return EXIT_OK
    chosen, _, _, _ = _search(config, inputs)
    _write(out / "streams.graph", export_graph(split(chosen, inputs.domain, inputs.s0, inputs.registry)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hatpl", description="Hierarchical agent-aware task planner")
    commands = parser.add_subparsers(dest="command", required=True)

    def inputs(sub):
        sub.add_argument("--domain", required=True, type=Path, help="domain file (.hatp)")
        sub.add_argument("--problem", required=True, type=Path, help="problem file (.hatpp)")
        sub.add_argument("--goal", help='goal override, e.g. "Transport(C1,P21); Transport(C2,P22)"')
        sub.add_argument("--out", type=Path, default=None, help="output directory")

    def search(sub):
        modes = sub.add_mutually_exclusive_group()
        modes.add_argument("--first", dest="mode", action="store_const", const="first")
        modes.add_argument("--optimize", dest="mode", action="store_const", const="optimal")
        modes.add_argument("--all", nargs="?", const=0, type=int, metavar="N", help="all plans (at most N)")
        sub.add_argument("--filters", type=Path, help="JSON file with a 'filters' section")
        sub.add_argument("--seed", type=int, default=0)
        sub.add_argument("--max-nodes", type=int, default=1_000_000)
        sub.add_argument("--max-depth", type=int, default=10_000)

    plan = commands.add_parser("plan", help="search for a plan")
    inputs(plan)
    search(plan)
    plan.add_argument("--format", choices=["text", "json", "graph"], default="text", dest="output_format")

    check = commands.add_parser("validate", help="check a domain and problem")
    inputs(check)

    export = commands.add_parser("export", help="export the classical initial state or the stream graph")
    export.add_argument("what", choices=["classical", "graph"])
    inputs(export)
    search(export)
    return parser


def parse_run_config(argv: Optional[Sequence[str]] = None) -> RunConfig:
    args = build_parser().parse_args(argv)
    mode = getattr(args, "mode", None) or "first"
    limit = None
    if getattr(args, "all", None) is not None:
        mode = "all"
        limit = args.all or None
    config = RunConfig(
        command=args.command,
        domain=args.domain,
        problem=args.problem,
        goal=args.goal,
        mode=mode,
        limit=limit,
        filters=getattr(args, "filters", None),
        output_format=getattr(args, "output_format", "text"),
        seed=getattr(args, "seed", 0),
        max_nodes=getattr(args, "max_nodes", 1_000_000),
        max_depth=getattr(args, "max_depth", 10_000),
        export=getattr(args, "what", None),
    )
    if args.out is not None:
        config.out = args.out
    return config


def main(argv: Optional[Sequence[str]] = None) -> int:
    config = parse_run_config(argv)
    try:
        if config.command == "plan":
            return cmd_plan(config)
        if config.command == "validate":
            return cmd_validate(config)
        return cmd_export(config, config.export)
    except OSError as e:
        _error(f"error: {e}")
        return EXIT_INPUT_ERROR
    except ParseError as e:
        _error(str(e))
        return EXIT_INPUT_ERROR
    except NoSolutionError as e:
        _error(str(e))
        return EXIT_NO_SOLUTION
    except (HatplError, ValueError) as e:
        _error(f"error: {e}")
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
