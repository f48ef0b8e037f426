"""
hatpl: hierarchical agent-aware task planning.

Modules:
    dsl:      parser, printer and validator for domain/problem files
    world:    world states, condition evaluation and effect application
    extern:   registry for cost, duration, ordering and evaluable functions
    planner:  branch-and-bound decomposition search and plan replay
    streams:  per-agent streams, causal links and graph export
    social:   social filters over returned plans
"""

from .dsl import parse_domain, parse_goal, parse_problem, validate
from .extern import FunctionRegistry
from .planner import Planner, SearchOptions, plan
from .social import FilterConfig, filter_plans
from .streams import check_linearizations, export_graph, split
from .world import init_state

__all__ = [
    "FilterConfig",
    "FunctionRegistry",
    "Planner",
    "SearchOptions",
    "check_linearizations",
    "export_graph",
    "filter_plans",
    "init_state",
    "parse_domain",
    "parse_goal",
    "parse_problem",
    "plan",
    "split",
    "validate",
]
