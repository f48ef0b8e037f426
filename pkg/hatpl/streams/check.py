"""
Checks that the constraints of a StreamPlan (stream order plus causal links)
are enough for safe parallel execution: every linear extension must replay
from the initial state and reach the same final state as the original plan.

Extensions are enumerated exhaustively for small plans and sampled with a
seeded generator above that.
"""

from dataclasses import dataclass
from typing import Iterator, Optional, Tuple

import networkx as nx
import numpy as np

from ..dsl.ast import DomainModel
from ..extern.registry import FunctionRegistry
from ..logger import setup_logger
from ..planner.plan import Plan
from ..planner.replay import replay_validate
from ..world.state import WorldState
from .split import StreamPlan

logger = setup_logger(__name__)

EXHAUSTIVE_LIMIT = 8
SAMPLES = 1000


@dataclass(frozen=True)
class LinearizationCheck:
    ok: bool
    extensions_checked: int
    exhaustive: bool
    counterexample: Optional[Tuple[int, ...]] = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def constraint_graph(stream_plan: StreamPlan) -> nx.DiGraph:
    """
    DAG over step positions: successive steps of each stream plus causal links.
    """
    graph = nx.DiGraph()
    graph.add_nodes_from(range(len(stream_plan.plan)))
    for indices in stream_plan.streams.values():
        graph.add_edges_from(zip(indices, indices[1:]))
    graph.add_edges_from((l.producer, l.consumer) for l in stream_plan.causal_links)
    return graph


def sample_extensions(graph: nx.DiGraph, count: int, seed: int) -> Iterator[Tuple[int, ...]]:
    """
    Random topological orders: at each step one of the currently available
    nodes is drawn uniformly.
    """
    rng = np.random.default_rng(seed)
    for _ in range(count):
        indegree = dict(graph.in_degree())
        available = sorted(n for n, d in indegree.items() if d == 0)
        order = []
        while available:
            node = available.pop(int(rng.integers(len(available))))
            order.append(node)
            for succ in sorted(graph.successors(node)):
                indegree[succ] -= 1
                if indegree[succ] == 0:
                    available.append(succ)
        yield tuple(order)


def check_linearizations(
    stream_plan: StreamPlan,
    s0: WorldState,
    domain: DomainModel,
    registry: Optional[FunctionRegistry] = None,
    seed: int = 0,
    samples: int = SAMPLES,
) -> LinearizationCheck:
    """
    Replays linear extensions of a StreamPlan's constraints.

    Args:
        stream_plan (StreamPlan): Output of `split`.
        s0 (WorldState): The initial state.
        domain (DomainModel): Operators of the plan's actions.
        registry (FunctionRegistry, optional): For function calls in
            conditions; evaluable predicates are trusted.
        seed (int): Seed for sampled extensions.
        samples (int): Number of sampled extensions for plans longer than
            EXHAUSTIVE_LIMIT steps.

    Returns:
        LinearizationCheck: Truthy iff every checked extension replays and
            reaches the original final state.
    """
    registry = registry or FunctionRegistry()
    plan = stream_plan.plan
    graph = constraint_graph(stream_plan)
    if not nx.is_directed_acyclic_graph(graph):
        return LinearizationCheck(False, 0, True, reason="constraints are cyclic")

    reference = replay_validate(plan, s0, domain, registry, check_costs=False, trust_predicates=True)
    if not reference:
        return LinearizationCheck(False, 0, True, reason=f"plan does not replay: {reference.reason}")

    exhaustive = len(plan) <= EXHAUSTIVE_LIMIT
    extensions = nx.all_topological_sorts(graph) if exhaustive else sample_extensions(graph, samples, seed)
    checked = 0
    for order in extensions:
        order = tuple(order)
        checked += 1
        reordered = Plan(tuple(plan.steps[i] for i in order))
        result = replay_validate(reordered, s0, domain, registry, check_costs=False, trust_predicates=True)
        if not result:
            return LinearizationCheck(False, checked, exhaustive, order, result.reason)
        if result.final_state != reference.final_state:
            return LinearizationCheck(False, checked, exhaustive, order, "different final state")
    logger.debug(f"Checked {checked} linear extensions ({'exhaustive' if exhaustive else 'sampled'})")
    return LinearizationCheck(True, checked, exhaustive)
