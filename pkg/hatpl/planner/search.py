"""
search.py

Total-order HTN decomposition with depth-first backtracking and
branch-and-bound.

The leftmost task of the network is always refined next. A primitive task is
applied if its precondition holds; an abstract task is replaced by the
subtasks of one (method, case, linearization, binding) option at a time.
Children of a node are produced lazily by a generator, so the next option
(including the next solution of an evaluable predicate) is only computed when
the search backtracks into it.

Usage:
    planner = Planner(domain, registry)
    result = planner.plan(s0, goal, SearchOptions(mode="optimal"))
"""

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence, Tuple

from ..dsl.ast import Call, DomainModel, MethodDecl, OperatorDecl
from ..errors import NoSolutionError, PlanningError, UndefinedTaskError
from ..extern.base import Attachment
from ..extern.registry import FunctionRegistry
from ..logger import setup_logger
from ..values import Value, format_value, matches_type
from ..world.evaluate import (
    Bindings,
    NullAccess,
    apply_effects,
    enumerate_bindings,
    eval_args,
    eval_condition,
)
from ..world.state import WorldState
from .linearize import linearizations, order_subtasks
from .plan import Plan, PlanResult, PlanStep, SearchOptions, SearchStatistics
from .replay import replay_validate

logger = setup_logger(__name__)


@dataclass(frozen=True)
class TaskInvocation:
    name: str
    args: Tuple[Value, ...]

    def __str__(self):
        return f"{self.name}({','.join(format_value(a) for a in self.args)})"


@dataclass(frozen=True)
class SearchNode:
    """
    A partial plan: the state it reaches, the remaining task network, and the
    steps and cost so far.
    """

    state: WorldState
    tasks: Tuple[TaskInvocation, ...]
    steps: Tuple[PlanStep, ...] = ()
    cost: Fraction = Fraction(0)
    depth: int = 0

    @property
    def history(self) -> Tuple[Attachment, ...]:
        return tuple(s.attachment for s in self.steps if s.attachment is not None)


class BoundDecision(str, Enum):
    CONTINUE = "continue"
    PRUNE = "prune"


def bound_check(partial_cost: Fraction, next_cost: Fraction, best_cost, mode: str) -> BoundDecision:
    """
    Prune iff, in optimal mode, adding the next action cannot beat the best
    plan found so far (ties are pruned). `best_cost` is None or infinity while
    no plan is known.
    """
    if mode != "optimal" or best_cost is None:
        return BoundDecision.CONTINUE
    if partial_cost + next_cost >= best_cost:
        return BoundDecision.PRUNE
    return BoundDecision.CONTINUE


def ground_goal(goal: Sequence[Call]) -> Tuple[TaskInvocation, ...]:
    """
    Turns goal calls with literal arguments into task invocations.
    """
    tasks = []
    for call in goal:
        args = []
        for arg in call.args:
            if not hasattr(arg, "value"):
                raise PlanningError(f"Goal task {call.name} has a non-ground argument")
            args.append(arg.value)
        tasks.append(TaskInvocation(call.name, tuple(args)))
    return tuple(tasks)


class _Run:
    """
    Mutable bookkeeping of one search: mode, statistics and incumbent cost.
    """

    def __init__(self, options: SearchOptions):
        self.options = options
        self.stats = SearchStatistics()
        self.best_cost: Optional[Fraction] = None


class Planner:
    """
    HTN planner over a parsed domain and a frozen function registry.
    Holds no per-search state, so one planner can run several searches.
    """

    def __init__(self, domain: DomainModel, registry: Optional[FunctionRegistry] = None):
        self.domain = domain
        self.registry = registry or FunctionRegistry()

    def _bind(self, params, args: Tuple[Value, ...], state: WorldState) -> Optional[Bindings]:
        if len(params) != len(args):
            return None
        for param, arg in zip(params, args):
            if not matches_type(arg, param.type_name, state.type_of):
                return None
        return Bindings({p.name: a for p, a in zip(params, args)})

    def _count_calls(self, run: _Run, calls: Counter):
        for name, n in calls.items():
            run.stats.count_call(name, n)

    ## PRIMITIVE TASKS
    def _apply_operator(self, node: SearchNode, operator: OperatorDecl, task: TaskInvocation, run: _Run):
        bindings = self._bind(operator.params, task.args, node.state)
        if bindings is None:
            return
        site = operator.attachment_site
        calls: Counter = Counter()
        conditions = [c for c in operator.precondition if c is not site]
        holds = eval_condition(conditions, node.state, bindings, self.registry, node.history, calls=calls)
        self._count_calls(run, calls)
        if not holds:
            return

        cost = Fraction(0)
        if operator.cost is not None:
            cost_args = eval_args(operator.cost.args, node.state, bindings, self.registry)
            cost = self.registry.eval_cost(operator.cost.name, node.state, cost_args)
        if bound_check(node.cost, cost, run.best_cost, run.options.mode) is BoundDecision.PRUNE:
            run.stats.prunes += 1
            logger.debug(f"Pruned {task} at partial cost {node.cost + cost}")
            return

        after = apply_effects(operator.effects, node.state, bindings, registry=self.registry)
        step = PlanStep(len(node.steps), operator.name, task.args, cost)
        if site is None:
            yield self._advance(node, step, after)
            return

        site_args = eval_args(site.call.args, node.state, bindings, self.registry)
        step = self.retry_protocol(step, node, site.call.name, site_args, run, start_index=0)
        while step is not None:
            yield self._advance(node, step, after)
            step = self.retry_protocol(step, node, site.call.name, site_args, run)

    def retry_protocol(
        self,
        failed_step: PlanStep,
        node: SearchNode,
        predicate: str,
        args: Tuple[Value, ...],
        run: _Run,
        start_index: Optional[int] = None,
    ) -> Optional[PlanStep]:
        """
        Next instance of a step whose downstream search failed: the same
        ground action with the next solution of its evaluable predicate.

        Args:
            failed_step (PlanStep): The step to retry.
            node (SearchNode): The node the step was applied in.
            predicate (str): The attachment site's predicate.
            args (tuple): Ground arguments of the predicate.
            run: Bookkeeping of the current search (call counters).
            start_index (int, optional): Index to query; defaults to the
                failed step's attachment index + 1.

        Returns:
            Optional[PlanStep]: The new instance, or None once the predicate
                has no more solutions (ordinary backtracking resumes).
        """
        if start_index is None:
            start_index = failed_step.attachment.index + 1
        outcome = self.registry.eval_predicate(predicate, node.state, args, start_index, node.history)
        run.stats.count_call(predicate)
        if not outcome:
            logger.debug(f"{predicate}{args}: no solution from index {start_index}")
            return None
        if start_index > 0:
            logger.debug(f"Retrying {failed_step} with {predicate} solution {outcome.index}")
        attachment = Attachment(predicate, outcome.index, outcome.payload)
        return PlanStep(failed_step.index, failed_step.action, failed_step.args, failed_step.cost, attachment)

    def _advance(self, node: SearchNode, step: PlanStep, after: WorldState) -> SearchNode:
        return SearchNode(after, node.tasks[1:], node.steps + (step,), node.cost + step.cost, node.depth + 1)

    ## ABSTRACT TASKS
    def _selector_bindings(self, selectors, state: WorldState, bindings: Bindings) -> Iterator[Bindings]:
        if not selectors:
            yield bindings
            return
        head, rest = selectors[0], selectors[1:]
        for value in enumerate_bindings(head, state, bindings, self.registry):
            yield from self._selector_bindings(rest, state, bindings.bind(head.variable, value))

    def _decompose(self, node: SearchNode, method: MethodDecl, task: TaskInvocation, run: _Run):
        bindings = self._bind(method.params, task.args, node.state)
        if bindings is None:
            return
        history = node.history
        if method.empty_condition is not None:
            calls: Counter = Counter()
            holds = eval_condition(method.empty_condition, node.state, bindings, self.registry, history, calls=calls)
            self._count_calls(run, calls)
            if holds:
                yield SearchNode(node.state, node.tasks[1:], node.steps, node.cost, node.depth + 1)
        for case in method.cases:
            calls = Counter()
            holds = eval_condition(case.precondition, node.state, bindings, self.registry, history, calls=calls)
            self._count_calls(run, calls)
            if not holds:
                continue
            for order in linearizations(case.body):
                run.stats.linearizations_generated += 1
                subtasks = order_subtasks(case.body, order)
                for scope in self._selector_bindings(case.body.selectors, node.state, bindings):
                    try:
                        ground = tuple(
                            TaskInvocation(s.task.name, eval_args(s.task.args, node.state, scope, self.registry))
                            for s in subtasks
                        )
                    except NullAccess:
                        continue
                    yield SearchNode(node.state, ground + node.tasks[1:], node.steps, node.cost, node.depth + 1)

    def _children(self, node: SearchNode, run: _Run) -> Iterator[SearchNode]:
        task = node.tasks[0]
        operator = self.domain.operator(task.name)
        if operator is not None:
            yield from self._apply_operator(node, operator, task, run)
            return
        methods = self.domain.methods_for(task.name)
        if not methods:
            raise UndefinedTaskError(task.name)
        for method in methods:
            yield from self._decompose(node, method, task, run)

    def decompose_step(self, node: SearchNode) -> List[SearchNode]:
        """
        All children of a node in search order (no pruning).
        """
        if not node.tasks:
            return []
        return list(self._children(node, _Run(SearchOptions())))

    ## SEARCH
    def plan(self, s0: WorldState, goal: Sequence, options: Optional[SearchOptions] = None) -> PlanResult:
        """
        Searches for plans that accomplish a goal task network.

        Args:
            s0 (WorldState): The initial state.
            goal (Sequence): Goal tasks, as parsed calls or TaskInvocations.
            options (SearchOptions, optional): Mode and limits.

        Returns:
            PlanResult: One plan for "first" and "optimal", up to `limit`
                distinct plans for "all", plus search statistics.

        Raises:
            UndefinedTaskError: If a goal task is neither an action nor a method.
            NoSolutionError: If no plan was found; `reason` tells exhaustion
                from a node or depth limit.
        """
        options = options or SearchOptions()
        tasks = tuple(t if isinstance(t, TaskInvocation) else ground_goal([t])[0] for t in goal)
        for task in tasks:
            if not self.domain.is_task(task.name):
                raise UndefinedTaskError(task.name)

        run = _Run(options)
        stats = run.stats
        found: List[Plan] = []
        seen = set()
        limit_hit: Optional[str] = None
        stack: List[Iterator[SearchNode]] = [iter([SearchNode(s0, tasks)])]

        while stack:
            try:
                node = next(stack[-1])
            except StopIteration:
                stack.pop()
                stats.backtracks += 1
                continue
            if options.mode == "optimal" and run.best_cost is not None and node.cost >= run.best_cost:
                stats.prunes += 1
                continue
            if not node.tasks:
                plan = Plan(node.steps)
                if plan.signature in seen:
                    continue
                seen.add(plan.signature)
                stats.solutions_found += 1
                self._check(plan, s0)
                if options.mode == "optimal":
                    logger.debug(f"New best plan: cost {plan.total_cost}, {len(plan)} steps")
                    found = [plan]
                    run.best_cost = plan.total_cost
                    continue
                found.append(plan)
                if options.mode == "first" or (options.limit is not None and len(found) >= options.limit):
                    break
                continue
            if node.depth >= options.max_depth:
                limit_hit = limit_hit or "depth limit"
                continue
            if stats.nodes_expanded >= options.max_nodes:
                limit_hit = "node limit"
                break
            stats.nodes_expanded += 1
            logger.debug(f"Expanding {node.tasks[0]} at depth {node.depth}, cost {node.cost}")
            stack.append(self._children(node, run))

        logger.info(
            f"Search finished: mode={options.mode}, plans={len(found)}, "
            f"nodes={stats.nodes_expanded}, backtracks={stats.backtracks}"
        )
        if not found:
            raise NoSolutionError(limit_hit or "exhausted", stats)
        if limit_hit:
            logger.warning(f"Search stopped early ({limit_hit}); returned plans may not be complete")
        return PlanResult(found, stats, options.mode)

    def _check(self, plan: Plan, s0: WorldState):
        result = replay_validate(plan, s0, self.domain, self.registry)
        if not result:
            raise PlanningError(f"Plan failed replay validation at step {result.failing_index}: {result.reason}")


def plan(
    domain: DomainModel,
    s0: WorldState,
    goal: Sequence,
    options: Optional[SearchOptions] = None,
    registry: Optional[FunctionRegistry] = None,
) -> PlanResult:
    """
    Convenience wrapper around Planner(domain, registry).plan(...).
    """
    return Planner(domain, registry).plan(s0, goal, options)
