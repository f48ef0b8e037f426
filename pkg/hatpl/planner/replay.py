"""
Independent replay of a plan from the initial state.

Each step's precondition is rechecked in its predecessor state, the attached
predicate solution is re-queried at its stored index, and the cost is
recomputed. Used to validate every plan the search returns.
"""

from dataclasses import dataclass
from typing import Optional

from ..dsl.ast import DomainModel, PredicateCall
from ..errors import HatplError
from ..extern.registry import FunctionRegistry
from ..values import matches_type
from ..world.evaluate import Bindings, apply_effects, eval_args, eval_condition
from ..world.state import WorldState
from .plan import Plan


@dataclass(frozen=True)
class ReplayResult:
    """
    Truthy iff the replay succeeded. `failing_index` is the position of the
    first step that could not be applied.
    """

    ok: bool
    failing_index: Optional[int] = None
    reason: str = ""
    final_state: Optional[WorldState] = None

    def __bool__(self):
        return self.ok


def replay_validate(
    plan: Plan,
    s0: WorldState,
    domain: DomainModel,
    registry: FunctionRegistry,
    check_costs: bool = True,
    trust_predicates: bool = False,
) -> ReplayResult:
    """
    Replays a plan step by step.

    Args:
        plan (Plan): The plan to check.
        s0 (WorldState): The initial state.
        domain (DomainModel): Operators of the plan's actions.
        registry (FunctionRegistry): Cost functions and predicates.
        check_costs (bool): Compare recomputed step costs with the stored ones.
        trust_predicates (bool): Skip evaluable predicates; used when steps are
            reordered and the attachment history no longer matches.

    Returns:
        ReplayResult: Success with the final state, or the failing position
            and a reason.
    """
    state = s0
    history = []
    for position, step in enumerate(plan.steps):
        operator = domain.operator(step.action)

        def fail(reason: str) -> ReplayResult:
            return ReplayResult(False, position, f"{step}: {reason}")

        if operator is None:
            return fail("unknown action")
        if len(operator.params) != len(step.args):
            return fail("wrong number of arguments")
        if not all(matches_type(a, p.type_name, state.type_of) for p, a in zip(operator.params, step.args)):
            return fail("argument type mismatch")
        bindings = Bindings({p.name: a for p, a in zip(operator.params, step.args)})
        site = operator.attachment_site
        try:
            if trust_predicates:
                conditions = [c for c in operator.precondition if not isinstance(c, PredicateCall)]
            else:
                conditions = [c for c in operator.precondition if c is not site]
            if not eval_condition(conditions, state, bindings, registry, history):
                return fail("precondition does not hold")
            if site is not None and not trust_predicates:
                args = eval_args(site.call.args, state, bindings, registry)
                start = step.attachment.index if step.attachment else 0
                outcome = registry.eval_predicate(site.call.name, state, args, start, history)
                if not outcome or (step.attachment and outcome.index != step.attachment.index):
                    return fail(f"predicate {site.call.name} has no solution {start}")
            if check_costs and operator.cost is not None:
                cost_args = eval_args(operator.cost.args, state, bindings, registry)
                cost = registry.eval_cost(operator.cost.name, state, cost_args)
                if cost != step.cost:
                    return fail(f"cost {cost} differs from recorded {step.cost}")
            state = apply_effects(operator.effects, state, bindings, registry=registry)
        except HatplError as e:
            return fail(str(e))
        if step.attachment is not None:
            history.append(step.attachment)
    return ReplayResult(True, final_state=state)
