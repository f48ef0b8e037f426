"""
split.py

Splits a totally ordered plan into one stream per agent and adds the causal
links that keep the streams consistent when executed in parallel.

Each step belongs to the agent named by its first argument. Links are derived
from the slots every step reads and writes while the plan is replayed:

    support: the latest earlier writer of a slot a step reads
    threat:  a step reading a slot, to the next step overwriting it
    order:   consecutive writers of the same slot

Only links between different streams are kept, one per (producer, consumer)
pair, preferring support over threat over order.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from ..dsl.ast import AGENT, DomainModel, PredicateCall
from ..errors import PlanningError
from ..logger import setup_logger
from ..values import EntityRef
from ..world.classical import slot_literal
from ..world.evaluate import WHOLE_SET, Bindings, apply_effects, eval_condition
from ..world.state import WorldState
from ..planner.plan import Plan

logger = setup_logger(__name__)

_KIND_RANK = {"support": 0, "threat": 1, "order": 2}


@dataclass(frozen=True, order=True)
class CausalLink:
    producer: int
    consumer: int
    atom: str
    kind: str = "support"


@dataclass(frozen=True)
class JointGroup:
    """
    A joint step: executed by its owner together with the other agents
    among its arguments.
    """

    steps: Tuple[int, ...]
    agents: Tuple[str, ...]


@dataclass(frozen=True)
class StepAccess:
    reads: Tuple[Tuple, ...]
    writes: Tuple[Tuple, ...]
    before: WorldState
    after: WorldState


@dataclass
class StreamPlan:
    plan: Plan
    streams: Dict[str, Tuple[int, ...]]
    causal_links: Tuple[CausalLink, ...] = ()
    joint_groups: Tuple[JointGroup, ...] = ()
    owners: Dict[int, str] = field(default_factory=dict)

    def stream_of(self, index: int) -> str:
        return self.owners[index]

    def without_link(self, link: CausalLink) -> "StreamPlan":
        links = tuple(l for l in self.causal_links if l != link)
        return StreamPlan(self.plan, self.streams, links, self.joint_groups, self.owners)


def step_owner(step, state: WorldState) -> str:
    """
    The agent named by a step's first argument.

    Raises:
        PlanningError: If the first argument is not an Agent entity.
    """
    first = step.args[0] if step.args else None
    if not isinstance(first, EntityRef) or state.type_of(first.name) != AGENT:
        raise PlanningError(f"First argument of {step} is not an Agent")
    return first.name


def trace_access(plan: Plan, domain: DomainModel, s0: WorldState, registry=None) -> List[StepAccess]:
    """
    Replays a plan, recording the slots each step reads and writes.
    Evaluable predicates are not re-run; the plan is assumed valid.
    """
    state = s0
    accesses = []
    for step in plan.steps:
        operator = domain.operator(step.action)
        if operator is None:
            raise PlanningError(f"Unknown action {step.action}")
        bindings = Bindings({p.name: a for p, a in zip(operator.params, step.args)})
        reads: List[Tuple] = []
        writes: List[Tuple] = []
        conditions = [c for c in operator.precondition if not isinstance(c, PredicateCall)]
        if not eval_condition(conditions, state, bindings, registry, reads=reads):
            raise PlanningError(f"Precondition of {step} does not hold; split needs a valid plan")
        after = apply_effects(operator.effects, state, bindings, reads=reads, writes=writes, registry=registry)
        accesses.append(StepAccess(tuple(dict.fromkeys(reads)), tuple(dict.fromkeys(writes)), state, after))
        state = after
    return accesses


def _conflicts(read_key, write_key) -> bool:
    if read_key[:2] != write_key[:2]:
        return False
    return read_key[2] is WHOLE_SET or read_key[2] == write_key[2]


def split(plan: Plan, domain: DomainModel, s0: WorldState, registry=None) -> StreamPlan:
    """
    Splits a plan into agent streams with causal links and joint groups.

    Args:
        plan (Plan): A replay-valid plan.
        domain (DomainModel): Operators of the plan's actions.
        s0 (WorldState): The initial state.
        registry (FunctionRegistry, optional): For function calls inside
            conditions and effects.

    Returns:
        StreamPlan: Streams in order of first appearance, links sorted by
            (producer, consumer).
    """
    owners: Dict[int, str] = {}
    streams: Dict[str, List[int]] = {}
    joint_groups: List[JointGroup] = []
    for position, step in enumerate(plan.steps):
        owner = step_owner(step, s0)
        owners[position] = owner
        streams.setdefault(owner, []).append(position)
        operator = domain.operator(step.action)
        participants = []
        for param, arg in zip(operator.params[1:], step.args[1:]):
            if param.type_name != AGENT or not isinstance(arg, EntityRef):
                continue
            if arg.name != owner and arg.name not in participants:
                participants.append(arg.name)
        if participants:
            joint_groups.append(JointGroup((position,), (owner, *participants)))

    accesses = trace_access(plan, domain, s0, registry)
    writers: Dict[Tuple, List[int]] = {}
    for position, access in enumerate(accesses):
        for key in access.writes:
            writers.setdefault(key, []).append(position)

    candidates: Dict[Tuple[int, int], CausalLink] = {}

    def offer(producer: int, consumer: int, atom: str, kind: str):
        if owners[producer] == owners[consumer]:
            return
        current = candidates.get((producer, consumer))
        if current is None or _KIND_RANK[kind] < _KIND_RANK[current.kind]:
            candidates[(producer, consumer)] = CausalLink(producer, consumer, atom, kind)

    for position, access in enumerate(accesses):
        for read_key in access.reads:
            for write_key, steps in writers.items():
                if not _conflicts(read_key, write_key):
                    continue
                earlier = [s for s in steps if s < position]
                later = [s for s in steps if s > position]
                literal = slot_literal(access.before, read_key)
                if earlier:
                    offer(earlier[-1], position, literal, "support")
                if later:
                    offer(position, later[0], literal, "threat")
    for write_key, steps in writers.items():
        for producer, consumer in zip(steps, steps[1:]):
            offer(producer, consumer, slot_literal(accesses[producer].after, write_key), "order")

    links = tuple(sorted(candidates.values()))
    logger.debug(f"Split {len(plan)} steps into {len(streams)} streams with {len(links)} causal links")
    return StreamPlan(
        plan,
        {agent: tuple(indices) for agent, indices in streams.items()},
        links,
        tuple(joint_groups),
        owners,
    )
