from fractions import Fraction

from hatpl.dsl import parse_domain, parse_problem
from hatpl.extern import FunctionKind, FunctionRegistry
from hatpl.planner import Plan, PlanStep
from hatpl.social import schedule, step_durations
from hatpl.streams import CausalLink, JointGroup, StreamPlan
from hatpl.values import EntityRef
from hatpl.world import init_state
from tests.micro import HANDOVER_PROBLEM, MICRO_DOMAIN


def synthetic(joint=False):
    steps = tuple(PlanStep(i, "Work", (EntityRef("A" if i % 2 == 0 else "B"),), Fraction(1)) for i in range(4))
    groups = (JointGroup((2,), ("A", "B")),) if joint else ()
    return StreamPlan(
        Plan(steps),
        {"A": (0, 2), "B": (1, 3)},
        (CausalLink(1, 2, "done(B)"),),
        groups,
        {0: "A", 1: "B", 2: "A", 3: "B"},
    )


DURATIONS = {0: Fraction(2), 1: Fraction(3), 2: Fraction(1), 3: Fraction(1)}


def test_link_delays_consumer():
    timing = schedule(synthetic(), DURATIONS)
    assert timing.start == {0: 0, 1: 0, 2: 3, 3: 3}
    assert timing.end == {0: 2, 1: 3, 2: 4, 3: 4}
    assert timing.waits == {"A": 1, "B": 0}
    assert timing.makespan == 4
    assert timing.busy_time("A") == 3


def test_joint_step_occupies_participants():
    timing = schedule(synthetic(joint=True), DURATIONS)
    assert timing.timelines == {"A": [0, 2], "B": [1, 2, 3]}
    assert timing.start[3] == 4
    assert timing.waits == {"A": 1, "B": 0}
    assert timing.makespan == 5


def test_schedule_table():
    df = schedule(synthetic(joint=True), DURATIONS).to_df()
    assert list(df.columns) == ["agent", "step", "action", "start", "end"]
    assert len(df) == 5
    assert schedule(StreamPlan(Plan(), {}), {}).to_df().empty


def test_durations_default_to_costs(handover, handover_plan):
    durations = step_durations(handover_plan, handover.domain, handover.s0, handover.registry)
    assert durations == {i: step.cost for i, step in enumerate(handover_plan.steps)}


def test_duration_functions(handover_plan, handover_streams):
    domain = parse_domain(MICRO_DOMAIN.replace("cost{hop(From, To)};", "cost{hop(From, To)};\n    duration{slow(From, To)};"))
    problem = parse_problem(HANDOVER_PROBLEM, domain)
    registry = FunctionRegistry.from_problem(problem)
    registry.register("slow", FunctionKind.DURATION, lambda state, args: 4)
    durations = step_durations(handover_plan, domain, init_state(problem, domain), registry.freeze())
    assert durations == {0: 1, 1: 4, 2: 1, 3: 4, 4: 1}

    timing = schedule(handover_streams, durations)
    assert timing.start == {0: 0, 1: 0, 2: 4, 3: 5, 4: 9}
    assert timing.waits == {"A1": 3, "A2": 0}
