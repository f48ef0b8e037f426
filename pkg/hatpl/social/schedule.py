"""
schedule.py

Earliest-start schedule of a StreamPlan and the idle time of every agent.

An agent is busy during the steps it owns and the joint steps it takes part
in. A step starts once the previous step of every involved agent and every
causal-link producer has ended.

Dependencies:
    - pandas: For the tabular view of a schedule.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional

import pandas as pd

from ..dsl.ast import DomainModel
from ..extern.registry import FunctionRegistry
from ..planner.plan import Plan
from ..utils import format_rational
from ..world.evaluate import Bindings, apply_effects, eval_args
from ..world.state import WorldState
from ..streams.split import StreamPlan


@dataclass(frozen=True)
class Schedule:
    start: Dict[int, Fraction]
    end: Dict[int, Fraction]
    waits: Dict[str, Fraction]
    timelines: Dict[str, List[int]]

    @property
    def makespan(self) -> Fraction:
        return max(self.end.values(), default=Fraction(0))

    def busy_time(self, agent: str) -> Fraction:
        return sum((self.end[i] - self.start[i] for i in self.timelines[agent]), Fraction(0))

    def to_df(self, plan: Optional[Plan] = None) -> pd.DataFrame:
        """
        One row per (agent, step) with start and end times.
        """
        rows = []
        for agent, indices in self.timelines.items():
            for i in indices:
                rows.append(
                    {
                        "agent": agent,
                        "step": i,
                        "action": str(plan.steps[i]) if plan is not None else "",
                        "start": format_rational(self.start[i]),
                        "end": format_rational(self.end[i]),
                    }
                )
        return pd.DataFrame.from_dict(rows) if rows else pd.DataFrame(columns=["agent", "step", "action", "start", "end"])


def agent_timelines(stream_plan: StreamPlan) -> Dict[str, List[int]]:
    """
    Steps each agent is involved in (owned or joint), in plan order.
    """
    timelines = {agent: list(indices) for agent, indices in stream_plan.streams.items()}
    for group in stream_plan.joint_groups:
        for agent in group.agents:
            line = timelines.setdefault(agent, [])
            for i in group.steps:
                if i not in line:
                    line.append(i)
    return {agent: sorted(line) for agent, line in timelines.items()}


def schedule(stream_plan: StreamPlan, durations: Dict[int, Fraction]) -> Schedule:
    """
    Computes earliest start times and per-agent waits.

    Args:
        stream_plan (StreamPlan): Streams, links and joint groups.
        durations (Dict[int, Fraction]): Duration of each step position.

    Returns:
        Schedule: Start/end per step; wait per agent is the sum of gaps
            between its consecutive steps.
    """
    timelines = agent_timelines(stream_plan)
    involved: Dict[int, List[str]] = {}
    for agent, line in timelines.items():
        for i in line:
            involved.setdefault(i, []).append(agent)
    producers: Dict[int, List[int]] = {}
    for link in stream_plan.causal_links:
        producers.setdefault(link.consumer, []).append(link.producer)

    start: Dict[int, Fraction] = {}
    end: Dict[int, Fraction] = {}
    agent_free: Dict[str, Fraction] = {agent: Fraction(0) for agent in timelines}
    for i in range(len(stream_plan.plan)):
        ready = [agent_free[a] for a in involved.get(i, [])]
        ready += [end[p] for p in producers.get(i, [])]
        start[i] = max(ready, default=Fraction(0))
        end[i] = start[i] + Fraction(durations.get(i, 0))
        for agent in involved.get(i, []):
            agent_free[agent] = end[i]

    waits = {}
    for agent, line in timelines.items():
        waits[agent] = sum((start[b] - end[a] for a, b in zip(line, line[1:])), Fraction(0))
    return Schedule(start, end, waits, timelines)


def step_durations(plan: Plan, domain: DomainModel, s0: WorldState, registry: FunctionRegistry) -> Dict[int, Fraction]:
    """
    Duration of every step: its operator's duration function evaluated in the
    step's predecessor state, or the step cost when there is none.
    """
    durations: Dict[int, Fraction] = {}
    state = s0
    for position, step in enumerate(plan.steps):
        operator = domain.operator(step.action)
        bindings = Bindings({p.name: a for p, a in zip(operator.params, step.args)})
        if operator.duration is not None:
            args = eval_args(operator.duration.args, state, bindings, registry)
            durations[position] = registry.eval_duration(operator.duration.name, state, args)
        else:
            durations[position] = step.cost
        state = apply_effects(operator.effects, state, bindings, registry=registry)
    return durations
