"""
filters.py

Post-hoc filtering of candidate plans by four social criteria:

    wait        idle time of an agent between its consecutive steps
    effort      imbalance of (weighted) step costs between agents
    intricacy   number of causal links between streams
    sequence    a forbidden contiguous run of steps

Dependencies:
    - tqdm: For progress over large plan sets.
    - pandas: For the human-readable report table.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd
from tqdm import tqdm

from ..dsl.ast import DomainModel
from ..errors import FilterConfigError
from ..extern.registry import FunctionRegistry
from ..logger import setup_logger
from ..planner.plan import Plan
from ..return_schema import FilterReportRecord, VerdictRecord, ViolationRecord
from ..streams.split import StreamPlan, split
from ..utils import format_rational
from ..world.state import WorldState
from .config import FilterConfig, ForbiddenSequence
from .schedule import schedule, step_durations

logger = setup_logger(__name__)


@dataclass(frozen=True)
class Violation:
    criterion: str
    value: object
    limit: object
    detail: str = ""


@dataclass
class PlanVerdict:
    plan_index: int
    total_cost: Fraction
    waits: Dict[str, Fraction]
    efforts: Dict[str, Fraction]
    imbalance: object
    intricacy: int
    violations: List[Violation] = field(default_factory=list)

    @property
    def accepted(self) -> bool:
        return not self.violations

    def violated(self) -> List[str]:
        return [v.criterion for v in self.violations]


@dataclass
class FilterReport:
    verdicts: List[PlanVerdict]

    @property
    def accepted_indices(self) -> List[int]:
        return [v.plan_index for v in self.verdicts if v.accepted]

    def to_df(self) -> pd.DataFrame:
        rows = [
            {
                "plan": v.plan_index,
                "accepted": v.accepted,
                "cost": format_rational(v.total_cost),
                "max_wait": format_rational(max(v.waits.values(), default=Fraction(0))),
                "imbalance": _show(v.imbalance),
                "intricacy": v.intricacy,
                "violations": ", ".join(v.violated()),
            }
            for v in self.verdicts
        ]
        return pd.DataFrame.from_dict(rows)

    def to_record(self) -> FilterReportRecord:
        return FilterReportRecord(
            accepted=self.accepted_indices,
            verdicts=[
                VerdictRecord(
                    plan_index=v.plan_index,
                    accepted=v.accepted,
                    total_cost=format_rational(v.total_cost),
                    waits={a: format_rational(w) for a, w in v.waits.items()},
                    efforts={a: format_rational(e) for a, e in v.efforts.items()},
                    imbalance=_show(v.imbalance),
                    intricacy=v.intricacy,
                    violations=[
                        ViolationRecord(criterion=x.criterion, value=_show(x.value), limit=_show(x.limit), detail=x.detail)
                        for x in v.violations
                    ],
                )
                for v in self.verdicts
            ],
        )


def _show(value) -> str:
    if isinstance(value, Fraction):
        return format_rational(value)
    if value == float("inf"):
        return "inf"
    return str(value)


def agent_efforts(stream_plan: StreamPlan, config: FilterConfig) -> Dict[str, Fraction]:
    """
    Weighted sum of the costs of the steps each agent owns.
    """
    steps = stream_plan.plan.steps
    return {
        agent: config.weight(agent) * sum((steps[i].cost for i in indices), Fraction(0))
        for agent, indices in stream_plan.streams.items()
    }


def effort_imbalance(efforts: Dict[str, Fraction], mode: str):
    """
    max - min of the efforts, or max / min in ratio mode (infinity when only
    the smallest effort is zero).
    """
    if not efforts:
        return Fraction(0) if mode == "difference" else Fraction(1)
    high, low = max(efforts.values()), min(efforts.values())
    if mode == "difference":
        return high - low
    if low == 0:
        return Fraction(1) if high == 0 else float("inf")
    return high / low


def find_sequence(steps: Sequence, sequence: ForbiddenSequence) -> Optional[int]:
    """
    Position of the first contiguous match of a pattern in a step list.
    """
    width = len(sequence.pattern)
    for start in range(len(steps) - width + 1):
        if all(m.matches(s) for m, s in zip(sequence.pattern, steps[start : start + width])):
            return start
    return None


def evaluate_plan(
    index: int,
    plan: Plan,
    config: FilterConfig,
    domain: DomainModel,
    s0: WorldState,
    registry: FunctionRegistry,
) -> PlanVerdict:
    """
    Measures one plan against every configured criterion.
    """
    stream_plan = split(plan, domain, s0, registry)
    timing = schedule(stream_plan, step_durations(plan, domain, s0, registry))
    efforts = agent_efforts(stream_plan, config)
    imbalance = effort_imbalance(efforts, config.imbalance_mode)
    intricacy = len(stream_plan.causal_links)
    verdict = PlanVerdict(index, plan.total_cost, timing.waits, efforts, imbalance, intricacy)

    if config.max_wait_per_agent is not None:
        for agent, wait in timing.waits.items():
            if wait > config.max_wait_per_agent:
                verdict.violations.append(Violation("wait", wait, config.max_wait_per_agent, f"agent {agent}"))
    if config.max_effort_imbalance is not None and imbalance > config.max_effort_imbalance:
        verdict.violations.append(
            Violation("effort", imbalance, config.max_effort_imbalance, config.imbalance_mode)
        )
    if config.max_intricacy is not None and intricacy > config.max_intricacy:
        verdict.violations.append(Violation("intricacy", intricacy, config.max_intricacy))
    for sequence in config.forbidden_sequences:
        if sequence.scope == "global":
            position = find_sequence(plan.steps, sequence)
            if position is not None:
                verdict.violations.append(Violation("sequence", position, str(sequence), "at plan step"))
            continue
        for agent, indices in stream_plan.streams.items():
            position = find_sequence([plan.steps[i] for i in indices], sequence)
            if position is not None:
                verdict.violations.append(
                    Violation("sequence", indices[position], str(sequence), f"in stream {agent}")
                )
    return verdict


def filter_plans(
    plans: Sequence[Plan],
    config: FilterConfig,
    domain: DomainModel,
    s0: WorldState,
    registry: Optional[FunctionRegistry] = None,
) -> Tuple[List[Plan], FilterReport]:
    """
    Keeps the plans that violate no configured criterion.

    Args:
        plans (Sequence[Plan]): Replay-valid candidate plans.
        config (FilterConfig): Thresholds; at least one must be set.
        domain (DomainModel): Operators of the plans' actions.
        s0 (WorldState): The initial state.
        registry (FunctionRegistry, optional): Duration functions.

    Returns:
        Tuple[List[Plan], FilterReport]: Accepted plans in input order and
            the measurements of every plan.

    Raises:
        FilterConfigError: If no criterion is configured.
    """
    if not config.has_criteria:
        raise FilterConfigError("No filter criterion configured")
    registry = registry or FunctionRegistry()
    verdicts = [
        evaluate_plan(i, plan, config, domain, s0, registry)
        for i, plan in enumerate(tqdm(plans, desc="Filtering plans", leave=False, disable=None))
    ]
    accepted = [plans[v.plan_index] for v in verdicts if v.accepted]
    logger.info(f"Filtered plans: {len(accepted)}/{len(plans)} accepted")
    return accepted, FilterReport(verdicts)
