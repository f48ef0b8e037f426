"""
Base Models for the JSON artifacts written by the command line:

    plan.json     {"steps": [{index, action, args, cost, attachment?}], "totalCost", "stats"}
    streams.json  {"streams": {agent: [index]}, "causalLinks", "jointGroups", "seed", "check"}
    filters.json  {"accepted": [planIndex], "verdicts": [...]}
    plans.json    [plan, ...] (all mode)

Field names are camelCase on the wire. Rationals are written as "5" or "3/2";
attachment payloads are base64.
"""

import base64
from typing import Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, TypeAdapter
from pydantic.alias_generators import to_camel

from .utils import format_rational
from .values import plain_value


class _Record(BaseModel):
    model_config = ConfigDict(alias_generator=to_camel, populate_by_name=True)

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True, exclude_none=True, indent=2) + "\n"


class AttachmentRecord(_Record):
    predicate: str
    index: int
    payload: str

    @classmethod
    def from_attachment(cls, attachment) -> "AttachmentRecord":
        return cls(
            predicate=attachment.predicate,
            index=attachment.index,
            payload=base64.b64encode(attachment.payload).decode("ascii"),
        )

    def decoded_payload(self) -> bytes:
        return base64.b64decode(self.payload)


class StepRecord(_Record):
    index: int
    action: str
    args: List[Union[bool, int, str, None]]
    cost: str
    attachment: Optional[AttachmentRecord] = None


class StatsRecord(_Record):
    nodes_expanded: int = 0
    backtracks: int = 0
    linearizations_generated: int = 0
    external_calls: int = 0
    prunes: int = 0
    solutions_found: int = 0
    external_calls_by_site: Dict[str, int] = {}

    @classmethod
    def from_stats(cls, stats) -> "StatsRecord":
        return cls(
            nodes_expanded=stats.nodes_expanded,
            backtracks=stats.backtracks,
            linearizations_generated=stats.linearizations_generated,
            external_calls=stats.external_calls,
            prunes=stats.prunes,
            solutions_found=stats.solutions_found,
            external_calls_by_site=dict(sorted(stats.external_calls_by_site.items())),
        )


class PlanRecord(_Record):
    steps: List[StepRecord] = []
    total_cost: str = "0"
    stats: Optional[StatsRecord] = None

    @classmethod
    def from_plan(cls, plan, stats=None) -> "PlanRecord":
        steps = [
            StepRecord(
                index=s.index,
                action=s.action,
                args=[plain_value(a) for a in s.args],
                cost=format_rational(s.cost),
                attachment=AttachmentRecord.from_attachment(s.attachment) if s.attachment else None,
            )
            for s in plan.steps
        ]
        return cls(
            steps=steps,
            total_cost=format_rational(plan.total_cost),
            stats=StatsRecord.from_stats(stats) if stats is not None else None,
        )


PLAN_LIST = TypeAdapter(List[PlanRecord])


def plans_json(plans) -> str:
    """
    plans.json: every returned plan, in search order.
    """
    records = [PlanRecord.from_plan(p) for p in plans]
    return PLAN_LIST.dump_json(records, by_alias=True, exclude_none=True, indent=2).decode() + "\n"


class LinkRecord(_Record):
    producer: int
    consumer: int
    atom: str
    kind: str


class JointGroupRecord(_Record):
    steps: List[int]
    agents: List[str]


class CheckRecord(_Record):
    ok: bool
    extensions_checked: int
    exhaustive: bool


class StreamsRecord(_Record):
    streams: Dict[str, List[int]] = {}
    causal_links: List[LinkRecord] = []
    joint_groups: List[JointGroupRecord] = []
    seed: Optional[int] = None
    check: Optional[CheckRecord] = None

    @classmethod
    def from_stream_plan(cls, stream_plan, seed: Optional[int] = None, check=None) -> "StreamsRecord":
        return cls(
            streams={agent: list(indices) for agent, indices in stream_plan.streams.items()},
            causal_links=[
                LinkRecord(producer=l.producer, consumer=l.consumer, atom=l.atom, kind=l.kind)
                for l in stream_plan.causal_links
            ],
            joint_groups=[JointGroupRecord(steps=list(g.steps), agents=list(g.agents)) for g in stream_plan.joint_groups],
            seed=seed,
            check=(
                CheckRecord(ok=check.ok, extensions_checked=check.extensions_checked, exhaustive=check.exhaustive)
                if check is not None
                else None
            ),
        )


class ViolationRecord(_Record):
    criterion: str
    value: str
    limit: str
    detail: str = ""


class VerdictRecord(_Record):
    plan_index: int
    accepted: bool
    total_cost: str
    waits: Dict[str, str]
    efforts: Dict[str, str]
    imbalance: str
    intricacy: int
    violations: List[ViolationRecord] = []


class FilterReportRecord(_Record):
    accepted: List[int] = []
    verdicts: List[VerdictRecord] = []
