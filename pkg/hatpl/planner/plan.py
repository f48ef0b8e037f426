"""
Plans, search options and search statistics.
"""

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Literal, Optional, Tuple

from ..extern.base import Attachment
from ..utils import format_rational
from ..values import Value, format_value

INFINITY = float("inf")


@dataclass(frozen=True)
class PlanStep:
    index: int
    action: str
    args: Tuple[Value, ...]
    cost: Fraction
    attachment: Optional[Attachment] = None

    @property
    def signature(self) -> Tuple[str, Tuple[Value, ...]]:
        return self.action, self.args

    def __str__(self):
        return f"{self.action}({','.join(format_value(a) for a in self.args)})"


@dataclass(frozen=True)
class Plan:
    steps: Tuple[PlanStep, ...] = ()

    @property
    def total_cost(self) -> Fraction:
        return sum((s.cost for s in self.steps), Fraction(0))

    @property
    def signature(self) -> Tuple:
        """
        Identity of a plan for deduplication: actions, arguments and attachments.
        """
        return tuple((s.action, s.args, s.attachment) for s in self.steps)

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def __str__(self):
        lines = [f"{s.index}: {s} [cost {format_rational(s.cost)}]" for s in self.steps]
        lines.append(f"total cost {format_rational(self.total_cost)}")
        return "\n".join(lines)


@dataclass
class SearchOptions:
    """
    Args:
        mode: "first" stops at the first plan, "optimal" runs branch and bound,
            "all" enumerates distinct plans.
        limit: Maximum number of plans in "all" mode (None for no limit).
        max_depth: Maximum number of decomposition steps on one branch.
        max_nodes: Maximum number of expanded search nodes.
    """

    mode: Literal["first", "optimal", "all"] = "first"
    limit: Optional[int] = None
    max_depth: int = 10_000
    max_nodes: int = 1_000_000

    def __post_init__(self):
        if self.mode not in ("first", "optimal", "all"):
            raise ValueError(f"Unknown search mode: {self.mode}")
        for name in ("limit", "max_depth", "max_nodes"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ValueError(f"{name} must be positive, got {value}")


@dataclass
class SearchStatistics:
    nodes_expanded: int = 0
    backtracks: int = 0
    linearizations_generated: int = 0
    external_calls: int = 0
    prunes: int = 0
    solutions_found: int = 0
    external_calls_by_site: Counter = field(default_factory=Counter)

    def count_call(self, site: str, n: int = 1):
        self.external_calls += n
        self.external_calls_by_site[site] += n

    def as_dict(self) -> Dict[str, object]:
        return {
            "nodesExpanded": self.nodes_expanded,
            "backtracks": self.backtracks,
            "linearizationsGenerated": self.linearizations_generated,
            "externalCalls": self.external_calls,
            "prunes": self.prunes,
            "solutionsFound": self.solutions_found,
            "externalCallsBySite": dict(sorted(self.external_calls_by_site.items())),
        }


@dataclass
class PlanResult:
    plans: List[Plan]
    stats: SearchStatistics
    mode: str = "first"

    @property
    def best(self) -> Optional[Plan]:
        return self.plans[0] if self.plans else None
