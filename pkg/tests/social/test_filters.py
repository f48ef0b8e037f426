"""
Filters checked against an independent measurement of each plan: start
times from a longest-path pass over a networkx DAG, efforts and sequences
recomputed from the raw steps.
"""

import json
from fractions import Fraction
from typing import Dict, List

import networkx as nx
import numpy as np
import pytest

from hatpl.errors import FilterConfigError
from hatpl.planner import Planner, SearchOptions
from hatpl.social import FilterConfig, agent_efforts, effort_imbalance, filter_plans
from hatpl.streams import split
from hatpl.values import EntityRef
from tests.micro import generate

PLANS_PER_PROBLEM = 40


class Measured:
    def __init__(self, micro, plan):
        self.micro = micro
        self.plan = plan
        sp = split(plan, micro.domain, micro.s0, micro.registry)
        self.links = sp.causal_links
        self.owners = [step.args[0].name for step in plan.steps]
        self.involved = [
            sorted({a.name for a in step.args if isinstance(a, EntityRef) and micro.s0.type_of(a.name) == "Agent"})
            for step in plan.steps
        ]

    def waits(self) -> Dict[str, Fraction]:
        graph = nx.DiGraph()
        graph.add_nodes_from(range(len(self.plan)))
        timelines: Dict[str, List[int]] = {}
        for i, agents in enumerate(self.involved):
            for agent in agents:
                timelines.setdefault(agent, []).append(i)
        for line in timelines.values():
            graph.add_edges_from(zip(line, line[1:]))
        graph.add_edges_from((l.producer, l.consumer) for l in self.links)
        start, end = {}, {}
        for node in nx.topological_sort(graph):
            start[node] = max((end[p] for p in graph.predecessors(node)), default=Fraction(0))
            end[node] = start[node] + self.plan.steps[node].cost
        return {
            agent: sum((start[b] - end[a] for a, b in zip(line, line[1:])), Fraction(0))
            for agent, line in timelines.items()
        }

    def max_wait(self) -> Fraction:
        return max(self.waits().values(), default=Fraction(0))

    def efforts(self, weights=None) -> Dict[str, Fraction]:
        weights = weights or {}
        out: Dict[str, Fraction] = {}
        for owner, step in zip(self.owners, self.plan.steps):
            out[owner] = out.get(owner, Fraction(0)) + step.cost
        return {a: e * Fraction(weights.get(a, 1)) for a, e in out.items()}

    def imbalance(self) -> Fraction:
        efforts = list(self.efforts().values())
        return max(efforts) - min(efforts) if efforts else Fraction(0)

    def intricacy(self) -> int:
        return len(self.links)

    def contains(self, patterns: List[str], per_stream: bool) -> bool:
        if per_stream:
            runs = [[s for o, s in zip(self.owners, self.plan.steps) if o == agent] for agent in set(self.owners)]
        else:
            runs = [list(self.plan.steps)]
        return any(_contiguous(run, patterns) for run in runs)


def _step_matches(step, pattern: str) -> bool:
    name, _, rest = pattern.partition("(")
    if name not in ("*", step.action):
        return False
    if not rest:
        return True
    wanted = [a.strip() for a in rest.rstrip(")").split(",")]
    shown = [str(a) for a in step.args]
    return len(wanted) == len(shown) and all(w in ("*", s) for w, s in zip(wanted, shown))


def _contiguous(steps, patterns) -> bool:
    width = len(patterns)
    return any(
        all(_step_matches(s, p) for s, p in zip(steps[i : i + width], patterns)) for i in range(len(steps) - width + 1)
    )


@pytest.fixture(scope="module")
def candidates(handover, handover_plans):
    problems = [(handover, handover_plans)]
    for seed in range(12):
        micro = generate(seed)
        planner = Planner(micro.domain, micro.registry)
        plans = planner.plan(micro.s0, micro.problem.goal, SearchOptions(mode="all", limit=PLANS_PER_PROBLEM)).plans
        if len(plans) > 1:
            problems.append((micro, plans))
    return [(micro, plans, [Measured(micro, p) for p in plans]) for micro, plans in problems]


def thresholds(candidates, measure) -> List:
    values = sorted({measure(m) for _, _, measured in candidates for m in measured})
    picks = np.linspace(0, len(values) - 1, 5).round().astype(int)
    return [values[i] for i in picks]


def accepted_by(config, candidates):
    out = []
    for micro, plans, _ in candidates:
        _, report = filter_plans(plans, config, micro.domain, micro.s0, micro.registry)
        out.append(report.accepted_indices)
    return out


def expected_by(candidates, keep):
    return [[i for i, m in enumerate(measured) if keep(m)] for _, _, measured in candidates]


def test_candidate_pool(candidates):
    assert len(candidates) >= 3
    assert sum(len(plans) for _, plans, _ in candidates) >= 15


@pytest.mark.parametrize(
    "key, measure",
    [
        ("maxWaitPerAgent", Measured.max_wait),
        ("maxEffortImbalance", Measured.imbalance),
        ("maxIntricacy", Measured.intricacy),
    ],
)
def test_threshold_filters(candidates, key, measure):
    for limit in thresholds(candidates, measure):
        config = FilterConfig.from_dict({key: str(limit) if isinstance(limit, Fraction) else limit})
        assert accepted_by(config, candidates) == expected_by(candidates, lambda m: measure(m) <= limit), limit


@pytest.mark.parametrize(
    "scope, pattern",
    [
        ("global", ["Hand(*,*,*)"]),
        ("global", ["Pick(A1,*)"]),
        ("global", ["Pick", "Step"]),
        ("per_stream", ["Step", "Step"]),
        ("per_stream", ["Pick(*,I1)", "Drop"]),
    ],
)
def test_sequence_filters(candidates, scope, pattern):
    config = FilterConfig.from_dict({"forbiddenSequences": [{"scope": scope, "pattern": pattern}]})
    expected = expected_by(candidates, lambda m: not m.contains(pattern, scope == "per_stream"))
    assert accepted_by(config, candidates) == expected


def test_combined_filters(candidates):
    wait = thresholds(candidates, Measured.max_wait)[2]
    imbalance = thresholds(candidates, Measured.imbalance)[2]
    intricacy = thresholds(candidates, Measured.intricacy)[2]
    config = FilterConfig.from_dict(
        {
            "maxWaitPerAgent": str(wait),
            "maxEffortImbalance": str(imbalance),
            "maxIntricacy": intricacy,
            "forbiddenSequences": [{"pattern": ["Hand"]}],
        }
    )

    def keep(m):
        return (
            m.max_wait() <= wait
            and m.imbalance() <= imbalance
            and m.intricacy() <= intricacy
            and not m.contains(["Hand"], False)
        )

    assert accepted_by(config, candidates) == expected_by(candidates, keep)


def test_raising_thresholds_never_rejects_more(candidates):
    limits = thresholds(candidates, Measured.intricacy)
    previous = None
    for limit in limits:
        accepted = accepted_by(FilterConfig(max_intricacy=limit), candidates)
        if previous is not None:
            assert all(set(p) <= set(a) for p, a in zip(previous, accepted))
        previous = accepted


def test_weighted_efforts(handover_streams):
    config = FilterConfig.from_dict({"effortWeights": {"A2": "1/2"}, "maxIntricacy": 10})
    assert agent_efforts(handover_streams, config) == {"A1": 2, "A2": Fraction(3, 2)}


def test_ratio_imbalance():
    assert effort_imbalance({"A": Fraction(2), "B": Fraction(1)}, "ratio") == 2
    assert effort_imbalance({"A": Fraction(0), "B": Fraction(0)}, "ratio") == 1
    assert effort_imbalance({"A": Fraction(3), "B": Fraction(0)}, "ratio") == float("inf")
    assert effort_imbalance({}, "ratio") == 1
    assert effort_imbalance({"A": Fraction(3), "B": Fraction(1)}, "difference") == 2


def test_ratio_mode_filter(handover, handover_plan):
    config = FilterConfig.from_dict({"maxEffortImbalance": "3/2", "imbalanceMode": "ratio"})
    accepted, report = filter_plans([handover_plan], config, handover.domain, handover.s0, handover.registry)
    (verdict,) = report.verdicts
    assert verdict.imbalance == Fraction(3, 2)
    assert accepted == [handover_plan]
    strict = FilterConfig.from_dict({"maxEffortImbalance": "7/5", "imbalanceMode": "ratio"})
    accepted, report = filter_plans([handover_plan], strict, handover.domain, handover.s0, handover.registry)
    assert accepted == [] and report.verdicts[0].violated() == ["effort"]


def test_report(handover, handover_plans):
    config = FilterConfig.from_dict({"forbiddenSequences": [{"pattern": ["Hand"]}]})
    accepted, report = filter_plans(handover_plans, config, handover.domain, handover.s0, handover.registry)
    assert [handover_plans[i] for i in report.accepted_indices] == accepted
    assert all("Hand" not in {s.action for s in p.steps} for p in accepted)
    df = report.to_df()
    assert len(df) == len(handover_plans)
    assert list(df["accepted"]) == [v.accepted for v in report.verdicts]
    record = json.loads(report.to_record().to_json())
    assert record["accepted"] == report.accepted_indices
    assert len(record["verdicts"]) == len(handover_plans)


def test_no_criteria(handover, handover_plans):
    with pytest.raises(FilterConfigError):
        filter_plans(handover_plans, FilterConfig(), handover.domain, handover.s0, handover.registry)
