"""
Oracle and soundness checks over seeded random micro-domains.
"""

import pytest

from hatpl.errors import NoSolutionError
from hatpl.planner import Planner, SearchOptions, replay_validate
from tests.micro import generate

ENUMERATION_CAP = 500


def all_plans(micro):
    planner = Planner(micro.domain, micro.registry)
    return planner.plan(micro.s0, micro.problem.goal, SearchOptions(mode="all", limit=ENUMERATION_CAP + 1)).plans


def test_branch_and_bound_finds_the_cheapest_plan():
    checked = 0
    for seed in range(80):
        micro = generate(seed)
        try:
            plans = all_plans(micro)
        except NoSolutionError:
            with pytest.raises(NoSolutionError):
                Planner(micro.domain, micro.registry).plan(micro.s0, micro.problem.goal, SearchOptions(mode="optimal"))
            continue
        if len(plans) > ENUMERATION_CAP:
            continue
        best = Planner(micro.domain, micro.registry).plan(
            micro.s0, micro.problem.goal, SearchOptions(mode="optimal")
        ).best
        assert best.total_cost == min(p.total_cost for p in plans), f"seed {seed}"
        assert best.signature in {p.signature for p in plans}
        checked += 1
    assert checked >= 50


def test_all_plans_are_distinct():
    for seed in range(20):
        plans = all_plans(generate(seed))
        assert len({p.signature for p in plans}) == len(plans)


def test_returned_plans_are_sound():
    replayed = 0
    seed = 0
    while replayed < 1000 and seed < 2000:
        micro = generate(seed)
        static = [
            (key, value)
            for key, value in micro.s0.slots()
            if micro.domain.attribute(micro.s0.type_of(key[0]), key[1]).is_static
        ]
        for plan in all_plans(micro)[:ENUMERATION_CAP]:
            result = replay_validate(plan, micro.s0, micro.domain, micro.registry)
            assert result, f"seed {seed}: {result.reason}"
            assert all(result.final_state.get(*key) == value for key, value in static)
            replayed += 1
        seed += 1
    assert replayed >= 1000
