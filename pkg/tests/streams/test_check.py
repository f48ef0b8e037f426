import networkx as nx
import pytest

from hatpl.errors import NoSolutionError
from hatpl.planner import Planner, SearchOptions
from hatpl.streams import CausalLink, StreamPlan, check_linearizations, constraint_graph, split
from hatpl.streams.check import EXHAUSTIVE_LIMIT, SAMPLES
from tests.micro import generate


def test_dwr_constraints_are_sufficient(dwr_streams, dwr_s0, dwr_domain, dwr_registry):
    check = check_linearizations(dwr_streams, dwr_s0, dwr_domain, dwr_registry, seed=7)
    assert check
    assert not check.exhaustive
    assert check.extensions_checked == SAMPLES == 1000


def test_dropping_a_support_link_is_caught(dwr_streams, dwr_s0, dwr_domain, dwr_registry):
    weakened = dwr_streams.without_link(CausalLink(2, 3, "at(R1,L2)", "support"))
    assert len(weakened.causal_links) == len(dwr_streams.causal_links) - 1
    check = check_linearizations(weakened, dwr_s0, dwr_domain, dwr_registry, seed=0)
    assert not check
    assert check.counterexample is not None


def test_handover_is_checked_exhaustively(handover_streams, handover):
    check = check_linearizations(handover_streams, handover.s0, handover.domain, handover.registry)
    assert check and check.exhaustive
    assert check.extensions_checked == 2


def test_handover_needs_the_arrival_link(handover_streams, handover):
    weakened = handover_streams.without_link(CausalLink(1, 2, "at(A2,S1)", "support"))
    check = check_linearizations(weakened, handover.s0, handover.domain, handover.registry)
    assert not check
    assert check.exhaustive
    assert check.counterexample[:2] == (0, 2)


def test_constraint_graph(handover_streams):
    graph = constraint_graph(handover_streams)
    assert set(graph.edges) == {(0, 2), (1, 3), (3, 4), (0, 4), (1, 2), (2, 3), (2, 4)}


def test_cyclic_constraints(handover_streams, handover):
    sp = handover_streams
    cyclic = StreamPlan(sp.plan, sp.streams, sp.causal_links + (CausalLink(4, 1, "x"),), sp.joint_groups, sp.owners)
    check = check_linearizations(cyclic, handover.s0, handover.domain, handover.registry)
    assert not check
    assert check.reason == "constraints are cyclic"


def test_sampling_is_seeded(dwr_streams, dwr_s0, dwr_domain, dwr_registry):
    weakened = dwr_streams.without_link(CausalLink(2, 3, "at(R1,L2)", "support"))
    runs = [check_linearizations(weakened, dwr_s0, dwr_domain, dwr_registry, seed=3) for _ in range(2)]
    assert runs[0].counterexample == runs[1].counterexample
    assert runs[0].extensions_checked == runs[1].extensions_checked


## GENERATED PLANS
PLANS_PER_PROBLEM = 10


@pytest.fixture(scope="module")
def generated_streams():
    streams = []
    for seed in range(60):
        micro = generate(seed)
        planner = Planner(micro.domain, micro.registry)
        try:
            plans = planner.plan(micro.s0, micro.problem.goal, SearchOptions(mode="all", limit=PLANS_PER_PROBLEM)).plans
        except NoSolutionError:
            continue
        streams.extend((micro, seed, split(plan, micro.domain, micro.s0, micro.registry)) for plan in plans)
    assert len(streams) >= 50
    return streams


def test_generated_plans_are_sufficient(generated_streams):
    for micro, seed, sp in generated_streams:
        check = check_linearizations(sp, micro.s0, micro.domain, micro.registry, seed=seed)
        assert check, f"seed {seed}, plan {sp.plan}: {check.reason} at {check.counterexample}"
        if len(sp.plan) <= EXHAUSTIVE_LIMIT:
            assert check.exhaustive
        else:
            assert not check.exhaustive
            assert check.extensions_checked >= 1000


def test_every_link_is_needed_or_implied(generated_streams):
    checked = 0
    for micro, seed, sp in generated_streams:
        if len(sp.plan) > EXHAUSTIVE_LIMIT:
            continue
        for link in sp.causal_links:
            weakened = sp.without_link(link)
            implied = nx.has_path(constraint_graph(weakened), link.producer, link.consumer)
            needed = not check_linearizations(weakened, micro.s0, micro.domain, micro.registry)
            assert implied or needed, f"seed {seed}, plan {sp.plan}: {link} is redundant"
            checked += 1
    assert checked > 0
