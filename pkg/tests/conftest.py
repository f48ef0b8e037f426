import os
from pathlib import Path
import sys

import pytest

CWD = Path(os.path.dirname(os.path.realpath(__file__)))
SRC = CWD.parent
sys.path.append(str(SRC))

from hatpl.dsl import parse_domain, parse_problem  # noqa: E402
from hatpl.extern import FunctionRegistry  # noqa: E402
from hatpl.planner import Planner, SearchOptions  # noqa: E402
from hatpl.streams import split  # noqa: E402
from hatpl.world import init_state  # noqa: E402
from tests.micro import HANDOVER_PROBLEM, build  # noqa: E402

DATA = CWD / "data"


def read_data(name: str) -> str:
    return (DATA / name).read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def dwr_domain_text():
    return read_data("dwr.hatp")


@pytest.fixture(scope="session")
def dwr_problem_text():
    return read_data("dwr.hatpp")


@pytest.fixture(scope="session")
def dwr_domain(dwr_domain_text):
    return parse_domain(dwr_domain_text, source="dwr.hatp")


@pytest.fixture(scope="session")
def dwr_problem(dwr_domain, dwr_problem_text):
    return parse_problem(dwr_problem_text, dwr_domain, source="dwr.hatpp")


@pytest.fixture(scope="session")
def dwr_registry(dwr_problem):
    return FunctionRegistry.from_problem(dwr_problem).freeze()


@pytest.fixture(scope="session")
def dwr_s0(dwr_problem, dwr_domain):
    return init_state(dwr_problem, dwr_domain)


@pytest.fixture(scope="session")
def dwr_planner(dwr_domain, dwr_registry):
    return Planner(dwr_domain, dwr_registry)


@pytest.fixture(scope="session")
def dwr_optimal(dwr_planner, dwr_s0, dwr_problem):
    return dwr_planner.plan(dwr_s0, dwr_problem.goal, SearchOptions(mode="optimal"))


@pytest.fixture(scope="session")
def dwr_streams(dwr_optimal, dwr_domain, dwr_s0, dwr_registry):
    return split(dwr_optimal.best, dwr_domain, dwr_s0, dwr_registry)


HANDOVER_STEPS = ["Pick(A1,I1)", "Step(A2,S2,S1)", "Hand(A1,A2,I1)", "Step(A2,S1,S2)", "Drop(A2,I1)"]


@pytest.fixture(scope="session")
def handover():
    return build(HANDOVER_PROBLEM)


@pytest.fixture(scope="session")
def handover_plans(handover):
    planner = Planner(handover.domain, handover.registry)
    return planner.plan(handover.s0, handover.problem.goal, SearchOptions(mode="all")).plans


@pytest.fixture(scope="session")
def handover_plan(handover_plans):
    (plan,) = [p for p in handover_plans if [str(s) for s in p.steps] == HANDOVER_STEPS]
    return plan


@pytest.fixture(scope="session")
def handover_streams(handover, handover_plan):
    return split(handover_plan, handover.domain, handover.s0, handover.registry)
