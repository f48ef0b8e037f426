from fractions import Fraction

import pytest

from hatpl.dsl import parse_problem
from hatpl.errors import CostFunctionError, DuplicateRegistrationError, EvaluationError, RegistryError, UnknownFunctionError
from hatpl.extern import NO_MORE_SOLUTIONS, FunctionKind, FunctionRegistry, Solution
from hatpl.values import EntityRef

L1, L2, L3 = EntityRef("L1"), EntityRef("L2"), EntityRef("L3")


@pytest.fixture
def registry(dwr_problem):
    return FunctionRegistry.from_problem(dwr_problem)


def test_builtin_constants(registry, dwr_s0):
    assert registry.eval_cost("const_0", dwr_s0, ()) == 0
    assert registry.eval_cost("const_1", dwr_s0, ()) == 1
    assert registry.eval_duration("const_1", dwr_s0, ()) == 1
    assert not registry.resolves("const_1", FunctionKind.EVALUABLE)


def test_table_lookup_and_default(registry, dwr_s0):
    assert registry.eval_cost("costToMove", dwr_s0, (L1, L2)) == 5
    assert registry.eval_cost("costToMove", dwr_s0, (L1, L3)) == 100
    assert registry.ordering_key("distance", dwr_s0, (L2, L2)) == 0
    assert registry.arity("costToMove", FunctionKind.COST) == 2


def test_table_without_default(dwr_domain, dwr_s0):
    problem = parse_problem("L1, L2 = new Location; table hop(Location, Location) { (L1, L2) = 3/2; }", dwr_domain)
    registry = FunctionRegistry.from_problem(problem)
    assert registry.eval_cost("hop", dwr_s0, (L1, L2)) == Fraction(3, 2)
    with pytest.raises(EvaluationError):
        registry.eval_cost("hop", dwr_s0, (L2, L1))


def test_registration_shadows_tables(registry, dwr_s0):
    registry.register("costToMove", FunctionKind.COST, lambda state, args: 0.5)
    registry.register("weight", "cost", 3)
    assert registry.eval_cost("costToMove", dwr_s0, (L1, L2)) == Fraction(1, 2)
    assert registry.eval_cost("weight", dwr_s0, ()) == 3
    with pytest.raises(DuplicateRegistrationError):
        registry.register("weight", FunctionKind.COST, 4)


def test_same_name_for_different_kinds(registry, dwr_s0):
    registry.register("speed", FunctionKind.COST, 2)
    registry.register("speed", FunctionKind.DURATION, 7)
    assert registry.eval_cost("speed", dwr_s0, ()) == 2
    assert registry.eval_duration("speed", dwr_s0, ()) == 7


def test_frozen_registry_rejects_registration(registry):
    registry.freeze()
    with pytest.raises(RegistryError):
        registry.register("late", FunctionKind.COST, 1)


@pytest.mark.parametrize("value", [-1, float("inf"), float("nan")])
def test_invalid_costs(registry, dwr_s0, value):
    registry.register("bad", FunctionKind.COST, lambda state, args: value)
    with pytest.raises(CostFunctionError):
        registry.eval_cost("bad", dwr_s0, ())


def test_negative_ordering_keys_are_allowed(registry, dwr_s0):
    registry.register("rank", FunctionKind.ORDERING, -3)
    assert registry.ordering_key("rank", dwr_s0, ()) == -3


def test_unknown_function(registry, dwr_s0):
    with pytest.raises(UnknownFunctionError):
        registry.eval_cost("nowhere", dwr_s0, ())
    with pytest.raises(UnknownFunctionError):
        registry.eval_value("nowhere", dwr_s0, ())


def test_eval_value_tries_numeric_kinds(registry, dwr_s0):
    registry.register("eta", FunctionKind.DURATION, lambda state, args: len(args))
    assert registry.eval_value("eta", dwr_s0, (L1, L2)) == 2
    assert registry.eval_value("distance", dwr_s0, (L1, L2)) == 5


def test_table_predicate(dwr_domain, dwr_s0):
    problem = parse_problem(
        "L1, L2 = new Location; table reachable(Location, Location) { (L1, L2) = 2; default = 0; }",
        dwr_domain,
    )
    registry = FunctionRegistry.from_problem(problem).freeze()
    first = registry.eval_predicate("reachable", dwr_s0, (L1, L2))
    assert first == Solution(b"reachable(L1,L2)#0", 0)
    assert registry.eval_predicate("reachable", dwr_s0, (L1, L2), 1).payload == b"reachable(L1,L2)#1"
    assert registry.eval_predicate("reachable", dwr_s0, (L1, L2), 2) is NO_MORE_SOLUTIONS
    assert registry.eval_predicate("reachable", dwr_s0, (L2, L1)) is NO_MORE_SOLUTIONS


def test_predicate_must_respect_start_index(registry, dwr_s0):
    registry.register("stale", FunctionKind.EVALUABLE, lambda state, args, index, history: Solution(b"x", 0))
    assert registry.eval_predicate("stale", dwr_s0, (), 0).index == 0
    with pytest.raises(RegistryError):
        registry.eval_predicate("stale", dwr_s0, (), 1)


def test_non_callable_predicate(registry):
    with pytest.raises(RegistryError):
        registry.register("fixed", FunctionKind.EVALUABLE, 3)
