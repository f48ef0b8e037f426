"""
Cross-checks a parsed domain and problem before planning.

Parsing already resolves types, attributes and variables. This pass checks
what needs both files (and optionally host registrations): every function
reference resolves, every action's first parameter is an Agent, and the goal
names known tasks over known entities.
"""

from typing import Iterator, List, Optional, Tuple

from ..errors import Diagnostic
from ..extern.base import FunctionKind
from ..extern.registry import FunctionRegistry
from ..values import EntityRef
from .ast import (
    AGENT,
    Assign,
    AttrAccess,
    Call,
    Compare,
    DomainModel,
    Exist,
    ForAll,
    ForAllEffect,
    If,
    Member,
    PredicateCall,
    ProblemModel,
    SetAdd,
    SetRemove,
)

_NUMERIC = (FunctionKind.COST, FunctionKind.DURATION, FunctionKind.ORDERING)


def _calls_in_expr(expr) -> Iterator[Call]:
    if isinstance(expr, Call):
        yield expr
        for arg in expr.args:
            yield from _calls_in_expr(arg)
    elif isinstance(expr, AttrAccess):
        yield from _calls_in_expr(expr.base)


def _references_in_conditions(conditions) -> Iterator[Tuple[Call, Optional[FunctionKind]]]:
    for cond in conditions:
        if isinstance(cond, PredicateCall):
            yield cond.call, FunctionKind.EVALUABLE
            for arg in cond.call.args:
                for call in _calls_in_expr(arg):
                    yield call, None
        elif isinstance(cond, Compare):
            for call in (*_calls_in_expr(cond.left), *_calls_in_expr(cond.right)):
                yield call, None
        elif isinstance(cond, Member):
            for call in (*_calls_in_expr(cond.element), *_calls_in_expr(cond.collection)):
                yield call, None
        elif isinstance(cond, (Exist, ForAll)):
            yield from _references_in_conditions(cond.filter)
            yield from _references_in_conditions(cond.body)


def _references_in_effects(effects) -> Iterator[Tuple[Call, Optional[FunctionKind]]]:
    for effect in effects:
        if isinstance(effect, (Assign, SetAdd, SetRemove)):
            for call in (*_calls_in_expr(effect.target), *_calls_in_expr(effect.value)):
                yield call, None
        elif isinstance(effect, If):
            yield from _references_in_conditions(effect.guard)
            yield from _references_in_effects(effect.then)
        elif isinstance(effect, ForAllEffect):
            yield from _references_in_conditions(effect.filter)
            yield from _references_in_effects(effect.body)


def function_references(domain: DomainModel) -> Iterator[Tuple[Call, Optional[FunctionKind]]]:
    """
    Yields every external function reference of a domain with the kind it is
    used as. Calls inside expressions have kind None: any numeric kind
    resolves them.
    """
    for method in domain.methods:
        yield from _references_in_conditions(method.empty_condition or ())
        for case in method.cases:
            yield from _references_in_conditions(case.precondition)
            for selector in case.body.selectors:
                yield from _references_in_conditions(selector.filter)
                if selector.ordering is not None:
                    yield selector.ordering, FunctionKind.ORDERING
    for operator in domain.operators:
        yield from _references_in_conditions(operator.precondition)
        yield from _references_in_effects(operator.effects)
        if operator.cost is not None:
            yield operator.cost, FunctionKind.COST
        if operator.duration is not None:
            yield operator.duration, FunctionKind.DURATION


def validate(
    domain: DomainModel,
    problem: ProblemModel,
    registry: Optional[FunctionRegistry] = None,
    domain_source: str = "<domain>",
    problem_source: str = "<problem>",
) -> List[Diagnostic]:
    """
    Checks a domain and problem for planning readiness.

    Args:
        domain (DomainModel): The parsed domain.
        problem (ProblemModel): The parsed problem.
        registry (FunctionRegistry, optional): Host registrations. Defaults to
            a registry holding only the problem's tables and the built-ins.

    Returns:
        List[Diagnostic]: Empty iff the pair is ready for planning.
    """
    registry = registry or FunctionRegistry.from_problem(problem)
    diagnostics: List[Diagnostic] = []

    def report(source, span, message):
        line, column = (span.line, span.column) if span else (1, 1)
        diagnostics.append(Diagnostic(source, line, column, "error", message))

    for operator in domain.operators:
        if not operator.params or operator.params[0].type_name != AGENT:
            report(domain_source, operator.span, f"action {operator.name}: first parameter must be an Agent")

    for call, kind in function_references(domain):
        candidates = _NUMERIC if kind is None else (kind,)
        resolved_kind = next((k for k in candidates if registry.resolves(call.name, k)), None)
        label = "numeric" if kind is None else kind.value
        if resolved_kind is None:
            report(domain_source, call.span, f"unresolved {label} function {call.name}")
            continue
        arity = registry.arity(call.name, resolved_kind)
        if arity is not None and arity != len(call.args):
            report(
                domain_source,
                call.span,
                f"{label} function {call.name} takes {arity} arguments, got {len(call.args)}",
            )

    entities = problem.entity_types
    for call in problem.goal:
        if not domain.is_task(call.name):
            report(problem_source, call.span, f"unknown task {call.name}")
            continue
        for arg in call.args:
            value = getattr(arg, "value", None)
            if isinstance(value, EntityRef) and value.name not in entities:
                report(problem_source, call.span, f"unknown entity {value.name}")
    return diagnostics
