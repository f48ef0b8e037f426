"""
evaluate.py

Evaluation of conditions, effects and selectors against a WorldState.

Conditions are conjunctions of statements. An attribute access on a NULL
entity inside a condition makes the enclosing comparison (or membership test)
false; inside an effect it is an error.

Effects use simultaneous-update semantics: every read (right-hand sides, IF
guards, FORALL filters) sees the pre-effect state, and the collected writes
are then applied in statement order to produce the post-effect state.

Optional collectors record which slots were read and written, keyed as
(entity, attribute, element): element is None for atom slots, the element
value for set membership, and WHOLE_SET when a set was read as a whole.
"""

from collections import Counter
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from ..dsl.ast import (
    Assign,
    AttrAccess,
    Call,
    Compare,
    Direction,
    Exist,
    ForAll,
    ForAllEffect,
    If,
    Literal,
    Member,
    PredicateCall,
    SelectKind,
    SelectorDecl,
    SetAdd,
    SetRemove,
    Var,
)
from ..errors import EvaluationError, UnboundVariableError
from ..values import EntityRef, Value, format_value, matches_type
from .state import WorldState


class _WholeSet:
    def __repr__(self):
        return "WHOLE_SET"


WHOLE_SET = _WholeSet()


class NullAccess(EvaluationError):
    """
    Attribute access on a NULL value.
    """


class Bindings(Mapping[str, Value]):
    """
    Immutable variable to value mapping; each variable is bound at most once.
    """

    __slots__ = ("_values",)

    def __init__(self, values: Optional[Mapping[str, Value]] = None):
        self._values: Dict[str, Value] = dict(values or {})

    def bind(self, variable: str, value: Value) -> "Bindings":
        if variable in self._values:
            raise EvaluationError(f"Variable {variable} is already bound")
        values = dict(self._values)
        values[variable] = value
        return Bindings(values)

    def __getitem__(self, variable: str) -> Value:
        try:
            return self._values[variable]
        except KeyError:
            raise UnboundVariableError(variable) from None

    def __contains__(self, variable) -> bool:
        return variable in self._values

    def __iter__(self) -> Iterator[str]:
        return iter(self._values)

    def __len__(self) -> int:
        return len(self._values)

    def __repr__(self):
        inner = ", ".join(f"{k}={format_value(v)}" for k, v in self._values.items())
        return f"Bindings({inner})"


def values_equal(a, b) -> bool:
    """
    Type-aware equality: true never equals 1, numbers compare by value.
    """
    if isinstance(a, bool) or isinstance(b, bool):
        return isinstance(a, bool) and isinstance(b, bool) and a == b
    if isinstance(a, (int, Fraction)) and isinstance(b, (int, Fraction)):
        return a == b
    return type(a) is type(b) and a == b


class _Context:
    def __init__(self, state: WorldState, registry, history, reads, calls):
        self.state = state
        self.registry = registry
        self.history = tuple(history)
        self.reads = reads
        self.calls = calls

    def read(self, key):
        if self.reads is not None:
            self.reads.append(key)


def _entity_of(value, what: str) -> str:
    if value is None:
        raise NullAccess(f"Attribute access on NULL ({what})")
    if not isinstance(value, EntityRef):
        raise EvaluationError(f"Attribute access on a non-entity value {format_value(value)} ({what})")
    return value.name


def _eval_expr(expr, ctx: _Context, bindings: Bindings, whole: bool = True):
    if isinstance(expr, Var):
        return bindings[expr.name]
    if isinstance(expr, Literal):
        return expr.value
    if isinstance(expr, AttrAccess):
        entity = _entity_of(_eval_expr(expr.base, ctx, bindings), f".{expr.attr}")
        value = ctx.state.get(entity, expr.attr)
        if isinstance(value, tuple):
            if whole:
                ctx.read((entity, expr.attr, WHOLE_SET))
        else:
            ctx.read((entity, expr.attr, None))
        return value
    if isinstance(expr, Call):
        if ctx.registry is None:
            raise EvaluationError(f"Function {expr.name} called without a registry")
        args = tuple(_eval_expr(a, ctx, bindings) for a in expr.args)
        value = ctx.registry.eval_value(expr.name, ctx.state, args)
        return value.numerator if value.denominator == 1 else value
    raise EvaluationError(f"Not an expression: {expr!r}")


def eval_expr(expr, state: WorldState, bindings: Bindings, registry=None):
    """
    Value of an expression (a tuple for set attributes).
    """
    return _eval_expr(expr, _Context(state, registry, (), None, None), bindings)


def _member(cond: Member, ctx: _Context, bindings: Bindings) -> bool:
    element = _eval_expr(cond.element, ctx, bindings)
    if isinstance(cond.collection, AttrAccess):
        entity = _entity_of(_eval_expr(cond.collection.base, ctx, bindings), f".{cond.collection.attr}")
        collection = ctx.state.get(entity, cond.collection.attr)
        ctx.read((entity, cond.collection.attr, element))
    else:
        collection = _eval_expr(cond.collection, ctx, bindings)
    if not isinstance(collection, tuple):
        raise EvaluationError(f"Right-hand side of membership test is not a set: {format_value(collection)}")
    found = any(values_equal(element, item) for item in collection)
    return found != cond.negated


def _holds(cond, ctx: _Context, bindings: Bindings) -> bool:
    if isinstance(cond, Compare):
        try:
            left = _eval_expr(cond.left, ctx, bindings)
            right = _eval_expr(cond.right, ctx, bindings)
        except NullAccess:
            return False
        equal = values_equal(left, right)
        return equal if cond.op == "==" else not equal
    if isinstance(cond, Member):
        try:
            return _member(cond, ctx, bindings)
        except NullAccess:
            return False
    if isinstance(cond, Exist):
        for entity in ctx.state.entities_of_type(cond.type_name):
            inner = bindings.bind(cond.variable, EntityRef(entity))
            if _all(cond.filter, ctx, inner) and _all(cond.body, ctx, inner):
                return True
        return False
    if isinstance(cond, ForAll):
        for entity in ctx.state.entities_of_type(cond.type_name):
            inner = bindings.bind(cond.variable, EntityRef(entity))
            if _all(cond.filter, ctx, inner) and not _all(cond.body, ctx, inner):
                return False
        return True
    if isinstance(cond, PredicateCall):
        try:
            args = tuple(_eval_expr(a, ctx, bindings) for a in cond.call.args)
        except NullAccess:
            return False
        return bool(predicate_solution(cond.call.name, args, ctx, 0))
    raise EvaluationError(f"Not a condition: {cond!r}")


def predicate_solution(name: str, args: Tuple, ctx: _Context, start_index: int):
    if ctx.registry is None:
        raise EvaluationError(f"Predicate {name} evaluated without a registry")
    if ctx.calls is not None:
        ctx.calls[name] += 1
    return ctx.registry.eval_predicate(name, ctx.state, args, start_index, ctx.history)


def _all(conditions, ctx: _Context, bindings: Bindings) -> bool:
    return all(_holds(cond, ctx, bindings) for cond in conditions)


def eval_condition(
    conditions: Sequence,
    state: WorldState,
    bindings: Bindings,
    registry=None,
    history: Sequence = (),
    reads: Optional[List] = None,
    calls: Optional[Counter] = None,
) -> bool:
    """
    Evaluates a conjunction of condition statements.

    Args:
        conditions (Sequence): Condition statements; empty means true.
        state (WorldState): The state to evaluate in.
        bindings (Bindings): Values of the free variables.
        registry (FunctionRegistry, optional): Needed for function calls and
            evaluable predicates.
        history (Sequence[Attachment]): Earlier attachments, passed to predicates.
        reads (list, optional): Collects the slot keys read.
        calls (Counter, optional): Counts predicate invocations by name.

    Returns:
        bool: True iff every statement holds.

    Raises:
        UnboundVariableError: If a free variable has no value.
    """
    return _all(conditions, _Context(state, registry, history, reads, calls), bindings)


def eval_args(args: Sequence, state: WorldState, bindings: Bindings, registry=None, reads=None) -> Tuple:
    """
    Evaluates argument expressions; attribute access on NULL is an error here.
    """
    ctx = _Context(state, registry, (), reads, None)
    return tuple(_eval_expr(a, ctx, bindings) for a in args)


def _collect_writes(effects, ctx: _Context, bindings: Bindings, out: List):
    for effect in effects:
        if isinstance(effect, (Assign, SetAdd, SetRemove)):
            target = effect.target
            entity = _entity_of(_eval_expr(target.base, ctx, bindings), f"effect on .{target.attr}")
            value = _eval_expr(effect.value, ctx, bindings)
            op = {Assign: "=", SetAdd: "<<=", SetRemove: "=>>"}[type(effect)]
            out.append((op, entity, target.attr, value))
        elif isinstance(effect, If):
            if _all(effect.guard, ctx, bindings):
                _collect_writes(effect.then, ctx, bindings, out)
        elif isinstance(effect, ForAllEffect):
            for entity in ctx.state.entities_of_type(effect.type_name):
                inner = bindings.bind(effect.variable, EntityRef(entity))
                if _all(effect.filter, ctx, inner):
                    _collect_writes(effect.body, ctx, inner, out)
        else:
            raise EvaluationError(f"Not an effect: {effect!r}")


def apply_effects(
    effects: Sequence,
    state: WorldState,
    bindings: Bindings,
    reads: Optional[List] = None,
    writes: Optional[List] = None,
    registry=None,
) -> WorldState:
    """
    Applies effect statements and returns the post-effect snapshot.

    Adding an element already in a set and removing an absent one are no-ops.
    The input state is never changed.

    Raises:
        EvaluationError: On attribute access on NULL, a value of the wrong type,
            or `=` on a set / `<<=` on an atom.
        StaticWriteError: On a write to a static slot.
    """
    if not effects:
        return state
    ctx = _Context(state, registry, (), reads, None)
    pending: List = []
    _collect_writes(effects, ctx, bindings, pending)

    updated: Dict[Tuple[str, str], object] = {}
    for op, entity, attr, value in pending:
        key = (entity, attr)
        decl = state.domain.attribute(state.type_of(entity), attr)
        if decl is None:
            raise EvaluationError(f"Entity {entity} has no attribute {attr}")
        where = f"{entity}.{attr}"
        if value is not None and not matches_type(value, decl.value_type, state.type_of):
            raise EvaluationError(f"{where} expects {decl.value_type}, got {format_value(value)}")
        if op == "=":
            if decl.is_set:
                raise EvaluationError(f"{where} is a set; use <<= or =>>")
            updated[key] = value
            if writes is not None:
                writes.append((entity, attr, None))
            continue
        if not decl.is_set:
            raise EvaluationError(f"{where} is not a set")
        if value is None:
            raise EvaluationError(f"Cannot add or remove NULL in {where}")
        current = updated.get(key, state.get(entity, attr))
        present = any(values_equal(value, item) for item in current)
        if op == "<<=" and not present:
            updated[key] = current + (value,)
        elif op == "=>>" and present:
            updated[key] = tuple(item for item in current if not values_equal(value, item))
        if writes is not None:
            writes.append((entity, attr, value))
    return state.with_writes(updated.items())


def enumerate_bindings(selector: SelectorDecl, state: WorldState, bindings: Bindings, registry=None) -> List[EntityRef]:
    """
    Candidate values of a selector variable.

    SELECT yields every entity of the type passing the filter in declaration
    order; SELECTORDERED sorts them (stably) by the ordering function, ">"
    ascending and "<" descending; SELECTONCE keeps the first candidate only.

    Raises:
        UnknownFunctionError: If the ordering function does not resolve.
    """
    candidates = []
    for entity in state.entities_of_type(selector.entity_type):
        ref = EntityRef(entity)
        if eval_condition(selector.filter, state, bindings.bind(selector.variable, ref), registry):
            candidates.append(ref)
    if selector.kind is SelectKind.SELECT_ONCE:
        return candidates[:1]
    if selector.kind is SelectKind.SELECT_ORDERED:
        if registry is None:
            raise EvaluationError(f"SELECTORDERED on {selector.variable} needs a registry")
        keys = {}
        for ref in candidates:
            args = eval_args(selector.ordering.args, state, bindings.bind(selector.variable, ref), registry)
            keys[ref] = registry.ordering_key(selector.ordering.name, state, args)
        return sorted(candidates, key=keys.__getitem__, reverse=selector.direction is Direction.DESCENDING)
    return candidates
