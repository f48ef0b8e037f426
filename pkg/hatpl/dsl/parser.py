"""
parser.py

Lark-based parser for HATP domain (.hatp) and problem (.hatpp) files.

The grammar (hatp.lark) accepts one statement syntax for conditions and
effects; the transformer decides which constructs are allowed where
(EXIST only in preconditions, IF only in effects, FORALL in both) and the
checkers resolve every identifier against the declarations. All problems
found in one text are reported together in a single ParseError.

Dependencies:
    - lark: For the LALR grammar, lexing and source positions.
    - networkx: For detecting cycles in subtask ordering constraints.

Usage:
    domain = parse_domain(text, source="dwr.hatp")
    problem = parse_problem(text, domain, source="dwr.hatpp")
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import networkx as nx
from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken

from ..errors import Diagnostic, ParseError
from ..logger import setup_logger
from ..utils import normalize_quotes, to_rational
from ..values import PRIMITIVE_TYPES, EntityRef, matches_type
from .ast import (
    AGENT,
    Arity,
    Assign,
    Assignment,
    AttrAccess,
    AttributeDecl,
    Call,
    Compare,
    Direction,
    DomainModel,
    EntityTypeDecl,
    Exist,
    ForAll,
    ForAllEffect,
    If,
    Instantiation,
    Literal,
    Member,
    MethodBody,
    MethodCase,
    MethodDecl,
    Mutability,
    OperatorDecl,
    Param,
    PredicateCall,
    ProblemModel,
    SelectKind,
    SelectorDecl,
    SetAdd,
    SetRemove,
    Span,
    Subtask,
    TableDecl,
    Var,
)

logger = setup_logger(__name__)

_GRAMMAR_FILE = Path(__file__).parent / "hatp.lark"

_lark_parser = Lark(
    _GRAMMAR_FILE.read_text(encoding="utf-8"),
    start=["domain", "problem", "goal_list"],
    parser="lalr",
    propagate_positions=True,
    maybe_placeholders=False,
)


def _span_of(item) -> Optional[Span]:
    if isinstance(item, Token):
        return Span(item.line, item.column)
    if item is None or getattr(item, "empty", True):
        return None
    return Span(item.line, item.column)


# ---- Internal nodes that only live during transformation ----


@dataclass(frozen=True)
class _Block:
    statements: tuple
    span: Optional[Span]


@dataclass(frozen=True)
class _RawForAll:
    variable: str
    type_name: str
    filter: _Block
    body: _Block
    span: Optional[Span]


@dataclass(frozen=True)
class _RawIf:
    guard: _Block
    then: _Block
    span: Optional[Span]


@dataclass(frozen=True)
class _RawSubtask:
    label: Optional[int]
    task: Call
    predecessors: Tuple[int, ...]
    span: Optional[Span]


@dataclass(frozen=True)
class _EntityTypes:
    names: Tuple[Token, ...]


@dataclass(frozen=True)
class _EntityAttributes:
    name: Token
    attributes: Tuple[AttributeDecl, ...]


@dataclass(frozen=True)
class _Part:
    kind: str
    value: object
    span: Optional[Span]


@v_args(meta=True)
class _HatpTransformer(Transformer):
    """
    Turns the lark tree into AST nodes, recording construct misuse as
    diagnostics instead of failing on the first one.
    """

    def __init__(self, source: str):
        super().__init__()
        self.source = source
        self.diagnostics: List[Diagnostic] = []

    def _error(self, span: Optional[Span], message: str):
        line, column = (span.line, span.column) if span else (1, 1)
        self.diagnostics.append(Diagnostic(self.source, line, column, "error", message))

    # ---- expressions ----

    def var(self, meta, children):
        (name,) = children
        return Var(str(name), _span_of(name))

    def attr(self, meta, children):
        base, name = children
        return AttrAccess(base, str(name), _span_of(meta))

    def call(self, meta, children):
        name, *args = children
        return Call(str(name), tuple(args), _span_of(name))

    def string_lit(self, meta, children):
        (token,) = children
        return Literal(str(token)[1:-1].replace('\\"', '"'), _span_of(token))

    def int_lit(self, meta, children):
        (token,) = children
        return Literal(int(token), _span_of(token))

    def true_lit(self, meta, children):
        return Literal(True, _span_of(meta))

    def false_lit(self, meta, children):
        return Literal(False, _span_of(meta))

    def null_lit(self, meta, children):
        return Literal(None, _span_of(meta))

    # ---- statements ----

    def compare(self, meta, children):
        left, op, right = children
        return Compare(str(op), left, right, _span_of(meta))

    def member(self, meta, children):
        element, collection = children
        return Member(element, collection, False, _span_of(meta))

    def not_member(self, meta, children):
        element, collection = children
        return Member(element, collection, True, _span_of(meta))

    def _target(self, expr, op: str):
        if not isinstance(expr, AttrAccess):
            self._error(getattr(expr, "span", None), f"left-hand side of '{op}' must be an attribute access")
            return None
        return expr

    def assign(self, meta, children):
        target, value = children
        target = self._target(target, "=")
        return Assign(target, value, _span_of(meta)) if target else None

    def set_add(self, meta, children):
        target, value = children
        target = self._target(target, "<<=")
        return SetAdd(target, value, _span_of(meta)) if target else None

    def set_remove(self, meta, children):
        target, value = children
        target = self._target(target, "=>>")
        return SetRemove(target, value, _span_of(meta)) if target else None

    def call_stmt(self, meta, children):
        (call,) = children
        if not isinstance(call, Call):
            self._error(_span_of(meta), "expression statement must be a predicate call")
            return None
        return PredicateCall(call, call.span)

    def block(self, meta, children):
        return _Block(tuple(c for c in children if c is not None), _span_of(meta))

    def exist(self, meta, children):
        type_name, variable, filter_block, body_block = children
        return Exist(
            str(variable),
            str(type_name),
            self.conditions(filter_block),
            self.conditions(body_block),
            _span_of(meta),
        )

    def forall(self, meta, children):
        type_name, variable, filter_block, body_block = children
        return _RawForAll(str(variable), str(type_name), filter_block, body_block, _span_of(meta))

    def if_stmt(self, meta, children):
        guard, then = children
        return _RawIf(guard, then, _span_of(meta))

    def conditions(self, block: _Block) -> tuple:
        """
        Converts a block in precondition position.
        """
        out = []
        for stmt in block.statements:
            if isinstance(stmt, (Compare, Member, PredicateCall, Exist)):
                out.append(stmt)
            elif isinstance(stmt, _RawForAll):
                out.append(
                    ForAll(
                        stmt.variable,
                        stmt.type_name,
                        self.conditions(stmt.filter),
                        self.conditions(stmt.body),
                        stmt.span,
                    )
                )
            elif isinstance(stmt, _RawIf):
                self._error(stmt.span, "IF is only allowed in effects")
            else:
                self._error(getattr(stmt, "span", None), "assignments are only allowed in effects")
        return tuple(out)

    def effects_of(self, block: _Block) -> tuple:
        """
        Converts a block in effect position.
        """
        out = []
        for stmt in block.statements:
            if isinstance(stmt, (Assign, SetAdd, SetRemove)):
                out.append(stmt)
            elif isinstance(stmt, _RawIf):
                out.append(If(self.conditions(stmt.guard), self.effects_of(stmt.then), stmt.span))
            elif isinstance(stmt, _RawForAll):
                out.append(
                    ForAllEffect(
                        stmt.variable,
                        stmt.type_name,
                        self.conditions(stmt.filter),
                        self.effects_of(stmt.body),
                        stmt.span,
                    )
                )
            elif isinstance(stmt, Exist):
                self._error(stmt.span, "EXIST is only allowed in preconditions")
            else:
                self._error(getattr(stmt, "span", None), "conditions are not allowed in effects")
        return tuple(out)

    # ---- domain declarations ----

    def entity_types(self, meta, children):
        return _EntityTypes(tuple(children))

    def attribute_decl(self, meta, children):
        mutability, arity, value_type, name = children
        return AttributeDecl(
            str(name), Mutability(str(mutability)), Arity(str(arity)), str(value_type), _span_of(name)
        )

    def entity_attributes(self, meta, children):
        name, *attributes = children
        return _EntityAttributes(name, tuple(attributes))

    def param(self, meta, children):
        type_name, name = children
        return Param(str(type_name), str(name), _span_of(type_name))

    def preconditions(self, meta, children):
        return _Part("preconditions", self.conditions(children[0]), _span_of(meta))

    def effects(self, meta, children):
        return _Part("effects", self.effects_of(children[0]), _span_of(meta))

    def cost(self, meta, children):
        return _Part("cost", children[0], _span_of(meta))

    def duration(self, meta, children):
        return _Part("duration", children[0], _span_of(meta))

    def empty_case(self, meta, children):
        return _Part("empty", self.conditions(children[0]), _span_of(meta))

    def selector(self, meta, children):
        variable, kind, type_name, block, *rest = children
        ordering, direction = (rest[0], Direction(str(rest[1]))) if rest else (None, None)
        kind = SelectKind(str(kind))
        span = _span_of(variable)
        if kind is SelectKind.SELECT_ORDERED and ordering is None:
            self._error(span, "SELECTORDERED needs an ordering function and a direction")
        if kind is not SelectKind.SELECT_ORDERED and ordering is not None:
            self._error(span, f"{kind.value} does not take an ordering function")
            ordering, direction = None, None
        return SelectorDecl(
            str(variable), str(type_name), kind, self.conditions(block), ordering, direction, span
        )

    def subtask(self, meta, children):
        label = None
        if isinstance(children[0], Token):
            label = int(children[0])
            children = children[1:]
        task, *predecessors = children
        return _RawSubtask(label, task, tuple(int(p) for p in predecessors), _span_of(meta))

    def subtasks(self, meta, children):
        return _Part("subtasks", tuple(children), _span_of(meta))

    def method_case(self, meta, children):
        precondition: tuple = ()
        body_items: tuple = ()
        for part in children:
            if part.kind == "preconditions":
                precondition = part.value
            else:
                body_items = part.value
        selectors = tuple(i for i in body_items if isinstance(i, SelectorDecl))
        raw = [i for i in body_items if isinstance(i, _RawSubtask)]
        return MethodCase(precondition, self._body(selectors, raw, _span_of(meta)), _span_of(meta))

    def _body(self, selectors, raw_subtasks, span) -> MethodBody:
        subtasks = []
        seen = set()
        for position, raw in enumerate(raw_subtasks, start=1):
            label = raw.label if raw.label is not None else position
            if label <= 0:
                self._error(raw.span, f"subtask label must be a positive integer, got {label}")
            if label in seen:
                self._error(raw.span, f"duplicate subtask label {label}")
            seen.add(label)
            subtasks.append(Subtask(label, raw.task, raw.predecessors, raw.span))
        graph = nx.DiGraph()
        graph.add_nodes_from(seen)
        for subtask in subtasks:
            for predecessor in subtask.predecessors:
                if predecessor not in seen:
                    self._error(subtask.span, f"ordering constraint refers to unknown label {predecessor}")
                else:
                    graph.add_edge(predecessor, subtask.label)
        if not nx.is_directed_acyclic_graph(graph):
            self._error(span, "ordering constraints between subtasks form a cycle")
        return MethodBody(selectors, tuple(subtasks), span)

    def method(self, meta, children):
        name, *rest = children
        params = tuple(c for c in rest if isinstance(c, Param))
        empty = None
        cases = []
        for part in rest:
            if isinstance(part, _Part) and part.kind == "empty":
                if empty is not None:
                    self._error(part.span, f"method {name} has more than one empty case")
                empty = part.value
            elif isinstance(part, MethodCase):
                cases.append(part)
        return MethodDecl(str(name), params, tuple(cases), empty, _span_of(name))

    def action(self, meta, children):
        name, *rest = children
        params = tuple(c for c in rest if isinstance(c, Param))
        parts: Dict[str, object] = {}
        for part in rest:
            if isinstance(part, _Part):
                if part.kind in parts:
                    self._error(part.span, f"action {name} declares {part.kind} twice")
                parts[part.kind] = part.value
        if not params:
            self._error(_span_of(name), f"action {name} must have at least one parameter (the agent)")
        return OperatorDecl(
            str(name),
            params,
            parts.get("preconditions", ()),
            parts.get("effects", ()),
            parts.get("cost"),
            parts.get("duration"),
            _span_of(name),
        )

    def domain(self, meta, children):
        return list(children)

    # ---- problem ----

    def entity(self, meta, children):
        (name,) = children
        return Literal(EntityRef(str(name)), _span_of(name))

    def instantiation(self, meta, children):
        *names, type_name = children
        return Instantiation(tuple(str(n) for n in names), str(type_name), _span_of(meta))

    def initial_assign(self, meta, children):
        entity, attr, value = children
        return Assignment(str(entity), str(attr), "=", value.value, _span_of(entity))

    def initial_add(self, meta, children):
        entity, attr, value = children
        return Assignment(str(entity), str(attr), "<<=", value.value, _span_of(entity))

    def table_entry(self, meta, children):
        *keys, number = children
        return ("row", tuple(k.value for k in keys), to_rational(str(number)), _span_of(meta))

    def table_default(self, meta, children):
        (number,) = children
        return ("default", None, to_rational(str(number)), _span_of(meta))

    def table(self, meta, children):
        name, *rest = children
        key_types = tuple(str(t) for t in rest if isinstance(t, Token))
        rows = []
        default = None
        for item in rest:
            if isinstance(item, tuple):
                kind, key, value, span = item
                if kind == "default":
                    if default is not None:
                        self._error(span, f"table {name} has more than one default")
                    default = value
                else:
                    rows.append((key, value))
        return TableDecl(str(name), key_types, tuple(rows), default, _span_of(name))

    def goal_call(self, meta, children):
        name, *args = children
        return Call(str(name), tuple(args), _span_of(name))

    def goal(self, meta, children):
        return _Part("goal", tuple(children), _span_of(meta))

    def problem(self, meta, children):
        return list(children)

    def goal_list(self, meta, children):
        return tuple(children)


def _syntax_diagnostic(error: UnexpectedInput, text: str, source: str) -> Diagnostic:
    line = getattr(error, "line", 1) or 1
    column = getattr(error, "column", 1) or 1
    if isinstance(error, UnexpectedCharacters):
        char = text[error.pos_in_stream] if error.pos_in_stream < len(text) else "?"
        message = f"lexical error: unexpected character '{char}'"
    elif isinstance(error, UnexpectedEOF):
        message = "unexpected end of input"
    elif isinstance(error, UnexpectedToken):
        if error.token.type == "$END":
            message = "unexpected end of input"
        else:
            expected = ", ".join(sorted(error.expected))
            message = f"unexpected token '{error.token}' (expected one of: {expected})"
    else:
        message = str(error)
    return Diagnostic(source, line, column, "error", message)


def _parse_tree(text: str, start: str, source: str):
    text = normalize_quotes(text)
    try:
        return _lark_parser.parse(text, start=start)
    except UnexpectedInput as e:
        raise ParseError([_syntax_diagnostic(e, text, source)]) from None


# ---- semantic checks ----


class _Scope:
    """
    Variable name to type name; write-once within one scope.
    """

    def __init__(self, types: Optional[Dict[str, str]] = None):
        self.types = dict(types or {})

    def extended(self, variable: str, type_name: str) -> "_Scope":
        scope = _Scope(self.types)
        scope.types[variable] = type_name
        return scope


class _DomainChecker:
    """
    Resolves identifiers of a domain against its declarations.
    """

    def __init__(self, domain: DomainModel, source: str, diagnostics: List[Diagnostic]):
        self.domain = domain
        self.source = source
        self.diagnostics = diagnostics

    def error(self, span: Optional[Span], message: str):
        line, column = (span.line, span.column) if span else (1, 1)
        self.diagnostics.append(Diagnostic(self.source, line, column, "error", message))

    def known_type(self, name: str) -> bool:
        return name in PRIMITIVE_TYPES or self.domain.entity_type(name) is not None

    def check(self):
        for method in self.domain.methods:
            self.check_method(method)
        for operator in self.domain.operators:
            self.check_operator(operator)

    def param_scope(self, params) -> _Scope:
        scope = _Scope()
        for param in params:
            if not self.known_type(param.type_name):
                self.error(param.span, f"unknown type {param.type_name}")
            if param.name in scope.types:
                self.error(param.span, f"duplicate parameter {param.name}")
            scope.types[param.name] = param.type_name
        return scope

    def check_method(self, method: MethodDecl):
        scope = self.param_scope(method.params)
        if method.empty_condition is not None:
            self.check_conditions(method.empty_condition, scope)
        for case in method.cases:
            self.check_conditions(case.precondition, scope)
            body_scope = scope
            for selector in case.body.selectors:
                if self.domain.entity_type(selector.entity_type) is None:
                    self.error(selector.span, f"unknown type {selector.entity_type}")
                body_scope = self.bind(body_scope, selector.variable, selector.entity_type, selector.span)
                self.check_conditions(selector.filter, body_scope)
                if selector.ordering is not None:
                    for arg in selector.ordering.args:
                        self.expr_type(arg, body_scope)
            for subtask in case.body.subtasks:
                self.check_task(subtask.task, body_scope)

    def check_operator(self, operator: OperatorDecl):
        scope = self.param_scope(operator.params)
        self.check_conditions(operator.precondition, scope)
        self.check_effects(operator.effects, scope)
        for call in (operator.cost, operator.duration):
            if call is not None:
                for arg in call.args:
                    self.expr_type(arg, scope)

    def check_task(self, call: Call, scope: _Scope):
        for arg in call.args:
            self.expr_type(arg, scope)
        params = self.task_params(call.name)
        if params is None:
            self.error(call.span, f"unknown task {call.name}")
        elif len(params) != len(call.args):
            self.error(call.span, f"task {call.name} takes {len(params)} arguments, got {len(call.args)}")

    def task_params(self, name: str):
        operator = self.domain.operator(name)
        if operator is not None:
            return operator.params
        methods = self.domain.methods_for(name)
        return methods[0].params if methods else None

    def bind(self, scope: _Scope, variable: str, type_name: str, span) -> _Scope:
        if variable in scope.types:
            self.error(span, f"variable {variable} is already bound")
        return scope.extended(variable, type_name)

    def check_conditions(self, conditions, scope: _Scope):
        for cond in conditions:
            if isinstance(cond, Compare):
                self.expr_type(cond.left, scope)
                self.expr_type(cond.right, scope)
            elif isinstance(cond, Member):
                self.expr_type(cond.element, scope)
                self.collection_type(cond.collection, scope)
            elif isinstance(cond, (Exist, ForAll)):
                if self.domain.entity_type(cond.type_name) is None:
                    self.error(cond.span, f"unknown type {cond.type_name}")
                inner = self.bind(scope, cond.variable, cond.type_name, cond.span)
                self.check_conditions(cond.filter, inner)
                self.check_conditions(cond.body, inner)
            elif isinstance(cond, PredicateCall):
                for arg in cond.call.args:
                    self.expr_type(arg, scope)

    def check_effects(self, effects, scope: _Scope):
        for effect in effects:
            if isinstance(effect, (Assign, SetAdd, SetRemove)):
                decl = self.target_decl(effect.target, scope)
                self.expr_type(effect.value, scope)
                if decl is None:
                    continue
                if decl.is_static:
                    self.error(effect.span, f"cannot write static attribute {decl.name}")
                if isinstance(effect, Assign) and decl.is_set:
                    self.error(effect.span, f"use <<= or =>> to change set attribute {decl.name}")
                if not isinstance(effect, Assign) and not decl.is_set:
                    self.error(effect.span, f"attribute {decl.name} is not a set")
            elif isinstance(effect, If):
                self.check_conditions(effect.guard, scope)
                self.check_effects(effect.then, scope)
            elif isinstance(effect, ForAllEffect):
                if self.domain.entity_type(effect.type_name) is None:
                    self.error(effect.span, f"unknown type {effect.type_name}")
                inner = self.bind(scope, effect.variable, effect.type_name, effect.span)
                self.check_conditions(effect.filter, inner)
                self.check_effects(effect.body, inner)

    def target_decl(self, target: AttrAccess, scope: _Scope) -> Optional[AttributeDecl]:
        base_type = self.expr_type(target.base, scope)
        if base_type is None or base_type in PRIMITIVE_TYPES:
            return None
        decl = self.domain.attribute(base_type, target.attr)
        if decl is None:
            self.error(target.span, f"type {base_type} has no attribute {target.attr}")
        return decl

    def collection_type(self, expr, scope: _Scope) -> Optional[str]:
        if isinstance(expr, AttrAccess):
            decl = self.target_decl(expr, scope)
            if decl is not None and not decl.is_set:
                self.error(expr.span, f"attribute {decl.name} is not a set")
            return decl.value_type if decl else None
        return self.expr_type(expr, scope)

    def expr_type(self, expr, scope: _Scope) -> Optional[str]:
        """
        Static type of an expression, or None when it cannot be known.
        """
        if isinstance(expr, Var):
            if expr.name not in scope.types:
                self.error(expr.span, f"unbound variable {expr.name}")
                return None
            return scope.types[expr.name]
        if isinstance(expr, Literal):
            value = expr.value
            if isinstance(value, bool):
                return "bool"
            if isinstance(value, int):
                return "int"
            if isinstance(value, str):
                return "string"
            return None
        if isinstance(expr, AttrAccess):
            decl = self.target_decl(expr, scope)
            return decl.value_type if decl else None
        if isinstance(expr, Call):
            for arg in expr.args:
                self.expr_type(arg, scope)
        return None


def _build_domain(items, source: str, diagnostics: List[Diagnostic]) -> DomainModel:
    def error(span, message):
        line, column = (span.line, span.column) if span else (1, 1)
        diagnostics.append(Diagnostic(source, line, column, "error", message))

    type_order: List[str] = [AGENT]
    attributes: Dict[str, List[AttributeDecl]] = {AGENT: []}
    spans: Dict[str, Optional[Span]] = {AGENT: None}
    methods: List[MethodDecl] = []
    operators: List[OperatorDecl] = []

    for item in items:
        if isinstance(item, _EntityTypes):
            for token in item.names:
                name = str(token)
                if name in attributes:
                    error(_span_of(token), f"duplicate declaration of entity type {name}")
                    continue
                type_order.append(name)
                attributes[name] = []
                spans[name] = _span_of(token)
    for item in items:
        if isinstance(item, _EntityAttributes):
            name = str(item.name)
            if name not in attributes:
                error(_span_of(item.name), f"unknown type {name}")
                continue
            for decl in item.attributes:
                if any(a.name == decl.name for a in attributes[name]):
                    error(decl.span, f"duplicate declaration of attribute {name}.{decl.name}")
                    continue
                attributes[name].append(decl)
        elif isinstance(item, MethodDecl):
            methods.append(item)
        elif isinstance(item, OperatorDecl):
            operators.append(item)

    for name in type_order:
        for decl in attributes[name]:
            if decl.value_type not in PRIMITIVE_TYPES and decl.value_type not in attributes:
                error(decl.span, f"unknown type {decl.value_type}")

    seen_operators: Dict[str, OperatorDecl] = {}
    for operator in operators:
        if operator.name in seen_operators:
            error(operator.span, f"duplicate declaration of action {operator.name}")
        seen_operators[operator.name] = operator
    method_params: Dict[str, tuple] = {}
    for method in methods:
        if method.name in seen_operators:
            error(method.span, f"duplicate declaration: {method.name} is both a method and an action")
        signature = tuple(p.type_name for p in method.params)
        if method_params.setdefault(method.name, signature) != signature:
            error(method.span, f"methods for task {method.name} disagree on parameter types")

    return DomainModel(
        entity_types=tuple(EntityTypeDecl(n, tuple(attributes[n]), spans[n]) for n in type_order),
        methods=tuple(methods),
        operators=tuple(operators),
    )


def parse_domain(text: str, source: str = "<domain>") -> DomainModel:
    """
    Parses a domain text into a DomainModel.

    Args:
        text (str): The domain source.
        source (str): File name used in diagnostics.

    Returns:
        DomainModel: Entity schemas (with the built-in Agent type), methods
            and operators.

    Raises:
        ParseError: With every diagnostic found in the text.
    """
    tree = _parse_tree(text, "domain", source)
    transformer = _HatpTransformer(source)
    items = transformer.transform(tree)
    diagnostics = transformer.diagnostics
    domain = _build_domain(items, source, diagnostics)
    _DomainChecker(domain, source, diagnostics).check()
    if diagnostics:
        raise ParseError(diagnostics)
    logger.info(
        f"Parsed domain {source}: {len(domain.entity_types)} entity types, "
        f"{len(domain.methods)} methods, {len(domain.operators)} actions"
    )
    return domain


class _ProblemChecker:
    def __init__(self, domain: DomainModel, source: str, diagnostics: List[Diagnostic]):
        self.domain = domain
        self.source = source
        self.diagnostics = diagnostics
        self.entities: Dict[str, str] = {}

    def error(self, span: Optional[Span], message: str):
        line, column = (span.line, span.column) if span else (1, 1)
        self.diagnostics.append(Diagnostic(self.source, line, column, "error", message))

    def type_of(self, name: str) -> Optional[str]:
        return self.entities.get(name)

    def check_instantiations(self, instantiations):
        for inst in instantiations:
            if self.domain.entity_type(inst.type_name) is None:
                self.error(inst.span, f"new of unknown type {inst.type_name}")
            for name in inst.names:
                if name in self.entities:
                    self.error(inst.span, f"duplicate declaration of entity {name}")
                    continue
                self.entities[name] = inst.type_name

    def check_value(self, value, type_name: str, span, what: str):
        if value is None:
            return
        if isinstance(value, EntityRef) and value.name not in self.entities:
            self.error(span, f"unknown entity {value.name}")
            return
        if not matches_type(value, type_name, self.type_of):
            found = self.type_of(value.name) if isinstance(value, EntityRef) else type(value).__name__
            self.error(span, f"type mismatch for {what}: expected {type_name}, got {found}")

    def check_assignments(self, assignments):
        for assignment in assignments:
            type_name = self.type_of(assignment.entity)
            if type_name is None:
                self.error(assignment.span, f"unknown entity {assignment.entity}")
                continue
            decl = self.domain.attribute(type_name, assignment.attr)
            if decl is None:
                self.error(assignment.span, f"assignment to undeclared attribute {type_name}.{assignment.attr}")
                continue
            if assignment.op == "=" and decl.is_set:
                self.error(assignment.span, f"use <<= to add to set attribute {assignment.attr}")
            if assignment.op == "<<=" and not decl.is_set:
                self.error(assignment.span, f"attribute {assignment.attr} is not a set")
            self.check_value(
                assignment.value, decl.value_type, assignment.span, f"{assignment.entity}.{assignment.attr}"
            )

    def check_tables(self, tables):
        names = set()
        for table in tables:
            if table.name in names:
                self.error(table.span, f"duplicate declaration of table {table.name}")
            names.add(table.name)
            for key_type in table.key_types:
                if key_type not in PRIMITIVE_TYPES and self.domain.entity_type(key_type) is None:
                    self.error(table.span, f"unknown type {key_type}")
            keys = set()
            for key, _ in table.rows:
                if len(key) != len(table.key_types):
                    self.error(table.span, f"table {table.name} row {key} has the wrong number of keys")
                    continue
                if key in keys:
                    self.error(table.span, f"duplicate row in table {table.name}")
                keys.add(key)
                for value, key_type in zip(key, table.key_types):
                    self.check_value(value, key_type, table.span, f"table {table.name}")

    def check_goal(self, goal):
        for call in goal:
            operator = self.domain.operator(call.name)
            methods = self.domain.methods_for(call.name)
            params = operator.params if operator else (methods[0].params if methods else None)
            if params is None:
                self.error(call.span, f"unknown task {call.name}")
                continue
            if len(params) != len(call.args):
                self.error(call.span, f"task {call.name} takes {len(params)} arguments, got {len(call.args)}")
                continue
            for param, arg in zip(params, call.args):
                self.check_value(arg.value, param.type_name, call.span, f"{call.name} argument {param.name}")


def parse_problem(text: str, domain: DomainModel, source: str = "<problem>") -> ProblemModel:
    """
    Parses a problem text against a parsed domain.

    Args:
        text (str): The problem source.
        domain (DomainModel): The schema the problem instantiates.
        source (str): File name used in diagnostics.

    Returns:
        ProblemModel: Instantiations, initial assignments, tables and goal.

    Raises:
        ParseError: On syntax errors, unknown types, undeclared attributes and
            type mismatches.
    """
    tree = _parse_tree(text, "problem", source)
    transformer = _HatpTransformer(source)
    items = transformer.transform(tree)
    diagnostics = transformer.diagnostics

    goal: tuple = ()
    for item in items:
        if isinstance(item, _Part) and item.kind == "goal":
            goal = goal + item.value
    problem = ProblemModel(
        instantiations=tuple(i for i in items if isinstance(i, Instantiation)),
        assignments=tuple(i for i in items if isinstance(i, Assignment)),
        tables=tuple(i for i in items if isinstance(i, TableDecl)),
        goal=goal,
    )
    checker = _ProblemChecker(domain, source, diagnostics)
    checker.check_instantiations(problem.instantiations)
    checker.check_assignments(problem.assignments)
    checker.check_tables(problem.tables)
    checker.check_goal(problem.goal)
    if diagnostics:
        raise ParseError(diagnostics)
    logger.info(
        f"Parsed problem {source}: {len(problem.entity_types)} entities, "
        f"{len(problem.tables)} tables, {len(problem.goal)} goal tasks"
    )
    return problem


def parse_goal(text: str, domain: DomainModel, problem: ProblemModel, source: str = "<goal>") -> Tuple[Call, ...]:
    """
    Parses a goal override such as "Transport(C1,P21); Transport(C2,P22)".
    """
    tree = _parse_tree(text, "goal_list", source)
    transformer = _HatpTransformer(source)
    goal = transformer.transform(tree)
    diagnostics = transformer.diagnostics
    checker = _ProblemChecker(domain, source, diagnostics)
    checker.entities = dict(problem.entity_types)
    checker.check_goal(goal)
    if diagnostics:
        raise ParseError(diagnostics)
    return goal
