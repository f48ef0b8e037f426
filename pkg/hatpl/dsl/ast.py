"""
ast.py

Syntax trees for HATP domain and problem files.

Every node is a frozen dataclass built from tuples, so trees are hashable and
compare structurally. Source spans are carried for diagnostics but excluded
from comparison, so a tree re-parsed from its pretty-printed form compares
equal to the original.
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Dict, Optional, Tuple, Union

from ..values import Value

AGENT = "Agent"


@dataclass(frozen=True)
class Span:
    line: int
    column: int


def _span():
    return field(default=None, compare=False, repr=False)


class Mutability(str, Enum):
    STATIC = "static"
    DYNAMIC = "dynamic"


class Arity(str, Enum):
    ATOM = "atom"
    SET = "set"


class SelectKind(str, Enum):
    SELECT = "SELECT"
    SELECT_ORDERED = "SELECTORDERED"
    SELECT_ONCE = "SELECTONCE"


class Direction(str, Enum):
    ASCENDING = ">"
    DESCENDING = "<"


## EXPRESSIONS
@dataclass(frozen=True)
class Var:
    name: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Literal:
    value: Value
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class AttrAccess:
    base: "Expr"
    attr: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Call:
    name: str
    args: Tuple["Expr", ...]
    span: Optional[Span] = _span()


Expr = Union[Var, Literal, AttrAccess, Call]


## CONDITIONS
@dataclass(frozen=True)
class Compare:
    op: str  # "==" or "!="
    left: Expr
    right: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Member:
    element: Expr
    collection: Expr
    negated: bool
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Exist:
    variable: str
    type_name: str
    filter: Tuple["Condition", ...]
    body: Tuple["Condition", ...]
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class ForAll:
    variable: str
    type_name: str
    filter: Tuple["Condition", ...]
    body: Tuple["Condition", ...]
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class PredicateCall:
    call: Call
    span: Optional[Span] = _span()


Condition = Union[Compare, Member, Exist, ForAll, PredicateCall]


## EFFECTS
@dataclass(frozen=True)
class Assign:
    target: AttrAccess
    value: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class SetAdd:
    target: AttrAccess
    value: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class SetRemove:
    target: AttrAccess
    value: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class If:
    guard: Tuple[Condition, ...]
    then: Tuple["Effect", ...]
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class ForAllEffect:
    variable: str
    type_name: str
    filter: Tuple[Condition, ...]
    body: Tuple["Effect", ...]
    span: Optional[Span] = _span()


Effect = Union[Assign, SetAdd, SetRemove, If, ForAllEffect]


## DECLARATIONS
@dataclass(frozen=True)
class AttributeDecl:
    name: str
    mutability: Mutability
    arity: Arity
    value_type: str
    span: Optional[Span] = _span()

    @property
    def is_static(self) -> bool:
        return self.mutability is Mutability.STATIC

    @property
    def is_set(self) -> bool:
        return self.arity is Arity.SET


@dataclass(frozen=True)
class EntityTypeDecl:
    name: str
    attributes: Tuple[AttributeDecl, ...] = ()
    span: Optional[Span] = _span()

    def attribute(self, name: str) -> Optional[AttributeDecl]:
        for attribute in self.attributes:
            if attribute.name == name:
                return attribute
        return None


@dataclass(frozen=True)
class Param:
    type_name: str
    name: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class SelectorDecl:
    variable: str
    entity_type: str
    kind: SelectKind
    filter: Tuple[Condition, ...]
    ordering: Optional[Call] = None
    direction: Optional[Direction] = None
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Subtask:
    label: int
    task: Call
    predecessors: Tuple[int, ...] = ()
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class MethodBody:
    selectors: Tuple[SelectorDecl, ...]
    subtasks: Tuple[Subtask, ...]
    span: Optional[Span] = _span()

    @property
    def ordering(self) -> Tuple[Tuple[int, Tuple[int, ...]], ...]:
        return tuple((s.label, s.predecessors) for s in self.subtasks)


@dataclass(frozen=True)
class MethodCase:
    precondition: Tuple[Condition, ...]
    body: MethodBody
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class MethodDecl:
    name: str
    params: Tuple[Param, ...]
    cases: Tuple[MethodCase, ...]
    empty_condition: Optional[Tuple[Condition, ...]] = None
    span: Optional[Span] = _span()

    @property
    def task_name(self) -> str:
        return self.name


@dataclass(frozen=True)
class OperatorDecl:
    name: str
    params: Tuple[Param, ...]
    precondition: Tuple[Condition, ...] = ()
    effects: Tuple[Effect, ...] = ()
    cost: Optional[Call] = None
    duration: Optional[Call] = None
    span: Optional[Span] = _span()

    @property
    def attachment_site(self) -> Optional[PredicateCall]:
        """
        The first top-level evaluable predicate of the precondition; its
        solution is attached to the plan step.
        """
        for cond in self.precondition:
            if isinstance(cond, PredicateCall):
                return cond
        return None


@dataclass(frozen=True)
class DomainModel:
    """
    A parsed domain: entity schemas, methods and operators.

    `Agent` is always present in `entity_types`.
    """

    entity_types: Tuple[EntityTypeDecl, ...] = (EntityTypeDecl(AGENT),)
    methods: Tuple[MethodDecl, ...] = ()
    operators: Tuple[OperatorDecl, ...] = ()

    @cached_property
    def types_by_name(self) -> Dict[str, EntityTypeDecl]:
        return {t.name: t for t in self.entity_types}

    @cached_property
    def operators_by_name(self) -> Dict[str, OperatorDecl]:
        return {o.name: o for o in self.operators}

    @cached_property
    def methods_by_task(self) -> Dict[str, Tuple[MethodDecl, ...]]:
        grouped: Dict[str, list] = {}
        for method in self.methods:
            grouped.setdefault(method.task_name, []).append(method)
        return {k: tuple(v) for k, v in grouped.items()}

    def entity_type(self, name: str) -> Optional[EntityTypeDecl]:
        return self.types_by_name.get(name)

    def attribute(self, type_name: str, attr: str) -> Optional[AttributeDecl]:
        decl = self.types_by_name.get(type_name)
        return decl.attribute(attr) if decl else None

    def operator(self, name: str) -> Optional[OperatorDecl]:
        return self.operators_by_name.get(name)

    def methods_for(self, task: str) -> Tuple[MethodDecl, ...]:
        return self.methods_by_task.get(task, ())

    def is_task(self, name: str) -> bool:
        return name in self.operators_by_name or name in self.methods_by_task


## PROBLEM
@dataclass(frozen=True)
class Instantiation:
    names: Tuple[str, ...]
    type_name: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Assignment:
    entity: str
    attr: str
    op: str  # "=" or "<<="
    value: Value
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class TableDecl:
    name: str
    key_types: Tuple[str, ...]
    rows: Tuple[Tuple[Tuple[Value, ...], Fraction], ...]
    default: Optional[Fraction] = None
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class ProblemModel:
    instantiations: Tuple[Instantiation, ...] = ()
    assignments: Tuple[Assignment, ...] = ()
    tables: Tuple[TableDecl, ...] = ()
    goal: Tuple[Call, ...] = ()

    @cached_property
    def entity_types(self) -> Dict[str, str]:
        """
        Entity name to type name, in declaration order.
        """
        types: Dict[str, str] = {}
        for inst in self.instantiations:
            for name in inst.names:
                types.setdefault(name, inst.type_name)
        return types

    def table(self, name: str) -> Optional[TableDecl]:
        for table in self.tables:
            if table.name == name:
                return table
        return None
