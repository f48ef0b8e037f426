"""
Pretty-printer for domain and problem models.

The output is canonical (labels always written, one statement per line) and
re-parses to a structurally equal model.
"""

from typing import List

from ..utils import format_rational
from ..values import format_value
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
    Literal,
    Member,
    MethodDecl,
    OperatorDecl,
    PredicateCall,
    ProblemModel,
    SetAdd,
    SetRemove,
    Var,
)

_INDENT = "    "


def format_expr(expr) -> str:
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Literal):
        return format_value(expr.value)
    if isinstance(expr, AttrAccess):
        return f"{format_expr(expr.base)}.{expr.attr}"
    if isinstance(expr, Call):
        return f"{expr.name}({', '.join(format_expr(a) for a in expr.args)})"
    raise TypeError(f"Not an expression: {expr!r}")


def _block(statements, depth: int, render) -> str:
    if not statements:
        return "{}"
    inner = "\n".join(render(s, depth + 1) for s in statements)
    return "{\n" + inner + "\n" + _INDENT * depth + "}"


def _condition(cond, depth: int) -> str:
    pad = _INDENT * depth
    if isinstance(cond, Compare):
        return f"{pad}{format_expr(cond.left)} {cond.op} {format_expr(cond.right)};"
    if isinstance(cond, Member):
        op = "!>>" if cond.negated else ">>"
        return f"{pad}{format_expr(cond.element)} {op} {format_expr(cond.collection)};"
    if isinstance(cond, PredicateCall):
        return f"{pad}{format_expr(cond.call)};"
    if isinstance(cond, (Exist, ForAll)):
        keyword = "EXIST" if isinstance(cond, Exist) else "FORALL"
        return (
            f"{pad}{keyword}({cond.type_name} {cond.variable}, "
            f"{_block(cond.filter, depth, _condition)}, {_block(cond.body, depth, _condition)});"
        )
    raise TypeError(f"Not a condition: {cond!r}")


def _effect(effect, depth: int) -> str:
    pad = _INDENT * depth
    if isinstance(effect, (Assign, SetAdd, SetRemove)):
        op = {Assign: "=", SetAdd: "<<=", SetRemove: "=>>"}[type(effect)]
        return f"{pad}{format_expr(effect.target)} {op} {format_expr(effect.value)};"
    if isinstance(effect, If):
        return f"{pad}IF {_block(effect.guard, depth, _condition)} {_block(effect.then, depth, _effect)}"
    if isinstance(effect, ForAllEffect):
        return (
            f"{pad}FORALL({effect.type_name} {effect.variable}, "
            f"{_block(effect.filter, depth, _condition)}, {_block(effect.body, depth, _effect)});"
        )
    raise TypeError(f"Not an effect: {effect!r}")


def _params(params) -> str:
    return ", ".join(f"{p.type_name} {p.name}" for p in params)


def _method(method: MethodDecl) -> List[str]:
    lines = [f"method {method.name}({_params(method.params)})", "{"]
    if method.empty_condition is not None:
        lines.append(f"{_INDENT}empty {_block(method.empty_condition, 1, _condition)};")
    for case in method.cases:
        lines.append(f"{_INDENT}{{")
        if case.precondition:
            lines.append(f"{_INDENT * 2}preconditions {_block(case.precondition, 2, _condition)};")
        lines.append(f"{_INDENT * 2}subtasks {{")
        pad = _INDENT * 3
        for selector in case.body.selectors:
            ordering = ""
            if selector.ordering is not None:
                ordering = f", {format_expr(selector.ordering)}, {selector.direction.value}"
            lines.append(
                f"{pad}{selector.variable} = {selector.kind.value}({selector.entity_type}, "
                f"{_block(selector.filter, 3, _condition)}{ordering});"
            )
        for subtask in case.body.subtasks:
            after = ""
            if subtask.predecessors:
                after = " > " + ", ".join(str(p) for p in subtask.predecessors)
            lines.append(f"{pad}{subtask.label}: {format_expr(subtask.task)}{after};")
        lines.append(f"{_INDENT * 2}}};")
        lines.append(f"{_INDENT}}}")
    lines.append("}")
    return lines


def _operator(operator: OperatorDecl) -> List[str]:
    lines = [f"action {operator.name}({_params(operator.params)})", "{"]
    if operator.precondition:
        lines.append(f"{_INDENT}preconditions {_block(operator.precondition, 1, _condition)};")
    if operator.effects:
        lines.append(f"{_INDENT}effects {_block(operator.effects, 1, _effect)};")
    if operator.cost is not None:
        lines.append(f"{_INDENT}cost{{{format_expr(operator.cost)}}};")
    if operator.duration is not None:
        lines.append(f"{_INDENT}duration{{{format_expr(operator.duration)}}};")
    lines.append("}")
    return lines


def format_domain(domain: DomainModel) -> str:
    """
    Renders a domain model as .hatp text.
    """
    lines: List[str] = []
    declared = [t.name for t in domain.entity_types if t.name != AGENT]
    if declared:
        lines.append(f"define entityType {', '.join(declared)};")
    for entity_type in domain.entity_types:
        if not entity_type.attributes:
            continue
        lines.append(f"define entityAttributes {entity_type.name} {{")
        for a in entity_type.attributes:
            lines.append(f"{_INDENT}{a.mutability.value} {a.arity.value} {a.value_type} {a.name};")
        lines.append("}")
    for method in domain.methods:
        lines.append("")
        lines.extend(_method(method))
    for operator in domain.operators:
        lines.append("")
        lines.extend(_operator(operator))
    return "\n".join(lines) + "\n"


def format_problem(problem: ProblemModel) -> str:
    """
    Renders a problem model as .hatpp text.
    """
    lines: List[str] = []
    for inst in problem.instantiations:
        lines.append(f"{', '.join(inst.names)} = new {inst.type_name};")
    for assignment in problem.assignments:
        lines.append(f"{assignment.entity}.{assignment.attr} {assignment.op} {format_value(assignment.value)};")
    for table in problem.tables:
        lines.append(f"table {table.name}({', '.join(table.key_types)}) {{")
        for key, value in table.rows:
            keys = ", ".join(format_value(k) for k in key)
            lines.append(f"{_INDENT}({keys}) = {format_rational(value)};")
        if table.default is not None:
            lines.append(f"{_INDENT}default = {format_rational(table.default)};")
        lines.append("}")
    if problem.goal:
        lines.append("goal {")
        for call in problem.goal:
            lines.append(f"{_INDENT}{format_expr(call)};")
        lines.append("};")
    return "\n".join(lines) + "\n"
