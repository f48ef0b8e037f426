"""
Numeric external functions: constants, host callables and problem tables.
"""

from fractions import Fraction
from typing import Callable, Dict, Tuple

from ..dsl.ast import TableDecl
from ..errors import EvaluationError
from ..utils import Number, to_rational
from ..values import format_value
from .base import ExternalFunction


class ConstantFunction(ExternalFunction):
    def __init__(self, value: Number):
        self.value = to_rational(value)

    def __call__(self, state, args: Tuple) -> Fraction:
        return self.value

    def __repr__(self):
        return f"ConstantFunction({self.value})"


class CallableFunction(ExternalFunction):
    """
    Wraps a host callable `fn(state, args) -> number`.
    """

    def __init__(self, fn: Callable, arity=None):
        self.fn = fn
        self._arity = arity

    def __call__(self, state, args: Tuple) -> Fraction:
        return to_rational(self.fn(state, args))

    @property
    def arity(self):
        return self._arity


class TableFunction(ExternalFunction):
    """
    Looks up ground arguments in a declarative table of the problem file.
    """

    def __init__(self, table: TableDecl):
        self.table = table
        self.rows: Dict[Tuple, Fraction] = {key: value for key, value in table.rows}

    @property
    def arity(self):
        return len(self.table.key_types)

    def __call__(self, state, args: Tuple) -> Fraction:
        key = tuple(args)
        if key in self.rows:
            return self.rows[key]
        if self.table.default is not None:
            return self.table.default
        shown = ", ".join(format_value(a) for a in key)
        raise EvaluationError(f"Table {self.table.name} has no row for ({shown}) and no default")
