"""
Evaluable predicate implementations.

    - CallablePredicate: a host solver `fn(state, args, index, history)`.
    - StubPredicate: canned solutions, the same for every argument tuple.
    - TablePredicate: a problem table read as "number of solutions".
"""

from typing import Callable, Sequence, Tuple, Union

from ..dsl.ast import TableDecl
from ..values import format_value
from .base import NO_MORE_SOLUTIONS, Attachment, EvaluablePredicate, NoMoreSolutions, Outcome, Solution
from .functions import TableFunction


def _payload(value: Union[bytes, str]) -> bytes:
    return value if isinstance(value, bytes) else str(value).encode("utf-8")


class CallablePredicate(EvaluablePredicate):
    """
    Wraps a host solver. The callable may return a Solution, a bytes or str
    payload (taken as the solution at the requested index), or None /
    NO_MORE_SOLUTIONS.
    """

    def __init__(self, fn: Callable, arity=None):
        self.fn = fn
        self._arity = arity

    @property
    def arity(self):
        return self._arity

    def solve(self, state, args: Tuple, index: int, history: Sequence[Attachment]) -> Outcome:
        result = self.fn(state, args, index, history)
        if result is None or isinstance(result, NoMoreSolutions):
            return NO_MORE_SOLUTIONS
        if isinstance(result, Solution):
            return result
        return Solution(_payload(result), index)


class StubPredicate(EvaluablePredicate):
    def __init__(self, payloads: Sequence[Union[bytes, str]]):
        self.payloads = [_payload(p) for p in payloads]

    def solve(self, state, args: Tuple, index: int, history: Sequence[Attachment]) -> Outcome:
        if index < len(self.payloads):
            return Solution(self.payloads[index], index)
        return NO_MORE_SOLUTIONS


class TablePredicate(EvaluablePredicate):
    """
    The value of a row is the number of alternative solutions for that argument
    tuple; 0 means infeasible. Solution i carries the payload "name(args)#i".
    """

    def __init__(self, table: TableDecl):
        self.table = table
        self.lookup = TableFunction(table)

    @property
    def arity(self):
        return len(self.table.key_types)

    def solve(self, state, args: Tuple, index: int, history: Sequence[Attachment]) -> Outcome:
        count = self.lookup(state, args)
        if index >= count:
            return NO_MORE_SOLUTIONS
        shown = ",".join(format_value(a) for a in args)
        return Solution(f"{self.table.name}({shown})#{index}".encode("utf-8"), index)
