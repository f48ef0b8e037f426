"""
registry.py

Name to implementation registry for cost, duration and ordering functions
and evaluable predicates.

Lookup order for a name and kind: explicit registration, then the built-in
constants `const_0` / `const_1` (numeric kinds), then a table of the problem
file with that name. The registry is frozen before a search starts and only
read afterwards.

Usage:
    registry = FunctionRegistry.from_problem(problem)
    registry.register("reachable", FunctionKind.EVALUABLE, my_solver)
    registry.freeze()
"""

import math
from fractions import Fraction
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

from ..dsl.ast import ProblemModel, TableDecl
from ..errors import CostFunctionError, DuplicateRegistrationError, RegistryError, UnknownFunctionError
from ..logger import setup_logger
from .base import NUMERIC_KINDS, Attachment, EvaluablePredicate, ExternalFunction, FunctionKind, Outcome
from .functions import CallableFunction, ConstantFunction, TableFunction
from .predicates import CallablePredicate, TablePredicate

logger = setup_logger(__name__)

Implementation = Union[ExternalFunction, EvaluablePredicate, Callable, int, float, str, Fraction]


class FunctionRegistry:
    """
    Resolves function references of a domain to implementations.
    """

    BUILTINS: Dict[str, ExternalFunction] = {
        "const_0": ConstantFunction(0),
        "const_1": ConstantFunction(1),
    }

    def __init__(self, tables: Sequence[TableDecl] = ()):
        self.functions: Dict[FunctionKind, Dict[str, object]] = {kind: {} for kind in FunctionKind}
        self.tables: Dict[str, TableDecl] = {t.name: t for t in tables}
        self._table_functions: Dict[str, TableFunction] = {}
        self._table_predicates: Dict[str, TablePredicate] = {}
        self.frozen = False

    @classmethod
    def from_problem(cls, problem: ProblemModel) -> "FunctionRegistry":
        """
        Creates a registry whose fallback lookups are the tables of a problem.
        """
        return cls(problem.tables)

    def register(self, name: str, kind: Union[FunctionKind, str], impl: Implementation) -> None:
        """
        Register an implementation for a name and kind.

        Args:
            name (str): The name used in the DSL.
            kind (FunctionKind): cost, duration, ordering or evaluable.
            impl: An ExternalFunction / EvaluablePredicate, a host callable
                (`fn(state, args)` for numeric kinds, `fn(state, args, index,
                history)` for predicates) or a constant number.

        Raises:
            DuplicateRegistrationError: If the name is already registered for
                that kind.
            RegistryError: If the registry is frozen.
        """
        if self.frozen:
            raise RegistryError(f"Cannot register {name}: registry is frozen")
        kind = FunctionKind(kind)
        if name in self.functions[kind]:
            raise DuplicateRegistrationError(f"{kind.value} function {name} is already registered")
        self.functions[kind][name] = self._wrap(kind, impl)
        logger.info(f"Registered {kind.value} function: {name}")

    @staticmethod
    def _wrap(kind: FunctionKind, impl: Implementation):
        if kind is FunctionKind.EVALUABLE:
            if isinstance(impl, EvaluablePredicate):
                return impl
            if callable(impl):
                return CallablePredicate(impl)
            raise RegistryError(f"Evaluable predicate implementation must be callable, got {impl!r}")
        if isinstance(impl, ExternalFunction):
            return impl
        if callable(impl):
            return CallableFunction(impl)
        return ConstantFunction(impl)

    def freeze(self) -> "FunctionRegistry":
        self.frozen = True
        return self

    def resolve(self, name: str, kind: FunctionKind):
        """
        Returns the implementation for a name and kind, or None.
        """
        found = self.functions[kind].get(name)
        if found is not None:
            return found
        if kind in NUMERIC_KINDS and name in self.BUILTINS:
            return self.BUILTINS[name]
        table = self.tables.get(name)
        if table is None:
            return None
        if kind is FunctionKind.EVALUABLE:
            return self._table_predicates.setdefault(name, TablePredicate(table))
        return self._table_functions.setdefault(name, TableFunction(table))

    def resolves(self, name: str, kind: FunctionKind) -> bool:
        return self.resolve(name, kind) is not None

    def _require(self, name: str, kind: FunctionKind):
        impl = self.resolve(name, kind)
        if impl is None:
            raise UnknownFunctionError(f"No {kind.value} function named {name}")
        return impl

    def _numeric(self, name: str, kind: FunctionKind, state, args: Tuple) -> Fraction:
        value = self._require(name, kind)(state, tuple(args))
        if not isinstance(value, Fraction):
            if isinstance(value, float) and not math.isfinite(value):
                raise CostFunctionError(name, value)
            value = Fraction(value)
        return value

    def eval_cost(self, name: str, state, args: Tuple) -> Fraction:
        """
        Evaluates a cost function.

        Raises:
            CostFunctionError: If the value is negative (or not finite).
            UnknownFunctionError: If nothing resolves the name.
        """
        try:
            value = self._numeric(name, FunctionKind.COST, state, args)
        except ValueError as e:
            raise CostFunctionError(name, str(e)) from e
        if value < 0:
            raise CostFunctionError(name, value)
        return value

    def eval_duration(self, name: str, state, args: Tuple) -> Fraction:
        try:
            value = self._numeric(name, FunctionKind.DURATION, state, args)
        except ValueError as e:
            raise CostFunctionError(name, str(e)) from e
        if value < 0:
            raise CostFunctionError(name, value)
        return value

    def ordering_key(self, name: str, state, args: Tuple) -> Fraction:
        return self._numeric(name, FunctionKind.ORDERING, state, args)

    def eval_value(self, name: str, state, args: Tuple) -> Fraction:
        """
        Value of a function call used inside an expression: the first numeric
        kind (cost, duration, ordering) that resolves the name.
        """
        for kind in NUMERIC_KINDS:
            if self.resolves(name, kind):
                return self._numeric(name, kind, state, args)
        raise UnknownFunctionError(f"No function named {name}")

    def eval_predicate(
        self,
        name: str,
        state,
        args: Tuple,
        start_index: int = 0,
        history: Sequence[Attachment] = (),
    ) -> Outcome:
        """
        Returns the first solution with index >= start_index, or
        NO_MORE_SOLUTIONS. Never changes the state.
        """
        predicate = self._require(name, FunctionKind.EVALUABLE)
        outcome = predicate.solution(state, tuple(args), start_index, tuple(history))
        if outcome and outcome.index < start_index:
            raise RegistryError(
                f"Predicate {name} returned solution {outcome.index} for start index {start_index}"
            )
        return outcome

    def arity(self, name: str, kind: FunctionKind) -> Optional[int]:
        impl = self.resolve(name, kind)
        return impl.arity if impl is not None else None
