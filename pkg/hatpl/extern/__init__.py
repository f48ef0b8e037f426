from .base import (
    NO_MORE_SOLUTIONS,
    Attachment,
    EvaluablePredicate,
    ExternalFunction,
    FunctionKind,
    NoMoreSolutions,
    Solution,
)
from .functions import CallableFunction, ConstantFunction, TableFunction
from .predicates import CallablePredicate, StubPredicate, TablePredicate
from .registry import FunctionRegistry
