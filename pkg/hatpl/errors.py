"""
Exception hierarchy and source diagnostics.
"""

from dataclasses import dataclass
from typing import List


@dataclass(frozen=True)
class Diagnostic:
    source: str
    line: int
    column: int
    severity: str
    message: str

    def __str__(self):
        return f"{self.source}:{self.line}:{self.column}: {self.severity}: {self.message}"


class HatplError(Exception):
    pass


class ParseError(HatplError):
    """
    Raised when a domain, problem or goal text cannot be turned into a model.
    Carries every diagnostic found in the text.
    """

    def __init__(self, diagnostics: List[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


class StateError(HatplError):
    pass


class StaticWriteError(StateError):
    pass


class EvaluationError(HatplError):
    pass


class UnboundVariableError(EvaluationError):
    def __init__(self, variable: str):
        self.variable = variable
        super().__init__(f"Unbound variable: {variable}")


class RegistryError(HatplError):
    pass


class DuplicateRegistrationError(RegistryError):
    pass


class UnknownFunctionError(RegistryError):
    pass


class CostFunctionError(RegistryError):
    """
    A cost or duration function returned a negative or non-finite value.
    """

    def __init__(self, name: str, value):
        self.name = name
        self.value = value
        super().__init__(f"Function {name} returned {value!r}; expected a finite non-negative number")


class ExternalSolverError(HatplError):
    """
    Transient failure of an external solver. Retried before giving up.
    """


class PlanningError(HatplError):
    pass


class UndefinedTaskError(PlanningError):
    def __init__(self, task: str):
        self.task = task
        super().__init__(f"Undefined task: {task}")


_NO_SOLUTION_REASONS = {
    "exhausted": "search exhausted",
    "node limit": "node limit reached",
    "depth limit": "depth limit reached",
}


class NoSolutionError(PlanningError):
    """
    The search ended without a plan.

    Attributes:
        reason (str): "exhausted", "node limit" or "depth limit".
        stats: The SearchStatistics of the failed search.
    """

    def __init__(self, reason: str, stats=None):
        self.reason = reason
        self.stats = stats
        super().__init__(f"no solution ({_NO_SOLUTION_REASONS.get(reason, reason)})")

    @property
    def exhausted(self) -> bool:
        return self.reason == "exhausted"


class LinearizationError(PlanningError):
    pass


class FilterConfigError(HatplError):
    pass

