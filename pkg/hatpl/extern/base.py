"""
base.py

Base classes for functions the planner calls outside the DSL: cost, duration
and ordering functions that return a rational, and evaluable predicates that
enumerate indexed alternative solutions (e.g. trajectories from a geometric
solver).

Dependencies:
    - tenacity: For retrying transient failures of external solvers.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence, Tuple, Union

from tenacity import before_sleep_log, retry, retry_if_exception_type, stop_after_attempt, wait_fixed

from ..errors import ExternalSolverError
from ..logger import setup_logger

logger = setup_logger(__name__)


class FunctionKind(str, Enum):
    COST = "cost"
    DURATION = "duration"
    ORDERING = "ordering"
    EVALUABLE = "evaluable"


NUMERIC_KINDS = (FunctionKind.COST, FunctionKind.DURATION, FunctionKind.ORDERING)


@dataclass(frozen=True)
class Solution:
    payload: bytes
    index: int


class NoMoreSolutions:
    """
    Returned once a predicate has no solution at or after the requested index.
    Falsy, so `if solution:` reads naturally.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __bool__(self):
        return False

    def __repr__(self):
        return "NO_MORE_SOLUTIONS"


NO_MORE_SOLUTIONS = NoMoreSolutions()

Outcome = Union[Solution, NoMoreSolutions]


@dataclass(frozen=True)
class Attachment:
    """
    The solution of an evaluable predicate stored on a plan step.
    """

    predicate: str
    index: int
    payload: bytes


class ExternalFunction(ABC):
    """
    A function over (state, ground args) returning a rational.
    """

    @abstractmethod
    def __call__(self, state, args: Tuple) -> Fraction:
        pass

    @property
    def arity(self):
        """
        Number of arguments accepted, or None when any number is.
        """
        return None


class EvaluablePredicate(ABC):
    """
    Abstract base class for predicates computed by an external procedure.

    For a fixed (state, args, history) the solutions are enumerated by
    increasing index; once `solve` returns NO_MORE_SOLUTIONS for an index it
    does so for every larger index too.
    """

    @abstractmethod
    def solve(self, state, args: Tuple, index: int, history: Sequence[Attachment]) -> Outcome:
        """
        Returns the solution with the given index, or NO_MORE_SOLUTIONS.

        Args:
            state (WorldState): The symbolic state; must not be changed.
            args (tuple): Ground argument values.
            index (int): Solution index, starting at 0.
            history (Sequence[Attachment]): Attachments of the earlier plan steps.

        Raises:
            ExternalSolverError: On a transient failure of the solver.
        """
        pass

    @retry(
        retry=retry_if_exception_type(ExternalSolverError),
        stop=stop_after_attempt(3),
        wait=wait_fixed(0.05),
        before_sleep=before_sleep_log(logger, logging.DEBUG),
        reraise=True,
    )
    def solution(self, state, args: Tuple, index: int, history: Sequence[Attachment] = ()) -> Outcome:
        """
        Calls `solve`, retrying transient solver failures.
        """
        return self.solve(state, args, index, history)

    @property
    def arity(self):
        return None
