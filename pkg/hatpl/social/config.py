"""
config.py

Filter configuration for socially acceptable plans, read from the "filters"
section of a JSON file:

    {
      "filters": {
        "maxWaitPerAgent": 10,
        "maxEffortImbalance": "5/2",
        "maxIntricacy": 4,
        "forbiddenSequences": [
          {"scope": "global", "pattern": ["Put(*,C1,*)", {"action": "Take", "args": ["*", "C1", "*"]}]}
        ],
        "effortWeights": {"H1": "1/2"},
        "imbalanceMode": "difference"
      }
    }

Dependencies:
    - pydantic: For validating the configuration.
"""

import json
import re
from fractions import Fraction
from pathlib import Path
from typing import Annotated, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, PlainSerializer, field_validator
from pydantic.alias_generators import to_camel

from ..errors import FilterConfigError
from ..utils import format_rational, to_rational
from ..values import format_value

Rational = Annotated[
    Fraction,
    BeforeValidator(to_rational),
    PlainSerializer(format_rational, return_type=str),
]

_STEP_PATTERN = re.compile(r"^\s*([A-Za-z_*][A-Za-z0-9_]*)\s*(?:\((.*)\))?\s*$")

WILDCARD = "*"


class _Config(BaseModel):
    model_config = ConfigDict(
        alias_generator=to_camel, populate_by_name=True, extra="forbid", arbitrary_types_allowed=True
    )


class StepMatcher(_Config):
    """
    Matches one plan step by action name and, optionally, by arguments.
    "*" matches any action name or any single argument.
    """

    action: str
    args: Optional[List[str]] = None

    @classmethod
    def parse(cls, text: str) -> "StepMatcher":
        """
        Parses the compact form "Put(*,C1,*)"; "Put" alone matches any arguments.
        """
        match = _STEP_PATTERN.match(text)
        if not match:
            raise ValueError(f"Invalid step pattern: {text!r}")
        action, inner = match.groups()
        if inner is None:
            return cls(action=action)
        args = [a.strip() for a in inner.split(",")] if inner.strip() else []
        return cls(action=action, args=args)

    def matches(self, step) -> bool:
        if self.action != WILDCARD and self.action != step.action:
            return False
        if self.args is None:
            return True
        if len(self.args) != len(step.args):
            return False
        return all(p == WILDCARD or p == _show(a) for p, a in zip(self.args, step.args))

    def __str__(self):
        if self.args is None:
            return self.action
        return f"{self.action}({','.join(self.args)})"


def _show(value) -> str:
    text = format_value(value)
    return text[1:-1] if isinstance(value, str) else text


class ForbiddenSequence(_Config):
    """
    A contiguous run of steps that must not occur, in the whole plan
    ("global") or within one agent's stream ("per_stream").
    """

    scope: Literal["global", "per_stream"] = "global"
    pattern: List[StepMatcher] = Field(min_length=1)

    @field_validator("pattern", mode="before")
    @classmethod
    def _parse_compact(cls, value):
        if isinstance(value, list):
            return [StepMatcher.parse(v) if isinstance(v, str) else v for v in value]
        return value

    def __str__(self):
        return f"{self.scope}[{', '.join(str(m) for m in self.pattern)}]"


class FilterConfig(_Config):
    """
    Thresholds of the four plan filters. A plan is rejected when a measured
    value is strictly above its threshold. Unset thresholds are not checked.
    """

    max_wait_per_agent: Optional[Rational] = None
    max_effort_imbalance: Optional[Rational] = None
    max_intricacy: Optional[int] = Field(default=None, ge=0)
    forbidden_sequences: List[ForbiddenSequence] = []
    effort_weights: Dict[str, Rational] = {}
    imbalance_mode: Literal["difference", "ratio"] = "difference"

    @property
    def has_criteria(self) -> bool:
        return (
            self.max_wait_per_agent is not None
            or self.max_effort_imbalance is not None
            or self.max_intricacy is not None
            or bool(self.forbidden_sequences)
        )

    def weight(self, agent: str) -> Fraction:
        return self.effort_weights.get(agent, Fraction(1))

    @classmethod
    def from_dict(cls, data: Dict) -> "FilterConfig":
        """
        Builds a config from a mapping; a top-level "filters" key is unwrapped.

        Raises:
            FilterConfigError: If the configuration is invalid.
        """
        if isinstance(data, dict) and "filters" in data:
            data = data["filters"]
        try:
            return cls.model_validate(data)
        except ValueError as e:
            raise FilterConfigError(f"Invalid filter configuration: {e}") from e

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "FilterConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise FilterConfigError(f"{path}: not valid JSON: {e}") from e
        return cls.from_dict(data)
