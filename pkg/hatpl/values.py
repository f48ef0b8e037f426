"""
Runtime values of the world model.

A value is one of: bool, int, str (text), EntityRef or None (the DSL's NULL).
Entity identity is by name.
"""

from dataclasses import dataclass
from typing import Union

PRIMITIVE_TYPES = ("bool", "int", "string")


@dataclass(frozen=True, order=True)
class EntityRef:
    name: str

    def __str__(self):
        return self.name


Value = Union[bool, int, str, EntityRef, None]


def format_value(value: Value) -> str:
    """
    Formats a value the way it is written in DSL sources and classical atoms.
    """
    if value is None:
        return "NULL"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, EntityRef):
        return value.name
    if isinstance(value, int):
        return str(value)
    return '"' + value.replace('"', '\\"') + '"'


def plain_value(value: Value):
    """
    JSON-friendly form: entity refs become their names, everything else is kept.
    """
    if isinstance(value, EntityRef):
        return value.name
    return value


def matches_type(value: Value, type_name: str, entity_type_of) -> bool:
    """
    Checks a non-null value against a declared value type.

    Args:
        value: The value to check.
        type_name: "bool", "int", "string" or an entity type name.
        entity_type_of (callable): Maps an entity name to its type, or None.
    """
    if value is None:
        return False
    if type_name == "bool":
        return isinstance(value, bool)
    if type_name == "int":
        return isinstance(value, int) and not isinstance(value, bool)
    if type_name == "string":
        return isinstance(value, str)
    return isinstance(value, EntityRef) and entity_type_of(value.name) == type_name
