"""
Export of a WorldState to classical ground atoms under the closed-world
assumption.

    E.a = v (entity, string, int)  ->  a(E,v)
    E.a = true                     ->  a(E)
    E.a = false / NULL             ->  nothing
    E.a = {v1, ..., vn}            ->  a(E,v1) ... a(E,vn)
"""

import json
from typing import List

from ..values import format_value
from .evaluate import WHOLE_SET
from .state import WorldState


def _atom(entity: str, attr: str, value) -> str:
    if value is True:
        return f"{attr}({entity})"
    return f"{attr}({entity},{format_value(value)})"


def to_classical_atoms(state: WorldState) -> List[str]:
    """
    Returns the ground atoms of a state, sorted lexicographically.
    """
    atoms = set()
    for (entity, attr), value in state.slots():
        if isinstance(value, tuple):
            atoms.update(_atom(entity, attr, v) for v in value)
        elif value is None or value is False:
            continue
        else:
            atoms.add(_atom(entity, attr, value))
    return sorted(atoms)


def format_atoms(state: WorldState) -> str:
    """
    One atom per line, newline-terminated; empty text for an empty state.
    """
    return "".join(atom + "\n" for atom in to_classical_atoms(state))


def atoms_json(state: WorldState) -> str:
    return json.dumps({"atoms": to_classical_atoms(state)}, indent=2) + "\n"


def slot_literal(state: WorldState, key) -> str:
    """
    The classical literal describing what a read of `key` observed in `state`:
    "at(R1,L2)", "occupied(L2)", "not carry(R1)", "not path(R1,L3)".
    """
    entity, attr, element = key
    value = state.get(entity, attr)
    if element is WHOLE_SET:
        return f"{attr}({entity},{{{','.join(format_value(v) for v in value)}}})"
    if element is not None:
        atom = _atom(entity, attr, element)
        return atom if element in value else f"not {atom}"
    if value is None:
        return f"not {attr}({entity})"
    if value is False:
        return f"not {attr}({entity})"
    return _atom(entity, attr, value)
