"""
state.py

The typed entity/attribute world state.

A WorldState is an immutable snapshot: `with_writes` returns a new snapshot
and leaves the receiver untouched, so the planner backtracks by dropping
snapshots. Atom slots hold one Value (None is the DSL's NULL); set slots hold
a duplicate-free tuple sorted by the written form of its elements.
"""

import json
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

from ..dsl.ast import DomainModel, ProblemModel
from ..errors import StateError, StaticWriteError
from ..logger import setup_logger
from ..values import EntityRef, Value, format_value, matches_type, plain_value

logger = setup_logger(__name__)

SlotKey = Tuple[str, str]


def canonical_set(elements: Tuple) -> Tuple:
    """
    Set slots are stored sorted so that equal sets compare and hash equal.
    """
    return tuple(sorted(elements, key=format_value))


class WorldState:
    """
    Snapshot of every slot of every entity.

    Attributes:
        domain (DomainModel): The schema the state instantiates.
        entities (Dict[str, str]): Entity name to type name, in declaration order.
    """

    __slots__ = ("domain", "entities", "_slots", "_by_type", "_hash")

    def __init__(self, domain: DomainModel, entities: Mapping[str, str], slots: Mapping[SlotKey, object]):
        self.domain = domain
        self.entities: Dict[str, str] = dict(entities)
        self._slots: Dict[SlotKey, object] = dict(slots)
        self._by_type: Dict[str, Tuple[str, ...]] = {}
        self._hash: Optional[int] = None

    @classmethod
    def _derive(cls, parent: "WorldState", slots: Dict[SlotKey, object]) -> "WorldState":
        state = cls.__new__(cls)
        state.domain = parent.domain
        state.entities = parent.entities
        state._slots = slots
        state._by_type = parent._by_type
        state._hash = None
        return state

    def type_of(self, entity: str) -> Optional[str]:
        return self.entities.get(entity)

    def entities_of_type(self, type_name: str) -> Tuple[str, ...]:
        """
        Names of all entities of a type, in declaration order.
        """
        found = self._by_type.get(type_name)
        if found is None:
            found = tuple(name for name, t in self.entities.items() if t == type_name)
            self._by_type[type_name] = found
        return found

    def has_slot(self, entity: str, attr: str) -> bool:
        return (entity, attr) in self._slots

    def get(self, entity: str, attr: str):
        """
        Value of an atom slot, or the tuple of elements of a set slot.

        Raises:
            StateError: If the entity has no such attribute.
        """
        try:
            return self._slots[(entity, attr)]
        except KeyError:
            raise StateError(f"Entity {entity} has no attribute {attr}") from None

    def is_set_slot(self, entity: str, attr: str) -> bool:
        decl = self.domain.attribute(self.entities.get(entity, ""), attr)
        return decl is not None and decl.is_set

    def with_writes(self, writes: Iterable[Tuple[SlotKey, object]]) -> "WorldState":
        """
        Returns a new snapshot with the given slot values.

        Raises:
            StaticWriteError: If a static slot would change.
            StateError: If a slot does not exist.
        """
        slots = dict(self._slots)
        for key, value in writes:
            if key not in slots:
                raise StateError(f"Entity {key[0]} has no attribute {key[1]}")
            if isinstance(value, tuple):
                value = canonical_set(value)
            if slots[key] == value:
                continue
            decl = self.domain.attribute(self.entities[key[0]], key[1])
            if decl.is_static:
                raise StaticWriteError(f"Cannot write static attribute {key[0]}.{key[1]}")
            slots[key] = value
        return WorldState._derive(self, slots)

    def slots(self) -> Iterator[Tuple[SlotKey, object]]:
        return iter(self._slots.items())

    def changed_keys(self, other: "WorldState") -> List[SlotKey]:
        """
        Keys whose value differs between two snapshots of the same problem.
        """
        return [key for key, value in self._slots.items() if other._slots.get(key) != value]

    def to_dict(self) -> Dict[str, Dict[str, object]]:
        out: Dict[str, Dict[str, object]] = {name: {} for name in self.entities}
        for (entity, attr), value in self._slots.items():
            if isinstance(value, tuple):
                out[entity][attr] = [plain_value(v) for v in value]
            else:
                out[entity][attr] = plain_value(value)
        return out

    def serialize(self) -> str:
        """
        Canonical JSON text; equal states serialize identically.
        """
        return json.dumps(self.to_dict(), sort_keys=True)

    def __eq__(self, other):
        if not isinstance(other, WorldState):
            return NotImplemented
        return self.entities == other.entities and self._slots == other._slots

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._slots.items()))
        return self._hash

    def __repr__(self):
        return f"WorldState({len(self.entities)} entities, {len(self._slots)} slots)"


def _check_value(value: Value, type_name: str, entities: Dict[str, str], where: str):
    if value is None:
        return
    if isinstance(value, EntityRef) and value.name not in entities:
        raise StateError(f"{where}: unknown entity {value.name}")
    if not matches_type(value, type_name, entities.get):
        raise StateError(f"{where}: expected a value of type {type_name}, got {value!r}")


def init_state(problem: ProblemModel, domain: DomainModel) -> WorldState:
    """
    Builds the initial state of a problem.

    Unassigned atom slots start as NULL and unassigned set slots empty. A
    dynamic atom assigned several times keeps the last value; a static atom
    may be assigned once.

    Args:
        problem (ProblemModel): Instantiations and assignments.
        domain (DomainModel): The schema.

    Returns:
        WorldState: The initial snapshot.

    Raises:
        StateError: On duplicate entity names, unknown types or attributes,
            type mismatches and static atoms assigned twice.
    """
    entities: Dict[str, str] = {}
    for inst in problem.instantiations:
        if domain.entity_type(inst.type_name) is None:
            raise StateError(f"new of unknown type {inst.type_name}")
        for name in inst.names:
            if name in entities:
                raise StateError(f"Duplicate entity {name}")
            entities[name] = inst.type_name

    slots: Dict[SlotKey, object] = {}
    for name, type_name in entities.items():
        for decl in domain.entity_type(type_name).attributes:
            slots[(name, decl.name)] = () if decl.is_set else None

    static_assigned = set()
    for assignment in problem.assignments:
        type_name = entities.get(assignment.entity)
        if type_name is None:
            raise StateError(f"Unknown entity {assignment.entity}")
        decl = domain.attribute(type_name, assignment.attr)
        if decl is None:
            raise StateError(f"Type {type_name} has no attribute {assignment.attr}")
        key = (assignment.entity, assignment.attr)
        where = f"{assignment.entity}.{assignment.attr}"
        _check_value(assignment.value, decl.value_type, entities, where)
        if assignment.op == "<<=":
            if not decl.is_set:
                raise StateError(f"{where} is not a set")
            if assignment.value is not None and assignment.value not in slots[key]:
                slots[key] = slots[key] + (assignment.value,)
            continue
        if decl.is_set:
            raise StateError(f"{where} is a set; use <<=")
        if decl.is_static:
            if key in static_assigned:
                raise StateError(f"Static attribute {where} assigned twice")
            static_assigned.add(key)
        slots[key] = assignment.value

    slots = {key: canonical_set(value) if isinstance(value, tuple) else value for key, value in slots.items()}
    logger.debug(f"Initial state: {len(entities)} entities, {len(slots)} slots")
    return WorldState(domain, entities, slots)
