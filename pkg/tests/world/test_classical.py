import json

from hatpl.dsl import parse_problem
from hatpl.values import EntityRef
from hatpl.world import atoms_json, format_atoms, init_state, slot_literal, to_classical_atoms


def test_golden_atoms(dwr_s0, data_dir):
    assert format_atoms(dwr_s0) == (data_dir / "dwr.atoms").read_text(encoding="utf-8")


def test_closed_world(dwr_s0):
    atoms = to_classical_atoms(dwr_s0)
    assert "attached(K1,L1)" in atoms
    assert "occupied(L1)" in atoms
    assert not any(a.startswith("loading(") or a.startswith("carry(") for a in atoms)
    assert not any(a.startswith("occupied(L2") for a in atoms)


def test_atoms_json(dwr_s0):
    assert json.loads(atoms_json(dwr_s0))["atoms"] == to_classical_atoms(dwr_s0)


def test_empty_state(dwr_domain, data_dir):
    problem = parse_problem((data_dir / "empty.hatpp").read_text(encoding="utf-8"), dwr_domain)
    assert format_atoms(init_state(problem, dwr_domain)) == ""


def test_slot_literals(dwr_s0):
    assert slot_literal(dwr_s0, ("R1", "at", None)) == "at(R1,L1)"
    assert slot_literal(dwr_s0, ("R1", "carry", None)) == "not carry(R1)"
    assert slot_literal(dwr_s0, ("L1", "adjacent", EntityRef("L2"))) == "adjacent(L1,L2)"
    assert slot_literal(dwr_s0, ("R1", "path", EntityRef("L2"))) == "not path(R1,L2)"
