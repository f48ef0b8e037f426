from .classical import atoms_json, format_atoms, slot_literal, to_classical_atoms
from .evaluate import (
    WHOLE_SET,
    Bindings,
    apply_effects,
    enumerate_bindings,
    eval_args,
    eval_condition,
    eval_expr,
    values_equal,
)
from .state import WorldState, init_state
