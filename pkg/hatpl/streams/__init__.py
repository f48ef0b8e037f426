from .check import LinearizationCheck, check_linearizations, constraint_graph
from .graph import export_graph, node_name
from .split import CausalLink, JointGroup, StreamPlan, split, step_owner, trace_access
