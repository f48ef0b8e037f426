"""
Graphviz DOT export of a StreamPlan: one cluster per agent stream, an edge
per successive pair in a stream and one per causal link.
"""

from ..values import format_value
from .split import StreamPlan


def node_name(index: int, action: str) -> str:
    return f"a{index}_{action}"


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_graph(stream_plan: StreamPlan) -> str:
    """
    Returns deterministic DOT text for a StreamPlan.
    """
    steps = stream_plan.plan.steps
    joint = {i for group in stream_plan.joint_groups for i in group.steps}
    lines = ["digraph plan {"]
    for agent, indices in stream_plan.streams.items():
        lines.append(f"  subgraph cluster_{agent} {{")
        lines.append(f"    label={_quote(agent)};")
        for i in indices:
            step = steps[i]
            label = f"{step.action}({','.join(format_value(a) for a in step.args)})"
            extra = ", peripheries=2" if i in joint else ""
            lines.append(f"    {node_name(i, step.action)} [label={_quote(label)}{extra}];")
        for a, b in zip(indices, indices[1:]):
            lines.append(f"    {node_name(a, steps[a].action)} -> {node_name(b, steps[b].action)};")
        lines.append("  }")
    for link in stream_plan.causal_links:
        source = node_name(link.producer, steps[link.producer].action)
        target = node_name(link.consumer, steps[link.consumer].action)
        lines.append(f"  {source} -> {target} [label={_quote(link.atom)}, style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"
