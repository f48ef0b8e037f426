"""
Linearizations of a method body's partial order.

Every topological order of the subtask labels is a separate decomposition
option, enumerated in lexicographic order of the label sequences.
"""

from functools import lru_cache
from typing import List, Sequence, Tuple

import networkx as nx

from ..dsl.ast import MethodBody
from ..errors import LinearizationError

Ordering = Tuple[Tuple[int, Tuple[int, ...]], ...]


@lru_cache(maxsize=1024)
def _orders(ordering: Ordering) -> Tuple[Tuple[int, ...], ...]:
    graph = nx.DiGraph()
    graph.add_nodes_from(label for label, _ in ordering)
    for label, predecessors in ordering:
        graph.add_edges_from((p, label) for p in predecessors)
    if not nx.is_directed_acyclic_graph(graph):
        raise LinearizationError("Ordering constraints between subtasks form a cycle")
    if graph.number_of_nodes() == 0:
        return ((),)
    return tuple(sorted(tuple(order) for order in nx.all_topological_sorts(graph)))


def linearizations(body: MethodBody) -> List[Tuple[int, ...]]:
    """
    All total orders over the labels of a body that respect its constraints.

    Args:
        body (MethodBody): The body to linearize.

    Returns:
        List[Tuple[int, ...]]: Label sequences, lexicographically sorted. A
            fully chained body yields one; k unconstrained subtasks yield k!.

    Raises:
        LinearizationError: If the constraints are cyclic.
    """
    return list(_orders(body.ordering))


def order_subtasks(body: MethodBody, order: Sequence[int]):
    by_label = {s.label: s for s in body.subtasks}
    return [by_label[label] for label in order]
