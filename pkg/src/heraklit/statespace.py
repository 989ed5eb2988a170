"""Interleaving state space: nodes are reachable markings, arcs are
single occurrences."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .net import Marking, Net, all_enabled, fire

__all__ = ["ReachabilityGraph", "build_reachability", "canonical_form"]


@dataclass
class ReachabilityGraph:
    nodes: list = field(default_factory=list)   # [Marking], index = node id
    edges: list = field(default_factory=list)   # [(source id, ModeOccurrence, target id)]
    root: int = 0
    truncated: bool = False

    def node_set(self) -> frozenset:
        return frozenset(m.key for m in self.nodes)

    def edge_set(self) -> frozenset:
        return frozenset((self.nodes[a].key, occ.key, self.nodes[b].key)
                         for a, occ, b in self.edges)

    def successors(self, i) -> list:
        return [(occ, b) for a, occ, b in self.edges if a == i]

    def index(self) -> dict:
        return {m: i for i, m in enumerate(self.nodes)}


def build_reachability(net: Net, max_states: int = 10_000, order: str = "bfs",
                       marking: Marking | None = None) -> ReachabilityGraph:
    """Explore all markings reachable from the initial one.

    Stops adding nodes at `max_states` and flags the graph as truncated.
    `order` ("bfs" or "dfs") only changes node numbering, never the node
    or edge sets of a complete graph.
    """
    if order not in ("bfs", "dfs"):
        raise ValueError(f"unknown exploration order {order!r}")
    start = net.initial_marking if marking is None else marking
    g = ReachabilityGraph(nodes=[start])
    ids = {start: 0}
    todo = deque([0])
    while todo:
        i = todo.popleft() if order == "bfs" else todo.pop()
        m = g.nodes[i]
        for occ in all_enabled(net, m):
            m2 = fire(net, m, occ)
            j = ids.get(m2)
            if j is None:
                if len(g.nodes) >= max_states:
                    g.truncated = True
                    continue
                j = len(g.nodes)
                ids[m2] = j
                g.nodes.append(m2)
                todo.append(j)
            g.edges.append((i, occ, j))
    return g


def canonical_form(g: ReachabilityGraph, label=lambda occ: occ.text()) -> tuple:
    """Name-independent description of a rooted, edge-labelled graph.

    Nodes are renumbered in breadth-first order from the root, following
    out-edges in label order.  Because every node is reachable and labels
    leaving a node are pairwise distinct, two graphs have the same
    canonical form exactly when they are isomorphic (root and labels
    preserved).  `label` maps an occurrence to the label to compare, e.g.
    to strip module qualifiers.
    """
    out = {}
    for a, occ, b in g.edges:
        out.setdefault(a, []).append((label(occ), b))
    for a, succ in out.items():
        labels = [lab for lab, _ in succ]
        if len(set(labels)) != len(labels):
            raise ValueError(f"node {a} has two out-edges labelled alike")
        succ.sort()
    number = {g.root: 0}
    queue = deque([g.root])
    edges = []
    while queue:
        a = queue.popleft()
        for lab, b in out.get(a, []):
            if b not in number:
                number[b] = len(number)
                queue.append(b)
            edges.append((number[a], lab, number[b]))
    return (len(number), tuple(sorted(edges)))
