"""Descriptive graph statistics: size, degree, density, self-loops, components.

Nodes are the distinct non-literal subjects and objects; predicates count as
nodes only where they also occur in a subject or object slot. Density uses the
directed-graph formula m / (n * (n - 1)). Connected components are computed on
the undirected projection over non-literal nodes with union-find.
"""

from __future__ import annotations

from dataclasses import dataclass

from .rdf import LITERAL, TripleGraph


class DisjointSet:
    """Union-find with union by size and path halving over dense int keys."""

    def __init__(self) -> None:
        self._parent: dict[int, int] = {}
        self._size: dict[int, int] = {}

    def add(self, x: int) -> None:
        if x not in self._parent:
            self._parent[x] = x
            self._size[x] = 1

    def find(self, x: int) -> int:
        parent = self._parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self._size[ra] < self._size[rb]:
            ra, rb = rb, ra
        self._parent[rb] = ra
        self._size[ra] += self._size[rb]

    def component_count(self) -> int:
        return sum(1 for x, p in self._parent.items() if x == p)


@dataclass(frozen=True)
class GraphStats:
    """Table-style descriptive statistics for one graph."""

    triples: int
    nodes: int
    relations: int
    self_loops: int
    average_degree: float
    density: float
    connected_components: int

    def as_dict(self) -> dict:
        return {
            "triples": self.triples,
            "nodes": self.nodes,
            "relations": self.relations,
            "self_loops": self.self_loops,
            "average_degree": self.average_degree,
            "density": self.density,
            "connected_components": self.connected_components,
        }


def average_degree(triples: int, nodes: int) -> float:
    """Average degree m / n; zero on the empty graph."""
    return triples / nodes if nodes else 0.0


def density(triples: int, nodes: int) -> float:
    """Directed density m / (n * (n - 1)); zero below two nodes."""
    return triples / (nodes * (nodes - 1)) if nodes > 1 else 0.0


def connected_components(graph: TripleGraph) -> int:
    """Number of weakly connected components over non-literal nodes."""
    terms = graph._terms
    ds = DisjointSet()
    for s, _, o in graph._spo:
        ds.add(s)
        if terms[o].kind != LITERAL:
            ds.add(o)
            ds.union(s, o)
    return ds.component_count()


def compute_stats(graph: TripleGraph) -> GraphStats:
    """Compute all statistics in one pass plus a union-find pass."""
    terms = graph._terms
    nodes: set[int] = set()
    relations: set[int] = set()
    self_loops = 0
    ds = DisjointSet()
    for s, p, o in graph._spo:
        nodes.add(s)
        ds.add(s)
        relations.add(p)
        if terms[o].kind != LITERAL:
            nodes.add(o)
            ds.add(o)
            ds.union(s, o)
            if s == o:
                self_loops += 1
    m = len(graph)
    n = len(nodes)
    return GraphStats(
        triples=m,
        nodes=n,
        relations=len(relations),
        self_loops=self_loops,
        average_degree=average_degree(m, n),
        density=density(m, n),
        connected_components=ds.component_count(),
    )


def format_stats_table(rows: list[tuple[str, GraphStats]]) -> str:
    """Render named stats records as an aligned text table."""
    header = ["Build", "Triples", "Nodes", "Relations", "Self-Loops",
              "Avg Degree", "Density", "Components"]
    table = [header]
    for name, st in rows:
        table.append([
            name,
            f"{st.triples:,}",
            f"{st.nodes:,}",
            f"{st.relations:,}",
            f"{st.self_loops:,}",
            f"{st.average_degree:.2f}",
            f"{st.density:.3e}",
            f"{st.connected_components:,}",
        ])
    widths = [max(len(row[i]) for row in table) for i in range(len(header))]
    lines = []
    for row in table:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
    return "\n".join(lines) + "\n"
