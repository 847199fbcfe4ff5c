"""Handing out SOPIs to encoding nodes, and the client-side stream filter.

Nodes a client might download the same object from are joined by an edge;
any proper colouring of that graph, with SOPIs as colours, keeps a client
from fetching two copies of one stream object.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence, TypeVar

from .core import Sopi


class InsufficientPaletteError(RuntimeError):
    def __init__(self, node: str, palette_size: int):
        super().__init__(f"insufficient palette: node {node!r} has neighbours using all {palette_size} SOPIs")
        self.node = node
        self.palette_size = palette_size


@dataclass
class NodeGraph:
    nodes: list[str]
    edges: list[tuple[str, str]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError("duplicate node identifiers")
        known = set(self.nodes)
        seen: set[frozenset[str]] = set()
        edges = []
        for a, b in self.edges:
            if a == b:
                raise ValueError(f"self-loop on node {a!r}")
            if a not in known or b not in known:
                raise ValueError(f"edge ({a!r}, {b!r}) references an unknown node")
            key = frozenset((a, b))
            if key not in seen:
                seen.add(key)
                edges.append((a, b))
        self.edges = edges
        self._adj: dict[str, set[str]] = {n: set() for n in self.nodes}
        for a, b in edges:
            self._adj[a].add(b)
            self._adj[b].add(a)

    def neighbours(self, node: str) -> set[str]:
        return self._adj[node]

    def degree(self, node: str) -> int:
        return len(self._adj[node])

    @property
    def max_degree(self) -> int:
        return max((len(v) for v in self._adj.values()), default=0)

    def to_json(self) -> dict:
        return {"nodes": list(self.nodes), "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_json(cls, obj: dict) -> "NodeGraph":
        return cls([str(n) for n in obj["nodes"]], [(str(a), str(b)) for a, b in obj.get("edges", [])])


@dataclass
class Assignment:
    """Node -> palette index, with the palette of SOPIs the indices refer to."""

    colors: dict[str, int]
    palette: list[Sopi]

    @property
    def colors_used(self) -> int:
        return len(set(self.colors.values()))

    def sopi_of(self, node: str) -> Sopi:
        return self.palette[self.colors[node]]

    def to_json(self) -> dict:
        return {
            "assignments": {node: self.sopi_of(node).to_json() for node in self.colors},
            "colors_used": self.colors_used,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Assignment":
        by_node = {node: Sopi.from_json(v) for node, v in obj["assignments"].items()}
        palette = sorted(set(by_node.values()))
        index = {s: k for k, s in enumerate(palette)}
        return cls({node: index[s] for node, s in by_node.items()}, palette)


def greedy_color(graph: NodeGraph, palette: Sequence[Sopi]) -> Assignment:
    """Welsh-Powell colouring: highest degree first, lowest free palette index."""
    if not palette:
        raise ValueError("palette is empty")
    order = sorted(graph.nodes, key=lambda n: (-graph.degree(n), n))
    colors: dict[str, int] = {}
    for node in order:
        taken = {colors[nb] for nb in graph.neighbours(node) if nb in colors}
        free = next((k for k in range(len(palette)) if k not in taken), None)
        if free is None:
            raise InsufficientPaletteError(node, len(palette))
        colors[node] = free
    return Assignment({n: colors[n] for n in graph.nodes}, list(palette))


def validate_assignment(graph: NodeGraph, assignment: Assignment) -> list[tuple[str, str]]:
    """Edges whose endpoints carry the same SOPI (unassigned nodes count as violations)."""
    bad = []
    for a, b in graph.edges:
        if a not in assignment.colors or b not in assignment.colors:
            bad.append((a, b))
        elif assignment.sopi_of(a) == assignment.sopi_of(b):
            bad.append((a, b))
    return bad


Node = TypeVar("Node", bound=Hashable)


def select_streams(offers: Iterable[tuple[Node, Sopi]]) -> list[tuple[Node, Sopi]]:
    """Keep the first offer of each SOPI; later offers would only repeat it."""
    seen: set[Sopi] = set()
    out = []
    for node, sopi in offers:
        if sopi not in seen:
            seen.add(sopi)
            out.append((node, sopi))
    return out
