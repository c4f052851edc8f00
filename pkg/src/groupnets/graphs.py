"""Simple undirected graphs and the structural metrics used for comparisons.

Graphs are immutable once built: nodes are ``0..n-1``, edges are
unordered pairs with no self-loops or duplicates.  Heavy metrics
(all-pairs distances, clustering) run on a cached sparse adjacency
matrix; cheap ones iterate neighbor sets directly.
"""

from __future__ import annotations

import json
from collections import Counter, deque
from dataclasses import dataclass
from typing import Iterable

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

__all__ = [
    "Graph",
    "StructuralSummary",
    "GraphDocument",
    "is_connected",
    "average_shortest_path",
    "average_clustering",
    "degree_histogram",
    "structural_summary",
    "write_edge_list",
    "read_edge_list",
]


class Graph:
    """Undirected simple graph on ``n`` nodes."""

    __slots__ = ("n", "_adj", "_edges", "_csr")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        if n < 0:
            raise ValueError("node count must be nonnegative")
        self.n = int(n)
        adj: list[set[int]] = [set() for _ in range(self.n)]
        canon: set[tuple[int, int]] = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={self.n}")
            if u > v:
                u, v = v, u
            if (u, v) not in canon:
                canon.add((u, v))
                adj[u].add(v)
                adj[v].add(u)
        self._adj = adj
        self._edges = tuple(sorted(canon))
        self._csr = None

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        """Edges as sorted ``(u, v)`` pairs with ``u < v``."""
        return self._edges

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    def degree(self, u: int) -> int:
        return len(self._adj[u])

    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self._adj], dtype=np.int64)

    def neighbors(self, u: int) -> frozenset:
        return frozenset(self._adj[u])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def to_csr(self) -> sp.csr_matrix:
        """Symmetric binary adjacency in CSR form (cached)."""
        if self._csr is None:
            if self._edges:
                e = np.asarray(self._edges, dtype=np.int64)
                rows = np.concatenate([e[:, 0], e[:, 1]])
                cols = np.concatenate([e[:, 1], e[:, 0]])
                data = np.ones(rows.shape[0], dtype=np.float64)
            else:
                rows = cols = np.empty(0, dtype=np.int64)
                data = np.empty(0, dtype=np.float64)
            self._csr = sp.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))
        return self._csr

    def to_dense(self) -> np.ndarray:
        """Dense binary adjacency matrix."""
        a = np.zeros((self.n, self.n), dtype=np.float64)
        for u, v in self._edges:
            a[u, v] = 1.0
            a[v, u] = 1.0
        return a

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edge_count})"


@dataclass(frozen=True)
class StructuralSummary:
    average_shortest_path: float
    average_degree: float
    density: float
    average_clustering: float
    degree_histogram: dict[int, int]


def is_connected(g: Graph) -> bool:
    """True iff a traversal from node 0 reaches every node."""
    if g.n == 0:
        raise ValueError("connectivity undefined on the empty graph")
    if g.n == 1:
        return True
    seen = bytearray(g.n)
    seen[0] = 1
    queue = deque([0])
    count = 1
    while queue:
        u = queue.popleft()
        for v in g._adj[u]:
            if not seen[v]:
                seen[v] = 1
                count += 1
                queue.append(v)
    return count == g.n


def bfs_distances(g: Graph, source: int) -> np.ndarray:
    """Unweighted hop distances from ``source``; -1 marks unreachable nodes."""
    dist = np.full(g.n, -1, dtype=np.int64)
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        du = dist[u]
        for v in g._adj[u]:
            if dist[v] < 0:
                dist[v] = du + 1
                queue.append(v)
    return dist


def average_shortest_path(g: Graph) -> float:
    """Mean BFS distance over ordered node pairs.

    Requires a connected graph with at least two nodes.
    """
    if g.n < 2:
        raise ValueError("average shortest path needs at least 2 nodes")
    dist = csgraph.shortest_path(g.to_csr(), method="D", unweighted=True, directed=False)
    if np.isinf(dist).any():
        raise ValueError("graph is disconnected: unreachable pair encountered")
    return float(dist.sum() / (g.n * (g.n - 1)))


def average_clustering(g: Graph) -> float:
    """Mean local clustering coefficient; nodes of degree < 2 contribute 0."""
    if g.n == 0:
        raise ValueError("clustering undefined on the empty graph")
    if not g.edges:
        return 0.0
    a = g.to_csr()
    deg = g.degrees().astype(np.float64)
    # t[i] = sum over neighbors j of |N(i) & N(j)| = 2 * (edges among neighbors of i)
    paths = a @ a
    t = np.asarray(paths.multiply(a).sum(axis=1)).ravel()
    denom = deg * (deg - 1.0)
    coeffs = np.divide(t, denom, out=np.zeros_like(t), where=denom > 0)
    return float(coeffs.mean())


def degree_histogram(g: Graph) -> dict[int, int]:
    """Map from degree to node count; counts sum to n."""
    return dict(sorted(Counter(len(a) for a in g._adj).items()))


def structural_summary(g: Graph) -> StructuralSummary:
    """All structural metrics of a connected graph in one record."""
    m = g.edge_count
    return StructuralSummary(
        average_shortest_path=average_shortest_path(g),
        average_degree=2.0 * m / g.n,
        density=2.0 * m / (g.n * (g.n - 1)) if g.n > 1 else 0.0,
        average_clustering=average_clustering(g),
        degree_histogram=degree_histogram(g),
    )


def write_edge_list(g: Graph, path) -> None:
    """Write `# nodes <n>` followed by one `u v` line per edge (u < v)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# nodes {g.n}\n")
        for u, v in g.edges:
            fh.write(f"{u} {v}\n")


def read_edge_list(path) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 3 or header[0] != "#" or header[1] != "nodes":
            raise ValueError("edge list must start with '# nodes <n>'")
        n = int(header[2])
        edges = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            u, v = line.split()
            edges.append((int(u), int(v)))
    return Graph(n, edges)


@dataclass(frozen=True)
class GraphDocument:
    """JSON-portable description of a generated multi-group graph.

    Fields mirror the on-disk document exactly: ``n``, ``edges``,
    ``groups`` (node indices per group), ``liaisons``, ``modality``,
    ``seed``.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    groups: tuple[tuple[int, ...], ...]
    liaisons: tuple[int, ...]
    modality: str
    seed: int | None

    def to_graph(self) -> Graph:
        return Graph(self.n, self.edges)

    def to_json_text(self) -> str:
        payload = {
            "n": self.n,
            "edges": [[u, v] for u, v in self.edges],
            "groups": [list(grp) for grp in self.groups],
            "liaisons": list(self.liaisons),
            "modality": self.modality,
            "seed": self.seed,
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"

    @classmethod
    def from_json_text(cls, text: str) -> "GraphDocument":
        payload = json.loads(text)
        edges = tuple(sorted((min(u, v), max(u, v)) for u, v in payload["edges"]))
        return cls(
            n=int(payload["n"]),
            edges=edges,
            groups=tuple(tuple(int(x) for x in grp) for grp in payload["groups"]),
            liaisons=tuple(int(x) for x in payload["liaisons"]),
            modality=str(payload["modality"]),
            seed=None if payload.get("seed") is None else int(payload["seed"]),
        )

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_json_text())

    @classmethod
    def read(cls, path) -> "GraphDocument":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json_text(fh.read())

    def to_dot(self) -> str:
        """DOT rendering with one cluster per group; liaisons sit outside."""
        lines = ["graph multigroup {", "  node [shape=circle];"]
        for gi, members in enumerate(self.groups):
            lines.append(f"  subgraph cluster_{gi} {{")
            lines.append(f'    label="group {gi}";')
            for v in members:
                lines.append(f"    {v};")
            lines.append("  }")
        for v in self.liaisons:
            lines.append(f"  {v} [shape=square];")
        for u, v in self.edges:
            lines.append(f"  {u} -- {v};")
        lines.append("}")
        return "\n".join(lines) + "\n"
