"""Small undirected simple graphs on vertices 0..n-1."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import PacklabError


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset

    def __post_init__(self):
        clean = set()
        for e in self.edges:
            i, j = (int(v) for v in e)
            if i == j:
                raise PacklabError(f"loop at vertex {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise PacklabError(f"edge {(i, j)} outside [0, {self.n})")
            clean.add((min(i, j), max(i, j)))
        object.__setattr__(self, "edges", frozenset(clean))

    @classmethod
    def from_edges(cls, n, edges):
        return cls(int(n), frozenset(tuple(e) for e in edges))

    @classmethod
    def from_adjacency(cls, adj):
        a = np.asarray(adj)
        n = a.shape[0]
        if a.shape != (n, n) or not np.array_equal(a, a.T):
            raise PacklabError("adjacency matrix must be square and symmetric")
        if np.any(np.diag(a) != 0):
            raise PacklabError("adjacency matrix has loops")
        return cls(n, frozenset((i, j) for i, j in combinations(range(n), 2) if a[i, j]))

    @classmethod
    def complete(cls, n):
        return cls(n, frozenset(combinations(range(n), 2)))

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.int64)
        for i, j in self.edges:
            a[i, j] = a[j, i] = 1
        return a

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def neighbors(self, v) -> set[int]:
        return {j if i == v else i for i, j in self.edges if v in (i, j)}

    def complement(self) -> "Graph":
        return Graph(self.n, frozenset(combinations(range(self.n), 2)) - self.edges)

    def disjoint_union(self, other: "Graph") -> "Graph":
        shifted = {(i + self.n, j + self.n) for i, j in other.edges}
        return Graph(self.n + other.n, self.edges | shifted)

    def relabel(self, perm) -> "Graph":
        """Vertex ``v`` becomes ``perm[v]``."""
        return Graph(self.n, frozenset((perm[i], perm[j]) for i, j in self.edges))

    def srg_parameters(self):
        """Return ``(v, k, lam, mu)`` if strongly regular, else ``None``.

        Parameters come from direct common-neighbour counts, not eigenvalues.
        Complete and empty graphs are rejected (``lam`` or ``mu`` undefined).
        """
        a = self.adjacency()
        v = self.n
        deg = a.sum(axis=1)
        if v < 3 or len(set(deg.tolist())) != 1:
            return None
        k = int(deg[0])
        if k == 0 or k == v - 1:
            return None
        common = a @ a
        iu = np.triu_indices(v, 1)
        adjacent = a[iu] == 1
        lam_vals = set(common[iu][adjacent].tolist())
        mu_vals = set(common[iu][~adjacent].tolist())
        if len(lam_vals) != 1 or len(mu_vals) != 1:
            return None
        return (v, k, lam_vals.pop(), mu_vals.pop())

    def to_text(self) -> str:
        lines = [str(self.n)]
        lines += [f"{i + 1} {j + 1}" for i, j in sorted(self.edges)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Graph":
        rows = [r.split() for r in text.splitlines() if r.strip() and not r.lstrip().startswith("#")]
        if not rows:
            raise PacklabError("empty graph file")
        n = int(rows[0][0])
        edges = []
        for r in rows[1:]:
            i, j = int(r[0]) - 1, int(r[1]) - 1
            edges.append((i, j))
        return cls.from_edges(n, edges)


def triangular_graph(m: int) -> Graph:
    """T(m): the line graph of K_m, vertices are 2-subsets of range(m)."""
    pairs = list(combinations(range(m), 2))
    edges = [(a, b) for a, b in combinations(range(len(pairs)), 2)
             if len(set(pairs[a]) & set(pairs[b])) == 1]
    return Graph.from_edges(len(pairs), edges)


def petersen_graph() -> Graph:
    """Kneser graph K(5,2): 2-subsets of range(5), adjacent when disjoint."""
    pairs = list(combinations(range(5), 2))
    edges = [(a, b) for a, b in combinations(range(10), 2)
             if not set(pairs[a]) & set(pairs[b])]
    return Graph.from_edges(10, edges)


def paley_graph(q: int) -> Graph:
    squares = {(x * x) % q for x in range(1, q)}
    edges = [(a, b) for a, b in combinations(range(q), 2) if (b - a) % q in squares]
    return Graph.from_edges(q, edges)
