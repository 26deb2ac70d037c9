"""Linear algebra over GF(2) for chains on graphs.

Chains are represented by their support: a 1-chain is a set of edge ids, a
0-chain a set of vertex ids. Addition is symmetric difference. Graphs may be
passed as a Lattice, a WeightedPlanarGraph, or a plain ``{edge: (u, v)}``
mapping.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Mapping

import numpy as np


class BitMatrix:
    """Dense GF(2) matrix with rows packed into Python ints (bit j = column j)."""

    def __init__(self, n_rows: int, n_cols: int, rows=None):
        self.n_rows = n_rows
        self.n_cols = n_cols
        self.rows = list(rows) if rows is not None else [0] * n_rows
        if len(self.rows) != n_rows:
            raise ValueError("row count mismatch")

    @classmethod
    def from_array(cls, a) -> "BitMatrix":
        a = np.asarray(a, dtype=np.uint8) & 1
        rows = []
        for r in a:
            v = 0
            for j in np.flatnonzero(r):
                v |= 1 << int(j)
            rows.append(v)
        return cls(a.shape[0], a.shape[1], rows)

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.n_rows, self.n_cols), dtype=np.uint8)
        for i, v in enumerate(self.rows):
            j = 0
            while v:
                if v & 1:
                    out[i, j] = 1
                v >>= 1
                j += 1
        return out

    def get(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1

    def flip(self, i: int, j: int) -> None:
        self.rows[i] ^= 1 << j

    def rank(self) -> int:
        """Rank by Gaussian elimination; pivots on the lowest set bit."""
        work = [r for r in self.rows if r]
        rank = 0
        while work:
            pivot = work.pop()
            if not pivot:
                continue
            rank += 1
            low = pivot & -pivot
            work = [r ^ pivot if r & low else r for r in work]
            work = [r for r in work if r]
        return rank


def _edge_map(g) -> Mapping[int, tuple[int, int]]:
    if isinstance(g, Mapping):
        return g
    if hasattr(g, "edge_ends"):  # Lattice
        return {e: (int(a), int(b)) for e, (a, b) in enumerate(g.edge_ends)}
    return {e: (ed.u, ed.v) for e, ed in g.edges.items()}


def _vertex_list(g, edges) -> list[int]:
    if hasattr(g, "rotation"):
        return sorted(g.rotation)
    if hasattr(g, "n_vertices"):
        return list(range(g.n_vertices))
    vs = set()
    for u, v in edges.values():
        vs.add(u)
        vs.add(v)
    return sorted(vs)


def boundary(g, x: Iterable[int]) -> frozenset:
    """Vertices with odd incidence in the chain x. Loops contribute nothing."""
    edges = _edge_map(g)
    out = set()
    for e in x:
        u, v = edges[e]
        out ^= {u}
        out ^= {v}
    return frozenset(out)


def boundary_matrix(g) -> tuple[BitMatrix, list, list]:
    """Vertex-by-edge incidence matrix, with the row and column labels."""
    edges = _edge_map(g)
    verts = _vertex_list(g, edges)
    row_of = {s: i for i, s in enumerate(verts)}
    cols = sorted(edges)
    m = BitMatrix(len(verts), len(cols))
    for j, e in enumerate(cols):
        u, v = edges[e]
        if u != v:
            m.flip(row_of[u], j)
            m.flip(row_of[v], j)
    return m, verts, cols


def cycle_space_dim(g) -> int:
    """Dimension of ker(boundary); the graph has 2**dim 1-cycles."""
    m, _, cols = boundary_matrix(g)
    return len(cols) - m.rank()


def components(g) -> list[set]:
    """Vertex sets of the connected components (isolated vertices included)."""
    edges = _edge_map(g)
    adj = {s: [] for s in _vertex_list(g, edges)}
    for u, v in edges.values():
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    seen = set()
    comps = []
    for s in adj:
        if s in seen:
            continue
        comp = {s}
        seen.add(s)
        queue = deque([s])
        while queue:
            a = queue.popleft()
            for b in adj[a]:
                if b not in seen:
                    seen.add(b)
                    comp.add(b)
                    queue.append(b)
        comps.append(comp)
    return comps


def solve_boundary(g, u: Iterable[int]):
    """Some 1-chain z with boundary(z) == u, or None if u is odd on a component.

    Works on a BFS spanning forest: sweeping vertices leaves-first, an odd
    vertex pushes its parity to its parent through the tree edge. This equals
    XOR-ing tree paths between paired odd vertices.
    """
    edges = _edge_map(g)
    verts = _vertex_list(g, edges)
    u = set(u)
    if not u <= set(verts):
        raise ValueError("0-chain support outside the graph")
    adj = {s: [] for s in verts}
    for e in sorted(edges):
        a, b = edges[e]
        if a != b:
            adj[a].append((b, e))
            adj[b].append((a, e))
    parent = {}
    z = set()
    seen = set()
    for root in verts:
        if root in seen:
            continue
        seen.add(root)
        order = [root]
        queue = deque([root])
        while queue:
            a = queue.popleft()
            for b, e in adj[a]:
                if b not in seen:
                    seen.add(b)
                    parent[b] = (a, e)
                    order.append(b)
                    queue.append(b)
        odd = {s for s in order if s in u}
        for s in reversed(order[1:]):
            if s in odd:
                p, e = parent[s]
                z.add(e)
                odd.discard(s)
                odd ^= {p}
        if odd:
            return None
    return frozenset(z)
