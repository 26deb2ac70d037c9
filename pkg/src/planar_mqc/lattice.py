"""Square lattice with qubits on edges.

Vertices are ``(row, col)`` with ``0 <= row, col <= L``, flattened as
``row * (L + 1) + col``. Horizontal edge ``h(r, c)`` joins ``(r, c)`` and
``(r, c + 1)``; vertical edge ``v(r, c)`` joins ``(r, c)`` and ``(r + 1, c)``.
Flat edge indices list every horizontal edge row-major, then every vertical
edge row-major. Rows grow "south".
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, NamedTuple

import numpy as np

# Cyclic order of directions around a vertex in the standard drawing.
DIRECTIONS = ("N", "E", "S", "W")


class EdgeId(NamedTuple):
    kind: str  # "h" or "v"
    row: int
    col: int

    def to_json(self) -> dict:
        return {"kind": self.kind, "row": self.row, "col": self.col}

    @classmethod
    def from_json(cls, obj: dict) -> "EdgeId":
        return cls(str(obj["kind"]), int(obj["row"]), int(obj["col"]))


class Lattice:
    """Topology of the L x L planar lattice. Immutable after construction."""

    def __init__(self, L: int):
        if not isinstance(L, (int, np.integer)) or L < 1:
            raise ValueError(f"lattice size must be a positive integer, got {L!r}")
        L = int(L)
        self.L = L
        self.n_vertices = (L + 1) ** 2
        self.n_edges = 2 * L * (L + 1)
        self.n_plaquettes = L * L
        self._n_h = L * (L + 1)

        ends = np.empty((self.n_edges, 2), dtype=np.int64)
        for idx in range(self.n_edges):
            kind, r, c = self.edge_id(idx)
            a = self.vertex_index(r, c)
            b = self.vertex_index(r, c + 1) if kind == "h" else self.vertex_index(r + 1, c)
            ends[idx] = (a, b)
        ends.setflags(write=False)
        self.edge_ends = ends

        # star[s] = ((direction, edge), ...) in N, E, S, W order
        star = []
        for s in range(self.n_vertices):
            r, c = divmod(s, L + 1)
            cand = (
                ("N", ("v", r - 1, c)),
                ("E", ("h", r, c)),
                ("S", ("v", r, c)),
                ("W", ("h", r, c - 1)),
            )
            star.append(
                tuple((d, self.edge_index(*e)) for d, e in cand if self._valid(*e))
            )
        self.star = tuple(star)
        self._incident = tuple(tuple(e for _, e in st) for st in star)
        # edges sharing a vertex with each edge
        self._edge_nbrs = tuple(
            tuple(sorted({f for s in ends[e] for f in self._incident[int(s)]} - {e}))
            for e in range(self.n_edges)
        )

        plaq = np.empty((self.n_plaquettes, 4), dtype=np.int64)
        for p in range(self.n_plaquettes):
            r, c = divmod(p, L)
            plaq[p] = (
                self.edge_index("h", r, c),
                self.edge_index("v", r, c + 1),
                self.edge_index("h", r + 1, c),
                self.edge_index("v", r, c),
            )
        plaq.setflags(write=False)
        self.plaquette_edges = plaq

    def __repr__(self):
        return f"Lattice(L={self.L})"

    def __eq__(self, other):
        return isinstance(other, Lattice) and other.L == self.L

    def __hash__(self):
        return hash(("Lattice", self.L))

    def _valid(self, kind, r, c):
        L = self.L
        if kind == "h":
            return 0 <= r <= L and 0 <= c < L
        if kind == "v":
            return 0 <= r < L and 0 <= c <= L
        return False

    def vertex_index(self, row: int, col: int) -> int:
        return row * (self.L + 1) + col

    def vertex_coords(self, s: int) -> tuple[int, int]:
        return divmod(int(s), self.L + 1)

    def edge_index(self, kind: str, row: int, col: int) -> int:
        if not self._valid(kind, row, col):
            raise ValueError(f"no edge {kind}({row}, {col}) on L={self.L} lattice")
        if kind == "h":
            return row * self.L + col
        return self._n_h + row * (self.L + 1) + col

    def edge_id(self, idx: int) -> EdgeId:
        idx = int(idx)
        if not 0 <= idx < self.n_edges:
            raise ValueError(f"edge index {idx} out of range for L={self.L}")
        if idx < self._n_h:
            r, c = divmod(idx, self.L)
            return EdgeId("h", r, c)
        r, c = divmod(idx - self._n_h, self.L + 1)
        return EdgeId("v", r, c)

    def incident_edges(self, s: int) -> tuple[int, ...]:
        """The edge set delta(s)."""
        return self._incident[s]

    def as_index(self, edge) -> int:
        """Accept a flat index, an EdgeId/tuple, or a JSON edge dict."""
        if isinstance(edge, dict):
            edge = EdgeId.from_json(edge)
        if isinstance(edge, tuple):
            return self.edge_index(*edge)
        idx = int(edge)
        if not 0 <= idx < self.n_edges:
            raise ValueError(f"edge index {idx} out of range for L={self.L}")
        return idx

    def edge_set(self, edges: Iterable) -> frozenset[int]:
        if isinstance(edges, frozenset) and all(type(e) is int and 0 <= e < self.n_edges
                                                for e in edges):
            return edges
        return frozenset(self.as_index(e) for e in edges)

    def all_edges(self) -> frozenset[int]:
        return frozenset(range(self.n_edges))

    def complement(self, edges: Iterable) -> frozenset[int]:
        return self.all_edges() - self.edge_set(edges)


def build_lattice(L: int) -> Lattice:
    return Lattice(L)


def touched_vertices(lat: Lattice, E: Iterable[int]) -> set[int]:
    out = set()
    for e in E:
        a, b = lat.edge_ends[e]
        out.add(int(a))
        out.add(int(b))
    return out


def boundary_vertices(lat: Lattice, E: Iterable) -> frozenset[int]:
    """Vertices touching at least one edge of E and one edge outside E."""
    E = lat.edge_set(E)
    Ebar = lat.all_edges() - E
    return frozenset(touched_vertices(lat, E) & touched_vertices(lat, Ebar))


def is_connected(lat: Lattice, E: Iterable) -> bool:
    """Edges are adjacent when they share a vertex. Empty sets count as connected."""
    E = lat.edge_set(E)
    if len(E) <= 1:
        return True
    start = next(iter(E))
    seen = {start}
    queue = deque([start])
    while queue:
        for f in lat._edge_nbrs[queue.popleft()]:
            if f in E and f not in seen:
                seen.add(f)
                queue.append(f)
    return len(seen) == len(E)


def subgraph_embedding(lat: Lattice, E: Iterable, weights=None):
    """Planar graph G_E spanned by E, with the lattice's N/E/S/W rotations.

    ``weights`` maps edge index to a complex weight (default 1). Edge ids in
    the returned graph equal the lattice edge indices.
    """
    from .planar_reduce import WeightedPlanarGraph

    E = lat.edge_set(E)
    if not E:
        raise ValueError("subgraph_embedding needs a nonempty edge set")
    g = WeightedPlanarGraph()
    for e in sorted(E):
        a, b = lat.edge_ends[e]
        w = 1.0 if weights is None else weights.get(e, 1.0)
        g.add_edge(int(a), int(b), w, eid=e)
    for s in touched_vertices(lat, E):
        # dart side 0 sits at edge_ends[e][0]
        darts = []
        for _, e in lat.star[s]:
            if e in E:
                darts.append((e, 0 if lat.edge_ends[e][0] == s else 1))
        g.rotation[s] = darts
    return g
