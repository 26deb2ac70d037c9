"""Weighted planar graphs and the reductions from cycle sums to matchings.

A graph carries a rotation system: ``rotation[s]`` lists the darts at ``s``
in cyclic order, a dart being ``(edge_id, side)`` with side 0 at ``edge.u``
and side 1 at ``edge.v``. The quantity preserved by every transformation is
the weighted cycle sum

    Z = prefactor * sum_{x : boundary(x) = defects} prod_{e : x_e = 1} w_e

where the prefactor is kept as ``log|c|`` plus a unit phase.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from typing import Optional

from . import gf2
from .errors import EmbeddingError, OddDefect


@dataclass
class Edge:
    u: int
    v: int
    w: complex = 1.0
    forced: Optional[int] = None  # exact x_e from a Z-basis projection

    def end(self, side: int) -> int:
        return self.u if side == 0 else self.v


class WeightedPlanarGraph:
    def __init__(self):
        self.edges: dict[int, Edge] = {}
        self.rotation: dict[int, list[tuple[int, int]]] = {}
        self.defects: set[int] = set()
        self.log_prefactor = 0.0
        self.phase = complex(1.0)
        self._next_edge = 0
        self._next_vertex = 0

    # -- construction -------------------------------------------------------

    def add_vertex(self, s=None) -> int:
        if s is None:
            s = self._next_vertex
        if s in self.rotation:
            raise ValueError(f"vertex {s} exists")
        self.rotation[s] = []
        self._next_vertex = max(self._next_vertex, s + 1)
        return s

    def add_edge(self, u, v, w=1.0, eid=None, forced=None) -> int:
        """Add an edge without touching the rotation system."""
        if eid is None:
            eid = self._next_edge
        if eid in self.edges:
            raise ValueError(f"edge {eid} exists")
        self.edges[eid] = Edge(u, v, complex(w), forced)
        self._next_edge = max(self._next_edge, eid + 1)
        self._next_vertex = max(self._next_vertex, u + 1, v + 1)
        return eid

    def copy(self) -> "WeightedPlanarGraph":
        g = type(self)()
        g.edges = {e: Edge(ed.u, ed.v, ed.w, ed.forced) for e, ed in self.edges.items()}
        g.rotation = {s: list(r) for s, r in self.rotation.items()}
        g.defects = set(self.defects)
        g.log_prefactor = self.log_prefactor
        g.phase = self.phase
        g._next_edge = self._next_edge
        g._next_vertex = self._next_vertex
        return g

    def scale(self, c: complex) -> None:
        """Multiply the prefactor by c."""
        c = complex(c)
        if c == 0:
            self.log_prefactor = -math.inf
            return
        r = abs(c)
        self.log_prefactor += math.log(r)
        self.phase *= c / r

    @property
    def prefactor(self) -> complex:
        if self.log_prefactor == -math.inf:
            return 0j
        return self.phase * math.exp(self.log_prefactor)

    # -- queries --------------------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.rotation)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def degree(self, s) -> int:
        return len(self.rotation[s])

    def dart_vertex(self, dart) -> int:
        e, side = dart
        return self.edges[e].end(side)

    def faces(self) -> list[list[tuple[int, int]]]:
        """Face boundary walks traced through the rotation system.

        Arriving at v along edge e, the walk leaves by the dart following
        the reverse of e in rotation[v].
        """
        where = {}
        for s, darts in self.rotation.items():
            for i, d in enumerate(darts):
                where[d] = (s, i)
        seen = set()
        faces = []
        for start in where:
            if start in seen:
                continue
            walk = []
            d = start
            while d not in seen:
                seen.add(d)
                walk.append(d)
                e, side = d
                v, i = where[(e, 1 - side)]
                rot = self.rotation[v]
                d = rot[(i + 1) % len(rot)]
            if d != start:
                raise EmbeddingError("rotation system is not a permutation of darts")
            faces.append(walk)
        return faces

    def check_embedding(self) -> None:
        """Raise EmbeddingError unless V - E + F = 2 on every component."""
        darts = [d for r in self.rotation.values() for d in r]
        expected = {(e, s) for e in self.edges for s in (0, 1)}
        if len(darts) != len(expected) or set(darts) != expected:
            raise EmbeddingError("rotation darts do not match the edge list")
        for s, r in self.rotation.items():
            for d in r:
                if self.dart_vertex(d) != s:
                    raise EmbeddingError(f"dart {d} listed at wrong vertex {s}")
        comp_of = {}
        for i, comp in enumerate(gf2.components(self)):
            for s in comp:
                comp_of[s] = i
        n = max(comp_of.values(), default=-1) + 1
        V = [0] * n
        E = [0] * n
        F = [0] * n
        for s in self.rotation:
            V[comp_of[s]] += 1
            if not self.rotation[s]:
                F[comp_of[s]] += 1  # isolated vertex bounds one face
        for ed in self.edges.values():
            E[comp_of[ed.u]] += 1
        for walk in self.faces():
            F[comp_of[self.dart_vertex(walk[0])]] += 1
        for i in range(n):
            if V[i] - E[i] + F[i] != 2:
                raise EmbeddingError(
                    f"Euler check failed on a component: V={V[i]} E={E[i]} F={F[i]}"
                )

    def is_valid_embedding(self) -> bool:
        try:
            self.check_embedding()
        except EmbeddingError:
            return False
        return True

    # -- local surgery --------------------------------------------------------

    def remove_edge(self, e) -> Edge:
        ed = self.edges.pop(e)
        self.rotation[ed.u].remove((e, 0))
        self.rotation[ed.v].remove((e, 1))
        return ed

    def remove_vertex(self, s) -> None:
        if self.rotation[s]:
            raise ValueError(f"vertex {s} still has edges")
        del self.rotation[s]
        self.defects.discard(s)

    # -- serialization --------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "vertices": sorted(self.rotation),
            "edges": [
                {
                    "id": e,
                    "u": ed.u,
                    "v": ed.v,
                    "w": [ed.w.real, ed.w.imag],
                    "forced": ed.forced,
                }
                for e, ed in sorted(self.edges.items())
            ],
            "rotation": {str(s): [list(d) for d in r] for s, r in sorted(self.rotation.items())},
            "defects": sorted(self.defects),
            "log_prefactor": None if self.log_prefactor == -math.inf else self.log_prefactor,
            "phase": [self.phase.real, self.phase.imag],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, obj: dict) -> "WeightedPlanarGraph":
        g = cls()
        for s in obj["vertices"]:
            g.add_vertex(int(s))
        for ed in obj["edges"]:
            re, im = ed["w"]
            g.add_edge(int(ed["u"]), int(ed["v"]), complex(re, im), eid=int(ed["id"]),
                       forced=ed.get("forced"))
        for s, r in obj["rotation"].items():
            g.rotation[int(s)] = [(int(e), int(side)) for e, side in r]
        g.defects = set(obj.get("defects", ()))
        lp = obj.get("log_prefactor", 0.0)
        g.log_prefactor = -math.inf if lp is None else float(lp)
        re, im = obj.get("phase", [1.0, 0.0])
        g.phase = complex(re, im)
        return g


def planar_reembed(g: WeightedPlanarGraph) -> bool:
    """Replace g's rotation system by one found by a planarity test.

    Edges are subdivided so parallel edges and loops become a simple graph.
    Returns False (leaving g untouched) when g is not planar.
    """
    import networkx as nx

    h = nx.Graph()
    h.add_nodes_from(("v", s) for s in g.rotation)
    for e, ed in g.edges.items():
        a, b = ("m", e, 0), ("m", e, 1)
        h.add_edge(("v", ed.u), a)
        h.add_edge(a, b)
        h.add_edge(b, ("v", ed.v))
    ok, emb = nx.check_planarity(h)
    if not ok:
        return False
    for s in g.rotation:
        g.rotation[s] = [(m[1], m[2]) for m in emb.neighbors_cw_order(("v", s))]
    return True


class MatchingGraph(WeightedPlanarGraph):
    """Output of the gadget expansion: vertices are numbered 0, 1, 2, ..."""

    def vertex_order(self) -> list[int]:
        return sorted(self.rotation)


def _toggle(defects: set, s) -> None:
    if s in defects:
        defects.remove(s)
    else:
        defects.add(s)


def preprocess_weights(g: WeightedPlanarGraph) -> WeightedPlanarGraph:
    """Drop forced and zero-weight edges so only finite nonzero weights remain.

    A forced ``x_e = 1`` edge moves its weight into the prefactor and flips
    the defect status of both endpoints.
    """
    g = g.copy()
    for e in sorted(g.edges):
        ed = g.edges[e]
        if ed.forced is None:
            if not cmath.isfinite(ed.w):
                raise ValueError(f"edge {e} has non-finite weight; mark it forced")
            if ed.w != 0:
                continue
        elif ed.forced == 1:
            g.scale(ed.w)
            _toggle(g.defects, ed.u)
            _toggle(g.defects, ed.v)
        elif ed.forced != 0:
            raise ValueError(f"forced value must be 0 or 1, got {ed.forced!r}")
        g.remove_edge(e)
    return g


def odd_defect_component(g: WeightedPlanarGraph) -> bool:
    """True when some component holds an odd number of defects (Z = 0)."""
    for comp in gf2.components(g):
        if len(comp & g.defects) % 2:
            return True
    return False


def shift_defects(g: WeightedPlanarGraph) -> WeightedPlanarGraph:
    """Rewrite the relative-cycle sum as a plain cycle sum.

    With z a fixed chain of boundary D, every chain of boundary D is z + x
    for a cycle x, and w^{z+x} = w^z (1/w)^x on the support of z.
    """
    if not g.defects:
        return g.copy()
    if any(ed.w == 0 or ed.forced is not None for ed in g.edges.values()):
        raise ValueError("shift_defects needs preprocessed weights")
    z = gf2.solve_boundary(g, g.defects)
    if z is None:
        raise OddDefect("a connected component has an odd number of defects")
    g = g.copy()
    for e in z:
        ed = g.edges[e]
        g.scale(ed.w)
        ed.w = 1 / ed.w
    g.defects = set()
    return g


def find_bridges(g: WeightedPlanarGraph) -> list[int]:
    """Edges whose removal disconnects their component (parallel edges aware)."""
    adj = {s: [] for s in g.rotation}
    for e, ed in g.edges.items():
        if ed.u != ed.v:
            adj[ed.u].append((ed.v, e))
            adj[ed.v].append((ed.u, e))
    disc = {}
    low = {}
    bridges = []
    counter = 0
    for root in g.rotation:
        if root in disc:
            continue
        disc[root] = low[root] = counter
        counter += 1
        stack = [(root, None, iter(adj[root]))]
        while stack:
            s, via, it = stack[-1]
            advanced = False
            for t, e in it:
                if e == via:
                    continue
                if t in disc:
                    low[s] = min(low[s], disc[t])
                else:
                    disc[t] = low[t] = counter
                    counter += 1
                    stack.append((t, e, iter(adj[t])))
                    advanced = True
                    break
            if not advanced:
                stack.pop()
                if stack:
                    p = stack[-1][0]
                    low[p] = min(low[p], low[s])
                    if low[s] > disc[p]:
                        bridges.append(via)
    return bridges


# Degree-2 merges whose product would leave [1/WEIGHT_RANGE, WEIGHT_RANGE]
# are skipped; the vertex then gets a two-port gadget instead.
WEIGHT_RANGE = 1e100
_LOG_RANGE = math.log(WEIGHT_RANGE)


def _mergeable(g: WeightedPlanarGraph, s) -> bool:
    (e1, _), (e2, _) = g.rotation[s]
    if e1 == e2:
        return False  # a loop: folded on the next pass
    w1, w2 = g.edges[e1].w, g.edges[e2].w
    return abs(math.log(abs(w1)) + math.log(abs(w2))) <= _LOG_RANGE


def _merge_degree2(g: WeightedPlanarGraph, s) -> None:
    (e1, side1), (e2, side2) = g.rotation[s]
    ed1, ed2 = g.edges[e1], g.edges[e2]
    a_dart = (e1, 1 - side1)
    b_dart = (e2, 1 - side2)
    a, b = ed1.end(1 - side1), ed2.end(1 - side2)
    new = g.add_edge(a, b, ed1.w * ed2.w)
    ra = g.rotation[a]
    ra[ra.index(a_dart)] = (new, 0)
    rb = g.rotation[b]
    rb[rb.index(b_dart)] = (new, 1)
    del g.edges[e1], g.edges[e2]
    g.rotation[s] = []
    g.remove_vertex(s)


def _split_vertex(g: WeightedPlanarGraph, s) -> None:
    rot = g.rotation[s]
    d0, d1 = rot[0], rot[1]
    t = g.add_vertex()
    new = g.add_edge(t, s, 1.0)
    for e, side in (d0, d1):
        if side == 0:
            g.edges[e].u = t
        else:
            g.edges[e].v = t
    g.rotation[t] = [d0, d1, (new, 0)]
    g.rotation[s] = [(new, 1)] + rot[2:]


def reduce_degrees(g: WeightedPlanarGraph) -> WeightedPlanarGraph:
    """Reduce to degrees 2 and 3 with the same cycle sum.

    Loops fold as a factor (1 + w); bridges (pendant edges included) never
    carry a cycle and are dropped; degree-2 vertices merge their two edges
    unless the product weight would overflow; vertices of degree k > 3 shed
    their first two darts onto a new vertex joined by a unit edge until they
    reach degree 3.
    """
    if g.defects:
        raise ValueError("reduce_degrees needs a defect-free graph")
    g = g.copy()
    while True:
        changed = False
        for e in [e for e, ed in g.edges.items() if ed.u == ed.v]:
            g.scale(1 + g.edges[e].w)
            g.remove_edge(e)
            changed = True
        for e in find_bridges(g):
            g.remove_edge(e)
            changed = True
        merged = True
        while merged:
            merged = False
            for s in list(g.rotation):
                if s not in g.rotation:
                    continue
                deg = g.degree(s)
                if deg == 0:
                    g.remove_vertex(s)
                    changed = True
                elif deg == 2 and _mergeable(g, s):
                    _merge_degree2(g, s)
                    merged = changed = True
        if changed:
            continue
        big = [s for s in g.rotation if g.degree(s) > 3]
        if not big:
            break
        for s in big:
            while g.degree(s) > 3:
                _split_vertex(g, s)
    return g


def expand_to_matching(g: WeightedPlanarGraph) -> MatchingGraph:
    """Replace each vertex by a gadget whose perfect matchings encode the
    even-degree condition there.

    Degree 3, darts d0, d1, d2: ports p_k take the outer edge of d_k, each
    port hangs off an inner vertex q_k, and q_0 q_1 q_2 form a triangle; all
    six inner edges have unit weight. A port is covered either by its outer
    edge or by its q_k, and the uncovered q's must pair up in the triangle,
    so an even number of outer edges is matched.

    Degree 2: two ports joined by one unit edge, so both outer edges are
    matched or neither.

    Either way the matchings correspond one to one with cycles.
    """
    if g.defects:
        raise ValueError("expand_to_matching needs a defect-free graph")
    for s, r in g.rotation.items():
        if len(r) not in (2, 3):
            raise ValueError(f"vertex {s} has degree {len(r)}; expected 2 or 3")
    m = MatchingGraph()
    m.log_prefactor = g.log_prefactor
    m.phase = g.phase
    port = {}
    for s in sorted(g.rotation):
        darts = g.rotation[s]
        p = [m.add_vertex() for _ in darts]
        for k, dart in enumerate(darts):
            port[dart] = p[k]
        if len(darts) == 2:
            inner = m.add_edge(p[0], p[1])
            m.rotation[p[0]].append((inner, 0))
            m.rotation[p[1]].append((inner, 1))
            continue
        q = [m.add_vertex() for _ in range(3)]
        spoke = [m.add_edge(p[k], q[k]) for k in range(3)]
        ring = [m.add_edge(q[k], q[(k + 1) % 3]) for k in range(3)]
        for k in range(3):
            m.rotation[p[k]].append((spoke[k], 0))
            # q_k: toward p_k, then q_{k+1}, then q_{k-1}
            m.rotation[q[k]] = [(spoke[k], 1), (ring[k], 0), (ring[(k - 1) % 3], 1)]
    for e in sorted(g.edges):
        ed = g.edges[e]
        pu, pv = port[(e, 0)], port[(e, 1)]
        new = m.add_edge(pu, pv, ed.w)
        m.rotation[pu].insert(0, (new, 0))
        m.rotation[pv].insert(0, (new, 1))
    return m
