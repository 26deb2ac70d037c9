"""Kasteleyn orientation and Pfaffian magnitudes for planar matching graphs."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import gf2
from .errors import EmbeddingError, OddDefect
from .planar_reduce import (
    MatchingGraph,
    WeightedPlanarGraph,
    expand_to_matching,
    odd_defect_component,
    preprocess_weights,
    reduce_degrees,
    shift_defects,
)


@dataclass
class KasteleynMatrix:
    vertices: list
    orientation: dict  # edge id -> +1 (u -> v) or -1 (v -> u)
    weighted: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.vertices)

    def sign_matrix(self, g: MatchingGraph) -> np.ndarray:
        idx = {s: i for i, s in enumerate(self.vertices)}
        B = np.zeros((self.n, self.n), dtype=np.int8)
        for e, o in self.orientation.items():
            ed = g.edges[e]
            t, h = (ed.u, ed.v) if o > 0 else (ed.v, ed.u)
            B[idx[t], idx[h]] += 1
            B[idx[h], idx[t]] -= 1
        return B


def _along(dart, orientation) -> bool:
    e, side = dart
    return (side == 0) == (orientation[e] > 0)


def kasteleyn_orient(g: MatchingGraph, check=True) -> KasteleynMatrix:
    """FKT orientation: every face but one per component gets an odd number
    of edges oriented along its boundary walk.

    Tree edges of a spanning forest are oriented arbitrarily; the remaining
    edges form a spanning tree of the dual and are fixed leaf face first.
    """
    if check:
        g.check_embedding()
    orientation = {}
    adj = {s: [] for s in g.rotation}
    for e, ed in g.edges.items():
        adj[ed.u].append((ed.v, e))
        adj[ed.v].append((ed.u, e))
    seen = set()
    for root in sorted(g.rotation):
        if root in seen:
            continue
        seen.add(root)
        queue = deque([root])
        while queue:
            a = queue.popleft()
            for b, e in adj[a]:
                if b not in seen:
                    seen.add(b)
                    orientation[e] = 1 if g.edges[e].u == a else -1
                    queue.append(b)

    faces = g.faces()
    face_of = {}
    for i, walk in enumerate(faces):
        for d in walk:
            face_of[d] = i
    pending = [0] * len(faces)
    for e in g.edges:
        if e not in orientation:
            pending[face_of[(e, 0)]] += 1
            pending[face_of[(e, 1)]] += 1
    # one exempt face per component
    root_faces = set()
    covered = set()
    comp_of = {}
    for i, comp in enumerate(gf2.components(g)):
        for s in comp:
            comp_of[s] = i
    for i, walk in enumerate(faces):
        c = comp_of[g.dart_vertex(walk[0])]
        if c not in covered:
            covered.add(c)
            root_faces.add(i)

    queue = deque(i for i in range(len(faces)) if i not in root_faces and pending[i] == 1)
    while queue:
        f = queue.popleft()
        if pending[f] != 1:
            continue
        free = None
        n_along = 0
        for d in faces[f]:
            if d[0] in orientation:
                n_along += _along(d, orientation)
            else:
                free = d
        e, side = free
        # make the free dart along iff the rest has an even count
        want_along = n_along % 2 == 0
        orientation[e] = (1 if side == 0 else -1) * (1 if want_along else -1)
        for other in ((e, 0), (e, 1)):
            h = face_of[other]
            pending[h] -= 1
            if h != f and h not in root_faces and pending[h] == 1:
                queue.append(h)
    if len(orientation) != len(g.edges):
        raise EmbeddingError("dual spanning tree did not reach every edge")

    vertices = sorted(g.rotation)
    idx = {s: i for i, s in enumerate(vertices)}
    W = np.zeros((len(vertices), len(vertices)), dtype=complex)
    for e, o in orientation.items():
        ed = g.edges[e]
        t, h = (ed.u, ed.v) if o > 0 else (ed.v, ed.u)
        W[idx[t], idx[h]] += ed.w
        W[idx[h], idx[t]] -= ed.w
    return KasteleynMatrix(vertices, orientation, W)


def check_orientation(g: MatchingGraph, km: KasteleynMatrix) -> bool:
    """Explicit face walk: all faces except one per component are odd."""
    comp_of = {}
    for i, comp in enumerate(gf2.components(g)):
        for s in comp:
            comp_of[s] = i
    even_faces = {}
    for walk in g.faces():
        c = comp_of[g.dart_vertex(walk[0])]
        if sum(_along(d, km.orientation) for d in walk) % 2 == 0:
            even_faces[c] = even_faces.get(c, 0) + 1
    return all(v <= 1 for v in even_faces.values())


def abs_pfaffian(X) -> float:
    """log|Pf(X)| = log|det X| / 2 for antisymmetric X; -inf when singular."""
    if isinstance(X, KasteleynMatrix):
        X = X.weighted
    X = np.asarray(X)
    if X.shape[0] == 0:
        return 0.0
    if X.shape[0] % 2:
        return -math.inf
    _, logdet = np.linalg.slogdet(X)
    return 0.5 * float(logdet)


def matching_graph(g: WeightedPlanarGraph) -> MatchingGraph | None:
    """Run the reduction chain; None when the cycle sum is identically zero."""
    g = preprocess_weights(g)
    if odd_defect_component(g):
        return None
    g = shift_defects(g)
    g = reduce_degrees(g)
    return expand_to_matching(g)


def log_abs_partition(g: WeightedPlanarGraph, check=False) -> float:
    """log|Z| for the weighted relative-cycle sum carried by g."""
    try:
        m = matching_graph(g)
    except OddDefect:
        return -math.inf
    if m is None or m.log_prefactor == -math.inf:
        return -math.inf
    km = kasteleyn_orient(m, check=check)
    return m.log_prefactor + abs_pfaffian(km)
