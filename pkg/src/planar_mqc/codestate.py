"""Product states, overlaps with planar code states, and partial-measurement
probabilities through the doubled (glued) graph.

Every public quantity is a magnitude kept in log form; phases of overlaps
are never produced.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from typing import Mapping

from . import gf2
from .errors import ConnectivityViolation, NonPlanarGluing
from .lattice import Lattice, boundary_vertices, is_connected, subgraph_embedding
from .pfaffian import log_abs_partition
from .planar_reduce import WeightedPlanarGraph

# Below this amplitude a qubit is treated as an exact Z-basis projection.
PROJECTION_TOL = 1e-12
LOG2 = math.log(2.0)


@dataclass(frozen=True)
class QubitState:
    alpha: complex
    beta: complex

    def __post_init__(self):
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"qubit state not normalized: |a|^2 + |b|^2 = {norm}")

    @classmethod
    def from_unnormalized(cls, alpha, beta) -> "QubitState":
        n = math.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
        return cls(complex(alpha) / n, complex(beta) / n)


@dataclass(frozen=True)
class MeasurementBasis:
    """|psi0> = cos(t/2)|0> + e^{ip} sin(t/2)|1>,
    |psi1> = sin(t/2)|0> - e^{ip} cos(t/2)|1>."""

    theta: float
    phi: float = 0.0

    def state(self, outcome: int) -> QubitState:
        c, s = math.cos(self.theta / 2), math.sin(self.theta / 2)
        ph = cmath.exp(1j * self.phi)
        if outcome == 0:
            return QubitState(complex(c), ph * s)
        if outcome == 1:
            return QubitState(complex(s), -ph * c)
        raise ValueError(f"outcome must be 0 or 1, got {outcome!r}")


Z_BASIS = MeasurementBasis(0.0, 0.0)
X_BASIS = MeasurementBasis(math.pi / 2, 0.0)


def _as_state(s) -> QubitState:
    if isinstance(s, QubitState):
        return s
    a, b = s
    return QubitState(complex(a), complex(b))


def _edge_weights(states: Mapping[int, QubitState]):
    """Per edge: (weight, forced, amplitude folded out of the sum).

    Ordinary edges get w = beta/alpha with alpha folded out; a vanishing
    amplitude pins x_e instead.
    """
    out = {}
    for e, st in states.items():
        a, b = st.alpha, st.beta
        if abs(b) < PROJECTION_TOL:
            out[e] = (1.0, 0, a)
        elif abs(a) < PROJECTION_TOL:
            out[e] = (1.0, 1, b)
        else:
            out[e] = (b / a, None, a)
    return out


def _check_states(lat: Lattice, E: frozenset, states) -> dict:
    states = {lat.as_index(e): _as_state(s) for e, s in states.items()}
    if set(states) != set(E):
        raise ValueError("product state must be defined on exactly the edge set E")
    return states


def weighted_subgraph(lat: Lattice, E, states) -> tuple[WeightedPlanarGraph, float]:
    """G_E with overlap weights, plus sum of log|folded amplitudes|."""
    E = lat.edge_set(E)
    states = _check_states(lat, E, states)
    g = subgraph_embedding(lat, E)
    log_amp = 0.0
    for e, (w, forced, amp) in _edge_weights(states).items():
        g.edges[e].w = complex(w)
        g.edges[e].forced = forced
        log_amp += math.log(abs(amp)) if amp != 0 else -math.inf
    return g, log_amp


def overlap_abs(lat: Lattice, E, states) -> float:
    """log|<G_E|Phi>| for a product state on E."""
    E = lat.edge_set(E)
    g, log_amp = weighted_subgraph(lat, E, states)
    dim = gf2.cycle_space_dim(subgraph_embedding(lat, E))
    return -0.5 * dim * LOG2 + log_amp + log_abs_partition(g)


def _require_connected(lat: Lattice, E: frozenset) -> None:
    if not is_connected(lat, E):
        raise ConnectivityViolation("measured edge set is not connected")
    if not is_connected(lat, lat.all_edges() - E):
        raise ConnectivityViolation("unmeasured edge set is not connected")


# Boundary vertices left off the gluing face are handled by enumerating
# their syndrome bits; each bit pattern costs one Pfaffian.
MAX_UNGLUED = 12


def _best_face(g: WeightedPlanarGraph, boundary: frozenset):
    """Face walk of g touching the most boundary vertices, and those vertices."""
    best, best_hit = None, frozenset()
    for walk in g.faces():
        hit = boundary & {g.dart_vertex(d) for d in walk}
        if len(hit) > len(best_hit):
            best, best_hit = walk, hit
            if hit == boundary:
                break
    return best, best_hit


def glue_doubled(lat: Lattice, E, states) -> WeightedPlanarGraph:
    """G_E and its conjugate mirror copy identified along the boundary.

    The mirror copy is drawn inside a face F of G_E that touches every
    boundary vertex. At a glued vertex the rotation is the original cyclic
    order read from the corner F uses there, followed by the mirror's darts
    in reverse, which nests the mirror star inside that corner. Raises
    NonPlanarGluing when no face touches the whole boundary.
    """
    E = lat.edge_set(E)
    _require_connected(lat, E)
    g, _ = weighted_subgraph(lat, E, states)
    bd = boundary_vertices(lat, E)
    walk, hit = _best_face(g, bd)
    if hit != bd:
        raise NonPlanarGluing("no face of G_E touches every boundary vertex; the "
                              "unmeasured edges meet at a vertex between two faces")
    return _double(g, bd, walk)


def doubled_terms(g: WeightedPlanarGraph, boundary: frozenset) -> list[WeightedPlanarGraph]:
    """Planar graphs whose cycle sums add up to the fully glued doubled sum.

    Boundary vertices on the best gluing face are identified with their
    mirrors. Each remaining boundary vertex v gets a fixed syndrome bit b,
    carried as a defect at v and at its mirror when b = 1, which decouples
    the two copies there.
    """
    if not boundary:
        return [_double(g, boundary, None)]
    walk, hit = _best_face(g, boundary)
    off = sorted(boundary - hit)
    if len(off) > MAX_UNGLUED:
        raise NonPlanarGluing(f"{len(off)} boundary vertices off the gluing face "
                              f"(limit {MAX_UNGLUED})")
    base = _double(g, hit, walk)
    shift_v = g._next_vertex
    terms = []
    for bits in itertools.product((0, 1), repeat=len(off)):
        t = base.copy() if off else base
        for v, b in zip(off, bits):
            if b:
                t.defects ^= {v, v + shift_v}
        terms.append(t)
    return terms


def _double(g: WeightedPlanarGraph, glued: frozenset, walk) -> WeightedPlanarGraph:
    shift_v = g._next_vertex
    shift_e = g._next_edge
    d = g.copy()
    mv = {s: (s if s in glued else s + shift_v) for s in g.rotation}
    for e, ed in g.edges.items():
        d.add_edge(mv[ed.u], mv[ed.v], ed.w.conjugate(), eid=e + shift_e, forced=ed.forced)
    d.defects = set(g.defects) | {mv[s] for s in g.defects}

    def mirror(dart):
        return (dart[0] + shift_e, dart[1])

    for s, rot in g.rotation.items():
        if s not in glued:
            d.rotation[mv[s]] = [mirror(x) for x in reversed(rot)]
    if glued:
        where = {}
        for s, rot in g.rotation.items():
            for i, x in enumerate(rot):
                where[x] = (s, i)
        done = set()
        for e, side in walk:
            v, i = where[(e, 1 - side)]
            if v not in glued or v in done:
                continue
            done.add(v)
            rot = g.rotation[v]
            # corner (rot[i], rot[i + 1]); restart the cycle at rot[i + 1]
            seq = rot[i + 1:] + rot[: i + 1]
            d.rotation[v] = seq + [mirror(x) for x in reversed(seq)]
    d.check_embedding()
    return d


def syndrome_count(lat: Lattice, E) -> int:
    """log2 of the number of syndromes: |boundary(E)| - 1."""
    E = lat.edge_set(E)
    if not E or len(E) == lat.n_edges:
        raise ValueError("syndrome_count needs E and its complement nonempty")
    _require_connected(lat, E)
    return len(boundary_vertices(lat, E)) - 1


def partial_overlap(lat: Lattice, E, states) -> float:
    """log <Phi| rho_E |Phi> with rho_E the reduced state of the code state on E.

    Equals Z(doubled) * prod|amp|^2 / (2^{|dE| - 1} 2^{dim Z(E)}), the sum over
    syndromes being carried by the cycle sum on the glued graph.
    """
    E = lat.edge_set(E)
    if not E:
        return 0.0
    _require_connected(lat, E)
    states = _check_states(lat, E, states)
    g, log_amp = weighted_subgraph(lat, E, states)
    bd = boundary_vertices(lat, E)
    logs = [log_abs_partition(t) for t in doubled_terms(g, bd)]
    top = max(logs)
    if top == -math.inf:
        return -math.inf
    log_z = top + math.log(sum(math.exp(x - top) for x in logs))
    dim = gf2.cycle_space_dim(subgraph_embedding(lat, E))
    n_syn = len(bd) - 1 if bd else 0
    return 2 * log_amp + log_z - (n_syn + dim) * LOG2
