"""Brute-force references by explicit enumeration.

Everything here sums over explicitly listed configurations and shares no
code path with the reduction/Pfaffian pipeline beyond the lattice topology.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ResourceGuard
from .lattice import Lattice

MAX_L_CYCLES = 4
MAX_L_PARTIAL = 3
MAX_BRUTE_EDGES = 24


@dataclass
class CycleList:
    lattice: Lattice
    chains: np.ndarray  # (n_cycles, n_edges) uint8

    def __len__(self):
        return len(self.chains)


def _guard(lat: Lattice, limit: int) -> None:
    if lat.L > limit:
        raise ResourceGuard(f"oracle limited to L <= {limit}, got L = {lat.L}")


def enumerate_cycles(lat: Lattice) -> CycleList:
    """All 2**(L*L) cycles as XOR combinations of plaquette boundaries."""
    _guard(lat, MAX_L_CYCLES)
    chains = np.zeros((1, lat.n_edges), dtype=np.uint8)
    for p in range(lat.n_plaquettes):
        gen = np.zeros(lat.n_edges, dtype=np.uint8)
        gen[lat.plaquette_edges[p]] = 1
        chains = np.concatenate([chains, chains ^ gen])
    return CycleList(lat, chains)


def _vertex_parity(lat: Lattice, chains: np.ndarray) -> np.ndarray:
    par = np.zeros((len(chains), lat.n_vertices), dtype=np.uint8)
    for e, (a, b) in enumerate(lat.edge_ends):
        par[:, a] ^= chains[:, e]
        par[:, b] ^= chains[:, e]
    return par


def _amps(states) -> dict:
    out = {}
    for e, s in states.items():
        if hasattr(s, "alpha"):
            out[int(e)] = (complex(s.alpha), complex(s.beta))
        else:
            out[int(e)] = (complex(s[0]), complex(s[1]))
    return out


def _chain_amplitudes(chains: np.ndarray, amps: dict) -> np.ndarray:
    """prod over listed edges of <x_e|phi_e> for every chain."""
    out = np.ones(len(chains), dtype=complex)
    for e, (a, b) in amps.items():
        out *= np.where(chains[:, e] == 1, b, a)
    return out


def oracle_overlap(lat: Lattice, states, cycles: CycleList | None = None) -> complex:
    """<K|Phi> = |Z|^{-1/2} sum_x prod_e <x_e|phi_e> by direct summation."""
    _guard(lat, MAX_L_CYCLES)
    amps = _amps(states)
    if set(amps) != set(range(lat.n_edges)):
        raise ValueError("oracle_overlap needs a state on every edge")
    if cycles is None:
        cycles = enumerate_cycles(lat)
    total = _chain_amplitudes(cycles.chains, amps).sum()
    return complex(total / math.sqrt(len(cycles)))


def oracle_partial(lat: Lattice, E, states, cycles: CycleList | None = None) -> float:
    """<Phi|rho_E|Phi> from the cycle-pair sum.

    Pairs (x, y) of cycles agreeing off E contribute a_x conj(a_y); grouping
    cycles by their restriction to the complement turns the pair sum into a
    sum of squared group totals.
    """
    _guard(lat, MAX_L_PARTIAL)
    E = lat.edge_set(E)
    amps = _amps(states)
    if set(amps) != set(E):
        raise ValueError("product state must be defined on exactly E")
    if cycles is None:
        cycles = enumerate_cycles(lat)
    ch = cycles.chains
    a = _chain_amplitudes(ch, amps)
    rest = sorted(lat.all_edges() - E)
    if rest:
        _, key = np.unique(ch[:, rest], axis=0, return_inverse=True)
        key = key.ravel()
        n = key.max() + 1
        totals = np.bincount(key, a.real, n) + 1j * np.bincount(key, a.imag, n)
    else:
        totals = np.array([a.sum()])
    return float(np.sum(np.abs(totals) ** 2) / len(ch))


def oracle_pair_sum(lat: Lattice, E, states, cycles: CycleList | None = None) -> float:
    """Literal O(|Z|^2) pair sum; used to cross-check oracle_partial."""
    _guard(lat, MAX_L_PARTIAL)
    E = lat.edge_set(E)
    amps = _amps(states)
    if cycles is None:
        cycles = enumerate_cycles(lat)
    ch = cycles.chains
    a = _chain_amplitudes(ch, amps)
    rest = sorted(lat.all_edges() - E)
    agree = (ch[:, None, rest] == ch[None, :, rest]).all(axis=2)
    return float(np.real(np.sum(agree * (a[:, None] * a[None, :].conj()))) / len(ch))


def check_stabilizers(lat: Lattice, cycles: CycleList | None = None) -> bool:
    """Vertex operators act as +1 on every listed chain and each plaquette
    operator maps the list onto itself."""
    _guard(lat, MAX_L_PARTIAL)
    if cycles is None:
        cycles = enumerate_cycles(lat)
    ch = cycles.chains
    if len(ch) != 2 ** lat.n_plaquettes:
        return False
    if _vertex_parity(lat, ch).any():
        return False
    listed = {row.tobytes() for row in ch}
    if len(listed) != len(ch):
        return False
    for p in range(lat.n_plaquettes):
        gen = np.zeros(lat.n_edges, dtype=np.uint8)
        gen[lat.plaquette_edges[p]] = 1
        if {row.tobytes() for row in ch ^ gen} != listed:
            return False
    return True


def brute_force_cycle_sum(g) -> complex:
    """prefactor * sum over chains with boundary == defects of prod w_e,
    enumerating every edge subset."""
    eids = sorted(g.edges)
    n = len(eids)
    if n > MAX_BRUTE_EDGES:
        raise ResourceGuard(f"brute force limited to {MAX_BRUTE_EDGES} edges, got {n}")
    masks = np.arange(2 ** n, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(n)) & 1).astype(bool)
    ok = np.ones(len(masks), dtype=bool)
    verts = sorted(g.rotation)
    for s in verts:
        par = np.zeros(len(masks), dtype=np.int64)
        for j, e in enumerate(eids):
            ed = g.edges[e]
            if ed.u != ed.v and s in (ed.u, ed.v):
                par ^= bits[:, j]
        ok &= par == (1 if s in g.defects else 0)
    vals = np.ones(len(masks), dtype=complex)
    for j, e in enumerate(eids):
        ed = g.edges[e]
        if ed.forced is not None:
            ok &= bits[:, j] == bool(ed.forced)
        vals *= np.where(bits[:, j], ed.w, 1.0)
    return complex(g.prefactor * vals[ok].sum())


def brute_force_matching_sum(g) -> complex:
    """prefactor * sum over perfect matchings of prod w_e, by recursion."""
    adj = {s: [] for s in g.rotation}
    for e, ed in g.edges.items():
        if ed.u != ed.v:
            adj[ed.u].append((ed.v, ed.w))
            adj[ed.v].append((ed.u, ed.w))

    memo = {}

    def rec(free: frozenset) -> complex:
        if not free:
            return 1.0
        if free in memo:
            return memo[free]
        s = min(free)
        total = 0j
        for t, w in adj[s]:
            if t in free:
                total += w * rec(free - {s, t})
        memo[free] = total
        return total

    return complex(g.prefactor * rec(frozenset(g.rotation)))
