"""Overlaps and partial-measurement probabilities against brute force.

Run: python demos/overlaps.py
"""

import math

import numpy as np

from planar_mqc import Lattice, MeasurementBasis, overlap_abs, partial_overlap
from planar_mqc.mqc import raster_order
from planar_mqc.oracle import enumerate_cycles, oracle_overlap, oracle_partial

rng = np.random.default_rng(1)


def random_basis():
    return MeasurementBasis(float(rng.uniform(0, math.pi)), float(rng.uniform(0, 2 * math.pi)))


lat = Lattice(3)
cycles = enumerate_cycles(lat)
print(f"L=3: {lat.n_edges} qubits, {len(cycles)} cycles in the code state")

states = {e: random_basis().state(int(rng.integers(2))) for e in range(lat.n_edges)}
ours = math.exp(overlap_abs(lat, lat.all_edges(), states))
ref = abs(oracle_overlap(lat, states, cycles))
print(f"full overlap   pfaffian {ours:.15e}  brute force {ref:.15e}")

E = frozenset(raster_order(lat)[:10])
part = {e: states[e] for e in E}
ours = math.exp(partial_overlap(lat, E, part))
ref = oracle_partial(lat, E, part, cycles)
print(f"partial (|E|=10) pfaffian {ours:.15e}  brute force {ref:.15e}")

big = Lattice(16)
E = frozenset(raster_order(big)[: big.n_edges // 2])
basis = random_basis()
val = partial_overlap(big, E, {e: basis.state(0) for e in E})
print(f"L=16, {len(E)} measured qubits: log probability {val:.6f}")
