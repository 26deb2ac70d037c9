"""Sequential sampling: Z raster sweeps produce uniformly random cycles.

Run: python demos/sampling.py [samples]
"""

import collections
import sys

import numpy as np

from planar_mqc import Lattice
from planar_mqc.mqc import raster_x, raster_z, simulate

n = int(sys.argv[1]) if len(sys.argv) > 1 else 2000
lat = Lattice(2)
cache = {}
counts = collections.Counter()
for seed in range(n):
    tr = simulate(lat, raster_z(), seed, cache)
    counts[tuple(sorted(tr.outcome_chain().items()))] += 1

print(f"{n} Z sweeps on L=2: {len(counts)} distinct outcome strings (16 cycles expected)")
freq = np.array(sorted(counts.values())) / n
print(f"frequency range {freq.min():.4f} .. {freq.max():.4f}, uniform is {1 / 16:.4f}")

tr = simulate(lat, raster_x(), 0, cache)
out = tr.outcome_chain()
par = [sum(out[int(e)] for e in lat.plaquette_edges[p]) % 2 for p in range(lat.n_plaquettes)]
print(f"X sweep plaquette parities {par}")
