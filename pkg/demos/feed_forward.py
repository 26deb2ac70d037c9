"""Adaptive measurement: the next basis depends on the outcome parity so far.

Run: python demos/feed_forward.py
"""

import time

from planar_mqc import Lattice, MeasurementBasis
from planar_mqc.mqc import CallbackStrategy, Measurement, raster_order, simulate

lat = Lattice(6)
order = raster_order(lat)


def feed_forward(lat, history):
    parity = sum(s.outcome for s in history) % 2
    theta = 0.9 if parity == 0 else 2.1
    return Measurement(order[len(history)], MeasurementBasis(theta, 0.3 * len(history)))


t0 = time.perf_counter()
tr = simulate(lat, CallbackStrategy(feed_forward, "feed_forward"), seed=1)
dt = time.perf_counter() - t0
print(f"L=6: {len(tr.steps)} adaptive steps in {dt:.1f} s")
for s in tr.steps[:6]:
    print(f"  edge {lat.edge_id(s.edge).to_json()} theta {s.basis.theta:.1f} "
          f"p0 {s.p0:.6f} outcome {s.outcome}")
print(f"log joint probability {tr.log_joint():.6f}")
