"""Random adaptive strategies and oracle conditionals for the sampling tests."""

import math

import numpy as np

from planar_mqc.codestate import MeasurementBasis
from planar_mqc.lattice import is_connected
from planar_mqc.mqc import CallbackStrategy, Measurement
from planar_mqc.oracle import oracle_partial


def admissible_edges(lat, measured):
    rest = lat.all_edges() - measured
    return sorted(f for f in rest
                  if is_connected(lat, measured | {f}) and is_connected(lat, rest - {f}))


def random_adaptive(seed, pole_prob=0.15) -> CallbackStrategy:
    """Edge and basis drawn from a generator seeded by ``seed`` and the outcomes
    so far, so the choice depends on the history."""

    def choose(lat, history):
        measured = frozenset(h.edge for h in history)
        bits = "".join(str(h.outcome) for h in history)
        rng = np.random.default_rng([seed, len(history), int("1" + bits, 2)])
        edge = int(rng.choice(admissible_edges(lat, measured)))
        if rng.random() < pole_prob:
            theta = float(rng.choice([1e-14, math.pi - 1e-14, 0.0, math.pi]))
        else:
            theta = float(rng.uniform(0, math.pi))
        return Measurement(edge, MeasurementBasis(theta, float(rng.uniform(0, 2 * math.pi))))

    return CallbackStrategy(choose, name=f"random_adaptive_{seed}")


def oracle_conditionals(lat, trace, cycles):
    """(p0, p1) for every step of a trace from the brute-force joint values."""
    out = []
    prev = 1.0
    states = {}
    for s in trace.steps:
        joint = []
        for m in (0, 1):
            st = {**states, s.edge: s.basis.state(m)}
            joint.append(oracle_partial(lat, frozenset(st), st, cycles))
        out.append((joint[0] / prev, joint[1] / prev))
        states[s.edge] = s.basis.state(s.outcome)
        prev = joint[s.outcome]
    return out
