"""Adaptive single-qubit measurement sequences on the planar code state.

A strategy picks the next edge and basis from the outcomes seen so far. The
simulator samples each outcome from its exact conditional probability,
obtained as a ratio of partial-measurement probabilities.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .codestate import MeasurementBasis, partial_overlap
from .errors import ConnectivityViolation, DegenerateHistory, NonPlanarGluing
from .lattice import EdgeId, Lattice, is_connected

log = logging.getLogger(__name__)

RNG_NAME = "numpy.PCG64"
PROB_SLACK = 1e-9


@dataclass(frozen=True)
class Measurement:
    edge: int
    basis: MeasurementBasis


@dataclass(frozen=True)
class StepRecord:
    step: int
    edge: int
    theta: float
    phi: float
    p0: float
    outcome: int

    @property
    def basis(self) -> MeasurementBasis:
        return MeasurementBasis(self.theta, self.phi)


@dataclass
class SimulationTrace:
    lattice_size: int
    seed: int
    steps: list[StepRecord] = field(default_factory=list)
    rng: str = RNG_NAME
    strategy: Optional[dict] = None

    @property
    def outcomes(self) -> list[int]:
        return [s.outcome for s in self.steps]

    def outcome_chain(self) -> dict[int, int]:
        return {s.edge: s.outcome for s in self.steps}

    def log_joint(self) -> float:
        total = 0.0
        for s in self.steps:
            p = s.p0 if s.outcome == 0 else 1.0 - s.p0
            total += math.log(p) if p > 0 else -math.inf
        return total

    def to_json(self, lat: Lattice | None = None) -> dict:
        lat = lat or Lattice(self.lattice_size)
        out = {
            "schema": 1,
            "lattice_size": self.lattice_size,
            "seed": self.seed,
            "rng": self.rng,
            "steps": [
                {
                    "edge": lat.edge_id(s.edge).to_json(),
                    "theta": s.theta,
                    "phi": s.phi,
                    "p0": s.p0,
                    "outcome": s.outcome,
                }
                for s in self.steps
            ],
        }
        if self.strategy is not None:
            out["strategy"] = self.strategy
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "SimulationTrace":
        lat = Lattice(int(obj["lattice_size"]))
        steps = [
            StepRecord(
                j + 1,
                lat.as_index(EdgeId.from_json(s["edge"])),
                float(s["theta"]),
                float(s["phi"]),
                float(s["p0"]),
                int(s["outcome"]),
            )
            for j, s in enumerate(obj["steps"])
        ]
        return cls(int(obj["lattice_size"]), int(obj["seed"]), steps,
                   obj.get("rng", RNG_NAME), obj.get("strategy"))


# -- strategies ---------------------------------------------------------------


def raster_order(lat: Lattice) -> list[int]:
    """Row sweep: horizontal edges of row r left to right, then the vertical
    edges hanging below row r. Every prefix and suffix stays connected."""
    L = lat.L
    order = []
    for r in range(L + 1):
        order += [lat.edge_index("h", r, c) for c in range(L)]
        if r < L:
            order += [lat.edge_index("v", r, c) for c in range(L + 1)]
    return order


class Strategy:
    name = "strategy"

    def next_measurement(self, lat: Lattice, history: Sequence[StepRecord]) -> Measurement:
        raise NotImplementedError

    def static_order(self, lat: Lattice) -> Optional[list[int]]:
        """Edge order when it does not depend on outcomes, else None."""
        return None

    def to_json(self) -> dict:
        raise TypeError(f"strategy {self.name!r} is not serializable")


class RasterStrategy(Strategy):
    def __init__(self, theta: float, phi: float = 0.0, name="raster_basis", reverse=False):
        self.basis = MeasurementBasis(float(theta), float(phi))
        self.name = name
        self.reverse = reverse
        self._orders = {}

    def static_order(self, lat):
        if lat.L not in self._orders:
            order = raster_order(lat)
            self._orders[lat.L] = order[::-1] if self.reverse else order
        return list(self._orders[lat.L])

    def next_measurement(self, lat, history):
        if lat.L not in self._orders:
            self.static_order(lat)
        return Measurement(self._orders[lat.L][len(history)], self.basis)

    def to_json(self):
        out = {"builtin": self.name}
        if self.name == "raster_basis":
            out.update(theta=self.basis.theta, phi=self.basis.phi)
        if self.reverse:
            out["reverse"] = True
        return out


def raster_z(reverse=False) -> RasterStrategy:
    return RasterStrategy(0.0, 0.0, "raster_z", reverse)


def raster_x(reverse=False) -> RasterStrategy:
    return RasterStrategy(math.pi / 2, 0.0, "raster_x", reverse)


def raster_basis(theta: float, phi: float = 0.0, reverse=False) -> RasterStrategy:
    return RasterStrategy(theta, phi, "raster_basis", reverse)


@dataclass(frozen=True)
class ScriptStep:
    """One scripted measurement.

    With ``parity_of`` set, the basis is ``table[b]`` where b is the XOR of
    the outcomes of the listed (1-based) earlier steps.
    """

    edge: EdgeId
    basis: MeasurementBasis
    parity_of: tuple = ()
    table: Optional[dict] = None

    def choose(self, history: Sequence[StepRecord]) -> MeasurementBasis:
        if not self.parity_of:
            return self.basis
        bit = 0
        for k in self.parity_of:
            bit ^= history[k - 1].outcome
        return self.table[bit]


class ScriptedStrategy(Strategy):
    name = "scripted"

    def __init__(self, steps: Sequence[ScriptStep]):
        self.steps = list(steps)
        for j, st in enumerate(self.steps, start=1):
            if any(not 1 <= k < j for k in st.parity_of):
                raise ValueError(f"step {j}: parity_of must name earlier steps")

    def static_order(self, lat):
        return [lat.as_index(st.edge) for st in self.steps]

    def next_measurement(self, lat, history):
        st = self.steps[len(history)]
        return Measurement(lat.as_index(st.edge), st.choose(history))

    def to_json(self):
        steps = []
        for st in self.steps:
            item = {"edge": st.edge.to_json(), "theta": st.basis.theta, "phi": st.basis.phi}
            if st.parity_of:
                item["adapt"] = {
                    "parity_of": list(st.parity_of),
                    "table": {str(b): [st.table[b].theta, st.table[b].phi] for b in (0, 1)},
                }
            steps.append(item)
        return {"scripted": steps}


class CallbackStrategy(Strategy):
    """Adaptive strategy backed by ``fn(lat, history) -> Measurement``."""

    def __init__(self, fn: Callable, name="callback"):
        self.fn = fn
        self.name = name

    def next_measurement(self, lat, history):
        return self.fn(lat, history)


def strategy_from_json(obj: dict) -> Strategy:
    if "builtin" in obj:
        name = obj["builtin"]
        rev = bool(obj.get("reverse", False))
        if name == "raster_z":
            return raster_z(rev)
        if name == "raster_x":
            return raster_x(rev)
        if name == "raster_basis":
            return raster_basis(float(obj["theta"]), float(obj.get("phi", 0.0)), rev)
        raise ValueError(f"unknown builtin strategy {name!r}")
    if "scripted" in obj:
        steps = []
        for item in obj["scripted"]:
            basis = MeasurementBasis(float(item.get("theta", 0.0)), float(item.get("phi", 0.0)))
            adapt = item.get("adapt")
            if adapt:
                table = {int(b): MeasurementBasis(*map(float, v)) for b, v in adapt["table"].items()}
                steps.append(ScriptStep(EdgeId.from_json(item["edge"]), basis,
                                        tuple(int(k) for k in adapt["parity_of"]), table))
            else:
                steps.append(ScriptStep(EdgeId.from_json(item["edge"]), basis))
        return ScriptedStrategy(steps)
    raise ValueError("strategy must be {'builtin': ...} or {'scripted': [...]}")


# -- probabilities --------------------------------------------------------------


def _history_items(history) -> list[tuple[int, MeasurementBasis, int]]:
    out = []
    for h in history:
        if isinstance(h, StepRecord):
            out.append((h.edge, h.basis, h.outcome))
        else:
            e, basis, m = h
            out.append((int(e), basis, int(m)))
    return out


def joint_log_probability(lat: Lattice, items, cache: dict | None = None) -> float:
    """log p(m_1..m_j) for ((edge, basis, outcome), ...)."""
    if not items:
        return 0.0
    key = (lat.L, frozenset((e, b.theta, b.phi, m) for e, b, m in items))
    if cache is not None and key in cache:
        return cache[key]
    states = {e: b.state(m) for e, b, m in items}
    val = partial_overlap(lat, frozenset(states), states)
    if cache is not None:
        cache[key] = val
    return val


def _check_step(lat: Lattice, measured: frozenset, edge: int, step: int) -> None:
    if edge in measured:
        raise ValueError(f"step {step}: edge {lat.edge_id(edge)} already measured")
    E = measured | {edge}
    if not is_connected(lat, E):
        raise ConnectivityViolation(
            f"step {step}: measured set disconnected after {lat.edge_id(edge)}", step, edge)
    if not is_connected(lat, lat.all_edges() - E):
        raise ConnectivityViolation(
            f"step {step}: unmeasured set disconnected after {lat.edge_id(edge)}", step, edge)


def outcome_probabilities(lat: Lattice, history, nxt: Measurement,
                          cache: dict | None = None) -> tuple[float, float]:
    """(p0, p1) for the next measurement given the history."""
    items = _history_items(history)
    step = len(items) + 1
    _check_step(lat, frozenset(e for e, _, _ in items), nxt.edge, step)
    try:
        prev = joint_log_probability(lat, items, cache)
        l0 = joint_log_probability(lat, items + [(nxt.edge, nxt.basis, 0)], cache)
        l1 = joint_log_probability(lat, items + [(nxt.edge, nxt.basis, 1)], cache)
    except NonPlanarGluing as exc:
        raise NonPlanarGluing(f"step {step}: {exc}", step, nxt.edge) from None
    if prev == -math.inf:
        raise DegenerateHistory(f"step {step}: recorded history has probability zero")
    if l0 == -math.inf and l1 == -math.inf:
        raise DegenerateHistory(f"step {step}: both outcomes have probability zero")
    p0, p1 = math.exp(l0 - prev), math.exp(l1 - prev)
    if p0 > 1 + PROB_SLACK or p1 > 1 + PROB_SLACK or abs(p0 + p1 - 1) > PROB_SLACK:
        log.debug("step %d: raw conditional pair (%.3g, %.3g) off by %.3g",
                  step, p0, p1, p0 + p1 - 1)
    p0, p1 = min(p0, 1.0), min(p1, 1.0)
    total = p0 + p1
    return p0 / total, p1 / total


def conditional_probability(lat: Lattice, history, nxt: Measurement, outcome: int,
                            cache: dict | None = None) -> float:
    """p(m_j = outcome || history)."""
    p = outcome_probabilities(lat, history, nxt, cache)
    return p[outcome]


def simulate(lat: Lattice, strategy: Strategy, seed: int, cache: dict | None = None
             ) -> SimulationTrace:
    """Sample a full outcome string by the chain rule, one uniform draw per step."""
    rng = np.random.Generator(np.random.PCG64(seed))
    if cache is None:
        cache = {}
    try:
        desc = strategy.to_json()
    except TypeError:
        desc = {"name": strategy.name}
    trace = SimulationTrace(lat.L, int(seed), strategy=desc)
    for _ in range(lat.n_edges):
        m = strategy.next_measurement(lat, trace.steps)
        p0, _ = outcome_probabilities(lat, trace.steps, m, cache)
        outcome = 0 if rng.random() < p0 else 1
        trace.steps.append(StepRecord(len(trace.steps) + 1, m.edge, m.basis.theta,
                                      m.basis.phi, p0, outcome))
    return trace


@dataclass(frozen=True)
class Violation:
    step: int
    edge: int
    reason: str


def validate_strategy(lat: Lattice, strategy) -> list[Violation]:
    """Steps of a fixed edge order at which E_j or its complement is disconnected.

    ``strategy`` may also be a plain list of edges.
    """
    order = strategy if isinstance(strategy, (list, tuple)) else strategy.static_order(lat)
    if order is None:
        raise TypeError("adaptive orders are validated online by simulate")
    order = [lat.as_index(e) for e in order]
    out = []
    measured = set()
    for j, e in enumerate(order, start=1):
        if e in measured:
            out.append(Violation(j, e, "repeat"))
            continue
        measured.add(e)
        E = frozenset(measured)
        if not is_connected(lat, E):
            out.append(Violation(j, e, "measured"))
        if not is_connected(lat, lat.all_edges() - E):
            out.append(Violation(j, e, "unmeasured"))
    if len(measured) != lat.n_edges:
        out.append(Violation(len(order), -1, "incomplete"))
    return out
