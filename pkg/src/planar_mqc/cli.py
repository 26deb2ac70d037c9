"""Command-line front end.

    planar-mqc simulate --config run.json [--output trace.json]
    planar-mqc overlap  --input qubits.json
    planar-mqc prob     --input qubits.json
    planar-mqc oracle-check --L 2 --trials 200
    planar-mqc bench --L 20 --fraction 0.5

Log verbosity comes from the PLANAR_MQC_LOG environment variable.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import jsonschema
import numpy as np

from .codestate import MeasurementBasis, QubitState, overlap_abs, partial_overlap
from .errors import ConnectivityViolation, DegenerateHistory, ResourceGuard
from .lattice import EdgeId, Lattice, is_connected
from .mqc import SimulationTrace, raster_order, simulate, strategy_from_json, validate_strategy

log = logging.getLogger("planar_mqc")

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_SCHEMA = 3
EXIT_CONNECTIVITY = 4
EXIT_RESOURCE = 5
EXIT_DEGENERATE = 6

_EDGE = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["h", "v"]},
        "row": {"type": "integer", "minimum": 0},
        "col": {"type": "integer", "minimum": 0},
    },
    "required": ["kind", "row", "col"],
    "additionalProperties": False,
}

_ANGLE_PAIR = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "schema": {"const": 1},
        "lattice_size": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "strategy": {
            "oneOf": [
                {
                    "type": "object",
                    "properties": {
                        "builtin": {"enum": ["raster_z", "raster_x", "raster_basis"]},
                        "theta": {"type": "number"},
                        "phi": {"type": "number"},
                        "reverse": {"type": "boolean"},
                    },
                    "required": ["builtin"],
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "properties": {
                        "scripted": {
                            "type": "array",
                            "items": {
                                "type": "object",
                                "properties": {
                                    "edge": _EDGE,
                                    "theta": {"type": "number"},
                                    "phi": {"type": "number"},
                                    "adapt": {
                                        "type": "object",
                                        "properties": {
                                            "parity_of": {
                                                "type": "array",
                                                "items": {"type": "integer", "minimum": 1},
                                            },
                                            "table": {
                                                "type": "object",
                                                "properties": {"0": _ANGLE_PAIR, "1": _ANGLE_PAIR},
                                                "required": ["0", "1"],
                                            },
                                        },
                                        "required": ["parity_of", "table"],
                                    },
                                },
                                "required": ["edge"],
                                "additionalProperties": False,
                            },
                        }
                    },
                    "required": ["scripted"],
                    "additionalProperties": False,
                },
            ]
        },
        "output_path": {"type": "string"},
        "emit_probabilities": {"type": "boolean"},
        "oracle_check": {"type": "boolean"},
    },
    "required": ["schema", "lattice_size", "seed", "strategy"],
    "additionalProperties": False,
}

TRACE_SCHEMA = {
    "type": "object",
    "properties": {
        "schema": {"const": 1},
        "lattice_size": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0},
        "rng": {"type": "string"},
        "strategy": {"type": "object"},
        "steps": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "edge": _EDGE,
                    "theta": {"type": "number"},
                    "phi": {"type": "number"},
                    "p0": {"type": "number", "minimum": 0, "maximum": 1},
                    "outcome": {"enum": [0, 1]},
                },
                "required": ["edge", "theta", "phi", "outcome"],
                "additionalProperties": False,
            },
        },
    },
    "required": ["schema", "lattice_size", "seed", "rng", "steps"],
}

QUBITS_SCHEMA = {
    "type": "object",
    "properties": {
        "schema": {"const": 1},
        "lattice_size": {"type": "integer", "minimum": 1},
        "qubits": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "properties": {
                    "edge": _EDGE,
                    "theta": {"type": "number"},
                    "phi": {"type": "number"},
                    "outcome": {"enum": [0, 1]},
                    "alpha": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
                    "beta": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
                },
                "required": ["edge"],
                "oneOf": [{"required": ["theta"]}, {"required": ["alpha", "beta"]}],
            },
        },
    },
    "required": ["schema", "lattice_size", "qubits"],
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    lattice_size: int
    seed: int
    strategy: dict
    output_path: str | None = None
    emit_probabilities: bool = True
    oracle_check: bool = False

    @classmethod
    def from_json(cls, obj: dict) -> "RunConfig":
        try:
            jsonschema.validate(obj, CONFIG_SCHEMA)
        except jsonschema.ValidationError as exc:
            raise ConfigError(f"config: {exc.message}") from None
        cfg = cls(
            obj["lattice_size"],
            obj["seed"],
            obj["strategy"],
            obj.get("output_path"),
            obj.get("emit_probabilities", True),
            obj.get("oracle_check", False),
        )
        lat = Lattice(cfg.lattice_size)
        if "scripted" in cfg.strategy:
            steps = cfg.strategy["scripted"]
            if len(steps) != lat.n_edges:
                raise ConfigError(
                    f"config: scripted strategy has {len(steps)} steps, lattice has {lat.n_edges} edges")
            for j, st in enumerate(steps, start=1):
                try:
                    lat.as_index(EdgeId.from_json(st["edge"]))
                except ValueError as exc:
                    raise ConfigError(f"config: step {j}: {exc}") from None
        if "builtin" in cfg.strategy and cfg.strategy["builtin"] == "raster_basis":
            if "theta" not in cfg.strategy:
                raise ConfigError("config: raster_basis needs theta")
        return cfg


def load_config(path) -> RunConfig:
    try:
        obj = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from None
    return RunConfig.from_json(obj)


def dump_trace(trace: SimulationTrace, emit_probabilities=True) -> str:
    obj = trace.to_json()
    if not emit_probabilities:
        for s in obj["steps"]:
            del s["p0"]
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def load_trace(text: str) -> SimulationTrace:
    obj = json.loads(text)
    jsonschema.validate(obj, TRACE_SCHEMA)
    for s in obj["steps"]:
        s.setdefault("p0", math.nan)
    return SimulationTrace.from_json(obj)


def _oracle_verify(lat: Lattice, trace: SimulationTrace) -> float:
    from .oracle import enumerate_cycles, oracle_partial

    cycles = enumerate_cycles(lat)
    worst = 0.0
    prev = 1.0
    states = {}
    for s in trace.steps:
        joint = []
        for m in (0, 1):
            st = dict(states)
            st[s.edge] = s.basis.state(m)
            joint.append(oracle_partial(lat, frozenset(st), st, cycles))
        worst = max(worst, abs(joint[0] / prev - s.p0))
        states[s.edge] = s.basis.state(s.outcome)
        prev = joint[s.outcome]
    return worst


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    out = args.output or cfg.output_path
    lat = Lattice(cfg.lattice_size)
    strategy = strategy_from_json(cfg.strategy)
    trace = simulate(lat, strategy, cfg.seed)
    if cfg.oracle_check:
        worst = _oracle_verify(lat, trace)
        log.info("oracle check: worst |p0 - oracle| = %.3g", worst)
        if worst > 1e-8:
            print(f"oracle mismatch {worst:.3g}", file=sys.stderr)
            return EXIT_CHECK_FAILED
    text = dump_trace(trace, cfg.emit_probabilities)
    if out:
        tmp = Path(out).with_suffix(Path(out).suffix + ".tmp")
        tmp.write_text(text)
        os.replace(tmp, out)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _load_qubits(path):
    try:
        obj = json.loads(Path(path).read_text())
        jsonschema.validate(obj, QUBITS_SCHEMA)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"input: cannot read {path}: {exc}") from None
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"input: {exc.message}") from None
    lat = Lattice(obj["lattice_size"])
    states = {}
    for q in obj["qubits"]:
        try:
            e = lat.as_index(EdgeId.from_json(q["edge"]))
        except ValueError as exc:
            raise ConfigError(f"input: {exc}") from None
        if "theta" in q:
            st = MeasurementBasis(q["theta"], q.get("phi", 0.0)).state(q.get("outcome", 0))
        else:
            st = QubitState.from_unnormalized(complex(*q["alpha"]), complex(*q["beta"]))
        states[e] = st
    return lat, states


def _emit_log_value(name, value) -> None:
    out = {name: None if value == -math.inf else value,
           "value": 0.0 if value == -math.inf else math.exp(value)}
    print(json.dumps(out, sort_keys=True))


def cmd_overlap(args) -> int:
    lat, states = _load_qubits(args.input)
    _emit_log_value("log_abs_overlap", overlap_abs(lat, frozenset(states), states))
    return EXIT_OK


def cmd_prob(args) -> int:
    lat, states = _load_qubits(args.input)
    _emit_log_value("log_probability", partial_overlap(lat, frozenset(states), states))
    return EXIT_OK


def random_qubit(rng) -> QubitState:
    v = rng.normal(size=4)
    return QubitState.from_unnormalized(complex(v[0], v[1]), complex(v[2], v[3]))


def random_connected_pair(lat: Lattice, rng, max_tries=10_000) -> frozenset:
    """Grow a random connected E by adjacent edges until its complement is
    connected too."""
    for _ in range(max_tries):
        k = int(rng.integers(1, lat.n_edges + 1))
        E = {int(rng.integers(lat.n_edges))}
        while len(E) < k:
            nb = sorted({f for e in E for s in lat.edge_ends[e]
                         for f in lat.incident_edges(int(s))} - E)
            E.add(int(rng.choice(nb)))
        E = frozenset(E)
        if is_connected(lat, lat.all_edges() - E):
            return E
    raise RuntimeError("no connected pair found")


def cmd_oracle_check(args) -> int:
    from .errors import NonPlanarGluing
    from .oracle import enumerate_cycles, oracle_overlap, oracle_partial

    lat = Lattice(args.L)
    if lat.L > 3:
        raise ResourceGuard(f"oracle-check limited to L <= 3, got L = {lat.L}")
    rng = np.random.default_rng(args.seed)
    cycles = enumerate_cycles(lat)
    tol = args.tol
    failures = 0
    skipped = 0
    for t in range(args.trials):
        states = {e: random_qubit(rng) for e in range(lat.n_edges)}
        ours = math.exp(overlap_abs(lat, lat.all_edges(), states))
        ref = abs(oracle_overlap(lat, states, cycles))
        if abs(ours - ref) > tol * ref and max(ours, ref) > 1e-12:
            failures += 1
            log.warning("overlap trial %d: %r vs oracle %r", t, ours, ref)
        E = random_connected_pair(lat, rng)
        states = {e: random_qubit(rng) for e in E}
        try:
            ours = math.exp(partial_overlap(lat, E, states))
        except NonPlanarGluing:
            skipped += 1
            continue
        ref = oracle_partial(lat, E, states, cycles)
        if abs(ours - ref) > tol * ref and max(ours, ref) > 1e-12:
            failures += 1
            log.warning("partial trial %d: %r vs oracle %r", t, ours, ref)
    print(json.dumps({"L": lat.L, "trials": args.trials, "failures": failures,
                      "skipped_nonplanar": skipped}, sort_keys=True))
    return EXIT_OK if failures == 0 else EXIT_CHECK_FAILED


def cmd_bench(args) -> int:
    lat = Lattice(args.L)
    order = raster_order(lat)
    k = max(1, min(lat.n_edges, int(round(args.fraction * lat.n_edges))))
    E = frozenset(order[:k])
    basis = MeasurementBasis(args.theta, args.phi)
    states = {e: basis.state(0) for e in E}
    times = []
    for _ in range(args.repeat):
        t0 = time.perf_counter()
        val = partial_overlap(lat, E, states)
        times.append(time.perf_counter() - t0)
    print(json.dumps({"L": lat.L, "measured": k, "log_probability": val,
                      "seconds": min(times)}, sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="planar-mqc", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="sample one measurement run from a config file")
    s.add_argument("--config", required=True)
    s.add_argument("--output")
    s.add_argument("--seed", type=int)
    s.set_defaults(func=cmd_simulate)

    for name, fn, text in (("overlap", cmd_overlap, "log|<G_E|Phi>| for a product state"),
                           ("prob", cmd_prob, "log <Phi|rho_E|Phi> for a product state")):
        s = sub.add_parser(name, help=text)
        s.add_argument("--input", required=True)
        s.set_defaults(func=fn)

    s = sub.add_parser("oracle-check", help="compare against brute-force enumeration")
    s.add_argument("--L", type=int, default=2)
    s.add_argument("--trials", type=int, default=200)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--tol", type=float, default=1e-8)
    s.set_defaults(func=cmd_oracle_check)

    s = sub.add_parser("bench", help="time one partial-measurement probability")
    s.add_argument("--L", type=int, default=10)
    s.add_argument("--fraction", type=float, default=0.5)
    s.add_argument("--theta", type=float, default=1.0)
    s.add_argument("--phi", type=float, default=0.3)
    s.add_argument("--repeat", type=int, default=1)
    s.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("PLANAR_MQC_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(exc, file=sys.stderr)
        return EXIT_SCHEMA
    except ConnectivityViolation as exc:
        print(f"connectivity violation: {exc}", file=sys.stderr)
        return EXIT_CONNECTIVITY
    except ResourceGuard as exc:
        print(f"resource guard: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except DegenerateHistory as exc:
        print(f"degenerate history: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
