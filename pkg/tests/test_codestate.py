import itertools
import math

import numpy as np
import pytest

from planar_mqc import gf2
from planar_mqc.cli import random_connected_pair, random_qubit
from planar_mqc.codestate import (
    X_BASIS,
    Z_BASIS,
    MeasurementBasis,
    QubitState,
    doubled_terms,
    glue_doubled,
    overlap_abs,
    partial_overlap,
    syndrome_count,
    weighted_subgraph,
)
from planar_mqc.errors import ConnectivityViolation, NonPlanarGluing
from planar_mqc.lattice import Lattice, boundary_vertices, is_connected, subgraph_embedding
from planar_mqc.oracle import enumerate_cycles, oracle_overlap, oracle_partial

ZERO = QubitState(1, 0)
ONE = QubitState(0, 1)
PLUS = QubitState(1 / math.sqrt(2), 1 / math.sqrt(2))


def rel_close(a, b, rel=1e-9):
    return abs(a - b) <= rel * max(abs(a), abs(b)) or max(abs(a), abs(b)) < 1e-12


# -- states ---------------------------------------------------------------


def test_qubit_normalization():
    with pytest.raises(ValueError):
        QubitState(1, 1)
    s = QubitState.from_unnormalized(3, 4j)
    assert math.isclose(abs(s.alpha) ** 2 + abs(s.beta) ** 2, 1.0)


def test_basis_orthonormal():
    rng = np.random.default_rng(0)
    for _ in range(100):
        b = MeasurementBasis(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
        s0, s1 = b.state(0), b.state(1)
        inner = s0.alpha.conjugate() * s1.alpha + s0.beta.conjugate() * s1.beta
        assert abs(inner) < 1e-15
    assert Z_BASIS.state(0) == ZERO
    assert abs(X_BASIS.state(1).beta + 1 / math.sqrt(2)) < 1e-15
    with pytest.raises(ValueError):
        Z_BASIS.state(2)


# -- overlaps ---------------------------------------------------------------


@pytest.mark.parametrize("L", [1, 2, 3, 6])
def test_overlap_examples(L):
    lat = Lattice(L)
    E = lat.all_edges()
    assert math.isclose(overlap_abs(lat, E, {e: ZERO for e in E}), -L * L / 2 * math.log(2))
    expected = (lat.n_plaquettes - lat.n_edges) / 2 * math.log(2)
    assert math.isclose(overlap_abs(lat, E, {e: PLUS for e in E}), expected)
    states = {e: ZERO for e in E}
    states[0] = ONE
    assert overlap_abs(lat, E, states) == -math.inf


def test_overlap_accepts_edge_ids_and_pairs():
    lat = Lattice(1)
    states = {lat.edge_id(e): (1 / math.sqrt(2), 1 / math.sqrt(2)) for e in range(4)}
    assert math.isclose(overlap_abs(lat, lat.all_edges(), states), -1.5 * math.log(2))
    with pytest.raises(ValueError):
        overlap_abs(lat, lat.all_edges(), {0: ZERO})


def test_overlap_vs_oracle():
    rng = np.random.default_rng(1)
    for L in (1, 2):
        lat = Lattice(L)
        cycles = enumerate_cycles(lat)
        for _ in range(30):
            states = {e: random_qubit(rng) for e in range(lat.n_edges)}
            ours = math.exp(overlap_abs(lat, lat.all_edges(), states))
            assert rel_close(ours, abs(oracle_overlap(lat, states, cycles)), 1e-9)


# -- gluing -------------------------------------------------------------------


def test_glue_single_edge():
    lat = Lattice(2)
    e = lat.edge_index("h", 1, 0)
    w = 0.3 - 0.8j
    st = QubitState.from_unnormalized(1, w)
    d = glue_doubled(lat, {e}, {e: st})
    assert (d.n_vertices, d.n_edges) == (2, 2)
    ws = sorted((ed.w for ed in d.edges.values()), key=lambda z: z.imag)
    assert np.allclose(ws, [w, w.conjugate()])
    ends = {frozenset((ed.u, ed.v)) for ed in d.edges.values()}
    assert len(ends) == 1
    d.check_embedding()


def test_glue_all_edges_two_spheres():
    lat = Lattice(2)
    E = lat.all_edges()
    d = glue_doubled(lat, E, {e: PLUS for e in E})
    assert len(gf2.components(d)) == 2
    d.check_embedding()


def test_glue_plaquette():
    lat = Lattice(2)
    E = lat.plaquette_edges[0].tolist()
    d = glue_doubled(lat, E, {e: PLUS for e in E})
    d.check_embedding()
    bd = boundary_vertices(lat, E)
    assert len(bd) == 3
    assert d.n_vertices == 2 * 4 - 3
    assert all(d.degree(s) == 4 for s in bd)


def test_glue_requires_connectivity():
    lat = Lattice(2)
    with pytest.raises(ConnectivityViolation):
        glue_doubled(lat, {0, 5}, {0: ZERO, 5: ZERO})
    # E surrounds h(0, 0), cutting it off from the rest of the complement
    E = {lat.edge_index("v", 0, 0), lat.edge_index("h", 1, 0), lat.edge_index("v", 0, 1),
         lat.edge_index("h", 0, 1)}
    assert is_connected(lat, E)
    assert not is_connected(lat, lat.all_edges() - E)
    with pytest.raises(ConnectivityViolation):
        partial_overlap(lat, E, {e: ZERO for e in E})


# unmeasured edges: the two vertical edges through the centre of L = 2
PINCH = ("v", 0, 1), ("v", 1, 1)


def test_pinched_complement():
    """A complement connected only through one vertex leaves no face of G_E
    touching the whole boundary; the probability is still exact."""
    lat = Lattice(2)
    Ebar = lat.edge_set(PINCH)
    E = lat.all_edges() - Ebar
    assert is_connected(lat, E) and is_connected(lat, Ebar)
    rng = np.random.default_rng(2)
    states = {e: random_qubit(rng) for e in E}
    with pytest.raises(NonPlanarGluing):
        glue_doubled(lat, E, states)
    assert issubclass(NonPlanarGluing, ConnectivityViolation)
    g, _ = weighted_subgraph(lat, E, states)
    terms = doubled_terms(g, boundary_vertices(lat, E))
    assert len(terms) == 2
    for t in terms:
        t.check_embedding()
    ours = math.exp(partial_overlap(lat, E, states))
    assert rel_close(ours, oracle_partial(lat, E, states), 1e-10)


# -- partial overlaps ------------------------------------------------------


def test_partial_full_set_is_pure():
    rng = np.random.default_rng(3)
    for L in (1, 2, 3):
        lat = Lattice(L)
        states = {e: random_qubit(rng) for e in range(lat.n_edges)}
        E = lat.all_edges()
        assert math.isclose(partial_overlap(lat, E, states), 2 * overlap_abs(lat, E, states),
                            rel_tol=1e-9, abs_tol=1e-12)


def test_partial_single_edge_is_half():
    rng = np.random.default_rng(4)
    for L in (1, 2, 3, 5):
        lat = Lattice(L)
        for e in range(lat.n_edges):
            b = MeasurementBasis(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
            for st in (ZERO, b.state(int(rng.integers(2)))):
                assert math.isclose(partial_overlap(lat, {e}, {e: st}), -math.log(2),
                                    rel_tol=1e-12)


def test_partial_empty_set():
    assert partial_overlap(Lattice(2), set(), {}) == 0.0


def test_partial_vs_oracle_exhaustive_l2():
    """Every admissible E at L = 2, one random product state each."""
    lat = Lattice(2)
    cycles = enumerate_cycles(lat)
    rng = np.random.default_rng(5)
    n = 0
    for k in range(1, lat.n_edges + 1):
        for E in itertools.combinations(range(lat.n_edges), k):
            E = frozenset(E)
            if not (is_connected(lat, E) and is_connected(lat, lat.all_edges() - E)):
                continue
            states = {e: random_qubit(rng) for e in E}
            ours = math.exp(partial_overlap(lat, E, states))
            assert rel_close(ours, oracle_partial(lat, E, states, cycles), 1e-9)
            n += 1
    assert n == 737


def test_total_probability():
    """Summing both outcomes of one more qubit reproduces the smaller set."""
    rng = np.random.default_rng(6)
    for L in (2, 3, 4):
        lat = Lattice(L)
        for _ in range(20):
            E = random_connected_pair(lat, rng)
            nb = [f for f in lat.all_edges() - E
                  if is_connected(lat, E | {f}) and is_connected(lat, lat.all_edges() - E - {f})]
            if not nb:
                continue
            f = int(rng.choice(nb))
            states = {e: random_qubit(rng) for e in E}
            b = MeasurementBasis(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
            total = sum(math.exp(partial_overlap(lat, E | {f}, {**states, f: b.state(m)}))
                        for m in (0, 1))
            assert math.isclose(total, math.exp(partial_overlap(lat, E, states)), rel_tol=1e-9)


def test_near_pole_projection():
    lat = Lattice(2)
    cycles = enumerate_cycles(lat)
    rng = np.random.default_rng(7)
    for _ in range(50):
        E = random_connected_pair(lat, rng)
        states = {}
        for e in E:
            theta = rng.choice([1e-14, math.pi - 1e-14, rng.uniform(0, math.pi)])
            states[e] = MeasurementBasis(theta, rng.uniform(0, 2 * math.pi)).state(
                int(rng.integers(2)))
        ours = math.exp(partial_overlap(lat, E, states))
        assert rel_close(ours, oracle_partial(lat, E, states, cycles), 1e-8)


def test_large_lattice_stays_finite():
    lat = Lattice(12)
    from planar_mqc.mqc import raster_order

    E = frozenset(raster_order(lat)[: lat.n_edges // 2])
    b = MeasurementBasis(math.pi - 1e-9, 0.4)
    val = partial_overlap(lat, E, {e: b.state(1) for e in E})
    assert math.isfinite(val) and val < 0


# -- syndromes -----------------------------------------------------------------


def test_syndrome_examples():
    lat = Lattice(2)
    assert syndrome_count(lat, lat.plaquette_edges[0].tolist()) == 2
    assert syndrome_count(lat, {lat.edge_index("h", 1, 0)}) == 1
    with pytest.raises(ConnectivityViolation):
        syndrome_count(lat, {0, 5})
    with pytest.raises(ValueError):
        syndrome_count(lat, lat.all_edges())


def test_syndrome_count_vs_rank():
    """|boundary E| - 1 equals the dimension of the boundaries of chains on E
    that are even at interior vertices: rank(all rows) - rank(interior rows)."""
    rng = np.random.default_rng(8)
    for _ in range(100):
        lat = Lattice(int(rng.integers(1, 4)))
        E = random_connected_pair(lat, rng)
        if len(E) == lat.n_edges:
            continue
        bd = boundary_vertices(lat, E)
        m, verts, cols = gf2.boundary_matrix(subgraph_embedding(lat, E))
        inner = [r for s, r in zip(verts, m.rows) if s not in bd]
        dim = m.rank() - gf2.BitMatrix(len(inner), len(cols), inner).rank()
        assert syndrome_count(lat, E) == dim
