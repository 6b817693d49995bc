import numpy as np
import pytest

from qcut import benchmarks
from qcut.circuit import parse_circuit
from qcut.cutter import (
    INIT_STATES,
    MEASURE_SETTINGS,
    assignment_from_json,
    enumerate_variants,
    extract_subcircuits,
    plan_to_json,
)
from qcut.dag import build_dag
from qcut.finder import CutFinderConfig, find_cuts
from qcut.simulator import probabilities, variant_probabilities

CHAIN = "qubits 3\ncx 0 1\ncx 1 2\ncx 0 1\n"


def _cut(c, w_max, s_max):
    state = find_cuts(build_dag(c), CutFinderConfig(w_max, s_max))
    return extract_subcircuits(c, state, w_max=w_max)


def test_two_block_single_cut(two_block):
    plan = _cut(two_block, 3, 6)
    assert (plan.m, plan.E) == (2, 1)
    a, b = plan.subcircuits
    assert a.width == b.width == 3
    assert (a.u, a.d, b.u, b.d) == (1, 0, 0, 1)
    edge = plan.cut_edges[0]
    assert edge.origin_qubit == 2
    assert edge.upstream == (0, a.upstream_cuts[0])
    assert edge.downstream == (1, b.downstream_cuts[0])
    assert [orig for _, orig in a.output_map] == [0, 1]
    assert [orig for _, orig in b.output_map] == [2, 3, 4]


def test_uncut_plan_is_identity(two_block):
    plan = extract_subcircuits(two_block, {v: 0 for v in build_dag(two_block).vertices})
    assert (plan.m, plan.E) == (1, 0)
    (s,) = plan.subcircuits
    assert s.circuit == two_block
    assert s.output_map == tuple((q, q) for q in range(5))


def test_chain_cut_twice():
    c = parse_circuit(CHAIN)
    plan = extract_subcircuits(c, {0: 0, 1: 1, 2: 0})
    assert plan.E == 2
    assert all(e.origin_qubit == 1 for e in plan.cut_edges)
    a, b = plan.subcircuits
    # qubit 1 lives in three wire runs: two in A, one in B
    assert a.width == 3 and b.width == 2
    assert b.u == 1 and b.d == 1
    assert b.upstream_cuts == b.downstream_cuts
    assert a.u == 1 and a.d == 1
    assert sorted(orig for _, orig in a.output_map + b.output_map) == [0, 1, 2]


@pytest.mark.parametrize("u, d, count", [(1, 0, 3), (0, 1, 4), (0, 0, 1)])
def test_variant_counts(two_block, u, d, count):
    plan = _cut(two_block, 3, 6)
    if u == d == 0:
        plan = extract_subcircuits(two_block, {v: 0 for v in build_dag(two_block).vertices})
    s = next(s for s in plan.subcircuits if (s.u, s.d) == (u, d))
    variants = enumerate_variants(s)
    assert len(variants) == count
    if count == 1:
        assert variants[0][1] == s.circuit


def test_variant_order_and_rotations():
    c = parse_circuit(CHAIN)
    plan = extract_subcircuits(c, {0: 0, 1: 1, 2: 0})
    s = plan.subcircuits[1]
    variants = enumerate_variants(s)
    assert len(variants) == 3**s.u * 4**s.d
    assert [key for key, _ in variants[:4]] == [(("Z",), (x,)) for x in INIT_STATES]
    assert [key[0][0] for key, _ in variants[::4]] == list(MEASURE_SETTINGS)
    # the measurement rotation is the last operation on the cut wire
    (settings, _), vc = variants[8]  # Y setting
    q = s.upstream_cuts[0]
    tail = [g.name for g in vc.gates if q in g.operands][-2:]
    assert settings == ("Y",) and tail == ["sdg", "h"]


def test_gate_conservation_random():
    for seed in range(30):
        n = 6 + seed % 5
        c = benchmarks.random_circuit(n, 5 * n, seed, 0.4)
        plan = _cut(c, (n + 1) // 2 + 1, max(1, c.num_two_qubit_gates // 2))
        assert sum(len(s.circuit.gates) for s in plan.subcircuits) == len(c.gates)
        indices = sorted(i for s in plan.subcircuits for i in s.gate_indices)
        assert indices == list(range(len(c.gates)))
        outputs = sorted(orig for s in plan.subcircuits for _, orig in s.output_map)
        assert outputs == list(range(n))
        assert sum(s.u for s in plan.subcircuits) == plan.E == sum(s.d for s in plan.subcircuits)


def test_single_qubit_gates_follow_preceding_two_qubit_gate():
    c = parse_circuit("qubits 3\nh 1\ncx 0 1\nrz(0.2) 1\ncx 1 2\n")
    plan = extract_subcircuits(c, {1: 0, 3: 1})
    a, b = plan.subcircuits
    assert a.gate_indices == (0, 1, 2)  # h before the first gate, rz after it
    assert b.gate_indices == (3,)


def test_idle_qubit_placed():
    c = parse_circuit("qubits 4\nh 3\ncx 0 1\ncx 1 2\n")
    plan = extract_subcircuits(c, {1: 0, 2: 1})
    homes = {orig: s.id for s in plan.subcircuits for _, orig in s.output_map}
    assert set(homes) == {0, 1, 2, 3}
    assert sum(len(s.circuit.gates) for s in plan.subcircuits) == 3


def test_batched_variants_match_enumeration():
    c = benchmarks.random_circuit(7, 35, seed=9, two_qubit_fraction=0.45)
    plan = _cut(c, 4, 6)
    for s in plan.subcircuits:
        batched = variant_probabilities(s).reshape(-1, 2**s.width)
        one_by_one = np.array([probabilities(vc) for _, vc in enumerate_variants(s)])
        assert np.allclose(batched, one_by_one, atol=1e-12)


def test_plan_json_round_trip(two_block):
    plan = _cut(two_block, 3, 6)
    data = plan_to_json(plan)
    again = extract_subcircuits(two_block, assignment_from_json(data))
    assert plan_to_json(again) == data
