import math

import numpy as np
import pytest

from qcut import benchmarks
from qcut.circuit import parse_circuit
from qcut.cost import (
    CostModelConfig,
    classical_runtime,
    hss_metrics,
    mse,
    qpu_runtime,
    subcircuit_runtime,
    total_runtime,
)
from qcut.cutter import extract_subcircuits
from qcut.dag import build_dag
from qcut.finder import CutFinderConfig, find_cuts
from qcut.tensornet import ReconstructedDistribution, TensorNetwork, find_order, per_state_cost

REL = 1e-12

# hub-shaped plan: A-B, B-C, C-D, D-B (same topology as the four_net fixture)
FOUR_PART = "qubits 5\ncx 0 1\ncx 1 2\ncx 2 3\ncx 3 4\ncx 1 4\n"


def _tree(plan):
    net = TensorNetwork.from_topology([s.edges for s in plan.subcircuits])
    return find_order(net)


def test_single_subcircuit_runtime():
    assert subcircuit_runtime(1, 0, 3, 2, CostModelConfig()) == pytest.approx(2.88e-5, rel=REL)


def test_classical_runtime():
    assert classical_runtime(144 * 10**6) == pytest.approx(1.44e-4, rel=REL)
    assert classical_runtime(0) == 0
    with pytest.raises(ValueError):
        classical_runtime(-1)


def test_two_block_qpu_sum(two_block):
    state = find_cuts(build_dag(two_block), CutFinderConfig(3, 6))
    plan = extract_subcircuits(two_block, state)
    cfg = CostModelConfig()
    a, b = plan.subcircuits
    hand = (3**1 * 2**3 * (a.depth * 1e-7 + 1e-6)) + (4**1 * 2**3 * (b.depth * 1e-7 + 1e-6))
    assert qpu_runtime(plan, cfg) == pytest.approx(hand, rel=REL)
    assert qpu_runtime(plan, cfg, parallel=True) == pytest.approx(hand / 10, rel=REL)


def test_qpu_additivity():
    c = benchmarks.supremacy(16, seed=1)
    plan = extract_subcircuits(c, find_cuts(build_dag(c), CutFinderConfig(8, 16)))
    cfg = CostModelConfig()
    parts = sum(qpu_runtime([s], cfg) for s in plan.subcircuits)
    assert qpu_runtime(plan, cfg) == pytest.approx(parts, rel=REL)


def test_uncut_baseline():
    c = benchmarks.ghz(6)
    plan = extract_subcircuits(c, {v: 0 for v in build_dag(c).vertices})
    report = total_runtime(plan, None, 10**6)
    serial = 2**6 * (c.depth * 1e-7 + 1e-6)
    assert report.T_QPU_serial == pytest.approx(serial, rel=REL)
    assert report.T_classical == 0
    assert report.T_total == report.T_QPU


def test_hub_plan_ratio():
    c = parse_circuit(FOUR_PART)
    plan = extract_subcircuits(c, {0: 0, 1: 1, 4: 1, 2: 2, 3: 3})
    assert (plan.m, plan.E) == (4, 4)
    tree = _tree(plan)
    assert per_state_cost(tree) == 132
    report = total_runtime(plan, tree, 1)
    assert report.advantage_ratio == pytest.approx(768 / 132, rel=REL)
    report = total_runtime(plan, tree, 10**6)
    assert report.T_classical == pytest.approx(132e6 / 1e12, rel=REL)


def test_single_cut_ratio_is_one(two_block):
    plan = extract_subcircuits(two_block, find_cuts(build_dag(two_block), CutFinderConfig(3, 6)))
    assert total_runtime(plan, _tree(plan), 1).advantage_ratio == 1.0


def test_config_validation():
    with pytest.raises(ValueError):
        CostModelConfig(flops=0)


def test_mse_properties():
    rng = np.random.default_rng(2)
    a, b = rng.random(16), rng.random(16)
    assert mse(a, a) == 0
    assert mse(a, b) == mse(b, a) > 0
    with pytest.raises(ValueError):
        mse(a, b[:3])


def _dist(values, states=None):
    values = np.asarray(values, dtype=float)
    n = int(math.log2(len(values))) if states is None else None
    states = np.arange(len(values)) if states is None else np.asarray(states)
    return ReconstructedDistribution(n, states, values, 1.0)


def test_eta_ghz20_by_formula():
    n = 20
    truth = np.zeros(2**n)
    truth[[0, -1]] = 0.5
    rec = ReconstructedDistribution(n, np.array([0, 2**n - 1]), np.array([0.5, 0.5]), 1.0)
    m = hss_metrics(rec, 2, truth)
    assert m.eta_HSS == 524288
    assert m.P_HSS_max == 1.0


def test_uniform_ratio_is_one():
    n = 6
    truth = np.full(2**n, 1 / 2**n)
    for k in (1, 5, 17):
        rec = ReconstructedDistribution(n, np.arange(k), truth[:k].copy(), 1.0)
        assert hss_metrics(rec, k, truth).r_P_HSS == pytest.approx(1.0)


def test_perfect_reconstruction():
    truth = np.random.default_rng(0).dirichlet(np.ones(8))
    m = hss_metrics(_dist(truth), 8, truth)
    assert (m.P_HSS, m.eta_HSS, m.mse) == (pytest.approx(1.0), pytest.approx(1.0), 0.0)
