"""End-to-end cut, execute and reconstruct."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit
from .cutter import CutPlan, extract_subcircuits
from .dag import build_dag
from .finder import CutFinderConfig, PartitionState, find_cuts
from .hss import Selection, select_heavy_states
from .simulator import DEFAULT_MAX_QUBITS, SubcircuitTensor, run_subcircuit
from .tensornet import (
    ContractionTree,
    ReconstructedDistribution,
    SlicePlan,
    build_network,
    contract,
    find_order,
    slice_network,
)

DEFAULT_MEMORY_CAP = 2**26


def default_threads() -> int:
    env = os.environ.get("QCUT_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def cut(c: Circuit, config: CutFinderConfig) -> tuple[CutPlan, PartitionState]:
    dag = build_dag(c)
    state = find_cuts(dag, config)
    return extract_subcircuits(c, state, w_max=config.w_max), state


def run_tensors(plan: CutPlan, mode: str = "exact", shots: int | None = None, seed: int = 0,
                threads: int = 1, max_qubits: int = DEFAULT_MAX_QUBITS) -> list[SubcircuitTensor]:
    """Tensors of every subcircuit; subcircuit ``j`` samples with seed ``seed + j``."""
    def job(s):
        return run_subcircuit(s, mode=mode, shots=shots, seed=seed + s.id, max_qubits=max_qubits)

    if threads > 1 and plan.m > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(job, plan.subcircuits))
    return [job(s) for s in plan.subcircuits]


@dataclass
class Reconstruction:
    plan: CutPlan
    tensors: list[SubcircuitTensor]
    tree: ContractionTree
    slices: SlicePlan
    selection: Selection | None
    distribution: ReconstructedDistribution


def reconstruct(plan: CutPlan, tensors: list[SubcircuitTensor], hss_budget: int | None = None,
                restarts: int = 64, seed: int = 0, memory_cap: int = DEFAULT_MEMORY_CAP,
                threads: int = 1, clip: bool = False) -> Reconstruction:
    selection = None
    used = tensors
    if hss_budget is not None:
        selection = select_heavy_states(tensors, hss_budget)
        used = [t.restrict(x) for t, x in zip(tensors, selection.states)]
    net = build_network(plan, used)
    tree = find_order(net, restarts=restarts, seed=seed, allow_disconnected=True)
    slices = slice_network(net, tree, memory_cap)
    dist = contract(net, tree, slices, memory_cap=memory_cap, threads=threads)
    if clip:
        dist = clip_and_renormalize(dist)
    return Reconstruction(plan, tensors, tree, slices, selection, dist)


def clip_and_renormalize(dist: ReconstructedDistribution) -> ReconstructedDistribution:
    """Zero out negative quasi-probabilities and rescale to the original mass."""
    mass = dist.values.sum()
    values = np.clip(dist.values, 0, None)
    if values.sum() > 0 and mass > 0:
        values = values * (mass / values.sum())
    return ReconstructedDistribution(dist.num_qubits, dist.states, values,
                                     dist.normalization, dist.peak_elements)
