"""Hybrid runtime model and heavy-state-selection metrics."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .cutter import CutPlan, Subcircuit
from .tensornet import ContractionTree, ReconstructedDistribution, per_state_cost, prior_cost


@dataclass(frozen=True)
class CostModelConfig:
    t_g: float = 1e-7  # seconds per gate layer
    t_m: float = 1e-6  # seconds per measurement
    flops: float = 1e12
    num_qpus: int = 10

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not value > 0:
                raise ValueError(f"{name} must be positive, got {value}")


def subcircuit_runtime(u: int, d: int, w: int, t: int, cfg: CostModelConfig) -> float:
    return 3**u * 4**d * 2**w * (t * cfg.t_g + cfg.t_m)


def qpu_runtime(plan: CutPlan | list[Subcircuit], cfg: CostModelConfig = CostModelConfig(),
                parallel: bool = False) -> float:
    """Seconds of QPU time for every variant of every subcircuit.

    ``parallel=True`` spreads the work evenly over ``cfg.num_qpus``.
    """
    subs = plan.subcircuits if isinstance(plan, CutPlan) else plan
    total = sum(subcircuit_runtime(s.u, s.d, s.width, s.depth, cfg) for s in subs)
    return total / cfg.num_qpus if parallel else total


def classical_runtime(c_tn: float, cfg: CostModelConfig = CostModelConfig()) -> float:
    if c_tn < 0:
        raise ValueError("contraction cost must be non-negative")
    return c_tn / cfg.flops


@dataclass
class CostReport:
    T_QPU: float
    T_QPU_serial: float
    T_classical: float
    T_total: float
    C_TN: int
    prior_cost: int
    advantage_ratio: float
    states: int
    subcircuits: list[dict]

    def to_json(self) -> dict:
        return {"schema": 1, **asdict(self)}


def total_runtime(plan: CutPlan, tree: ContractionTree | None, states: int,
                  cfg: CostModelConfig = CostModelConfig()) -> CostReport:
    serial = qpu_runtime(plan, cfg)
    parallel = serial / cfg.num_qpus
    per_state = per_state_cost(tree) if tree is not None else 0
    c_tn = per_state * states
    prior = prior_cost(plan.E, plan.m) * states
    ratio = prior / c_tn if c_tn else 1.0
    t_classical = classical_runtime(c_tn, cfg)
    return CostReport(
        T_QPU=parallel,
        T_QPU_serial=serial,
        T_classical=t_classical,
        T_total=parallel + t_classical,
        C_TN=c_tn,
        prior_cost=prior,
        advantage_ratio=ratio,
        states=states,
        subcircuits=[{"u": s.u, "d": s.d, "w": s.width, "t": s.depth} for s in plan.subcircuits],
    )


def mse(a, b) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.mean((a - b) ** 2))


@dataclass
class MetricsReport:
    P_HSS: float
    P_HSS_true: float
    P_HSS_max: float
    r_P_HSS: float
    r_size: float
    eta_HSS: float
    hss_size: int
    mse: float

    def to_json(self) -> dict:
        return {"schema": 1, **asdict(self)}


def hss_metrics(reconstruction: ReconstructedDistribution, selection,
                ground_truth: np.ndarray) -> MetricsReport:
    """Amplitude-retention metrics of a (heavy-state) reconstruction.

    ``P_HSS`` sums the reconstructed values over the selected states,
    ``P_HSS_true`` the ground-truth mass of the same states, and ``P_HSS_max``
    the mass of the ``|HSS|`` heaviest ground-truth states. ``selection`` is a
    :class:`~qcut.hss.Selection` or the composite-state count itself.
    """
    hss_size = selection if isinstance(selection, int) else selection.size
    n = reconstruction.num_qubits
    if hss_size > 2**n:
        raise ValueError(f"|HSS|={hss_size} exceeds the 2^{n} state space")
    truth = np.asarray(ground_truth, dtype=float)
    p_hss = float(np.sum(reconstruction.values))
    p_true = float(np.sum(truth[reconstruction.states]))
    p_max = float(np.sum(np.sort(truth)[::-1][:hss_size]))
    r_size = hss_size / 2**n
    return MetricsReport(
        P_HSS=p_hss,
        P_HSS_true=p_true,
        P_HSS_max=p_max,
        r_P_HSS=p_hss / p_max if p_max > 0 else 0.0,
        r_size=r_size,
        eta_HSS=p_hss / r_size,
        hss_size=hss_size,
        mse=mse(reconstruction.dense(), truth),
    )
