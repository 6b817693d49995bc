"""Greedy graph growing over the cut DAG.

Every two-qubit gate starts as its own partition. The cheapest feasible
merge is applied until no neighbouring pair can merge under the QPU
limits and the merging-cost cutoff.
"""

from __future__ import annotations

import hashlib
import math
from collections import Counter
from dataclasses import dataclass

from .dag import CutDag, WireSegment


class InfeasibleCutError(ValueError):
    """The constraints admit no partition at all."""


@dataclass(frozen=True)
class CutFinderConfig:
    w_max: int
    s_max_gates: int
    k_t: int = 10
    q_max: float = 1e4
    width_weight: float = 1.0
    size_weight: float = 1.0
    contraction_weight: float = 1.0

    def __post_init__(self):
        for name in ("w_max", "s_max_gates", "k_t", "q_max"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")


INFEASIBLE = math.inf


def classical_penalty(k: int, k_t: int) -> float:
    if k <= k_t:
        return k / k_t
    if k - k_t > 500:
        return math.inf
    return 4.0 ** (k - k_t) + 1


class PartitionState:
    """Mutable partition of the DAG's gate vertices.

    Caches per-partition width ``w`` (wire runs), size ``s`` (gates) and the
    number of crossing segments between every pair of partitions.
    """

    def __init__(self, dag: CutDag, assignment: dict[int, int] | None = None):
        self.dag = dag
        if assignment is None:
            assignment = {v: v for v in dag.vertices}
        self.assignment = dict(assignment)
        self.members: dict[int, set[int]] = {}
        for v, p in self.assignment.items():
            self.members.setdefault(p, set()).add(v)
        self.adj: dict[int, Counter] = {p: Counter() for p in self.members}
        # smallest crossing segment index between two partitions
        self.pair_edge: dict[tuple[int, int], int] = {}
        for i, e in enumerate(dag.edges):
            if e.is_terminal:
                continue
            a, b = self.assignment[e.src], self.assignment[e.dst]
            if a != b:
                self.adj[a][b] += 1
                self.adj[b][a] += 1
                key = (min(a, b), max(a, b))
                self.pair_edge.setdefault(key, i)
        self.stats: dict[int, tuple[int, int]] = {
            p: partition_stats(dag, self, p) for p in self.members
        }

    @property
    def partitions(self) -> list[int]:
        return sorted(self.members)

    def total_cuts(self, p: int) -> int:
        return sum(self.adj[p].values())

    def num_cuts(self) -> int:
        return sum(self.total_cuts(p) for p in self.members) // 2

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(repr(sorted(self.assignment.items())).encode())
        h.update(repr(sorted((p, sorted(m)) for p, m in self.members.items())).encode())
        h.update(repr(sorted((p, sorted(c.items())) for p, c in self.adj.items())).encode())
        h.update(repr(sorted(self.pair_edge.items())).encode())
        h.update(repr(sorted(self.stats.items())).encode())
        return h.hexdigest()

    def merge(self, a: int, b: int) -> int:
        """Fold ``b`` into ``a`` (or vice versa); the merged id is ``min(a, b)``."""
        if a == b or a not in self.members or b not in self.members:
            raise ValueError(f"cannot merge partitions {a} and {b}")
        keep, gone = min(a, b), max(a, b)
        wk, sk = self.stats[keep]
        wg, sg = self.stats[gone]
        shared = self.adj[keep][gone]
        self.stats[keep] = (wk + wg - shared, sk + sg)
        del self.stats[gone]

        for v in self.members[gone]:
            self.assignment[v] = keep
        self.members[keep] |= self.members.pop(gone)

        del self.adj[keep][gone]
        self.pair_edge.pop((keep, gone), None)
        for nb, count in self.adj.pop(gone).items():
            if nb == keep:
                continue
            self.adj[keep][nb] += count
            self.adj[nb][keep] += count
            del self.adj[nb][gone]
            old = self.pair_edge.pop((min(gone, nb), max(gone, nb)))
            key = (min(keep, nb), max(keep, nb))
            self.pair_edge[key] = min(old, self.pair_edge.get(key, old))
        return keep


def table_cost(w: int, s: int, k: int, config: CutFinderConfig) -> float:
    """Merging cost of a trial partition with width ``w``, ``s`` gates and
    ``k`` contraction edges; ``INFEASIBLE`` past either hard limit."""
    if w > config.w_max or s > config.s_max_gates:
        return INFEASIBLE
    return (
        config.width_weight * w / config.w_max
        + config.size_weight * s / config.s_max_gates
        + config.contraction_weight * classical_penalty(k, config.k_t)
    )


def partition_stats(dag: CutDag, state: PartitionState, partition_id: int) -> tuple[int, int]:
    """Recount ``(w, s)`` for one partition from the assignment alone.

    ``w`` counts maximal runs of consecutive same-partition gates on each
    qubit, i.e. the wires the extracted subcircuit will need.
    """
    members = state.members[partition_id]
    w = 0
    for v in members:
        for q in _gate_qubits(dag, v):
            wire = dag.wires[q]
            pos = wire.index(v)
            if pos == 0 or state.assignment[wire[pos - 1]] != partition_id:
                w += 1
    return w, len(members)


def _gate_qubits(dag: CutDag, v: int) -> list[int]:
    return [q for q, wire in enumerate(dag.wires) if v in wire]


def contraction_edge_count(state: PartitionState, a: int, b: int) -> int:
    """Inner plus outer cut edges of contracting partitions ``a`` and ``b``."""
    if a == b:
        raise ValueError("contraction_edge_count needs two distinct partitions")
    return state.total_cuts(a) + state.total_cuts(b) - state.adj[a][b]


def _trial_cost(state: PartitionState, a: int, b: int, config: CutFinderConfig) -> float:
    wa, sa = state.stats[a]
    wb, sb = state.stats[b]
    shared = state.adj[a][b]
    w_trial = wa + wb - shared
    s_trial = sa + sb
    if w_trial > config.w_max or s_trial > config.s_max_gates:
        return INFEASIBLE

    total_trial = state.total_cuts(a) + state.total_cuts(b) - 2 * shared
    k_trial = 0
    for nb in set(state.adj[a]) | set(state.adj[b]):
        if nb in (a, b):
            continue
        between = state.adj[a][nb] + state.adj[b][nb]
        k_trial = max(k_trial, total_trial + state.total_cuts(nb) - between)

    return table_cost(w_trial, s_trial, k_trial, config)


def merging_cost(dag: CutDag, state: PartitionState, edge: int | WireSegment,
                 config: CutFinderConfig) -> float:
    """Cost ``Q_e`` of merging the partitions on both ends of ``edge``.

    Returns ``INFEASIBLE`` (``math.inf``) when the merged partition would
    break ``w_max`` or ``s_max_gates``. The state is never modified.
    """
    seg = dag.edges[edge] if isinstance(edge, int) else edge
    if seg.is_terminal:
        raise ValueError("terminal segments are not merge candidates")
    a, b = state.assignment[seg.src], state.assignment[seg.dst]
    if a == b:
        raise ValueError("edge endpoints already share a partition")
    return _trial_cost(state, a, b, config)


def find_cuts(dag: CutDag, config: CutFinderConfig) -> PartitionState:
    if config.w_max < 2:
        raise InfeasibleCutError(
            f"w_max={config.w_max} cannot hold any two-qubit gate"
        )
    state = PartitionState(dag)

    # costs are keyed by partition pair; parallel segments are one candidate
    costs: dict[tuple[int, int], float] = {
        pair: _trial_cost(state, *pair, config) for pair in state.pair_edge
    }

    while True:
        best = None
        for pair, q in costs.items():
            if q > config.q_max:
                continue
            key = (q, pair, state.pair_edge[pair])
            if best is None or key < best:
                best = key
        if best is None:
            return state
        a, b = best[1]
        keep = state.merge(a, b)
        costs = {pair: q for pair, q in costs.items() if a not in pair and b not in pair}
        for nb in state.adj[keep]:
            pair = (min(keep, nb), max(keep, nb))
            costs[pair] = _trial_cost(state, *pair, config)
