"""Turn a gate partition into executable subcircuits and their variants."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .circuit import Circuit, Gate
from .dag import CutDag, build_dag
from .finder import PartitionState

# Upstream measurement settings; Z serves both the I and Z bases.
MEASURE_SETTINGS = ("Z", "X", "Y")
# Downstream initial states.
INIT_STATES = ("0", "1", "+", "i")

_MEASURE_GATES = {
    "Z": (),
    "X": ("h",),
    "Y": ("sdg", "h"),
}
_INIT_GATES = {
    "0": (),
    "1": ("x",),
    "+": ("h",),
    "i": ("h", "s"),
}


@dataclass(frozen=True)
class CutEdge:
    id: int
    origin_qubit: int
    upstream: tuple[int, int]  # (subcircuit, local qubit) measured into a basis
    downstream: tuple[int, int]  # (subcircuit, local qubit) initialised from a basis
    from_gate: int
    to_gate: int


@dataclass(frozen=True)
class Subcircuit:
    id: int
    circuit: Circuit
    upstream_cuts: tuple[int, ...]  # local qubits, in cut-edge order
    downstream_cuts: tuple[int, ...]
    upstream_edges: tuple[int, ...]  # cut-edge id per entry of upstream_cuts
    downstream_edges: tuple[int, ...]
    output_map: tuple[tuple[int, int], ...]  # (local qubit, original qubit), by local qubit
    gate_indices: tuple[int, ...]  # original gate index of every local gate

    @property
    def u(self) -> int:
        return len(self.upstream_cuts)

    @property
    def d(self) -> int:
        return len(self.downstream_cuts)

    @property
    def width(self) -> int:
        return self.circuit.num_qubits

    @property
    def depth(self) -> int:
        return self.circuit.depth

    @property
    def num_outputs(self) -> int:
        return len(self.output_map)

    @property
    def num_two_qubit_gates(self) -> int:
        return self.circuit.num_two_qubit_gates

    @property
    def edges(self) -> tuple[int, ...]:
        """Incident cut-edge ids in plan order: the tensor's edge axes."""
        return tuple(sorted(self.upstream_edges + self.downstream_edges))


@dataclass(frozen=True)
class CutPlan:
    num_qubits: int
    subcircuits: tuple[Subcircuit, ...]
    cut_edges: tuple[CutEdge, ...]
    partitions: tuple[tuple[int, ...], ...] = field(default=())

    @property
    def m(self) -> int:
        return len(self.subcircuits)

    @property
    def E(self) -> int:
        return len(self.cut_edges)


def _runs(dag: CutDag, assignment: dict[int, int]) -> list[list[tuple[int, list[int]]]]:
    """Per qubit, the maximal same-partition gate runs as (partition, gates)."""
    out = []
    for wire in dag.wires:
        runs: list[tuple[int, list[int]]] = []
        for v in wire:
            p = assignment[v]
            if runs and runs[-1][0] == p:
                runs[-1][1].append(v)
            else:
                runs.append((p, [v]))
        out.append(runs)
    return out


def extract_subcircuits(c: Circuit, p: PartitionState | dict[int, int],
                        w_max: int | None = None) -> CutPlan:
    """Build the cut plan for circuit ``c`` under partition ``p``.

    Single-qubit gates join the partition of the nearest preceding two-qubit
    gate on their qubit, else the nearest following one. A qubit with no
    two-qubit gate joins the subcircuit owning the output of the nearest
    qubit (by index) that has one; with ``w_max`` given, a subcircuit already
    at ``w_max`` is passed over for the narrowest one.
    """
    dag = p.dag if isinstance(p, PartitionState) else build_dag(c)
    assignment = p.assignment if isinstance(p, PartitionState) else dict(p)
    missing = [v for v in dag.vertices if v not in assignment]
    if missing:
        raise ValueError(f"gates without a partition: {missing}")

    # subcircuit ids ordered by each partition's first gate
    first_gate: dict[int, int] = {}
    for v in dag.vertices:
        first_gate.setdefault(assignment[v], v)
    order = sorted(first_gate, key=first_gate.get)
    sub_of = {part: i for i, part in enumerate(order)}
    m = max(len(order), 1)

    runs = _runs(dag, assignment)
    # run ids: (qubit, run index); subcircuit of each run
    run_sub: dict[tuple[int, int], int] = {}
    for q, qruns in enumerate(runs):
        for r, (part, _) in enumerate(qruns):
            run_sub[(q, r)] = sub_of[part]

    idle = [q for q in range(c.num_qubits) if not runs[q]]
    width = _widths(run_sub.values(), m)
    for q in idle:
        run_sub[(q, 0)] = _idle_home(q, runs, run_sub, width, w_max, m)
        width[run_sub[(q, 0)]] += 1

    # which run each gate occupies on each of its qubits
    gate_run: dict[tuple[int, int], int] = {}
    for q, qruns in enumerate(runs):
        for r, (_, gates) in enumerate(qruns):
            for v in gates:
                gate_run[(v, q)] = r
    last_run = [-1] * c.num_qubits
    pending: list[list[int]] = [[] for _ in range(c.num_qubits)]
    one_qubit_run: dict[int, int] = {}
    for idx, g in enumerate(c.gates):
        if g.is_two_qubit:
            for q in g.operands:
                last_run[q] = gate_run[(idx, q)]
                for j in pending[q]:
                    one_qubit_run[j] = last_run[q]
                pending[q].clear()
        else:
            (q,) = g.operands
            if last_run[q] >= 0:
                one_qubit_run[idx] = last_run[q]
            else:
                pending[q].append(idx)
    for q in range(c.num_qubits):
        for j in pending[q]:
            one_qubit_run[j] = 0  # idle qubit: its only run

    # local qubits: runs sorted by (qubit, run index)
    local: dict[tuple[int, int], int] = {}
    counts = [0] * m
    for key in sorted(run_sub):
        s = run_sub[key]
        local[key] = counts[s]
        counts[s] += 1

    cut_edges = []
    for q, qruns in enumerate(runs):
        for r in range(len(qruns) - 1):
            up, down = (q, r), (q, r + 1)
            cut_edges.append(CutEdge(
                id=len(cut_edges), origin_qubit=q,
                upstream=(run_sub[up], local[up]), downstream=(run_sub[down], local[down]),
                from_gate=qruns[r][1][-1], to_gate=qruns[r + 1][1][0],
            ))

    sub_gates: list[list[Gate]] = [[] for _ in range(m)]
    sub_indices: list[list[int]] = [[] for _ in range(m)]
    for idx, g in enumerate(c.gates):
        if g.is_two_qubit:
            keys = [(q, gate_run[(idx, q)]) for q in g.operands]
        else:
            keys = [(g.operands[0], one_qubit_run[idx])]
        s = run_sub[keys[0]]
        sub_gates[s].append(Gate(g.name, g.params, tuple(local[k] for k in keys)))
        sub_indices[s].append(idx)

    subcircuits = []
    for s in range(m):
        ups = [(e.upstream[1], e.id) for e in cut_edges if e.upstream[0] == s]
        downs = [(e.downstream[1], e.id) for e in cut_edges if e.downstream[0] == s]
        outputs = []
        for (q, r), sub in sorted(run_sub.items()):
            last = r == max(len(runs[q]) - 1, 0)
            if sub == s and last:
                outputs.append((local[(q, r)], q))
        outputs.sort()
        subcircuits.append(Subcircuit(
            id=s,
            circuit=Circuit(max(counts[s], 1), tuple(sub_gates[s])),
            upstream_cuts=tuple(l for l, _ in ups),
            downstream_cuts=tuple(l for l, _ in downs),
            upstream_edges=tuple(e for _, e in ups),
            downstream_edges=tuple(e for _, e in downs),
            output_map=tuple(outputs),
            gate_indices=tuple(sub_indices[s]),
        ))

    partitions = tuple(
        tuple(sorted(v for v in dag.vertices if assignment[v] == part)) for part in order
    )
    return CutPlan(c.num_qubits, tuple(subcircuits), tuple(cut_edges), partitions)


def _widths(values, m: int) -> list[int]:
    width = [0] * m
    for s in values:
        width[s] += 1
    return width


def _idle_home(q, runs, run_sub, width, w_max, m) -> int:
    active = [k for k in range(len(runs)) if runs[k]]
    if m == 1 or not active:
        return 0
    nearest = min(active, key=lambda k: (abs(k - q), k))
    home = run_sub[(nearest, len(runs[nearest]) - 1)]
    if w_max is not None and width[home] >= w_max:
        home = min(range(m), key=lambda s: (width[s], s))
    return home


def enumerate_variants(s: Subcircuit) -> list[tuple[tuple[tuple[str, ...], tuple[str, ...]], Circuit]]:
    """All ``3**u * 4**d`` concrete circuits of a subcircuit.

    Each entry is ``((measure settings, init states), circuit)``, row-major
    over upstream settings (Z, X, Y) then downstream states (0, 1, +, i).
    """
    out = []
    for combo in itertools.product(*([MEASURE_SETTINGS] * s.u), *([INIT_STATES] * s.d)):
        settings, inits = combo[: s.u], combo[s.u:]
        gates = []
        for qubit, state in zip(s.downstream_cuts, inits):
            gates += [Gate(name, (), (qubit,)) for name in _INIT_GATES[state]]
        gates += s.circuit.gates
        for qubit, setting in zip(s.upstream_cuts, settings):
            gates += [Gate(name, (), (qubit,)) for name in _MEASURE_GATES[setting]]
        out.append(((settings, inits), Circuit(s.circuit.num_qubits, tuple(gates))))
    return out


def plan_summary(plan: CutPlan) -> dict:
    return {
        "m": plan.m,
        "E": plan.E,
        "max_width": max(s.width for s in plan.subcircuits),
        "max_two_qubit_gates": max(s.num_two_qubit_gates for s in plan.subcircuits),
    }


def plan_to_json(plan: CutPlan, config: dict | None = None) -> dict:
    return {
        "schema": 1,
        "num_qubits": plan.num_qubits,
        "partitions": [list(p) for p in plan.partitions],
        "cuts": [
            {"id": e.id, "qubit": e.origin_qubit, "from_gate": e.from_gate, "to_gate": e.to_gate,
             "upstream": list(e.upstream), "downstream": list(e.downstream)}
            for e in plan.cut_edges
        ],
        "subcircuits": [
            {"id": s.id, "w": s.width, "s": s.num_two_qubit_gates, "gates": len(s.circuit.gates),
             "u": s.u, "d": s.d, "t": s.depth,
             "outputs": [orig for _, orig in s.output_map]}
            for s in plan.subcircuits
        ],
        "summary": plan_summary(plan),
        "config": config or {},
    }


def assignment_from_json(data: dict) -> dict[int, int]:
    return {v: i for i, part in enumerate(data["partitions"]) for v in part}
