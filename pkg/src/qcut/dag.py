"""Wire DAG over two-qubit gates: the substrate for cut finding."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .circuit import Circuit


@dataclass(frozen=True)
class WireSegment:
    """A stretch of qubit wire between two DAG vertices.

    ``src``/``dst`` are gate indices into ``Circuit.gates``; ``None`` marks
    the input (for ``src``) or output (for ``dst``) terminal of the qubit.
    """

    qubit: int
    src: int | None
    dst: int | None

    @property
    def is_terminal(self) -> bool:
        return self.src is None or self.dst is None


@dataclass(frozen=True)
class CutDag:
    num_qubits: int
    vertices: tuple[int, ...]
    edges: tuple[WireSegment, ...]
    # per qubit, the two-qubit gate indices touching it in program order
    wires: tuple[tuple[int, ...], ...]

    def gate_segments(self) -> list[int]:
        """Indices of segments joining two gates (the cuttable ones)."""
        return [i for i, e in enumerate(self.edges) if not e.is_terminal]


def build_dag(c: Circuit) -> CutDag:
    wires: list[list[int]] = [[] for _ in range(c.num_qubits)]
    vertices = []
    for idx, g in enumerate(c.gates):
        if g.is_two_qubit:
            vertices.append(idx)
            for q in g.operands:
                wires[q].append(idx)
    edges = []
    for q, seq in enumerate(wires):
        stops = [None, *seq, None]
        edges += [WireSegment(q, a, b) for a, b in zip(stops, stops[1:])]
    return CutDag(c.num_qubits, tuple(vertices), tuple(edges), tuple(map(tuple, wires)))


def _check_assigned(dag: CutDag, partition: Mapping[int, int]) -> None:
    missing = [v for v in dag.vertices if v not in partition]
    if missing:
        raise ValueError(f"gate vertices without a partition: {missing}")


def crossing_segments(dag: CutDag, partition: Mapping[int, int]) -> list[int]:
    """Gate-to-gate segments whose endpoints sit in different partitions."""
    _check_assigned(dag, partition)
    return [
        i for i, e in enumerate(dag.edges)
        if not e.is_terminal and partition[e.src] != partition[e.dst]
    ]


def internal_segments(dag: CutDag, partition: Mapping[int, int]) -> list[int]:
    """Complement of :func:`crossing_segments`.

    Terminal segments count as internal: they belong to the partition of
    their only gate and are never cut.
    """
    crossing = set(crossing_segments(dag, partition))
    return [i for i in range(len(dag.edges)) if i not in crossing]


_COLORS = ["#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462",
           "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd", "#ccebc5", "#ffed6f"]


def to_dot(dag: CutDag, c: Circuit, partition: Mapping[int, int] | None = None) -> str:
    lines = ["digraph cutdag {", "  rankdir=LR;"]
    for q in range(dag.num_qubits):
        lines.append(f'  in{q} [label="q{q}", shape=plaintext];')
        lines.append(f'  out{q} [label="q{q}\'", shape=plaintext];')
    for v in dag.vertices:
        g = c.gates[v]
        label = f"{g.name} {' '.join(map(str, g.operands))}\\n#{v}"
        style = ""
        if partition is not None:
            color = _COLORS[partition[v] % len(_COLORS)]
            style = f', style=filled, fillcolor="{color}"'
        lines.append(f'  g{v} [label="{label}", shape=box{style}];')
    cut = set(crossing_segments(dag, partition)) if partition is not None else set()
    for i, e in enumerate(dag.edges):
        a = f"in{e.qubit}" if e.src is None else f"g{e.src}"
        b = f"out{e.qubit}" if e.dst is None else f"g{e.dst}"
        attrs = f'label="q{e.qubit}"'
        if i in cut:
            attrs += ", style=dashed, color=red"
        lines.append(f"  {a} -> {b} [{attrs}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
