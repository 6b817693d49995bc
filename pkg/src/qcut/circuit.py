"""Circuit representation, the ``.qc`` text format and gate unitaries.

A ``.qc`` file looks like::

    qubits 3
    h 0
    cx 0 1
    rzz(0.5) 1 2   # comments run to end of line

Qubit 0 is the leftmost character of a bitstring and the most significant
bit of a basis-state index.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

SINGLE_QUBIT = frozenset({"h", "x", "y", "z", "s", "sdg", "t", "tdg", "rx", "ry", "rz"})
TWO_QUBIT = frozenset({"cx", "cz", "cp", "rzz"})
PARAMETRIC = frozenset({"rx", "ry", "rz", "cp", "rzz"})
GATE_NAMES = SINGLE_QUBIT | TWO_QUBIT


class CircuitError(ValueError):
    """Raised for malformed circuits or unparseable circuit text."""


@dataclass(frozen=True)
class Gate:
    name: str
    params: tuple[float, ...] = ()
    operands: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        object.__setattr__(self, "operands", tuple(int(q) for q in self.operands))
        if self.name not in GATE_NAMES:
            raise CircuitError(f"unknown gate {self.name!r}")
        arity = 2 if self.name in TWO_QUBIT else 1
        if len(self.operands) != arity:
            raise CircuitError(f"{self.name} takes {arity} operand(s), got {len(self.operands)}")
        if len(set(self.operands)) != arity:
            raise CircuitError(f"duplicate operand in {self.name} {self.operands}")
        if any(q < 0 for q in self.operands):
            raise CircuitError(f"negative qubit index in {self.name} {self.operands}")
        nparams = 1 if self.name in PARAMETRIC else 0
        if len(self.params) != nparams:
            raise CircuitError(f"{self.name} takes {nparams} parameter(s), got {len(self.params)}")

    @property
    def is_two_qubit(self) -> bool:
        return self.name in TWO_QUBIT


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.num_qubits < 1:
            raise CircuitError("a circuit needs at least one qubit")
        for g in self.gates:
            if max(g.operands) >= self.num_qubits:
                raise CircuitError(
                    f"qubit index {max(g.operands)} out of range for {self.num_qubits} qubits"
                )

    @cached_property
    def depth(self) -> int:
        return circuit_depth(self.num_qubits, self.gates)

    @property
    def num_two_qubit_gates(self) -> int:
        return sum(g.is_two_qubit for g in self.gates)


def circuit_depth(num_qubits: int, gates) -> int:
    """Greedy left-aligned layer count."""
    level = [0] * num_qubits
    for g in gates:
        layer = max(level[q] for q in g.operands) + 1
        for q in g.operands:
            level[q] = layer
    return max(level, default=0)


_LINE = re.compile(r"^([a-z]+)(?:\(([^)]*)\))?((?:\s+\S+)*)$")


def parse_circuit(text: str) -> Circuit:
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((lineno, line))
    if not lines:
        raise CircuitError("empty circuit text")

    lineno, header = lines[0]
    parts = header.split()
    if len(parts) != 2 or parts[0] != "qubits":
        raise CircuitError(f"line {lineno}: expected 'qubits <n>' header")
    try:
        n = int(parts[1])
    except ValueError:
        raise CircuitError(f"line {lineno}: bad qubit count {parts[1]!r}") from None
    if n < 1:
        raise CircuitError(f"line {lineno}: a circuit needs at least one qubit")

    gates = []
    for lineno, line in lines[1:]:
        m = _LINE.match(line)
        if m is None:
            raise CircuitError(f"line {lineno}: cannot parse {line!r}")
        name, params, operands = m.groups()
        try:
            ps = [float(p) for p in params.split(",")] if params else []
            qs = [int(q) for q in operands.split()]
        except ValueError as exc:
            raise CircuitError(f"line {lineno}: {exc}") from None
        try:
            gate = Gate(name, tuple(ps), tuple(qs))
        except CircuitError as exc:
            raise CircuitError(f"line {lineno}: {exc}") from None
        if max(gate.operands) >= n:
            raise CircuitError(f"line {lineno}: qubit index {max(gate.operands)} >= {n}")
        gates.append(gate)
    return Circuit(n, tuple(gates))


def _format_angle(x: float) -> str:
    return f"{x:.17g}"


def format_gate(g: Gate) -> str:
    head = g.name
    if g.params:
        head += "(" + ",".join(_format_angle(p) for p in g.params) + ")"
    return " ".join([head, *map(str, g.operands)])


def write_circuit(c: Circuit) -> str:
    return "".join([f"qubits {c.num_qubits}\n", *(format_gate(g) + "\n" for g in c.gates)])


_SQ2 = 1 / np.sqrt(2)
_FIXED = {
    "h": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "s": np.array([[1, 0], [0, 1j]], dtype=complex),
    "sdg": np.array([[1, 0], [0, -1j]], dtype=complex),
    "t": np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex),
    "tdg": np.array([[1, 0], [0, np.exp(-1j * np.pi / 4)]], dtype=complex),
    "cx": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "cz": np.diag([1, 1, 1, -1]).astype(complex),
}


def gate_matrix(g: Gate) -> np.ndarray:
    """Unitary of ``g``; for two-qubit gates the first operand is the high bit."""
    if g.name in _FIXED:
        return _FIXED[g.name].copy()
    (theta,) = g.params
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    if g.name == "rx":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if g.name == "ry":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if g.name == "rz":
        return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])
    if g.name == "cp":
        return np.diag([1, 1, 1, np.exp(1j * theta)]).astype(complex)
    if g.name == "rzz":
        a, b = np.exp(-0.5j * theta), np.exp(0.5j * theta)
        return np.diag([a, b, b, a])
    raise CircuitError(f"no matrix for {g.name}")  # pragma: no cover
