"""Statevector simulation and Pauli-basis attribution of subcircuit outputs."""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .circuit import Circuit, Gate, gate_matrix
from .cutter import Subcircuit

DEFAULT_MAX_QUBITS = 24
MIN_SHOTS, MAX_SHOTS = 2**10, 2**20


class ResourceCapError(RuntimeError):
    """A simulation or contraction would exceed a configured size cap."""


def _apply(psi: np.ndarray, g: Gate, offset: int) -> np.ndarray:
    """Apply ``g`` to ``psi`` whose qubit ``q`` lives on axis ``offset + q``."""
    u = gate_matrix(g)
    axes = [offset + q for q in g.operands]
    k = len(axes)
    u = u.reshape((2,) * (2 * k))
    psi = np.tensordot(u, psi, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(psi, list(range(k)), axes)


def simulate(c: Circuit, max_qubits: int = DEFAULT_MAX_QUBITS) -> np.ndarray:
    """Amplitudes of ``c`` applied to ``|0...0>``; qubit 0 is the top bit."""
    if c.num_qubits > max_qubits:
        raise ResourceCapError(f"{c.num_qubits} qubits exceeds the simulator cap of {max_qubits}")
    psi = np.zeros((2,) * c.num_qubits, dtype=complex)
    psi[(0,) * c.num_qubits] = 1
    for g in c.gates:
        psi = _apply(psi, g, 0)
    return psi.reshape(-1)


def probabilities(c: Circuit, max_qubits: int = DEFAULT_MAX_QUBITS) -> np.ndarray:
    return np.abs(simulate(c, max_qubits)) ** 2


def default_shots(width: int) -> int:
    return int(min(max(2**width, MIN_SHOTS), MAX_SHOTS))


def sample_shots(dist: np.ndarray, shots: int, seed: int | np.random.Generator = 0) -> np.ndarray:
    """Empirical distribution of ``shots`` multinomial draws from ``dist``."""
    if shots < 1:
        raise ValueError("shots must be at least 1")
    dist = np.asarray(dist, dtype=float)
    if np.any(dist < -1e-12) or abs(dist.sum() - 1) > 1e-9:
        raise ValueError("dist is not a probability distribution")
    dist = np.clip(dist, 0, None)
    dist = dist / dist.sum()
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return rng.multinomial(shots, dist) / shots


@dataclass
class SubcircuitTensor:
    """Signed tensor of one subcircuit.

    ``values`` has one size-4 axis per incident cut edge (bases I, X, Y, Z, in
    ``edges`` order) and a trailing output axis. ``outputs`` lists the original
    qubits of the output bits, most significant first. ``states`` holds the
    local output states the trailing axis covers (all of them by default).
    """

    values: np.ndarray
    edges: tuple[int, ...]
    outputs: tuple[int, ...]
    states: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.states is None:
            self.states = np.arange(self.values.shape[-1])
        if self.values.shape[:-1] != (4,) * len(self.edges):
            raise ValueError(f"tensor shape {self.values.shape} does not match edges {self.edges}")

    def restrict(self, states) -> "SubcircuitTensor":
        states = np.asarray(states, dtype=np.int64)
        return SubcircuitTensor(self.values[..., states], self.edges, self.outputs,
                                self.states[states])


# per initial state |0>, |1>, |+>, |i>
_INIT_VECTORS = np.array([[1, 0], [0, 1], [1, 1], [1, 1j]], dtype=complex)
_INIT_VECTORS[2:] /= np.sqrt(2)
_SETTING_GATES = {"Z": (), "X": ("h",), "Y": ("sdg", "h")}
_SETTINGS = ("Z", "X", "Y")

# UPSTREAM[basis, setting, outcome]: sign of each measured outcome per basis
UPSTREAM = np.zeros((4, 3, 2))
UPSTREAM[0, 0] = (1, 1)    # I from the Z setting, outcomes summed
UPSTREAM[1, 1] = (1, -1)   # X
UPSTREAM[2, 2] = (1, -1)   # Y
UPSTREAM[3, 0] = (1, -1)   # Z
# DOWNSTREAM[basis, init]: Pauli operators as combinations of the init states
DOWNSTREAM = np.array([
    [1, 1, 0, 0],     # I = |0><0| + |1><1|
    [-1, -1, 2, 0],   # X = 2|+><+| - I
    [-1, -1, 0, 2],   # Y = 2|i><i| - I
    [1, -1, 0, 0],    # Z = |0><0| - |1><1|
], dtype=float)


def variant_probabilities(s: Subcircuit, max_qubits: int = DEFAULT_MAX_QUBITS,
                          max_elements: int = 2**28) -> np.ndarray:
    """Outcome distributions of every variant, shape ``(3,)*u + (4,)*d + (2**w,)``.

    Batched equivalent of simulating each circuit from
    :func:`qcut.cutter.enumerate_variants` in turn.
    """
    w, u, d = s.width, s.u, s.d
    if w > max_qubits:
        raise ResourceCapError(f"subcircuit {s.id} has {w} qubits, cap is {max_qubits}")
    if 3**u * 4**d * 2**w > max_elements:
        raise ResourceCapError(f"subcircuit {s.id} needs {3**u * 4**d * 2**w} variant outcomes")

    factors = []
    for q in range(w):
        if q in s.downstream_cuts:
            factors.append(_INIT_VECTORS)
        else:
            factors.append(np.array([1, 0], dtype=complex))
    psi = factors[0]
    for f in factors[1:]:
        psi = np.multiply.outer(psi, f)
    # move the init axes (in downstream_cuts order) to the front
    pos, qubit_axis = 0, []
    init_axis = {}
    for q in range(w):
        if q in s.downstream_cuts:
            init_axis[q] = pos
            pos += 1
        qubit_axis.append(pos)
        pos += 1
    src = [init_axis[q] for q in s.downstream_cuts] + qubit_axis
    psi = np.transpose(psi, src).reshape((4**d,) + (2,) * w)

    for g in s.circuit.gates:
        psi = _apply(psi, g, 1)

    out = np.empty((3**u, 4**d, 2**w))
    for k, settings in enumerate(np.ndindex(*(3,) * u)):
        phi = psi
        for q, setting in zip(s.upstream_cuts, settings):
            for name in _SETTING_GATES[_SETTINGS[setting]]:
                phi = _apply(phi, Gate(name, (), (q,)), 1)
        out[k] = (np.abs(phi) ** 2).reshape(4**d, 2**w)
    return out.reshape((3,) * u + (4,) * d + (2**w,))


def attribute(s: Subcircuit, probs: np.ndarray) -> SubcircuitTensor:
    """Combine variant outcome distributions into the subcircuit tensor."""
    u, d, w = s.u, s.d, s.width
    probs = probs.reshape((3,) * u + (4,) * d + (2,) * w)
    # einsum labels: settings 0..u-1, inits u..u+d-1, qubits u+d.., bases after
    setting_lbl = list(range(u))
    init_lbl = list(range(u, u + d))
    qubit_lbl = list(range(u + d, u + d + w))
    nxt = u + d + w
    operands = [probs, setting_lbl + init_lbl + qubit_lbl]
    up_basis, down_basis = [], []
    for k, q in enumerate(s.upstream_cuts):
        b = nxt
        nxt += 1
        operands += [UPSTREAM, [b, setting_lbl[k], qubit_lbl[q]]]
        up_basis.append(b)
    for k in range(d):
        b = nxt
        nxt += 1
        operands += [DOWNSTREAM, [b, init_lbl[k]]]
        down_basis.append(b)
    out_qubits = [q for q in range(w) if q not in s.upstream_cuts]

    # edge axes in plan order
    by_edge = dict(zip(s.upstream_edges, up_basis)) | dict(zip(s.downstream_edges, down_basis))
    edges = tuple(sorted(by_edge))
    result = [by_edge[e] for e in edges] + [qubit_lbl[q] for q in out_qubits]
    values = np.einsum(*operands, result, optimize="greedy") if operands[2:] else probs.copy()
    values = values.reshape((4,) * len(edges) + (2 ** len(out_qubits),))

    local_out = [l for l, _ in s.output_map]
    if local_out != out_qubits:
        raise AssertionError(f"subcircuit {s.id}: output qubits {out_qubits} != {local_out}")
    return SubcircuitTensor(values, edges, tuple(orig for _, orig in s.output_map))


def run_subcircuit(s: Subcircuit, mode: str = "exact", shots: int | None = None,
                   seed: int = 0, max_qubits: int = DEFAULT_MAX_QUBITS) -> SubcircuitTensor:
    """Execute every variant of ``s`` and build its tensor.

    ``mode="shots"`` replaces each variant's distribution with a multinomial
    estimate; ``shots`` defaults to ``2**w`` clamped to ``[2**10, 2**20]``.
    """
    probs = variant_probabilities(s, max_qubits)
    if mode == "shots":
        n = default_shots(s.width) if shots is None else shots
        if n < 1:
            raise ValueError("shots mode needs at least one shot")
        rng = np.random.default_rng(seed)
        flat = probs.reshape(-1, probs.shape[-1])
        for k in range(flat.shape[0]):
            flat[k] = sample_shots(flat[k], n, rng)
    elif mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    return attribute(s, probs)


_MAGIC = b"QCTN"


def write_tensor(path: str | Path, t: SubcircuitTensor) -> None:
    """Little-endian binary dump: header of axis ids/sizes, then float64 data.

    Layout: ``QCTN``, u32 version, u32 ndim, ndim x (i64 axis id, u64 size)
    with id -1 for the output axis, u32 output-qubit count, that many i64
    original qubits, then the row-major float64 values.
    """
    values = np.ascontiguousarray(t.values, dtype="<f8")
    header = [_MAGIC, struct.pack("<II", 1, values.ndim)]
    ids = list(t.edges) + [-1]
    for axis_id, size in zip(ids, values.shape):
        header.append(struct.pack("<qQ", axis_id, size))
    header.append(struct.pack("<I", len(t.outputs)))
    header.append(struct.pack(f"<{len(t.outputs)}q", *t.outputs))
    with open(path, "wb") as fh:
        fh.write(b"".join(header))
        fh.write(values.tobytes())


def read_tensor(path: str | Path) -> SubcircuitTensor:
    data = Path(path).read_bytes()
    if data[:4] != _MAGIC:
        raise ValueError(f"{path}: not a tensor file")
    version, ndim = struct.unpack_from("<II", data, 4)
    if version != 1:
        raise ValueError(f"{path}: unsupported tensor file version {version}")
    off = 12
    ids, shape = [], []
    for _ in range(ndim):
        axis_id, size = struct.unpack_from("<qQ", data, off)
        off += 16
        ids.append(axis_id)
        shape.append(size)
    (nout,) = struct.unpack_from("<I", data, off)
    off += 4
    outputs = struct.unpack_from(f"<{nout}q", data, off)
    off += 8 * nout
    values = np.frombuffer(data, dtype="<f8", offset=off).reshape(shape).astype(float)
    return SubcircuitTensor(values, tuple(ids[:-1]), tuple(outputs))
