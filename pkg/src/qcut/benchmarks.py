"""Benchmark circuit generators: ghz, wstate, regular, erdos, aqft, supremacy."""

from __future__ import annotations

import math

import networkx as nx
import numpy as np

from .circuit import Circuit, CircuitError, Gate

KINDS = ("ghz", "wstate", "regular", "erdos", "aqft", "supremacy")


def ghz(n: int) -> Circuit:
    gates = [Gate("h", (), (0,))]
    gates += [Gate("cx", (), (q, q + 1)) for q in range(n - 1)]
    return Circuit(n, gates)


def _cry(theta: float, control: int, target: int) -> list[Gate]:
    return [
        Gate("ry", (theta / 2,), (target,)),
        Gate("cx", (), (control, target)),
        Gate("ry", (-theta / 2,), (target,)),
        Gate("cx", (), (control, target)),
    ]


def wstate(n: int) -> Circuit:
    """Deterministic W-state cascade.

    Qubit ``k`` hands amplitude ``sqrt((n-k-1)/(n-k))`` of its excitation to
    qubit ``k+1`` with a controlled-ry, then a cx clears qubit ``k`` on that
    branch.
    """
    gates = [Gate("x", (), (0,))]
    for k in range(n - 1):
        theta = 2 * math.acos(math.sqrt(1 / (n - k)))
        gates += _cry(theta, k, k + 1)
        gates.append(Gate("cx", (), (k + 1, k)))
    return Circuit(n, gates)


def _qaoa(n: int, graph: nx.Graph, rng: np.random.Generator) -> Circuit:
    gamma, beta = rng.uniform(0, 2 * math.pi, size=2)
    gates = [Gate("h", (), (q,)) for q in range(n)]
    gates += [Gate("rzz", (gamma,), (min(u, v), max(u, v))) for u, v in sorted(graph.edges())]
    gates += [Gate("rx", (beta,), (q,)) for q in range(n)]
    return Circuit(n, gates)


def regular(n: int, seed: int) -> Circuit:
    if n < 4 or (3 * n) % 2:
        raise CircuitError("regular needs an even n >= 4 for a 3-regular graph")
    rng = np.random.default_rng(seed)
    graph = nx.random_regular_graph(3, n, seed=int(rng.integers(2**31)))
    return _qaoa(n, graph, rng)


def erdos(n: int, seed: int, p: float = 0.5) -> Circuit:
    if not 0 < p <= 1:
        raise CircuitError(f"edge probability must lie in (0, 1], got {p}")
    rng = np.random.default_rng(seed)
    graph = nx.gnp_random_graph(n, p, seed=int(rng.integers(2**31)))
    return _qaoa(n, graph, rng)


def aqft_degree(n: int) -> int:
    return math.ceil(math.log2(n)) + 2


def aqft(n: int, degree: int | None = None) -> Circuit:
    """QFT without the final swaps, keeping cp(pi/2^k) only for k <= degree."""
    if degree is None:
        degree = aqft_degree(n)
    gates = []
    for j in range(n):
        gates.append(Gate("h", (), (j,)))
        for k in range(j + 1, n):
            dist = k - j
            if dist > degree:
                break
            gates.append(Gate("cp", (math.pi / 2**dist,), (k, j)))
    return Circuit(n, gates)


def grid_shape(n: int) -> tuple[int, int]:
    rows = math.isqrt(n)
    while rows > 1 and n % rows:
        rows -= 1
    if rows < 2:
        raise CircuitError(f"supremacy needs n = rows*cols with rows, cols >= 2, got {n}")
    return rows, n // rows


# (horizontal?, row parity, column parity); the 8 layouts visit every grid
# coupler exactly once.
_LAYOUTS = [
    (True, 0, 0), (True, 1, 1), (False, 0, 0), (False, 1, 1),
    (True, 1, 0), (True, 0, 1), (False, 0, 1), (False, 1, 0),
]


def supremacy_layer_pairs(rows: int, cols: int, cycle: int) -> list[tuple[int, int]]:
    horizontal, rpar, cpar = _LAYOUTS[cycle % 8]
    pairs = []
    for r in range(rows):
        for c in range(cols):
            if r % 2 != rpar or c % 2 != cpar:
                continue
            if horizontal and c + 1 < cols:
                pairs.append((r * cols + c, r * cols + c + 1))
            elif not horizontal and r + 1 < rows:
                pairs.append((r * cols + c, (r + 1) * cols + c))
    return pairs


def supremacy(n: int, seed: int, cycles: int = 8) -> Circuit:
    """Random grid circuit of depth 1 + cycles + 1.

    Every qubit not hit by a cz in a cycle gets a random rx(pi/2) or ry(pi/2)
    in that cycle, so each cycle is exactly one layer.
    """
    if n < 4:
        raise CircuitError("supremacy needs n >= 4")
    rows, cols = grid_shape(n)
    rng = np.random.default_rng(seed)
    gates = [Gate("h", (), (q,)) for q in range(n)]
    for cycle in range(cycles):
        pairs = supremacy_layer_pairs(rows, cols, cycle)
        busy = {q for pair in pairs for q in pair}
        gates += [Gate("cz", (), pair) for pair in pairs]
        for q in range(n):
            if q not in busy:
                name = "rx" if rng.integers(2) == 0 else "ry"
                gates.append(Gate(name, (math.pi / 2,), (q,)))
    gates += [Gate("h", (), (q,)) for q in range(n)]
    return Circuit(n, gates)


def gen_benchmark(kind: str, n: int, seed: int = 0, **params) -> Circuit:
    if n < 2:
        raise CircuitError(f"{kind} needs at least 2 qubits")
    if kind == "ghz":
        return ghz(n)
    if kind == "wstate":
        return wstate(n)
    if kind == "regular":
        return regular(n, seed)
    if kind == "erdos":
        return erdos(n, seed, p=params.get("p", 0.5))
    if kind == "aqft":
        return aqft(n, params.get("degree"))
    if kind == "supremacy":
        return supremacy(n, seed, cycles=params.get("cycles", 8))
    raise CircuitError(f"unknown benchmark kind {kind!r}")


def random_circuit(n: int, num_gates: int, seed: int, two_qubit_fraction: float = 0.35) -> Circuit:
    """Mixed-gate-set random circuit for property and oracle tests."""
    rng = np.random.default_rng(seed)
    singles = ("h", "x", "y", "z", "s", "sdg", "t", "tdg", "rx", "ry", "rz")
    doubles = ("cx", "cz", "cp", "rzz")
    gates = []
    for _ in range(num_gates):
        if rng.random() < two_qubit_fraction:
            name = doubles[rng.integers(len(doubles))]
            qs = tuple(int(q) for q in rng.choice(n, size=2, replace=False))
        else:
            name = singles[rng.integers(len(singles))]
            qs = (int(rng.integers(n)),)
        params = (float(rng.uniform(-math.pi, math.pi)),) if name in ("rx", "ry", "rz", "cp", "rzz") else ()
        gates.append(Gate(name, params, qs))
    return Circuit(n, gates)
