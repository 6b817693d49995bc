"""Tensor-network reconstruction of the full-circuit distribution.

Each subcircuit tensor is a node; each cut edge is a shared index of
dimension 4. Costs are counted per reconstructed state: a pairwise step that
touches ``k`` cut edges (inner plus outer) costs ``4**k`` multiplications.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cutter import CutPlan
from .simulator import ResourceCapError, SubcircuitTensor


class NetworkError(ValueError):
    pass


@dataclass
class TensorNetwork:
    incidence: list[tuple[int, ...]]  # cut-edge ids per tensor, axis order
    out_sizes: list[int]
    tensors: list[SubcircuitTensor] | None = None
    num_qubits: int | None = None

    def __post_init__(self):
        seen: dict[int, list[int]] = {}
        for t, edges in enumerate(self.incidence):
            for e in edges:
                seen.setdefault(e, []).append(t)
        bad = {e: ts for e, ts in seen.items() if len(ts) != 2 or ts[0] == ts[1]}
        if bad:
            raise NetworkError(f"edges not shared by exactly two tensors: {bad}")
        self.endpoints = {e: tuple(ts) for e, ts in sorted(seen.items())}

    @property
    def m(self) -> int:
        return len(self.incidence)

    @property
    def edges(self) -> list[int]:
        return list(self.endpoints)

    def is_connected(self) -> bool:
        if self.m <= 1:
            return True
        parent = list(range(self.m))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in self.endpoints.values():
            parent[find(a)] = find(b)
        return len({find(x) for x in range(self.m)}) == 1

    @classmethod
    def from_topology(cls, incidence, out_sizes=None) -> "TensorNetwork":
        incidence = [tuple(sorted(edges)) for edges in incidence]
        if out_sizes is None:
            out_sizes = [1] * len(incidence)
        return cls(incidence, list(out_sizes))


def build_network(plan: CutPlan, tensors: list[SubcircuitTensor]) -> TensorNetwork:
    if len(tensors) != plan.m:
        raise NetworkError(f"{len(tensors)} tensors for {plan.m} subcircuits")
    for s, t in zip(plan.subcircuits, tensors):
        if tuple(t.edges) != s.edges:
            raise NetworkError(f"tensor {s.id} has edges {t.edges}, plan says {s.edges}")
        if t.values.shape[:-1] != (4,) * len(s.edges):
            raise NetworkError(f"tensor {s.id} has shape {t.values.shape}")
    return TensorNetwork([tuple(t.edges) for t in tensors],
                         [t.values.shape[-1] for t in tensors],
                         list(tensors), plan.num_qubits)


@dataclass(frozen=True)
class ContractionStep:
    left: int
    right: int
    node: int
    inner: frozenset
    outer: frozenset

    @property
    def num_edges(self) -> int:
        return len(self.inner) + len(self.outer)

    @property
    def cost(self) -> int:
        return 4 ** self.num_edges


@dataclass
class ContractionTree:
    num_leaves: int
    steps: list[ContractionStep]
    # open cut edges and leaf set of every node, leaves first
    open_edges: list[frozenset] = field(repr=False, default_factory=list)
    leaves: list[tuple[int, ...]] = field(repr=False, default_factory=list)

    def nested(self):
        """The tree as nested pairs of leaf ids."""
        forms: list = list(range(self.num_leaves))
        for st in self.steps:
            forms.append([forms[st.left], forms[st.right]])
        return forms[-1] if self.steps else (forms[0] if forms else None)


def tree_from_pairs(net: TensorNetwork, pairs) -> ContractionTree:
    """Tree from a pair sequence; new nodes are numbered ``m, m+1, ...``."""
    opens = [frozenset(edges) for edges in net.incidence]
    leaves = [(i,) for i in range(net.m)]
    alive = set(range(net.m))
    steps = []
    for a, b in pairs:
        if a not in alive or b not in alive or a == b:
            raise NetworkError(f"invalid contraction pair ({a}, {b})")
        inner = opens[a] & opens[b]
        outer = opens[a] ^ opens[b]
        node = len(opens)
        steps.append(ContractionStep(a, b, node, inner, outer))
        opens.append(outer)
        leaves.append(tuple(sorted(leaves[a] + leaves[b])))
        alive -= {a, b}
        alive.add(node)
    if len(alive) != 1:
        raise NetworkError(f"contraction leaves {len(alive)} tensors")
    return ContractionTree(net.m, steps, opens, leaves)


def tree_from_nested(net: TensorNetwork, nested) -> ContractionTree:
    pairs = []
    counter = itertools.count(net.m)

    def walk(x):
        if isinstance(x, int):
            return x
        a, b = walk(x[0]), walk(x[1])
        pairs.append((a, b))
        return next(counter)

    walk(nested)
    return tree_from_pairs(net, pairs)


def per_state_cost(tree: ContractionTree) -> int:
    return sum(st.cost for st in tree.steps)


def k_max(tree: ContractionTree) -> int:
    return max((st.num_edges for st in tree.steps), default=0)


def prior_cost(E: int, m: int) -> int:
    """Multiplications per state of the direct ``4**E``-term reconstruction."""
    if E < 0 or m < 1:
        raise ValueError("prior_cost needs E >= 0 and m >= 1")
    return 4**E * (m - 1)


def chain_order(net: TensorNetwork) -> ContractionTree:
    pairs = []
    node = 0
    for i in range(1, net.m):
        pairs.append((node, i))
        node = net.m + i - 1
    return tree_from_pairs(net, pairs)


def _greedy(net: TensorNetwork, rng: np.random.Generator | None, temperature: float,
            allow_disconnected: bool) -> ContractionTree:
    opens = {i: frozenset(e) for i, e in enumerate(net.incidence)}
    next_id = net.m
    pairs = []
    while len(opens) > 1:
        ids = sorted(opens)
        candidates = [(a, b) for a, b in itertools.combinations(ids, 2) if opens[a] & opens[b]]
        if not candidates:
            if not allow_disconnected:
                raise NetworkError("network is disconnected")
            candidates = list(itertools.combinations(ids, 2))
        best, best_key = None, None
        for a, b in candidates:
            union = opens[a] | opens[b]
            outer = opens[a] ^ opens[b]
            score = len(union) * math.log(4)
            if rng is not None:
                score -= temperature * math.log(-math.log(rng.random() + 1e-300) + 1e-300)
            key = (score, len(outer), a, b)
            if best_key is None or key < best_key:
                best, best_key = (a, b), key
        a, b = best
        opens[next_id] = opens.pop(a) ^ opens.pop(b)
        pairs.append((a, b))
        next_id += 1
    return tree_from_pairs(net, pairs)


def find_order(net: TensorNetwork, restarts: int = 64, seed: int = 0,
               temperature: float = 1.0, allow_disconnected: bool = False) -> ContractionTree:
    """Greedy pairwise order plus seeded randomised restarts; keeps the best.

    The base policy contracts the pair touching the fewest cut edges, then
    the one leaving fewer open edges, then the lexicographically smallest
    pair. Restarts add Gumbel noise to the log-cost. The left-to-right chain
    is always a candidate, so the result never costs more than it.
    """
    if not allow_disconnected and not net.is_connected():
        raise NetworkError("network is disconnected")
    candidates = [_greedy(net, None, temperature, allow_disconnected), chain_order(net)]
    rng = np.random.default_rng(seed)
    for _ in range(restarts):
        candidates.append(_greedy(net, rng, temperature, allow_disconnected))
    return min(candidates, key=lambda t: (per_state_cost(t), k_max(t)))


@dataclass(frozen=True)
class SlicePlan:
    level1: tuple[int, ...] = ()
    level2: tuple[int, ...] = ()

    @property
    def edges(self) -> tuple[int, ...]:
        return tuple(sorted(self.level1 + self.level2))

    @property
    def num_subnetworks(self) -> int:
        return 4 ** len(self.level1)

    @property
    def num_slices(self) -> int:
        return 4 ** len(self.edges)


def _node_sizes(net: TensorNetwork, tree: ContractionTree, sliced: set, nodes) -> list[int]:
    sizes = []
    for i in nodes:
        out = math.prod(net.out_sizes[leaf] for leaf in tree.leaves[i])
        sizes.append(4 ** len(tree.open_edges[i] - sliced) * out)
    return sizes


def peak_elements(net: TensorNetwork, tree: ContractionTree, sliced=()) -> int:
    return max(_node_sizes(net, tree, set(sliced), range(len(tree.open_edges))))


def _greedy_slice(net, tree, sliced: set, nodes, cap) -> list[int]:
    chosen = []
    while max(_node_sizes(net, tree, sliced, nodes)) > cap:
        options = sorted(set(net.edges) - sliced)
        if not options:
            raise ResourceCapError(f"memory cap {cap} unreachable even with every edge sliced")
        best = min(options, key=lambda e: (
            max(_node_sizes(net, tree, sliced | {e}, nodes)),
            sum(_node_sizes(net, tree, sliced | {e}, nodes)),
            e,
        ))
        sliced.add(best)
        chosen.append(best)
    return chosen


def slice_network(net: TensorNetwork, tree: ContractionTree, memory_cap_elements: int) -> SlicePlan:
    """Pick cut edges to fix so no tensor exceeds ``memory_cap_elements``.

    Level 1 slices the input tensors, level 2 the intermediates of ``tree``.
    Each round slices the edge that leaves the smallest peak.
    """
    sliced: set = set()
    level1 = _greedy_slice(net, tree, sliced, range(net.m), memory_cap_elements)
    level2 = _greedy_slice(net, tree, sliced, range(len(tree.open_edges)), memory_cap_elements)
    return SlicePlan(tuple(level1), tuple(level2))


def sliced_cost(tree: ContractionTree, slices: SlicePlan) -> int:
    """Per-state multiplications summed over every slice."""
    fixed = set(slices.edges)
    per_slice = sum(4 ** len((st.inner | st.outer) - fixed) for st in tree.steps)
    return per_slice * slices.num_slices


@dataclass
class ReconstructedDistribution:
    num_qubits: int
    states: np.ndarray  # global basis-state indices
    values: np.ndarray
    normalization: float
    peak_elements: int = 0

    def dense(self) -> np.ndarray:
        out = np.zeros(2**self.num_qubits)
        out[self.states] = self.values
        return out

    def top(self, k: int) -> list[tuple[str, float]]:
        order = sorted(range(len(self.values)), key=lambda i: (-self.values[i], self.states[i]))
        fmt = f"0{self.num_qubits}b"
        return [(format(int(self.states[i]), fmt), float(self.values[i])) for i in order[:k]]


def _global_index(outputs, states, n) -> np.ndarray:
    """Global index contribution of each local output state."""
    idx = np.zeros(len(states), dtype=np.int64)
    o = len(outputs)
    for b, qubit in enumerate(outputs):
        bit = (np.asarray(states) >> (o - 1 - b)) & 1
        idx |= bit << (n - 1 - qubit)
    return idx


def _contract_one(tensors, incidence, tree: ContractionTree, fixed: dict, cap):
    """Contract one slice; returns (tensor over leaf outputs, peak elements)."""
    work = {}
    peak = 0
    for i, (t, edges) in enumerate(zip(tensors, incidence)):
        index = tuple(fixed.get(e, slice(None)) for e in edges)
        arr = t[index] if fixed else t
        kept = [e for e in edges if e not in fixed]
        work[i] = (arr, kept, [i])
        peak = max(peak, arr.size)
    if cap is not None and peak > cap:
        raise ResourceCapError(f"input tensor of {peak} elements exceeds cap {cap}")
    for st in tree.steps:
        a, ea, oa = work.pop(st.left)
        b, eb, ob = work.pop(st.right)
        shared = [e for e in ea if e in eb]
        res = np.tensordot(a, b, axes=([ea.index(e) for e in shared], [eb.index(e) for e in shared]))
        ra = [e for e in ea if e not in shared]
        rb = [e for e in eb if e not in shared]
        # tensordot order: ra, oa, rb, ob -> ra, rb, oa, ob
        na, nb = len(ra), len(rb)
        perm = (list(range(na)) + list(range(na + len(oa), na + len(oa) + nb))
                + list(range(na, na + len(oa))) + list(range(na + len(oa) + nb, res.ndim)))
        res = np.transpose(res, perm)
        peak = max(peak, res.size)
        if cap is not None and res.size > cap:
            raise ResourceCapError(f"intermediate of {res.size} elements exceeds cap {cap}")
        work[st.node] = (res, ra + rb, oa + ob)
    (arr, edges, outs), = work.values()
    if edges:
        raise NetworkError(f"uncontracted edges {edges}")
    return np.transpose(arr, np.argsort(outs)), peak


def contract(net: TensorNetwork, tree: ContractionTree, slices: SlicePlan | None = None,
             selection=None, memory_cap: int | None = None,
             threads: int = 1) -> ReconstructedDistribution:
    """Contract the network to the (partially) reconstructed distribution.

    With a ``selection`` (per-tensor lists of retained local output states)
    only the composite states are produced. Slices are summed in a fixed
    order whatever the thread count.
    """
    if net.tensors is None:
        raise NetworkError("network has no tensor data")
    tensors = list(net.tensors)
    if selection is not None:
        tensors = [t.restrict(x) for t, x in zip(tensors, selection.states)]
    arrays = [t.values for t in tensors]
    slices = slices or SlicePlan()
    sliced = list(slices.edges)

    assignments = [dict(zip(sliced, vals)) for vals in itertools.product(range(4), repeat=len(sliced))]

    def job(fixed):
        return _contract_one(arrays, net.incidence, tree, fixed, memory_cap)

    if threads > 1 and len(assignments) > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(job, assignments))
    else:
        parts = [job(a) for a in assignments]
    total = parts[0][0].copy()
    for arr, _ in parts[1:]:
        total += arr
    peak = max(p for _, p in parts)

    n = net.num_qubits
    norm = 0.5 ** len(net.endpoints)
    contributions = [_global_index(t.outputs, t.states, n) for t in tensors]
    index = np.zeros((), dtype=np.int64)
    for c in contributions:
        index = np.add.outer(index, c)
    return ReconstructedDistribution(n, index.reshape(-1), total.reshape(-1) * norm, norm, peak)


def direct_reconstruct(plan: CutPlan, tensors: list[SubcircuitTensor]) -> np.ndarray:
    """Full distribution by the explicit sum over all ``4**E`` basis tuples.

    Every term is the Kronecker product of the subcircuit outputs; this is the
    prior reconstruction method and serves as an oracle for :func:`contract`.
    """
    E, n = plan.E, plan.num_qubits
    acc = None
    for bases in itertools.product(range(4), repeat=E):
        term = np.ones(1)
        for t in tensors:
            term = np.kron(term, t.values[tuple(bases[e] for e in t.edges)])
        acc = term if acc is None else acc + term
    acc = acc * 0.5**E
    order = [q for t in tensors for q in t.outputs]
    out = np.zeros(2**n)
    for k, value in enumerate(acc):
        g = 0
        for pos, q in enumerate(order):
            if (k >> (n - 1 - pos)) & 1:
                g |= 1 << (n - 1 - q)
        out[g] = value
    return out


def contraction_report(tree: ContractionTree, slices: SlicePlan | None, states: int) -> dict:
    slices = slices or SlicePlan()
    cost = per_state_cost(tree)
    report = {
        "tree": tree.nested(),
        "steps": [
            {"pair": [st.left, st.right], "node": st.node, "inner": sorted(st.inner),
             "outer": sorted(st.outer), "cost": st.cost}
            for st in tree.steps
        ],
        "k_max": k_max(tree),
        "per_state_cost": cost,
        "slices": {"level1": list(slices.level1), "level2": list(slices.level2),
                   "subnetworks": slices.num_subnetworks, "total": slices.num_slices},
        "states": states,
        "C_TN": cost * states,
        "slice_overhead": (sliced_cost(tree, slices) - cost) * states,
    }
    return report
