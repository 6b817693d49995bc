"""Heavy state selection: keep the subcircuit output states with the largest
L2 norm across all cut-edge basis tuples."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .simulator import SubcircuitTensor


@dataclass
class Selection:
    states: list[list[int]]  # per subcircuit, retained local output states in selection order
    norms: list[list[float]]
    hss_max_states: int

    @property
    def size(self) -> int:
        """Number of composite states, the product of the per-subcircuit counts."""
        return math.prod(len(x) for x in self.states)

    def to_json(self) -> dict:
        return {
            "hss_max_states": self.hss_max_states,
            "size": self.size,
            "subcircuits": [
                {"states": list(map(int, x)), "norms": list(map(float, nrm))}
                for x, nrm in zip(self.states, self.norms)
            ],
        }


def state_norms(t: SubcircuitTensor) -> np.ndarray:
    flat = t.values.reshape(-1, t.values.shape[-1])
    return np.sqrt(np.sum(flat**2, axis=0))


def select_heavy_states(tensors: list[SubcircuitTensor], hss_max_states: int) -> Selection:
    m = len(tensors)
    if hss_max_states < m:
        raise ValueError(f"budget {hss_max_states} cannot hold one state per subcircuit ({m})")
    norms = [state_norms(t) for t in tensors]

    states: list[list[int]] = []
    kept: list[list[float]] = []
    stream = []
    for j, nrm in enumerate(norms):
        top = int(np.argmax(nrm))  # first index wins ties
        states.append([top])
        kept.append([float(nrm[top])])
        stream += [(-float(v), j, i) for i, v in enumerate(nrm) if i != top]
    stream.sort()

    sizes = [1] * m
    for neg, j, i in stream:
        if math.prod(sizes) >= hss_max_states:
            break
        states[j].append(i)
        kept[j].append(-neg)
        sizes[j] += 1
    return Selection(states, kept, hss_max_states)
