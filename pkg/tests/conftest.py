import pytest

from qcut import Circuit
from qcut.circuit import parse_circuit
from qcut.tensornet import TensorNetwork

# 5-qubit two-block circuit: qubit 2 is shared by both blocks, so a
# 3-qubit budget forces a single cut on its wire.
TWO_BLOCK = """qubits 5
h 0
h 1
h 2
h 3
h 4
cz 0 1
cz 1 2
rzz(0.7) 0 2
rx(0.3) 2
cz 2 3
cz 3 4
rzz(1.1) 2 4
"""


@pytest.fixture
def two_block() -> Circuit:
    return parse_circuit(TWO_BLOCK)


@pytest.fixture
def four_net() -> TensorNetwork:
    # tensors 0..3; e1: 0-1, e2: 1-2, e3: 1-3, e4: 2-3
    return TensorNetwork.from_topology([(1,), (1, 2, 3), (2, 4), (3, 4)])
