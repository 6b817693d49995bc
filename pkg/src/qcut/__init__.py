"""Circuit cutting with tensor-network reconstruction and heavy state selection."""

from .benchmarks import gen_benchmark
from .circuit import Circuit, CircuitError, Gate, gate_matrix, parse_circuit, write_circuit
from .cutter import CutEdge, CutPlan, Subcircuit, enumerate_variants, extract_subcircuits
from .dag import CutDag, WireSegment, build_dag, crossing_segments, internal_segments
from .finder import CutFinderConfig, InfeasibleCutError, PartitionState, find_cuts
from .hss import Selection, select_heavy_states
from .simulator import ResourceCapError, SubcircuitTensor, run_subcircuit, simulate

__version__ = "0.1.0"
