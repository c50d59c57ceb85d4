"""Quantum targets: random MPS and Clifford+T circuits, Born tables, samples, entropies."""
from .born import BornDistribution, SampleSet, bits_of, born, index_of, sample
from .bundle import Target, load_bundle, make_target, save_bundle
from .circuit import LayeredCircuit, random_clifford_t_circuit, simulate
from .entropy import entanglement_entropy, entropy_profile
from .gates import Gate, apply_gate, gate_matrix
from .mps import MatrixProductState, bond_profile, canonicalize, contract, random_mps
from .state import StateVector, ghz

__all__ = [
    "BornDistribution", "SampleSet", "StateVector", "MatrixProductState", "LayeredCircuit",
    "Gate", "Target", "apply_gate", "bits_of", "bond_profile", "born", "canonicalize",
    "contract", "entanglement_entropy", "entropy_profile", "gate_matrix", "ghz", "index_of",
    "load_bundle", "make_target", "random_clifford_t_circuit", "random_mps", "sample",
    "save_bundle", "simulate",
]
