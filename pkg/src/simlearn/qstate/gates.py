"""Gate set and dense gate application."""
from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType

import numpy as np

from .state import StateVector

_S2 = 2 ** -0.5

_MATRICES = {
    "H": np.array([[_S2, _S2], [_S2, -_S2]], dtype=np.complex128),
    "S": np.diag([1, 1j]).astype(np.complex128),
    "T": np.diag([1, np.exp(1j * np.pi / 4)]).astype(np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.diag([1, -1]).astype(np.complex128),
    # two-qubit matrices act on |a b> with the first listed qubit as the high bit
    "CNOT": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128),
    "CZ": np.diag([1, 1, 1, -1]).astype(np.complex128),
    "SWAP": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128),
}
for _m in _MATRICES.values():
    _m.setflags(write=False)

GATE_MATRICES = MappingProxyType(_MATRICES)
ONE_QUBIT = ("H", "S", "T", "X", "Y", "Z")
TWO_QUBIT = ("CNOT", "CZ", "SWAP")
CLIFFORD_KINDS = ("H", "S", "CNOT", "X", "Y", "Z", "CZ", "SWAP")
CLIFFORD_ONE_QUBIT = ("H", "S", "X", "Y", "Z")


def gate_matrix(kind: str) -> np.ndarray:
    try:
        return _MATRICES[kind]
    except KeyError:
        raise ValueError(f"unknown gate kind {kind!r}") from None


def arity(kind: str) -> int:
    gate_matrix(kind)
    return 2 if kind in TWO_QUBIT else 1


@dataclass(frozen=True)
class Gate:
    """A gate on one or two qubits; for CNOT the first qubit is the control."""
    kind: str
    qubits: tuple[int, ...]

    def __post_init__(self):
        qubits = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qubits)
        if len(qubits) != arity(self.kind):
            raise ValueError(f"{self.kind} takes {arity(self.kind)} qubit(s), got {qubits}")
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"repeated qubit in {self.kind}{qubits}")
        if min(qubits) < 0:
            raise ValueError(f"negative qubit index in {self.kind}{qubits}")


def apply_to_array(psi: np.ndarray, n: int, gate: Gate) -> np.ndarray:
    """Apply ``gate`` to a raw length-2**n amplitude array, returning a new array."""
    if max(gate.qubits) >= n:
        raise ValueError(f"gate {gate.kind}{gate.qubits} out of range for {n} qubits")
    U = _MATRICES[gate.kind]
    t = psi.reshape((2,) * n)
    axes = [n - 1 - q for q in gate.qubits]
    k = len(axes)
    Ut = U.reshape((2,) * (2 * k))
    out = np.tensordot(Ut, t, axes=(list(range(k, 2 * k)), axes))
    # tensordot puts the gate's output axes first
    out = np.moveaxis(out, list(range(k)), axes)
    return np.ascontiguousarray(out).reshape(-1)


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    return StateVector(state.n_qubits, apply_to_array(state.amplitudes, state.n_qubits, gate))
