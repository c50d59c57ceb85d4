"""Dense pure states.

Bit order is little-endian throughout the package: qubit ``k`` is bit ``k`` of
the index into any length ``2**N`` table. In the ``(2,)*N`` tensor view of an
amplitude vector, qubit ``k`` therefore sits on axis ``N - 1 - k``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_QUBITS = 14


def check_qubits(n: int):
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"dense simulation supports 1 <= N <= {MAX_QUBITS}, got {n}")


@dataclass(frozen=True)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        check_qubits(self.n_qubits)
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (2 ** self.n_qubits,):
            raise ValueError(f"expected {2 ** self.n_qubits} amplitudes, got shape {amps.shape}")
        norm = np.vdot(amps, amps).real
        if abs(norm - 1.0) > 1e-8:
            raise ValueError(f"state is not normalized (norm^2 = {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def zero(cls, n: int) -> "StateVector":
        amps = np.zeros(2 ** n, dtype=np.complex128)
        amps[0] = 1.0
        return cls(n, amps)

    @classmethod
    def from_amplitudes(cls, amps, normalize: bool = False) -> "StateVector":
        amps = np.asarray(amps, dtype=np.complex128)
        n = int(round(np.log2(amps.size)))
        if 2 ** n != amps.size:
            raise ValueError("amplitude count is not a power of two")
        if normalize:
            amps = amps / np.linalg.norm(amps)
        return cls(n, amps)

    @classmethod
    def product(cls, local_states) -> "StateVector":
        """Tensor product of single-qubit vectors, first entry is qubit 0."""
        psi = np.ones(1, dtype=np.complex128)
        for v in local_states:
            v = np.asarray(v, dtype=np.complex128)
            psi = np.kron(v, psi)
        return cls.from_amplitudes(psi, normalize=True)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.n_qubits)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def ghz(n: int) -> StateVector:
    amps = np.zeros(2 ** n, dtype=np.complex128)
    amps[0] = amps[-1] = 2 ** -0.5
    return StateVector(n, amps)
