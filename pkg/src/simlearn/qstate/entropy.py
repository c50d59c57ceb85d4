"""Bipartite entanglement entropy of dense pure states (in bits)."""
from __future__ import annotations

import numpy as np

from .state import StateVector

CUTOFF = 1e-12


def schmidt_values(state: StateVector, subsystem) -> np.ndarray:
    n = state.n_qubits
    A = sorted({int(q) for q in subsystem})
    if not A or len(A) >= n:
        raise ValueError("subsystem must be a nonempty proper subset of the qubits")
    if A[0] < 0 or A[-1] >= n:
        raise ValueError(f"subsystem {A} out of range for {n} qubits")
    axes_a = [n - 1 - q for q in A]
    rest = [ax for ax in range(n) if ax not in axes_a]
    m = state.tensor().transpose(axes_a + rest).reshape(2 ** len(A), -1)
    return np.linalg.svd(m, compute_uv=False)


def entanglement_entropy(state: StateVector, subsystem) -> float:
    """Von Neumann entropy of the reduced state of ``subsystem``, base 2."""
    p = schmidt_values(state, subsystem) ** 2
    p = p[p >= CUTOFF]
    return float(max(0.0, -(p * np.log2(p)).sum()))


def entropy_profile(state: StateVector, mode: str = "contiguous-cuts") -> np.ndarray:
    """Entropies across cuts.

    ``contiguous-cuts``: prefix ``{0..k-1}`` for ``k = 1..N-1``.
    ``subsystem-sizes``: prefix of size ``k`` for ``k = 1..N//2``.
    """
    n = state.n_qubits
    if mode == "contiguous-cuts":
        ks = range(1, n)
    elif mode == "subsystem-sizes":
        ks = range(1, n // 2 + 1)
    else:
        raise ValueError(f"unknown profile mode {mode!r}")
    return np.array([entanglement_entropy(state, range(k)) for k in ks])
