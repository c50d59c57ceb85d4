"""Open-boundary matrix product states.

Site ``i`` carries a tensor of shape ``(left bond, 2, right bond)`` and
corresponds to qubit ``i``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .state import StateVector, check_qubits


@dataclass(frozen=True)
class MatrixProductState:
    tensors: tuple
    center: int | None = None

    def __post_init__(self):
        tensors = tuple(np.asarray(A) for A in self.tensors)
        if len(tensors) < 1:
            raise ValueError("an MPS needs at least one site")
        for i, A in enumerate(tensors):
            if A.ndim != 3 or A.shape[1] != 2:
                raise ValueError(f"site {i}: expected (l, 2, r) tensor, got {A.shape}")
            if i and tensors[i - 1].shape[2] != A.shape[0]:
                raise ValueError(f"bond mismatch between sites {i - 1} and {i}")
        if tensors[0].shape[0] != 1 or tensors[-1].shape[2] != 1:
            raise ValueError("boundary bonds must have dimension 1")
        for A in tensors:
            A.setflags(write=False)
        object.__setattr__(self, "tensors", tensors)

    @property
    def n_sites(self) -> int:
        return len(self.tensors)

    @property
    def bond_dims(self) -> list[int]:
        """The N-1 internal bond dimensions, left to right."""
        return [A.shape[2] for A in self.tensors[:-1]]

    @property
    def bond_dim(self) -> int:
        return max(self.bond_dims, default=1)


def bond_profile(n: int, chi: int) -> list[int]:
    return [min(chi, 2 ** i, 2 ** (n - i)) for i in range(1, n)]


def _left_sweep(tensors: list, stop: int):
    # QR from site 0 up to (not including) ``stop``, pushing R rightwards
    for i in range(stop):
        l, d, r = tensors[i].shape
        Q, R = np.linalg.qr(tensors[i].reshape(l * d, r))
        tensors[i] = Q.reshape(l, d, Q.shape[1])
        tensors[i + 1] = np.tensordot(R, tensors[i + 1], axes=(1, 0))


def _right_sweep(tensors: list, stop: int):
    # LQ (via QR of the transpose) from the last site down to ``stop``
    for i in range(len(tensors) - 1, stop, -1):
        l, d, r = tensors[i].shape
        Q, R = np.linalg.qr(tensors[i].reshape(l, d * r).T)
        tensors[i] = Q.T.reshape(Q.shape[1], d, r)
        tensors[i - 1] = np.tensordot(tensors[i - 1], R.T, axes=(2, 0))


def canonicalize(mps: MatrixProductState, center: int | None = None) -> MatrixProductState:
    """Mixed canonical form around ``center`` (default ``ceil(N/2) - 1``), then unit norm.

    A full left-to-right QR sweep is followed by a right-to-left sweep down
    to the center; the norm ends up in the center tensor, which is rescaled.
    """
    n = mps.n_sites
    if center is None:
        center = -(-n // 2) - 1
    if not 0 <= center < n:
        raise ValueError(f"center {center} outside 0..{n - 1}")
    tensors = [np.array(A) for A in mps.tensors]
    _left_sweep(tensors, n - 1)
    _right_sweep(tensors, center)
    tensors[center] = tensors[center] / np.linalg.norm(tensors[center])
    return MatrixProductState(tuple(tensors), center)


def random_mps(n: int, chi: int, seed: int, complex_entries: bool = True) -> MatrixProductState:
    """Random MPS with i.i.d. standard-normal entries, canonicalized and normalized.

    Internal bond ``i`` has dimension ``min(chi, 2**i, 2**(n-i))``. Complex
    entries get independent N(0, 1) real and imaginary parts.
    """
    if n < 2 or chi < 1:
        raise ValueError("need n >= 2 and chi >= 1")
    rng = np.random.default_rng(seed)
    bonds = [1] + bond_profile(n, chi) + [1]
    tensors = []
    for i in range(n):
        shape = (bonds[i], 2, bonds[i + 1])
        A = rng.standard_normal(shape)
        if complex_entries:
            A = A + 1j * rng.standard_normal(shape)
        tensors.append(A)
    return canonicalize(MatrixProductState(tuple(tensors)))


def contract(mps: MatrixProductState) -> StateVector:
    """Dense amplitudes of the chain (little-endian index)."""
    n = mps.n_sites
    check_qubits(n)
    psi = mps.tensors[0].reshape(2, -1)
    for A in mps.tensors[1:]:
        # rows index (i_0 ... i_k) with i_0 most significant
        psi = np.tensordot(psi, A, axes=(1, 0)).reshape(-1, A.shape[2])
    # reverse the qubit axes so that qubit 0 becomes the least significant bit
    psi = psi.reshape((2,) * n).transpose(tuple(range(n - 1, -1, -1))).reshape(-1)
    return StateVector(n, psi.astype(np.complex128))
