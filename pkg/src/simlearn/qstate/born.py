"""Born distributions and count-compressed sample sets."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .state import StateVector


def _table_size(n: int, arr: np.ndarray, what: str):
    if arr.shape != (2 ** n,):
        raise ValueError(f"{what}: expected length {2 ** n}, got shape {arr.shape}")


@dataclass(frozen=True)
class BornDistribution:
    n_qubits: int
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=np.float64)
        _table_size(self.n_qubits, p, "probabilities")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ValueError("probabilities must be finite and non-negative")
        if abs(p.sum() - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @classmethod
    def uniform(cls, n: int) -> "BornDistribution":
        return cls(n, np.full(2 ** n, 2.0 ** -n))

    @classmethod
    def delta(cls, n: int, index: int) -> "BornDistribution":
        p = np.zeros(2 ** n)
        p[index] = 1.0
        return cls(n, p)


@dataclass(frozen=True)
class SampleSet:
    n_qubits: int
    counts: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.counts)
        if not np.issubdtype(c.dtype, np.integer):
            if not np.all(np.asarray(c) == np.round(c)):
                raise ValueError("counts must be integers")
        c = c.astype(np.int64)
        _table_size(self.n_qubits, c, "counts")
        if np.any(c < 0):
            raise ValueError("counts must be non-negative")
        if c.sum() < 1:
            raise ValueError("empty sample set")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @classmethod
    def from_samples(cls, n: int, indices) -> "SampleSet":
        return cls(n, np.bincount(np.asarray(indices, dtype=np.int64), minlength=2 ** n))

    def expand(self) -> np.ndarray:
        """Uncompressed sample indices, sorted."""
        return np.repeat(np.arange(self.counts.size), self.counts)

    def frequencies(self) -> BornDistribution:
        return BornDistribution(self.n_qubits, self.counts / self.total)


def born(state: StateVector) -> BornDistribution:
    p = np.abs(state.amplitudes) ** 2
    # absorb rounding so the table sums to one
    return BornDistribution(state.n_qubits, p / p.sum())


def sample(dist: BornDistribution, n_s: int, seed: int) -> SampleSet:
    """``n_s`` i.i.d. computational-basis outcomes as a multinomial count table."""
    if n_s < 1:
        raise ValueError("n_s must be positive")
    rng = np.random.default_rng(seed)
    p = dist.probs / dist.probs.sum()
    return SampleSet(dist.n_qubits, rng.multinomial(n_s, p))


def bits_of(index: int, n: int) -> np.ndarray:
    """Bit vector of an index, qubit 0 first."""
    return (int(index) >> np.arange(n)) & 1


def index_of(bits) -> int:
    bits = np.asarray(bits, dtype=np.int64)
    if np.any((bits != 0) & (bits != 1)):
        raise ValueError("bits must be 0 or 1")
    return int((bits << np.arange(bits.size)).sum())
