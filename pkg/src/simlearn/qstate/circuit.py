"""Layered Clifford+T circuits: random generation and dense simulation."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gates import CLIFFORD_KINDS, CLIFFORD_ONE_QUBIT, TWO_QUBIT, Gate, apply_to_array
from .state import StateVector, check_qubits


@dataclass(frozen=True)
class LayeredCircuit:
    n_qubits: int
    layers: tuple = field(default_factory=tuple)

    def __post_init__(self):
        layers = tuple(tuple(layer) for layer in self.layers)
        object.__setattr__(self, "layers", layers)
        for i, layer in enumerate(layers):
            seen = set()
            for g in layer:
                if max(g.qubits) >= self.n_qubits:
                    raise ValueError(f"layer {i}: {g.kind}{g.qubits} out of range")
                if seen.intersection(g.qubits):
                    raise ValueError(f"layer {i}: qubit used twice")
                seen.update(g.qubits)

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def t_count(self) -> int:
        return sum(g.kind == "T" for layer in self.layers for g in layer)

    def gates(self):
        for layer in self.layers:
            yield from layer


def random_clifford_t_circuit(n: int, depth: int, t: int, seed: int) -> LayeredCircuit:
    """Random circuit with exactly ``t`` T gates on an ``n x depth`` grid.

    T positions are drawn without replacement over the grid. Each layer is
    then filled: while free qubits remain, a kind is drawn uniformly from the
    eight Clifford gates; a two-qubit kind lands on a uniformly random ordered
    pair of free qubits, and is redrawn from the one-qubit kinds when a single
    qubit is left.
    """
    if n < 1 or depth < 0:
        raise ValueError("need n >= 1 and depth >= 0")
    if not 0 <= t <= n * depth:
        raise ValueError(f"t={t} does not fit in a {n}x{depth} grid")
    rng = np.random.default_rng(seed)
    slots = rng.choice(n * depth, size=t, replace=False) if t else np.empty(0, dtype=np.int64)
    reserved: dict[int, set[int]] = {}
    for s in slots:
        reserved.setdefault(int(s) // n, set()).add(int(s) % n)

    layers = []
    for layer_idx in range(depth):
        t_qubits = reserved.get(layer_idx, set())
        layer = [Gate("T", (q,)) for q in sorted(t_qubits)]
        free = [q for q in range(n) if q not in t_qubits]
        while free:
            kind = CLIFFORD_KINDS[rng.integers(len(CLIFFORD_KINDS))]
            if kind in TWO_QUBIT:
                if len(free) < 2:
                    kind = CLIFFORD_ONE_QUBIT[rng.integers(len(CLIFFORD_ONE_QUBIT))]
                else:
                    i, j = rng.choice(len(free), size=2, replace=False)
                    a, b = free[i], free[j]
                    if kind != "CNOT":
                        a, b = min(a, b), max(a, b)
                    layer.append(Gate(kind, (a, b)))
                    free = [q for q in free if q != a and q != b]
                    continue
            i = rng.integers(len(free))
            layer.append(Gate(kind, (free.pop(i),)))
        layers.append(tuple(layer))
    return LayeredCircuit(n, tuple(layers))


def simulate(circuit: LayeredCircuit, initial: StateVector | None = None) -> StateVector:
    """Apply every layer in order, starting from |0...0> unless ``initial`` is given."""
    n = circuit.n_qubits
    check_qubits(n)
    if initial is None:
        psi = np.zeros(2 ** n, dtype=np.complex128)
        psi[0] = 1.0
    else:
        if initial.n_qubits != n:
            raise ValueError("initial state has the wrong qubit count")
        psi = np.array(initial.amplitudes)
    for g in circuit.gates():
        psi = apply_to_array(psi, n, g)
    return StateVector(n, psi)
