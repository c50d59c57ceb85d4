import numpy as np

from ..qstate.born import BornDistribution


def _pair(p: BornDistribution, q: BornDistribution):
    if p.n_qubits != q.n_qubits:
        raise ValueError(f"distributions over {p.n_qubits} and {q.n_qubits} qubits")
    return p.probs, q.probs


def tv_distance(p: BornDistribution, q: BornDistribution) -> float:
    """Half the L1 distance between two probability tables."""
    a, b = _pair(p, q)
    return float(min(1.0, 0.5 * np.abs(a - b).sum()))


def kl_divergence(p: BornDistribution, q: BornDistribution) -> float:
    """``sum p log(p/q)`` in nats; terms with ``p = 0`` contribute nothing."""
    a, b = _pair(p, q)
    support = a > 0
    if np.any(b[support] <= 0):
        raise ValueError("q vanishes where p has mass")
    a, b = a[support], b[support]
    return float(max(0.0, (a * (np.log(a) - np.log(b))).sum()))
