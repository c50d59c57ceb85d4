"""Exact likelihood objectives of the energy model.

Every objective here has the form ``L = sum_x w[x] E(x) + log Z`` for a weight
vector ``w`` summing to one over the 2**N configurations: empirical sample
frequencies (training NLL), ``1/2**N`` (uniform population loss) or a target
Born distribution (cross-entropy). The partition function is always summed
over every configuration.
"""
from __future__ import annotations

import numpy as np

from ..qstate.born import BornDistribution, SampleSet
from . import network
from .network import NetArchitecture

MAX_QUBITS = 14


class NonFiniteError(FloatingPointError):
    """Raised when energies or gradients stop being finite."""


def log_partition(energies: np.ndarray) -> float:
    """``log sum_x exp(-E[x])`` with a max shift."""
    neg = -np.asarray(energies, dtype=np.float64)
    m = neg.max()
    return float(m + np.log(np.exp(neg - m).sum()))


def _softmin(energies: np.ndarray) -> tuple[np.ndarray, float]:
    neg = -energies
    m = neg.max()
    e = np.exp(neg - m)
    s = e.sum()
    return e / s, float(m + np.log(s))


def _check_n(arch: NetArchitecture):
    if arch.input_dim > MAX_QUBITS:
        raise ValueError(f"exact enumeration limited to N <= {MAX_QUBITS}, got {arch.input_dim}")


def energies_all(arch: NetArchitecture, theta: np.ndarray) -> np.ndarray:
    """Energy of every configuration, indexed by the little-endian integer encoding."""
    _check_n(arch)
    E = network.forward(arch, theta, network.bit_table(arch.input_dim))
    if not np.all(np.isfinite(E)):
        raise NonFiniteError("non-finite energies; parameters have blown up")
    return E


def model_probs(arch: NetArchitecture, theta: np.ndarray) -> np.ndarray:
    q, _ = _softmin(energies_all(arch, theta))
    return q


def model_distribution(arch: NetArchitecture, theta: np.ndarray) -> BornDistribution:
    return BornDistribution(arch.input_dim, model_probs(arch, theta))


def empirical_weights(data: SampleSet) -> np.ndarray:
    return data.counts / data.total


def population_weights(n: int, weighting: str = "uniform",
                       target: BornDistribution | None = None) -> np.ndarray:
    if weighting == "uniform":
        return np.full(2 ** n, 2.0 ** -n)
    if weighting == "born":
        if target is None:
            raise ValueError("born weighting needs a target distribution")
        if target.n_qubits != n:
            raise ValueError("target qubit count does not match the network")
        return target.probs
    raise ValueError(f"unknown weighting {weighting!r}")


def weighted_loss(arch: NetArchitecture, theta: np.ndarray, weights: np.ndarray) -> float:
    E = energies_all(arch, theta)
    return float(weights @ E) + log_partition(E)


def loss_and_grad(arch: NetArchitecture, theta: np.ndarray, weights: np.ndarray):
    """Value and flat gradient of ``w . E + log Z``.

    The gradient is ``sum_x (w[x] - q[x]) grad E(x)``; the model expectation is
    exact because all configurations go through the network.
    """
    _check_n(arch)
    E, acts = network.forward(arch, theta, network.bit_table(arch.input_dim), keep=True)
    if not np.all(np.isfinite(E)):
        raise NonFiniteError("non-finite energies; parameters have blown up")
    q, logz = _softmin(E)
    grad = network.backward(arch, theta, acts, weights - q)
    if not np.all(np.isfinite(grad)):
        raise NonFiniteError("non-finite gradient")
    return float(weights @ E) + logz, grad


def nll_loss(arch: NetArchitecture, theta: np.ndarray, data: SampleSet) -> float:
    """Mean negative log-likelihood of the samples."""
    if data.n_qubits != arch.input_dim:
        raise ValueError("sample set qubit count does not match the network")
    return weighted_loss(arch, theta, empirical_weights(data))


def grad_nll(arch: NetArchitecture, theta: np.ndarray, data: SampleSet) -> np.ndarray:
    if data.n_qubits != arch.input_dim:
        raise ValueError("sample set qubit count does not match the network")
    return loss_and_grad(arch, theta, empirical_weights(data))[1]


def population_loss(arch: NetArchitecture, theta: np.ndarray, weighting: str = "uniform",
                    target: BornDistribution | None = None) -> float:
    """Average of ``-log q(x)`` over configurations, uniformly or Born-weighted."""
    w = population_weights(arch.input_dim, weighting, target)
    return weighted_loss(arch, theta, w)


def grad_population(arch: NetArchitecture, theta: np.ndarray, weighting: str = "uniform",
                    target: BornDistribution | None = None) -> np.ndarray:
    w = population_weights(arch.input_dim, weighting, target)
    return loss_and_grad(arch, theta, w)[1]


def weighted_hvp(arch: NetArchitecture, theta: np.ndarray, weights: np.ndarray,
                 v: np.ndarray) -> np.ndarray:
    """Exact Hessian of ``w . E + log Z`` applied to ``v``."""
    _check_n(arch)
    E, acts = network.forward(arch, theta, network.bit_table(arch.input_dim), keep=True)
    q, _ = _softmin(E)

    def r_dE(rE):
        # d/dv of (w - q) where q = softmax(-E)
        return q * (rE - q @ rE)

    out = network.r_op(arch, theta, acts, weights - q, v, r_dE)
    if not np.all(np.isfinite(out)):
        raise NonFiniteError("non-finite Hessian-vector product")
    return out
