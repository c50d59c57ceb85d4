"""Hessian-vector products and the top Hessian eigenvalue by power iteration."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..ebm import network, objective
from ..ebm.network import NetArchitecture
from ..qstate.born import BornDistribution, SampleSet

log = logging.getLogger(__name__)

OBJECTIVES = ("uniform", "born", "data")


@dataclass(frozen=True)
class HvpSpec:
    """Which objective's Hessian to probe, and where.

    ``objective`` is ``"uniform"`` (mean of ``-log q`` over all configurations),
    ``"born"`` (cross-entropy against ``target``) or ``"data"`` (sample NLL).
    ``scale`` multiplies the whole objective.
    """
    arch: NetArchitecture
    theta: np.ndarray
    objective: str = "uniform"
    target: BornDistribution | None = None
    data: SampleSet | None = None
    scale: float = 1.0
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n = self.arch.input_dim
        if self.theta.shape != (self.arch.n_params,):
            raise ValueError("parameter vector does not match the architecture")
        if self.objective == "data":
            if self.data is None:
                raise ValueError("data objective needs a sample set")
            if self.data.n_qubits != n:
                raise ValueError("sample set qubit count does not match the network")
            w = objective.empirical_weights(self.data)
        elif self.objective in ("uniform", "born"):
            w = objective.population_weights(n, self.objective, self.target)
        else:
            raise ValueError(f"unknown objective {self.objective!r}; expected one of {OBJECTIVES}")
        object.__setattr__(self, "weights", np.asarray(w, dtype=np.float64))

    def loss(self, theta: np.ndarray | None = None) -> float:
        th = self.theta if theta is None else theta
        return self.scale * objective.weighted_loss(self.arch, th, self.weights)

    def grad(self, theta: np.ndarray | None = None) -> np.ndarray:
        th = self.theta if theta is None else theta
        return self.scale * objective.loss_and_grad(self.arch, th, self.weights)[1]


def hvp(spec: HvpSpec, v: np.ndarray) -> np.ndarray:
    """Exact Hessian-vector product by forward-over-reverse differentiation."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape != spec.theta.shape:
        raise ValueError(f"vector of shape {v.shape} for {spec.theta.shape[0]} parameters")
    if not np.all(np.isfinite(v)):
        raise ValueError("non-finite input vector")
    return spec.scale * objective.weighted_hvp(spec.arch, spec.theta, spec.weights, v)


def fd_hvp(spec: HvpSpec, v: np.ndarray, eps: float = 1e-4, min_eps: float = 1e-9) -> np.ndarray:
    """Central difference of the gradient along ``v``.

    The loss is only piecewise smooth, so a difference taken across a ReLU
    kink measures the jump in the gradient, not the curvature. The step is
    shrunk tenfold until ``theta +- eps v`` keeps the activation pattern of
    ``theta`` (down to ``min_eps``).
    """
    base = network.activation_pattern(spec.arch, spec.theta)
    while eps > min_eps and not all(
            np.array_equal(network.activation_pattern(spec.arch, spec.theta + s * eps * v), base)
            for s in (1, -1)):
        eps /= 10
    return (spec.grad(spec.theta + eps * v) - spec.grad(spec.theta - eps * v)) / (2 * eps)


@dataclass
class PowerResult:
    value: float
    iterations: int
    converged: bool
    history: list = field(default_factory=list)
    vector: np.ndarray | None = field(default=None, repr=False)

    @property
    def negative(self) -> bool:
        return self.value < 0


def power_iteration(matvec, dim: int, tol: float = 1e-6, max_iter: int = 500, seed: int = 0,
                    window: int = 3) -> PowerResult:
    """Dominant eigenvalue of a symmetric operator.

    Starts from a seeded Gaussian unit vector. Converged once the Rayleigh
    quotient's relative change stays below ``tol`` for ``window`` iterations
    in a row.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    history = []
    prev = None
    calm = 0
    for it in range(1, max_iter + 1):
        w = matvec(v)
        rq = float(v @ w)
        history.append(rq)
        if prev is not None and abs(rq - prev) <= tol * max(abs(rq), 1e-300):
            calm += 1
            if calm >= window:
                return PowerResult(rq, it, True, history, v)
        else:
            calm = 0
        prev = rq
        nrm = np.linalg.norm(w)
        if nrm == 0:
            # v lies in the null space
            return PowerResult(0.0, it, True, history, v)
        v = w / nrm
    return PowerResult(history[-1], max_iter, False, history, v)


def lambda_max(spec: HvpSpec, tol: float = 1e-6, max_iter: int = 500, seed: int = 0) -> PowerResult:
    """Leading Hessian eigenvalue of the probed objective.

    Power iteration finds the eigenvalue of largest magnitude; a negative
    result means the point is not a minimum and is reported as such via
    ``PowerResult.negative``. Non-convergence is flagged, not raised.
    """
    res = power_iteration(lambda v: hvp(spec, v), spec.theta.size, tol, max_iter, seed)
    if not res.converged:
        log.warning("power iteration did not converge in %d iterations (last %.6g)",
                    max_iter, res.value)
    if res.negative:
        log.warning("dominant Hessian eigenvalue is negative (%.6g)", res.value)
    return res


def dense_hessian(spec: HvpSpec, eps: float = 1e-4) -> np.ndarray:
    """Full Hessian from kink-avoiding central differences of the analytic gradient, symmetrized.

    Only meant for tiny networks.
    """
    D = spec.theta.size
    H = np.empty((D, D))
    for i in range(D):
        e = np.zeros(D)
        e[i] = 1.0
        H[:, i] = fd_hvp(spec, e, eps)
    return 0.5 * (H + H.T)
