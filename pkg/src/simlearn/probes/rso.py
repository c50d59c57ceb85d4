"""Random subspace optimization: train only ``theta_d`` in ``theta = theta0 + P theta_d``."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..ebm.network import NetArchitecture
from ..ebm.train import TrainConfig, TrainHistory, fit
from ..qstate.born import BornDistribution, SampleSet

DENSE_MAX_DIM = 512
KINDS = ("dense", "sparse")


@dataclass(frozen=True)
class RSOProjection:
    """Fixed affine map from ``d`` trainable coordinates to ``D`` network parameters.

    ``kind == "dense"``: Gaussian matrix with orthonormalized columns.
    ``kind == "sparse"``: ``ceil(sqrt(D))`` entries of ``+-1/sqrt(ceil(sqrt(D)))``
    per column at uniform rows, so columns are unit norm and nearly orthogonal.
    """
    full_dim: int
    sub_dim: int
    kind: str
    theta0: np.ndarray
    matrix: object = field(repr=False)
    seed: int = 0

    def embed(self, theta_d: np.ndarray) -> np.ndarray:
        theta_d = np.asarray(theta_d, dtype=np.float64)
        if theta_d.shape != (self.sub_dim,):
            raise ValueError(f"expected {self.sub_dim} subspace coordinates, got shape {theta_d.shape}")
        return self.theta0 + self.matrix @ theta_d

    def pullback(self, grad: np.ndarray) -> np.ndarray:
        """Transpose map: full-space gradient to subspace gradient."""
        grad = np.asarray(grad, dtype=np.float64)
        if grad.shape != (self.full_dim,):
            raise ValueError(f"expected a length-{self.full_dim} vector, got shape {grad.shape}")
        return np.asarray(self.matrix.T @ grad).ravel()

    def columns(self) -> np.ndarray:
        """Dense copy of the projector (for audits on small sizes)."""
        return self.matrix.toarray() if sp.issparse(self.matrix) else np.array(self.matrix)


def default_kind(d: int) -> str:
    return "dense" if d <= DENSE_MAX_DIM else "sparse"


def make_projection(D: int, d: int, kind: str | None, theta0: np.ndarray, seed: int) -> RSOProjection:
    if not 1 <= d < D:
        raise ValueError(f"need 1 <= d < D, got d={d}, D={D}")
    theta0 = np.array(theta0, dtype=np.float64)
    if theta0.shape != (D,):
        raise ValueError(f"theta0 has shape {theta0.shape}, expected ({D},)")
    theta0.setflags(write=False)
    kind = kind or default_kind(d)
    rng = np.random.default_rng(seed)
    if kind == "dense":
        Q, R = np.linalg.qr(rng.standard_normal((D, d)))
        # fix the sign ambiguity of QR so Q is Haar-distributed
        Q *= np.sign(np.diag(R))
        Q.setflags(write=False)
        mat = Q
    elif kind == "sparse":
        k = math.ceil(math.sqrt(D))
        rows = np.concatenate([rng.choice(D, size=k, replace=False) for _ in range(d)])
        cols = np.repeat(np.arange(d), k)
        vals = rng.choice([-1.0, 1.0], size=k * d) / math.sqrt(k)
        mat = sp.csc_matrix((vals, (rows, cols)), shape=(D, d))
    else:
        raise ValueError(f"unknown projection kind {kind!r}; expected one of {KINDS}")
    return RSOProjection(D, d, kind, theta0, mat, seed)


def embed(proj: RSOProjection, theta_d: np.ndarray) -> np.ndarray:
    return proj.embed(theta_d)


@dataclass
class ProbeResult:
    lambda_max: float | None = None
    power_iterations: int | None = None
    rayleigh_history: list = field(default_factory=list)
    tv: float = math.nan
    epochs_run: int = 0
    converged: bool = True
    history: TrainHistory | None = field(default=None, repr=False)
    params: np.ndarray | None = field(default=None, repr=False)


def rso_train(target: BornDistribution, data: SampleSet, proj: RSOProjection,
              config: TrainConfig, arch: NetArchitecture | None = None) -> ProbeResult:
    """Adam on the subspace coordinates, starting from ``theta_d = 0``.

    Gradients are taken in full space at ``embed(theta_d)`` and pulled back.
    The returned ``tv`` is measured against the exact target distribution.
    """
    arch = arch or NetArchitecture(data.n_qubits)
    if proj.full_dim != arch.n_params:
        raise ValueError(f"projection maps to {proj.full_dim} parameters, network has {arch.n_params}")
    x, hist = fit(arch, data, target, config, np.zeros(proj.sub_dim),
                  embed=proj.embed, pullback=proj.pullback)
    return ProbeResult(tv=hist.tv[-1], epochs_run=hist.epochs_run, history=hist, params=x)
