"""Adam, reduce-on-plateau and early stopping."""
from __future__ import annotations

import math

import numpy as np


class Adam:
    """Bias-corrected Adam updating ``params`` in place."""

    def __init__(self, params: np.ndarray, lr: float = 1e-4, betas=(0.9, 0.999), eps: float = 1e-8):
        if lr < 0:
            raise ValueError("learning rate must be non-negative")
        self.params = params
        self.lr = lr
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.m = np.zeros_like(params)
        self.v = np.zeros_like(params)
        self.t = 0

    def step(self, grad: np.ndarray) -> np.ndarray:
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        self.m *= b1
        self.m += (1 - b1) * grad
        self.v *= b2
        self.v += (1 - b2) * grad * grad
        m_hat = self.m / (1 - b1 ** self.t)
        v_hat = self.v / (1 - b2 ** self.t)
        self.params -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)
        return self.params


class _Plateau:
    def __init__(self, patience: int, threshold: float):
        if patience < 1:
            raise ValueError("patience must be at least 1")
        self.patience = patience
        self.threshold = threshold
        self.best = math.inf
        self.num_bad = 0

    def _observe(self, loss: float) -> bool:
        """Record a loss; True once ``patience`` epochs in a row failed to improve."""
        if loss < self.best - self.threshold:
            self.best = loss
            self.num_bad = 0
        else:
            self.num_bad += 1
        return self.num_bad >= self.patience


class ReduceOnPlateau(_Plateau):
    """Multiply the learning rate by ``factor`` after ``patience`` epochs without improvement.

    Improvement means ``loss < best - threshold``. The bad-epoch counter resets
    on improvement and after every reduction. No cooldown and no floor.
    """

    def __init__(self, lr: float, factor: float = 0.5, patience: int = 5, threshold: float = 1e-8):
        super().__init__(patience, threshold)
        if not 0 < factor < 1:
            raise ValueError("factor must lie in (0, 1)")
        self.lr = lr
        self.factor = factor
        self.n_reductions = 0

    def step(self, loss: float) -> float:
        if self._observe(loss):
            self.lr *= self.factor
            self.n_reductions += 1
            self.num_bad = 0
        return self.lr


class EarlyStopping(_Plateau):
    def __init__(self, patience: int = 5, threshold: float = 1e-8):
        super().__init__(patience, threshold)

    def step(self, loss: float) -> bool:
        """True when training should stop."""
        return self._observe(loss)
