"""Fully connected ReLU energy network over bitstrings, in plain NumPy.

Parameters live in one flat float64 vector. ``unpack`` returns views into it,
laid out layer by layer as ``W`` (fan_in x fan_out, row-major) then ``b``.

Besides the forward pass and ordinary backprop this module carries the
R-operator pass (forward-mode differentiation of the backward pass), which
gives exact Hessian-vector products of any loss whose gradient with respect
to the energies is known together with its directional derivative.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class NetArchitecture:
    input_dim: int
    hidden_layers: int = 5
    hidden_width: int = 128

    def __post_init__(self):
        if self.input_dim < 1 or self.hidden_layers < 1 or self.hidden_width < 1:
            raise ValueError(f"invalid architecture {self}")

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        return (self.input_dim,) + (self.hidden_width,) * self.hidden_layers + (1,)

    @property
    def n_params(self) -> int:
        s = self.layer_sizes
        return sum(a * b + b for a, b in zip(s[:-1], s[1:]))

    def to_dict(self) -> dict:
        return {
            "input_dim": self.input_dim,
            "hidden_layers": self.hidden_layers,
            "hidden_width": self.hidden_width,
            "activation": "relu",
            "output_dim": 1,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NetArchitecture":
        return cls(int(d["input_dim"]), int(d["hidden_layers"]), int(d["hidden_width"]))


def unpack(arch: NetArchitecture, theta: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    """Split a flat vector into per-layer ``(W, b)`` views."""
    if theta.shape != (arch.n_params,):
        raise ValueError(f"expected parameter vector of length {arch.n_params}, got {theta.shape}")
    layers = []
    pos = 0
    s = arch.layer_sizes
    for fan_in, fan_out in zip(s[:-1], s[1:]):
        W = theta[pos:pos + fan_in * fan_out].reshape(fan_in, fan_out)
        pos += fan_in * fan_out
        b = theta[pos:pos + fan_out]
        pos += fan_out
        layers.append((W, b))
    return layers


def bias_mask(arch: NetArchitecture) -> np.ndarray:
    """Boolean mask over the flat vector selecting bias entries."""
    mask = np.zeros(arch.n_params, dtype=bool)
    for _, b in unpack(arch, np.arange(arch.n_params, dtype=np.float64)):
        mask[b.astype(np.int64)] = True
    return mask


@lru_cache(maxsize=None)
def _bit_table(n: int) -> np.ndarray:
    idx = np.arange(2 ** n)[:, None]
    table = ((idx >> np.arange(n)[None, :]) & 1).astype(np.float64)
    table.setflags(write=False)
    return table


def bit_table(n: int) -> np.ndarray:
    """All 2**n bitstrings as a (2**n, n) float array; row x holds bit k of x in column k."""
    return _bit_table(n)


def forward(arch: NetArchitecture, theta: np.ndarray, X: np.ndarray, keep: bool = False):
    """Energies of the rows of ``X``.

    With ``keep=True`` also returns the list of layer inputs (``X`` followed by
    each hidden activation), which ``backward`` and ``r_op`` need.
    """
    layers = unpack(arch, theta)
    h = X
    acts = [h]
    for W, b in layers[:-1]:
        h = h @ W
        h += b
        np.maximum(h, 0.0, out=h)
        acts.append(h)
    W, b = layers[-1]
    energies = (h @ W)[:, 0] + b[0]
    if keep:
        return energies, acts
    return energies


def activation_pattern(arch: NetArchitecture, theta: np.ndarray) -> np.ndarray:
    """Which hidden units are active (pre-activation > 0) on each configuration, flattened."""
    _, acts = forward(arch, theta, bit_table(arch.input_dim), keep=True)
    return np.concatenate([(a > 0).ravel() for a in acts[1:]])


def backward(arch: NetArchitecture, theta: np.ndarray, acts: list, dE: np.ndarray) -> np.ndarray:
    """Flat gradient of ``sum_x dE[x] * E(x)`` given the activations of ``forward``."""
    layers = unpack(arch, theta)
    grad = np.empty_like(theta)
    glayers = unpack(arch, grad)
    delta = dE[:, None]
    for i in range(len(layers) - 1, -1, -1):
        W, _ = layers[i]
        gW, gb = glayers[i]
        h_in = acts[i]
        np.matmul(h_in.T, delta, out=gW)
        gb[:] = delta.sum(axis=0)
        if i > 0:
            delta = delta @ W.T
            # relu'(0) is taken as 0
            delta *= acts[i] > 0
    return grad


def r_op(arch: NetArchitecture, theta: np.ndarray, acts: list, dE: np.ndarray,
         v: np.ndarray, r_dE_fn) -> np.ndarray:
    """Directional derivative along ``v`` of the gradient returned by ``backward``.

    ``r_dE_fn(rE)`` must return the directional derivative of ``dE`` given the
    directional derivative ``rE`` of the energies. ReLU masks are held fixed,
    so the result is the exact Hessian-vector product away from kinks.
    """
    layers = unpack(arch, theta)
    vlayers = unpack(arch, v)
    n_layers = len(layers)

    # forward tangent
    r_acts = [np.zeros_like(acts[0])]
    rh = None
    for i in range(n_layers - 1):
        W, _ = layers[i]
        V, vb = vlayers[i]
        z = acts[i] @ V
        z += vb
        if rh is not None:
            z += rh @ W
        z *= acts[i + 1] > 0
        rh = z
        r_acts.append(rh)
    W, _ = layers[-1]
    V, vb = vlayers[-1]
    rE = (rh @ W)[:, 0] + (acts[-1] @ V)[:, 0] + vb[0]
    r_dE = r_dE_fn(rE)

    # reverse pass of the tangent
    out = np.empty_like(theta)
    olayers = unpack(arch, out)
    delta = dE[:, None]
    r_delta = r_dE[:, None]
    for i in range(n_layers - 1, -1, -1):
        W, _ = layers[i]
        V, _ = vlayers[i]
        oW, ob = olayers[i]
        oW[:] = r_acts[i].T @ delta
        oW += acts[i].T @ r_delta
        ob[:] = r_delta.sum(axis=0)
        if i > 0:
            mask = acts[i] > 0
            new_r = r_delta @ W.T
            new_r += delta @ V.T
            new_r *= mask
            delta = (delta @ W.T) * mask
            r_delta = new_r
    return out


def init_params(arch: NetArchitecture, seed: int) -> np.ndarray:
    """He-normal weights (std sqrt(2/fan_in)), zero biases."""
    rng = np.random.default_rng(seed)
    theta = np.zeros(arch.n_params)
    for W, _ in unpack(arch, theta):
        W[:] = rng.standard_normal(W.shape) * np.sqrt(2.0 / W.shape[0])
    return theta
