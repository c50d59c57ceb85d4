"""Maximum-likelihood training of the energy network.

Minibatches are multinomial resamples of the count table; the model term of
every gradient is exact (all 2**N configurations are evaluated each step).
The scheduler and the optional early stopper watch the epoch mean of the
minibatch NLL.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ..qstate.born import BornDistribution, SampleSet
from . import objective
from .network import NetArchitecture, init_params
from .optim import Adam, EarlyStopping, ReduceOnPlateau

log = logging.getLogger(__name__)


class TrainingDiverged(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-4
    epochs: int = 200
    scheduler_factor: float = 0.5
    scheduler_patience: int = 5
    scheduler_threshold: float = 1e-8
    batch_size: int | None = 1024
    early_stop_patience: int | None = None
    seed: int = 0
    betas: tuple = (0.9, 0.999)
    adam_eps: float = 1e-8

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.epochs < 1:
            raise ValueError("epochs must be at least 1")
        if not 0 < self.scheduler_factor < 1:
            raise ValueError("scheduler_factor must lie in (0, 1)")
        if self.scheduler_patience < 1:
            raise ValueError("scheduler_patience must be at least 1")
        if self.batch_size is not None and self.batch_size < 1:
            raise ValueError("batch_size must be positive or None for full batch")
        if self.early_stop_patience is not None and self.early_stop_patience < 1:
            raise ValueError("early_stop_patience must be at least 1")
        object.__setattr__(self, "betas", tuple(self.betas))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["betas"] = list(self.betas)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown train config fields {sorted(unknown)}")
        return cls(**d)


@dataclass
class TrainHistory:
    nll: list = field(default_factory=list)
    lr: list = field(default_factory=list)
    tv: list = field(default_factory=list)
    stopped_early: bool = False

    @property
    def epochs_run(self) -> int:
        return len(self.nll)

    def to_dict(self) -> dict:
        return {"nll": list(self.nll), "lr": list(self.lr), "tv": list(self.tv),
                "stopped_early": self.stopped_early, "epochs_run": self.epochs_run}

    @classmethod
    def from_dict(cls, d: dict) -> "TrainHistory":
        return cls(list(d["nll"]), list(d["lr"]), list(d["tv"]), bool(d.get("stopped_early", False)))

    def write_csv(self, path):
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["epoch", "nll", "lr", "tv"])
            for i, row in enumerate(zip(self.nll, self.lr, self.tv), start=1):
                w.writerow([i] + [repr(float(x)) for x in row])


def fit(arch: NetArchitecture, data: SampleSet, target: BornDistribution | None,
        config: TrainConfig, start: np.ndarray, embed=None, pullback=None):
    """Generic training loop over a trainable vector ``start``.

    ``embed`` maps the trainable vector to full network parameters and
    ``pullback`` maps a full-space gradient back; both default to identity.
    Returns the trained vector and its history.
    """
    from ..probes.metrics import tv_distance

    if data.n_qubits != arch.input_dim:
        raise ValueError(f"data has {data.n_qubits} qubits, network expects {arch.input_dim}")
    if target is not None and target.n_qubits != arch.input_dim:
        raise ValueError("target qubit count does not match the network")
    embed = embed or (lambda x: x)
    pullback = pullback or (lambda g: g)

    rng = np.random.default_rng(config.seed)
    freqs = data.counts / data.total
    full_weights = freqs
    if config.batch_size is None:
        steps = 1
    else:
        steps = math.ceil(data.total / config.batch_size)

    x = np.array(start, dtype=np.float64)
    opt = Adam(x, config.learning_rate, config.betas, config.adam_eps)
    sched = ReduceOnPlateau(config.learning_rate, config.scheduler_factor,
                            config.scheduler_patience, config.scheduler_threshold)
    stopper = EarlyStopping(config.early_stop_patience) if config.early_stop_patience else None
    hist = TrainHistory()

    for epoch in range(1, config.epochs + 1):
        total = 0.0
        for step in range(steps):
            if config.batch_size is None:
                w = full_weights
            else:
                w = rng.multinomial(config.batch_size, freqs) / config.batch_size
            try:
                loss, g = objective.loss_and_grad(arch, embed(x), w)
            except objective.NonFiniteError as exc:
                raise TrainingDiverged(f"epoch {epoch}, step {step + 1}: {exc}") from exc
            if not math.isfinite(loss):
                raise TrainingDiverged(f"epoch {epoch}, step {step + 1}: loss {loss}")
            opt.step(pullback(g))
            total += loss
        epoch_nll = total / steps
        tv = math.nan
        if target is not None:
            tv = tv_distance(target, objective.model_distribution(arch, embed(x)))
        hist.nll.append(epoch_nll)
        hist.lr.append(opt.lr)
        hist.tv.append(tv)
        opt.lr = sched.step(epoch_nll)
        log.debug("epoch %d nll %.6f tv %.4f lr %.2e", epoch, epoch_nll, tv, hist.lr[-1])
        if stopper is not None and stopper.step(epoch_nll):
            hist.stopped_early = True
            break
    return x, hist


def train(data: SampleSet, target: BornDistribution | None, config: TrainConfig,
          init_seed: int, arch: NetArchitecture | None = None,
          params: np.ndarray | None = None):
    """Train the energy network from He initialization (or from ``params``).

    Returns ``(theta, history)``; ``history.lr`` holds the rate used in each epoch.
    """
    arch = arch or NetArchitecture(data.n_qubits)
    theta0 = init_params(arch, init_seed) if params is None else np.array(params, dtype=np.float64)
    return fit(arch, data, target, config, theta0)
