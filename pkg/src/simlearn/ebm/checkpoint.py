"""JSON checkpoints: architecture, float64 parameters, config, history and seeds."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .network import NetArchitecture
from .train import TrainConfig, TrainHistory

FORMAT = "simlearn-checkpoint/1"


def save_checkpoint(path, arch: NetArchitecture, theta: np.ndarray, config: TrainConfig | None = None,
                    history: TrainHistory | None = None, seeds: dict | None = None,
                    extra: dict | None = None):
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (arch.n_params,):
        raise ValueError("parameter vector does not match the architecture")
    doc = {
        "format": FORMAT,
        "architecture": arch.to_dict(),
        "dtype": "float64",
        "theta": theta.tolist(),
        "config": config.to_dict() if config else None,
        "history": history.to_dict() if history else None,
        "seeds": seeds or {},
        "extra": extra or {},
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc))


def load_checkpoint(path) -> dict:
    """Returns a dict with ``arch``, ``theta``, ``config``, ``history``, ``seeds``, ``extra``."""
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != FORMAT:
        raise ValueError(f"{path}: not a {FORMAT} file")
    arch = NetArchitecture.from_dict(doc["architecture"])
    theta = np.array(doc["theta"], dtype=np.float64)
    if theta.shape != (arch.n_params,):
        raise ValueError(f"{path}: theta has {theta.size} entries, architecture needs {arch.n_params}")
    cfg = doc.get("config")
    hist = doc.get("history")
    return {
        "arch": arch,
        "theta": theta,
        "config": TrainConfig.from_dict(cfg) if cfg else None,
        "history": TrainHistory.from_dict(hist) if hist else None,
        "seeds": doc.get("seeds", {}),
        "extra": doc.get("extra", {}),
    }
