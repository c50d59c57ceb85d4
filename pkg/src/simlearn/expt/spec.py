"""Declarative sweep specifications and the preset files that ship with the package."""
from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import asdict, dataclass, field, fields, replace
from importlib import resources
from pathlib import Path

from ..ebm.train import TrainConfig

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

DATASET_KINDS = ("mps", "clifford_t")
PROBES = ("hessian", "rso", "entropy", "epochs")
WEIGHTINGS = ("uniform", "born", "data")
LR_SCALINGS = ("none", "sqrt")
FIGURES = tuple(str(i) for i in range(1, 9))

PRESET_PACKAGE = "simlearn.expt.presets"
SCALES = ("desk", "full")


@dataclass(frozen=True)
class SweepSpec:
    """One figure's worth of runs: resource values x instances (x subspace dims).

    Subspace runs start from ``rso_learning_rate`` (``train.learning_rate``
    when unset). ``rso_lr_scaling == "sqrt"`` multiplies it by ``sqrt(D / d)``;
    ``"none"`` uses it as given.
    ``projection_kind`` of ``None`` picks dense up to d = 512 and sparse above.
    """
    dataset_kind: str
    resource_values: tuple
    probe: str
    n_qubits: int = 10
    instances_per_value: int = 20
    rso_dims: tuple | None = None
    n_s: int = 100_000
    depth: int = 500
    train: TrainConfig = field(default_factory=TrainConfig)
    hessian_weighting: str = "uniform"
    master_seed: int = 0
    projection_kind: str | None = None
    rso_lr_scaling: str = "none"
    rso_learning_rate: float | None = None
    power_tol: float = 1e-6
    power_max_iter: int = 500
    hidden_layers: int = 5
    hidden_width: int = 128
    figure: str | None = None
    name: str = "sweep"

    def __post_init__(self):
        object.__setattr__(self, "resource_values", tuple(int(v) for v in self.resource_values))
        if self.rso_dims is not None:
            object.__setattr__(self, "rso_dims", tuple(int(d) for d in self.rso_dims))
        if isinstance(self.train, dict):
            object.__setattr__(self, "train", TrainConfig.from_dict(self.train))
        if self.figure is not None:
            object.__setattr__(self, "figure", str(self.figure))

        if self.dataset_kind not in DATASET_KINDS:
            raise ValueError(f"dataset_kind must be one of {DATASET_KINDS}, got {self.dataset_kind!r}")
        if self.probe not in PROBES:
            raise ValueError(f"probe must be one of {PROBES}, got {self.probe!r}")
        if not self.resource_values:
            raise ValueError("resource_values must be nonempty")
        if len(set(self.resource_values)) != len(self.resource_values):
            raise ValueError("resource_values contain duplicates")
        if min(self.resource_values) < (1 if self.dataset_kind == "mps" else 0):
            raise ValueError(f"resource value out of range: {min(self.resource_values)}")
        if self.instances_per_value < 1:
            raise ValueError("instances_per_value must be at least 1")
        if not 1 <= self.n_qubits <= 14:
            raise ValueError("n_qubits must lie in 1..14")
        if self.n_s < 1 or self.depth < 1:
            raise ValueError("n_s and depth must be positive")
        if self.probe in ("rso", "epochs"):
            if not self.rso_dims:
                raise ValueError(f"probe {self.probe!r} needs rso_dims")
            if min(self.rso_dims) < 1 or len(set(self.rso_dims)) != len(self.rso_dims):
                raise ValueError("rso_dims must be distinct positive integers")
        if self.probe == "epochs" and self.train.early_stop_patience is None:
            raise ValueError("probe 'epochs' needs train.early_stop_patience")
        if self.hessian_weighting not in WEIGHTINGS:
            raise ValueError(f"hessian_weighting must be one of {WEIGHTINGS}")
        if self.projection_kind not in (None, "dense", "sparse"):
            raise ValueError("projection_kind must be dense, sparse or unset")
        if self.rso_lr_scaling not in LR_SCALINGS:
            raise ValueError(f"rso_lr_scaling must be one of {LR_SCALINGS}")
        if self.rso_learning_rate is not None and not self.rso_learning_rate > 0:
            raise ValueError("rso_learning_rate must be positive")
        if self.power_tol <= 0 or self.power_max_iter < 1:
            raise ValueError("power_tol must be positive and power_max_iter at least 1")
        if self.figure is not None and self.figure not in FIGURES:
            raise ValueError(f"figure must be one of {FIGURES}")
        if self.master_seed < 0:
            raise ValueError("master_seed must be non-negative")

    @property
    def dims(self) -> tuple:
        """Subspace dimensions, or ``(None,)`` for probes that train in full space."""
        return self.rso_dims if self.probe in ("rso", "epochs") else (None,)

    @property
    def expected_records(self) -> int:
        return len(self.resource_values) * len(self.dims) * self.instances_per_value

    def to_dict(self) -> dict:
        d = asdict(self)
        d["train"] = self.train.to_dict()
        d["resource_values"] = list(self.resource_values)
        d["rso_dims"] = None if self.rso_dims is None else list(self.rso_dims)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SweepSpec":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown sweep spec fields {sorted(unknown)}")
        try:
            return cls(**d)
        except TypeError as exc:
            raise ValueError(f"incomplete sweep spec: {exc}") from None

    def spec_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def with_overrides(self, overrides: dict) -> "SweepSpec":
        """Copy with top-level fields replaced; a ``train`` dict is merged field by field."""
        overrides = dict(overrides)
        if "train" in overrides:
            t = self.train.to_dict()
            t.update(overrides.pop("train"))
            overrides["train"] = TrainConfig.from_dict(t)
        return replace(self, **overrides)


def _read_mapping(path: Path) -> dict:
    text = path.read_text()
    if path.suffix == ".json":
        return json.loads(text)
    return tomllib.loads(text)


def preset_names() -> list:
    return sorted(p.name.rsplit(".", 1)[0] for p in resources.files(PRESET_PACKAGE).iterdir()
                  if p.name.endswith(".toml"))


def _preset_mapping(name: str) -> dict:
    res = resources.files(PRESET_PACKAGE).joinpath(f"{name}.toml")
    if not res.is_file():
        raise FileNotFoundError(f"no preset named {name!r}; available: {', '.join(preset_names())}")
    return tomllib.loads(res.read_text())


def load_spec(source, scale: str | None = None) -> SweepSpec:
    """Read a spec from a TOML/JSON path or a bundled preset name (``fig1`` ... ``fig8``).

    ``scale`` applies the bundled ``desk`` or ``full`` overlay on top.
    """
    path = Path(source)
    if path.suffix in (".toml", ".json") or path.exists():
        if not path.is_file():
            raise FileNotFoundError(f"spec file {path} not found")
        try:
            d = _read_mapping(path)
        except (ValueError, tomllib.TOMLDecodeError) as exc:
            raise ValueError(f"{path}: {exc}") from exc
    else:
        d = _preset_mapping(str(source))
    spec = SweepSpec.from_dict(d)
    if scale is not None:
        if scale not in SCALES:
            raise ValueError(f"scale must be one of {SCALES}")
        overlay = _preset_mapping(scale)
        if spec.probe == "epochs":
            # epochs-to-convergence runs keep their own (large) epoch cap
            overlay.get("train", {}).pop("epochs", None)
        spec = spec.with_overrides(overlay)
    return spec
