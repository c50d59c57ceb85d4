"""Sweep execution: one task per (resource value, instance), fanned out over a process pool."""
from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from ..ebm.network import NetArchitecture, init_params
from ..ebm.train import train
from ..probes.hessian import HvpSpec, lambda_max
from ..probes.rso import default_kind, make_projection, rso_train
from ..qstate.born import sample
from ..qstate.bundle import make_target
from ..qstate.entropy import entropy_profile
from . import seeds
from .spec import SweepSpec

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProbeRecord:
    """One CSV row: the outcome of one probe on one instance (and one ``d``)."""
    dataset_kind: str
    resource_value: int
    instance: int
    instance_seed: int
    probe: str
    d: int | None = None
    lambda_max: float | None = None
    power_iters: int | None = None
    power_converged: bool | None = None
    tv: float | None = None
    epochs_run: int | None = None
    hessian_weighting: str | None = None
    projection_kind: str | None = None
    entropy: float | None = None
    entropy_profile: tuple | None = None
    status: str = "ok"
    error: str = ""

    @property
    def key(self):
        return (self.resource_value, -1 if self.d is None else self.d, self.instance)

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def _arch(spec: SweepSpec) -> NetArchitecture:
    return NetArchitecture(spec.n_qubits, spec.hidden_layers, spec.hidden_width)


def _subspace_lr(spec: SweepSpec, D: int, d: int) -> float:
    lr = spec.rso_learning_rate or spec.train.learning_rate
    return lr * math.sqrt(D / d) if spec.rso_lr_scaling == "sqrt" else lr


def run_instance(spec: SweepSpec, value: int, index: int) -> list:
    """All records for one instance; failures become ``status="failed"`` rows."""
    inst = seeds.instance_seed(spec.master_seed, index)
    base = dict(dataset_kind=spec.dataset_kind, resource_value=value, instance=index,
                instance_seed=inst, probe=spec.probe)
    try:
        return _run(spec, value, inst, base)
    except Exception as exc:  # recorded, never dropped
        log.error("instance %d (seed %d) at resource %d failed: %s: %s",
                  index, inst, value, type(exc).__name__, exc)
        msg = f"{type(exc).__name__}: {exc}"
        return [ProbeRecord(**base, d=d, status="failed", error=msg) for d in spec.dims]


def _run(spec: SweepSpec, value: int, inst: int, base: dict) -> list:
    target = make_target(spec.dataset_kind, spec.n_qubits, value,
                         seeds.stream_seed(inst, seeds.TARGET), spec.depth)
    if spec.probe == "entropy":
        prof = entropy_profile(target.state, "contiguous-cuts")
        mid = float(prof[spec.n_qubits // 2 - 1]) if spec.n_qubits > 1 else 0.0
        return [ProbeRecord(**base, entropy=mid, entropy_profile=tuple(float(s) for s in prof))]

    data = sample(target.dist, spec.n_s, seeds.stream_seed(inst, seeds.SAMPLING))
    arch = _arch(spec)
    theta0 = init_params(arch, seeds.stream_seed(inst, seeds.INIT))
    cfg = replace(spec.train, seed=seeds.stream_seed(inst, seeds.MINIBATCH))

    if spec.probe == "hessian":
        theta, hist = train(data, target.dist, cfg, init_seed=0, arch=arch, params=theta0)
        hspec = HvpSpec(arch, theta, spec.hessian_weighting, target=target.dist, data=data)
        res = lambda_max(hspec, spec.power_tol, spec.power_max_iter,
                         seeds.stream_seed(inst, seeds.POWER))
        return [ProbeRecord(**base, lambda_max=res.value, power_iters=res.iterations,
                            power_converged=res.converged, tv=hist.tv[-1],
                            epochs_run=hist.epochs_run,
                            hessian_weighting=spec.hessian_weighting)]

    out = []
    D = arch.n_params
    for d in spec.rso_dims:
        kind = spec.projection_kind or default_kind(d)
        proj = make_projection(D, d, kind, theta0, seeds.stream_seed(inst, seeds.PROJECTION))
        res = rso_train(target.dist, data, proj, replace(cfg, learning_rate=_subspace_lr(spec, D, d)),
                        arch=arch)
        out.append(ProbeRecord(**base, d=d, tv=res.tv, epochs_run=res.epochs_run,
                               projection_kind=kind))
    return out


def _task(args):
    return run_instance(*args)


def default_workers() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


@dataclass
class SweepResult:
    spec: SweepSpec
    records: list = field(default_factory=list)

    def __post_init__(self):
        self.records = sorted(self.records, key=lambda r: r.key)

    @property
    def failures(self) -> list:
        return [r for r in self.records if not r.ok]

    def completed_keys(self) -> set:
        """(resource value, instance) pairs whose records all succeeded."""
        bad = {(r.resource_value, r.instance) for r in self.records if not r.ok}
        return {(r.resource_value, r.instance) for r in self.records} - bad


def run_sweep(spec: SweepSpec, workers: int | None = 1, existing: SweepResult | None = None,
              progress=None) -> SweepResult:
    """Run every (resource value, instance) task of ``spec``.

    Records come back in canonical key order whatever the completion order.
    With ``existing`` (a result of the same spec), instances that already have
    successful records are kept and not rerun.
    """
    kept = []
    done = set()
    if existing is not None:
        if existing.spec.spec_hash() != spec.spec_hash():
            raise ValueError("existing results were produced by a different spec; refusing to merge")
        done = existing.completed_keys()
        kept = [r for r in existing.records if (r.resource_value, r.instance) in done]
    tasks = [(spec, v, i) for v in spec.resource_values for i in range(spec.instances_per_value)
             if (v, i) not in done]
    workers = default_workers() if workers is None else workers
    if workers < 1:
        raise ValueError("workers must be at least 1")

    records = list(kept)
    if workers == 1 or len(tasks) <= 1:
        for t in tasks:
            records.extend(_task(t))
            if progress:
                progress(t)
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
            for t, recs in zip(tasks, pool.map(_task, tasks)):
                records.extend(recs)
                if progress:
                    progress(t)
    result = SweepResult(spec, records)
    if result.failures:
        log.warning("%d of %d records failed", len(result.failures), len(result.records))
    return result
