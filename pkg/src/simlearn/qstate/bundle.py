"""Target instances and their JSON bundle files.

A bundle holds one generated target: how it was made, its exact Born table
and a sampled dataset. Arrays are indexed by the little-endian bitstring
encoding (qubit 0 is the least significant bit).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .born import BornDistribution, SampleSet, born, sample
from .circuit import random_clifford_t_circuit, simulate
from .mps import contract, random_mps
from .state import StateVector

KINDS = ("mps", "clifford_t")


@dataclass(frozen=True)
class Target:
    kind: str
    n: int
    resource: int
    seed: int
    depth: int | None
    state: StateVector
    dist: BornDistribution


def make_target(kind: str, n: int, resource: int, seed: int, depth: int = 500,
                complex_entries: bool = True) -> Target:
    """Generate an MPS (``resource`` = chi) or Clifford+T (``resource`` = t) target."""
    if kind == "mps":
        state = contract(random_mps(n, resource, seed, complex_entries=complex_entries))
        return Target(kind, n, resource, seed, None, state, born(state))
    if kind == "clifford_t":
        state = simulate(random_clifford_t_circuit(n, depth, resource, seed))
        return Target(kind, n, resource, seed, depth, state, born(state))
    raise ValueError(f"unknown target kind {kind!r}; expected one of {KINDS}")


def bundle_dict(target: Target, data: SampleSet) -> dict:
    d = {
        "kind": target.kind,
        "n": target.n,
        "bit_order": "little-endian",
        "seed": target.seed,
    }
    if target.kind == "mps":
        d["chi"] = target.resource
    else:
        d["t"] = target.resource
        d["depth"] = target.depth
    d["n_s"] = data.total
    d["probs"] = [float(p) for p in target.dist.probs]
    d["counts"] = [int(c) for c in data.counts]
    return d


def save_bundle(path, target: Target, data: SampleSet):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # json writes floats with repr, which round-trips float64 exactly
    path.write_text(json.dumps(bundle_dict(target, data)))


def load_bundle(path) -> tuple[dict, BornDistribution, SampleSet]:
    """Read a bundle; returns ``(metadata, distribution, samples)``."""
    d = json.loads(Path(path).read_text())
    missing = {"kind", "n", "probs", "counts", "n_s"} - d.keys()
    if missing:
        raise ValueError(f"{path}: bundle missing fields {sorted(missing)}")
    n = int(d["n"])
    dist = BornDistribution(n, np.array(d["probs"], dtype=np.float64))
    data = SampleSet(n, np.array(d["counts"], dtype=np.int64))
    if data.total != int(d["n_s"]):
        raise ValueError(f"{path}: counts sum to {data.total}, n_s says {d['n_s']}")
    meta = {k: v for k, v in d.items() if k not in ("probs", "counts")}
    return meta, dist, data


def generate(kind: str, n: int, resource: int, seed: int, n_s: int, sample_seed: int,
             depth: int = 500) -> tuple[Target, SampleSet]:
    target = make_target(kind, n, resource, seed, depth)
    return target, sample(target.dist, n_s, sample_seed)
