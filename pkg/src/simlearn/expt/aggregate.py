"""Per-key means and standard deviations, and the rank-trend test used on them."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

PROBE_METRICS = {
    "hessian": ("lambda_max", "tv", "power_iters"),
    "rso": ("tv", "epochs_run"),
    "epochs": ("epochs_run", "tv"),
    "entropy": ("entropy",),
}


@dataclass(frozen=True)
class AggregateRow:
    resource_value: int
    d: int | None
    metric: str
    mean: float
    std: float
    count: int
    flagged: bool  # single record, or fewer than the expected instance count


def _metric_values(rec) -> dict:
    out = {}
    for m in PROBE_METRICS[rec.probe]:
        v = getattr(rec, m)
        if v is not None:
            out[m] = float(v)
    if rec.entropy_profile is not None:
        for k, s in enumerate(rec.entropy_profile, start=1):
            out[f"entropy_k{k}"] = float(s)
    return out


def aggregate(records, expected: int | None = None) -> list:
    """Mean and sample standard deviation (n - 1) per ``(resource_value, d, metric)``.

    Failed records and non-finite values are skipped, which lowers ``count``.
    A lone value gets ``std = 0``. Rows are flagged when ``count == 1`` or
    ``count < expected``. Output order is canonical, so record order does not matter.
    """
    if hasattr(records, "records"):
        expected = records.spec.instances_per_value if expected is None else expected
        records = records.records
    records = list(records)
    if not records:
        raise ValueError("no records to aggregate")
    groups: dict = {}
    for r in records:
        if not r.ok:
            groups.setdefault((r.resource_value, r.d), {})
            continue
        for m, v in _metric_values(r).items():
            if math.isfinite(v):
                groups.setdefault((r.resource_value, r.d), {}).setdefault(m, []).append(v)
    rows = []
    for (value, d) in sorted(groups, key=lambda k: (k[0], -1 if k[1] is None else k[1])):
        for m in sorted(groups[(value, d)], key=_metric_order):
            vals = np.sort(np.array(groups[(value, d)][m]))  # sorted: order-independent sums
            n = vals.size
            std = float(vals.std(ddof=1)) if n > 1 else 0.0
            flagged = n == 1 or (expected is not None and n < expected)
            rows.append(AggregateRow(value, d, m, float(vals.mean()), std, n, flagged))
    return rows


def _metric_order(m: str):
    if m.startswith("entropy_k"):
        return (1, int(m[len("entropy_k"):]))
    return (0, m)


def spearman(x, y) -> float:
    """Spearman rank correlation with average ranks for ties.

    Convention: when either side is constant the correlation is defined as 0.
    """
    rx, ry = rankdata(x), rankdata(y)
    rx, ry = rx - rx.mean(), ry - ry.mean()
    den = math.sqrt(float((rx ** 2).sum() * (ry ** 2).sum()))
    return 0.0 if den == 0 else float((rx * ry).sum() / den)


def is_monotone(values) -> bool:
    """All consecutive differences share a sign; equal neighbours are allowed."""
    diff = np.diff(np.asarray(values, dtype=float))
    return bool(np.all(diff >= 0) or np.all(diff <= 0))


def select_series(rows, metric: str, axis: str = "resource", fixed=None):
    """``(x, mean)`` pairs for one metric, sorted by x.

    ``axis="resource"``: x is the resource value at subspace dimension ``fixed``
    (``None`` for full-space probes). ``axis="d"``: x is ``d`` at resource value ``fixed``.
    """
    if axis == "resource":
        pts = [(r.resource_value, r.mean) for r in rows if r.metric == metric and r.d == fixed]
    elif axis == "d":
        pts = [(r.d, r.mean) for r in rows
               if r.metric == metric and r.d is not None and (fixed is None or r.resource_value == fixed)]
    else:
        raise ValueError("axis must be 'resource' or 'd'")
    pts.sort()
    return [p[0] for p in pts], [p[1] for p in pts]


def trend_test(rows, metric: str, axis: str = "resource", fixed=None) -> tuple:
    """``(spearman_rho, monotone)`` of the mean metric against the chosen axis."""
    x, y = select_series(rows, metric, axis, fixed)
    if len(x) < 3:
        raise ValueError(f"trend test needs at least 3 points, got {len(x)}")
    return spearman(x, y), is_monotone(y)
