"""Seeded parameter sweeps, aggregation, persistence and SVG figures."""
from .aggregate import AggregateRow, aggregate, is_monotone, spearman, trend_test
from .persist import MalformedFile, load, persist
from .plot import STYLES, emit_plot
from .runner import ProbeRecord, SweepResult, run_instance, run_sweep
from .seeds import instance_seed, stream_seed
from .spec import SweepSpec, load_spec, preset_names

__all__ = [
    "AggregateRow", "MalformedFile", "ProbeRecord", "STYLES", "SweepResult", "SweepSpec",
    "aggregate", "emit_plot", "instance_seed", "is_monotone", "load", "load_spec", "persist",
    "preset_names", "run_instance", "run_sweep", "spearman", "stream_seed", "trend_test",
]
