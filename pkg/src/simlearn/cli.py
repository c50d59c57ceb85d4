"""Command-line entry point: ``simlearn <subcommand> ...``.

Exit codes: 0 success, 1 usage error (bad flags, unreadable spec, invalid
combination), 2 runtime failure. Every subcommand writes ``spec.json`` with
the effective settings and version metadata next to its outputs. Outputs go
to ``--out``; without it, under ``$SIMLEARN_OUTPUT_ROOT`` (default ``runs``).
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

from .ebm import NetArchitecture, TrainConfig, init_params, load_checkpoint, save_checkpoint, train
from .expt import aggregate, emit_plot, load, load_spec, persist, run_sweep
from .expt.persist import aggregates_csv, environment
from .expt.runner import default_workers
from .expt import seeds
from .probes import HvpSpec, lambda_max, make_projection, rso_train
from .qstate import entropy_profile, load_bundle, make_target, sample, save_bundle

log = logging.getLogger("simlearn")
OUTPUT_ROOT_ENV = "SIMLEARN_OUTPUT_ROOT"
_FROM_SPEC = " (default: taken from --spec)"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


class _HelpFormatter(argparse.ArgumentDefaultsHelpFormatter):
    """Appends defaults, except where unset or already described in the help text."""

    def _get_help_string(self, action):
        if action.default is None or "default" in (action.help or ""):
            return action.help
        return super()._get_help_string(action)


def _out_dir(args, default_name: str) -> Path:
    if args.out:
        return Path(args.out)
    return Path(os.environ.get(OUTPUT_ROOT_ENV, "runs")) / default_name


def _write_effective(out: Path, command: str, settings: dict):
    out.mkdir(parents=True, exist_ok=True)
    doc = {"command": command, "settings": settings, "environment": environment()}
    (out / "spec.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _args_dict(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("func",)}


def _resource(args) -> int:
    if args.kind == "mps":
        if args.chi is None:
            raise UsageError("--kind mps needs --chi")
        if args.t is not None:
            raise UsageError("--t only applies to --kind clifford_t")
        return args.chi
    if args.t is None:
        raise UsageError("--kind clifford_t needs --t")
    if args.chi is not None:
        raise UsageError("--chi only applies to --kind mps")
    return args.t


def _train_config(args, **extra) -> TrainConfig:
    return TrainConfig(learning_rate=args.lr, epochs=args.epochs, scheduler_factor=args.factor,
                       scheduler_patience=args.sched_patience,
                       batch_size=None if args.batch_size == 0 else args.batch_size,
                       early_stop_patience=args.early_stop, seed=args.minibatch_seed, **extra)


def _print(obj):
    print(json.dumps(obj, indent=2, sort_keys=True))


# ---- subcommands -------------------------------------------------------------

def cmd_gen(args):
    value = _resource(args)
    sample_seed = seeds.stream_seed(args.seed, seeds.SAMPLING) if args.sample_seed is None else args.sample_seed
    target = make_target(args.kind, args.n, value, args.seed, args.depth)
    data = sample(target.dist, args.n_s, sample_seed)
    out = _out_dir(args, "gen")
    tag = f"chi{value}" if args.kind == "mps" else f"t{value}_depth{args.depth}"
    path = out / f"{args.kind}_n{args.n}_{tag}_seed{args.seed}.json"
    save_bundle(path, target, data)
    _write_effective(out, "gen", {**_args_dict(args), "sample_seed": sample_seed})
    print(path)


def cmd_train(args):
    meta, dist, data = load_bundle(args.bundle)
    arch = NetArchitecture(dist.n_qubits, args.hidden_layers, args.hidden_width)
    cfg = _train_config(args)
    theta, hist = train(data, dist, cfg, init_seed=args.init_seed, arch=arch)
    out = _out_dir(args, "train")
    ckpt = out / "checkpoint.json"
    save_checkpoint(ckpt, arch, theta, cfg, hist,
                    seeds={"init": args.init_seed, "minibatch": args.minibatch_seed},
                    extra={"bundle": str(Path(args.bundle).resolve()), "target": meta})
    hist.write_csv(out / "history.csv")
    _write_effective(out, "train", {**_args_dict(args), "train_config": cfg.to_dict()})
    _print({"checkpoint": str(ckpt), "epochs_run": hist.epochs_run, "final_nll": hist.nll[-1],
            "final_tv": hist.tv[-1]})


def cmd_hessian(args):
    ck = load_checkpoint(args.checkpoint)
    bundle = args.bundle or ck["extra"].get("bundle")
    dist = data = None
    if args.weighting in ("born", "data"):
        if not bundle:
            raise UsageError(f"--weighting {args.weighting} needs --bundle (none recorded in the checkpoint)")
        _, dist, data = load_bundle(bundle)
    spec = HvpSpec(ck["arch"], ck["theta"], args.weighting, target=dist, data=data)
    res = lambda_max(spec, args.tol, args.max_iter, args.seed)
    result = {"lambda_max": res.value, "iterations": res.iterations, "converged": res.converged,
              "negative": res.negative, "weighting": args.weighting}
    out = _out_dir(args, "hessian")
    _write_effective(out, "hessian", _args_dict(args))
    (out / "hessian.json").write_text(json.dumps({**result, "rayleigh_history": res.history}, indent=2))
    print(f"lambda_max {res.value:.10g}  iterations {res.iterations}"
          + ("" if res.converged else "  (not converged)") + ("  (negative)" if res.negative else ""))


def cmd_rso(args):
    if args.dim is None:
        raise UsageError("rso needs --dim (the subspace dimension d)")
    meta, dist, data = load_bundle(args.bundle)
    arch = NetArchitecture(dist.n_qubits, args.hidden_layers, args.hidden_width)
    D = arch.n_params
    if not 1 <= args.dim < D:
        raise UsageError(f"--dim must lie in 1..{D - 1} for this network")
    lr = args.lr * math.sqrt(D / args.dim) if args.lr_scaling == "sqrt" else args.lr
    cfg = _train_config(args)
    cfg = replace(cfg, learning_rate=lr)
    theta0 = init_params(arch, args.init_seed)
    proj = make_projection(D, args.dim, args.projection, theta0, args.projection_seed)
    res = rso_train(dist, data, proj, cfg, arch=arch)
    out = _out_dir(args, "rso")
    out.mkdir(parents=True, exist_ok=True)
    res.history.write_csv(out / "history.csv")
    result = {"d": args.dim, "D": D, "projection_kind": proj.kind, "learning_rate": lr,
              "tv": res.tv, "epochs_run": res.epochs_run,
              "stopped_early": res.history.stopped_early}
    (out / "rso.json").write_text(json.dumps({**result, "theta_d": res.params.tolist()}, indent=2))
    _write_effective(out, "rso", {**_args_dict(args), "train_config": cfg.to_dict()})
    _print(result)


def cmd_entropy(args):
    value = _resource(args)
    target = make_target(args.kind, args.n, value, args.seed, args.depth)
    prof = entropy_profile(target.state, args.mode)
    ks = list(range(1, len(prof) + 1))
    out = _out_dir(args, "entropy")
    _write_effective(out, "entropy", _args_dict(args))
    (out / "entropy.json").write_text(json.dumps({"k": ks, "entropy_bits": prof.tolist()}, indent=2))
    for k, s in zip(ks, prof):
        print(f"k={k}  S={s:.6f} bits")


def cmd_sweep(args):
    try:
        spec = load_spec(args.spec, args.scale)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read spec {args.spec!r}: {exc}") from None
    overrides, train_over = {}, {}
    for flag, field in (("master_seed", "master_seed"), ("instances", "instances_per_value"),
                        ("n", "n_qubits"), ("n_s", "n_s"), ("depth", "depth"),
                        ("weighting", "hessian_weighting"), ("lr_scaling", "rso_lr_scaling"),
                        ("rso_lr", "rso_learning_rate"), ("projection", "projection_kind")):
        if getattr(args, flag) is not None:
            overrides[field] = getattr(args, flag)
    if args.values is not None:
        overrides["resource_values"] = tuple(args.values)
    if args.dims is not None:
        overrides["rso_dims"] = tuple(args.dims)
    for flag, field in (("epochs", "epochs"), ("lr", "learning_rate"), ("early_stop", "early_stop_patience")):
        if getattr(args, flag) is not None:
            train_over[field] = getattr(args, flag)
    if train_over:
        overrides["train"] = train_over
    try:
        spec = spec.with_overrides(overrides)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = _out_dir(args, spec.name)
    existing = None
    if args.resume and (out / "spec.json").exists():
        existing = load(out)
        if existing.spec.spec_hash() != spec.spec_hash():
            raise UsageError(f"{out} holds results of a different spec; refusing to merge")
    elif (out / "records.csv").exists() and not args.force:
        raise UsageError(f"{out} already has results; pass --resume or --force")
    elif args.force and (out / "spec.json").exists():
        (out / "spec.json").unlink()

    def progress(task):
        log.info("done: resource %s instance %s", task[1], task[2])

    result = run_sweep(spec, workers=args.workers, existing=existing, progress=progress)
    persist(result, out)
    paths = [out / "records.csv", out / "aggregates.csv", out / "spec.json"]
    if spec.figure and any(r.ok for r in result.records):
        svg = out / f"fig_{spec.figure}.svg"
        svg.write_text(emit_plot(aggregate(result), spec.figure))
        paths.append(svg)
    for p in paths:
        print(p)
    if result.failures:
        log.error("%d record(s) failed; see the error column of records.csv", len(result.failures))
        return 2
    return 0


def cmd_plot(args):
    try:
        result = load(args.run)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot load run directory {args.run}: {exc}") from None
    fig = args.figure or result.spec.figure
    if fig is None:
        raise UsageError("the run has no figure id; pass --figure")
    rows = aggregate(result)
    svg = emit_plot(rows, fig)
    out = Path(args.out) if args.out else Path(args.run)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"fig_{str(fig).removeprefix('fig')}.svg"
    path.write_text(svg)
    if not args.out:
        (out / "aggregates.csv").write_text(aggregates_csv(rows))
    print(path)


# ---- parser ------------------------------------------------------------------

def _add_target_flags(p, with_samples: bool):
    p.add_argument("--kind", choices=("mps", "clifford_t"), required=True, help="target family")
    p.add_argument("--n", type=int, default=10, help="number of qubits")
    p.add_argument("--chi", type=int, help="MPS bond dimension (kind mps)")
    p.add_argument("--t", type=int, help="number of T gates (kind clifford_t)")
    p.add_argument("--depth", type=int, default=500, help="circuit depth in layers (kind clifford_t)")
    p.add_argument("--seed", type=int, default=0, help="target generation seed")
    if with_samples:
        p.add_argument("--n-s", dest="n_s", type=int, default=100_000, help="number of samples drawn")
        p.add_argument("--sample-seed", type=int,
                       help="sampling seed (default: derived from --seed)")


def _add_train_flags(p, epochs_default=200):
    p.add_argument("--lr", type=float, default=1e-4, help="initial Adam learning rate")
    p.add_argument("--epochs", type=int, default=epochs_default, help="maximum number of epochs")
    p.add_argument("--batch-size", type=int, default=1024,
                   help="minibatch size in samples; 0 means full batch")
    p.add_argument("--factor", type=float, default=0.5, help="plateau scheduler decay factor")
    p.add_argument("--sched-patience", type=int, default=5, help="plateau scheduler patience in epochs")
    p.add_argument("--early-stop", type=int, default=None,
                   help="early-stopping patience in epochs (default: off)")
    p.add_argument("--init-seed", type=int, default=0, help="network initialization seed")
    p.add_argument("--minibatch-seed", type=int, default=0, help="minibatch resampling seed")
    p.add_argument("--hidden-layers", type=int, default=5, help="number of hidden layers")
    p.add_argument("--hidden-width", type=int, default=128, help="units per hidden layer")


def build_parser() -> argparse.ArgumentParser:
    fmt = _HelpFormatter
    parser = _Parser(prog="simlearn", formatter_class=fmt,
                     description="Generate quantum targets, train energy-based models on their "
                                 "samples, and probe how hard they are to learn.")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="more logging (repeat for debug output)")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)

    p = sub.add_parser("gen", help="generate a target bundle (Born table + samples)", formatter_class=fmt)
    _add_target_flags(p, with_samples=True)
    p.add_argument("--out", help=f"output directory (default: ${OUTPUT_ROOT_ENV}/gen)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("train", help="train the energy network on a bundle", formatter_class=fmt)
    p.add_argument("--bundle", required=True, help="target bundle JSON written by gen")
    _add_train_flags(p)
    p.add_argument("--out", help=f"output directory (default: ${OUTPUT_ROOT_ENV}/train)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("hessian", help="top Hessian eigenvalue of a checkpoint", formatter_class=fmt)
    p.add_argument("--checkpoint", required=True, help="checkpoint JSON written by train")
    p.add_argument("--weighting", choices=("uniform", "born", "data"), default="uniform",
                   help="objective whose Hessian is probed: uniform average over all "
                        "configurations, target Born weights, or sample frequencies")
    p.add_argument("--bundle", help="target bundle (default: the one recorded in the checkpoint)")
    p.add_argument("--tol", type=float, default=1e-6,
                   help="relative Rayleigh-quotient change counted as converged")
    p.add_argument("--max-iter", type=int, default=500, help="power-iteration budget")
    p.add_argument("--seed", type=int, default=0, help="start-vector seed")
    p.add_argument("--out", help=f"output directory (default: ${OUTPUT_ROOT_ENV}/hessian)")
    p.set_defaults(func=cmd_hessian)

    p = sub.add_parser("rso", help="train in a random subspace of dimension d", formatter_class=fmt)
    p.add_argument("--bundle", required=True, help="target bundle JSON written by gen")
    p.add_argument("--dim", type=int, help="subspace dimension d (required)")
    p.add_argument("--projection", choices=("dense", "sparse"), default=None,
                   help="projection kind (default: dense for d <= 512, sparse above)")
    p.add_argument("--projection-seed", type=int, default=0, help="projection matrix seed")
    p.add_argument("--lr-scaling", choices=("none", "sqrt"), default="none",
                   help="sqrt multiplies --lr by sqrt(D/d)")
    _add_train_flags(p)
    p.add_argument("--out", help=f"output directory (default: ${OUTPUT_ROOT_ENV}/rso)")
    p.set_defaults(func=cmd_rso)

    p = sub.add_parser("entropy", help="entanglement entropy profile of a target state", formatter_class=fmt)
    _add_target_flags(p, with_samples=False)
    p.add_argument("--mode", choices=("contiguous-cuts", "subsystem-sizes"), default="contiguous-cuts",
                   help="cuts k = 1..N-1, or subsystem sizes k = 1..N/2")
    p.add_argument("--out", help=f"output directory (default: ${OUTPUT_ROOT_ENV}/entropy)")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("sweep", help="run a seeded parameter sweep from a spec file or preset",
                       formatter_class=fmt)
    p.add_argument("--spec", required=True,
                   help="TOML/JSON spec path, or a bundled preset name (fig1 ... fig8)")
    p.add_argument("--scale", choices=("desk", "full"), default=None,
                   help="apply a bundled scale overlay (desk: 5 instances, 60 epochs, 2e4 samples; full: 20 instances, 1e5 samples)")
    p.add_argument("--out", help=f"output directory (default: ${OUTPUT_ROOT_ENV}/<spec name>)")
    p.add_argument("--workers", type=int, default=default_workers(),
                   help="worker processes; 1 runs serially")
    p.add_argument("--resume", action="store_true", help="keep finished instances of a previous run")
    p.add_argument("--force", action="store_true", help="overwrite a previous run")
    p.add_argument("--master-seed", type=int, help="master seed for instance seeds" + _FROM_SPEC)
    p.add_argument("--instances", type=int, help="instances per resource value" + _FROM_SPEC)
    p.add_argument("--n", type=int, help="number of qubits" + _FROM_SPEC)
    p.add_argument("--values", type=int, nargs="+", help="resource values (chi or t)" + _FROM_SPEC)
    p.add_argument("--dims", type=int, nargs="+", help="subspace dimensions d" + _FROM_SPEC)
    p.add_argument("--n-s", dest="n_s", type=int, help="samples per instance" + _FROM_SPEC)
    p.add_argument("--depth", type=int, help="circuit depth in layers" + _FROM_SPEC)
    p.add_argument("--epochs", type=int, help="maximum epochs" + _FROM_SPEC)
    p.add_argument("--lr", type=float, help="initial learning rate" + _FROM_SPEC)
    p.add_argument("--early-stop", type=int, help="early-stopping patience in epochs" + _FROM_SPEC)
    p.add_argument("--weighting", choices=("uniform", "born", "data"), help="Hessian objective" + _FROM_SPEC)
    p.add_argument("--lr-scaling", choices=("none", "sqrt"), help="subspace learning-rate scaling" + _FROM_SPEC)
    p.add_argument("--rso-lr", type=float, help="base learning rate of subspace runs" + _FROM_SPEC)
    p.add_argument("--projection", choices=("dense", "sparse"), help="projection kind" + _FROM_SPEC)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("plot", help="redraw the SVG figure of a finished sweep", formatter_class=fmt)
    p.add_argument("--run", required=True, help="sweep output directory")
    p.add_argument("--figure", help="figure id 1..8 (default: the one in the run's spec)")
    p.add_argument("--out", help="directory for the SVG (default: the run directory)")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required; see --help")
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        rc = args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        log.debug("traceback", exc_info=True)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return rc or 0


if __name__ == "__main__":
    sys.exit(main())
