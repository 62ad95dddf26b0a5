"""Command-line interface.

Subcommands: verify, train, eval, denoise-bench, cheb-bench, gen-sbm.
``--config FILE`` reads ``key=value`` lines (keys are long option names);
flags given on the command line win over the file.
"""
from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import fields, replace
from pathlib import Path

from . import kernels
from .datasets import generate_sbm_digraph, load_dataset, save_dataset, split_masks
from .errors import (
    ConfigError,
    DatasetError,
    GraphBoundsError,
    GraphFormatError,
    SvdGcnError,
)
from .framelets import ModulationSet, check_identity
from .graph import load_edge_list, normalized_adjacency
from .layers import ModelVariant, SvdGcnModel, load_checkpoint, save_checkpoint
from .operators import FrameletConfig, Variant, build_exact_operators, verify_theorem1
from .pipeline import (
    DEFAULT_NOISE_LEVELS,
    build_operators,
    cheb_bench,
    denoise_bench,
    run_training,
)
from .spectral import compute_svd
from .training import TrainConfig, evaluate, write_history_csv

VERIFY_TOL = 1e-8
IDENTITY_TOL = 1e-12

_INPUT_ERRORS = (GraphFormatError, GraphBoundsError, DatasetError, ConfigError,
                 FileNotFoundError, IsADirectoryError)

_SBM_DEFAULTS = {
    "sbm_nodes": 300, "sbm_classes": 3, "p_in": 0.1, "p_out": 0.01,
    "feat_dim": 16, "feat_noise": 0.5, "val_size": None, "per_class_train": 20,
}


def _float_list(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _int_list(text):
    return [int(v) for v in text.split(",") if v.strip()]


def _add_source(p):
    src = p.add_argument_group("dataset source (mutually exclusive)")
    g = src.add_mutually_exclusive_group()
    g.add_argument("--data", help="dataset directory (edges.tsv, features.csv, labels.csv)")
    g.add_argument("--graph", help="edge-list file; graph-only commands")
    g.add_argument("--sbm", action="store_true", help="generate a synthetic directed SBM (default)")
    src.add_argument("--sbm-nodes", type=int)
    src.add_argument("--sbm-classes", type=int)
    src.add_argument("--p-in", type=float)
    src.add_argument("--p-out", type=float)
    src.add_argument("--feat-dim", type=int)
    src.add_argument("--feat-noise", type=float)
    src.add_argument("--per-class-train", type=int)
    src.add_argument("--val-size", type=int)


def _add_framelet(p):
    g = p.add_argument_group("framelets")
    g.add_argument("--framelet", choices=["linear", "entropy", "haar"])
    g.add_argument("--alpha", type=float, help="entropy parameter in (0, 1]")
    g.add_argument("--scale", type=float, help="dilation scale s > 1")
    g.add_argument("--levels", type=int, help="multiresolution level L >= 0")
    g.add_argument("--cheb-degree", type=int)
    g.add_argument("--variant", choices=[v.value for v in ModelVariant])
    g.add_argument("--transpose-adjacency", action="store_true", default=None,
                   help="read A[i, j] = 1 as edge i -> j instead of j -> i")
    g.add_argument("--raw-scale", action="store_true", default=None,
                   help="evaluate g_k on the undilated spectrum (m = 0)")


def _add_train(p):
    g = p.add_argument_group("training")
    g.add_argument("--hidden", type=int)
    g.add_argument("--dropout", type=float)
    g.add_argument("--lr", type=float)
    g.add_argument("--weight-decay", type=float)
    g.add_argument("--epochs", type=int)
    g.add_argument("--activation", choices=["relu", "identity"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="svdgcn", description=__doc__.splitlines()[0])
    parser.add_argument("--backend", action="store_true",
                        help="print the kernel backend and exit")
    sub = parser.add_subparsers(dest="command")
    parser.subcommand_parsers = {}

    def common(name, help_text):
        p = sub.add_parser(name, help=help_text)
        parser.subcommand_parsers[name] = p
        p.add_argument("--config", help="key=value file; command-line flags override it")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="output directory")
        _add_source(p)
        _add_framelet(p)
        return p

    common("verify", "check the reconstruction identity on a graph")
    p = common("train", "train a model and write history, metrics and a checkpoint")
    _add_train(p)
    p = common("eval", "evaluate a stored checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--mask", choices=["train", "val", "test"], default="test")
    p = common("denoise-bench", "accuracy under Gaussian feature noise, model vs baseline")
    _add_train(p)
    p.add_argument("--sigmas", type=_float_list,
                   help=f"comma-separated noise levels (default {','.join(map(str, DEFAULT_NOISE_LEVELS))})")
    p.add_argument("--seeds", type=int, help="number of seeds (default 5)")
    p = common("cheb-bench", "Chebyshev approximation error and build times")
    p.add_argument("--degrees", type=_int_list, help="comma-separated degrees (default 2,6,10,12,16)")
    common("gen-sbm", "write a synthetic SBM dataset directory to --out")
    return parser


def _read_config_file(path):
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _merge_config(parser, sub_name, args):
    if not getattr(args, "config", None):
        return args
    values = _read_config_file(args.config)
    actions = {a.dest: a for a in parser.subcommand_parsers[sub_name]._actions}
    for key, text in values.items():
        if key not in actions or key in ("config", "help"):
            raise ConfigError(f"unknown config key {key!r}")
        if getattr(args, key) is not None and getattr(args, key) is not False:
            continue
        action = actions[key]
        if isinstance(action, (argparse._StoreTrueAction,)):
            value = text.lower() in ("1", "true", "yes", "on")
        elif action.type is not None:
            try:
                value = action.type(text)
            except ValueError as exc:
                raise ConfigError(f"config key {key}: {exc}") from None
        else:
            value = text
        if action.choices is not None and value not in action.choices:
            raise ConfigError(f"config key {key}: {value!r} not in {list(action.choices)}")
        setattr(args, key, value)
    return args


def _train_config(args) -> TrainConfig:
    kwargs = {}
    for f in fields(TrainConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            kwargs[f.name] = value
    return TrainConfig(**kwargs)


def _sbm_kwargs(args):
    return {k: (getattr(args, k) if getattr(args, k, None) is not None else v)
            for k, v in _SBM_DEFAULTS.items()}


def _load_dataset(args, seed):
    if args.graph:
        raise ConfigError("this command needs features and labels; use --data or --sbm")
    if args.data:
        ds = load_dataset(args.data)
        if not ds.has_masks:
            kw = _sbm_kwargs(args)
            val = kw["val_size"] if kw["val_size"] is not None else min(500, ds.num_nodes // 5)
            ds = ds.with_masks(*split_masks(ds.labels, kw["per_class_train"], val, seed=seed))
        return ds
    kw = _sbm_kwargs(args)
    return generate_sbm_digraph(kw["sbm_nodes"], kw["sbm_classes"], kw["p_in"], kw["p_out"],
                                feat_dim=kw["feat_dim"], feat_noise=kw["feat_noise"], seed=seed,
                                per_class_train=kw["per_class_train"], val_size=kw["val_size"])


def _load_graph(args, seed):
    if args.graph:
        return load_edge_list(args.graph)
    return _load_dataset(args, seed).graph


def _out_dir(args, default):
    out = Path(args.out or default)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_verify(args) -> int:
    cfg = _train_config(args)
    graph = _load_graph(args, cfg.seed)
    mset = ModulationSet(cfg.framelet, cfg.alpha)
    a_hat = normalized_adjacency(graph, cfg.transpose_adjacency)
    svd = compute_svd(a_hat)
    fcfg = FrameletConfig(levels=cfg.levels, scale=cfg.scale, variant=Variant.EXACT,
                          raw_scale=cfg.raw_scale)
    ops = build_exact_operators(svd, mset, fcfg, a_hat)
    err = verify_theorem1(ops, a_hat)
    ident = check_identity(mset, 1001)
    print(f"nodes={graph.num_nodes} edges={graph.num_edges}")
    print(f"framelet={mset} levels={fcfg.levels} scale={fcfg.scale:g} m={ops.config.base_exponent}")
    print(f"lambda_max={svd.lambda_max:.12g}")
    print(f"bands={ops.num_bands}")
    print(f"reconstruction_error={err:.3e}")
    print(f"identity_deviation={ident:.3e}")
    ok = err <= VERIFY_TOL and ident <= IDENTITY_TOL
    if not ok:
        print(f"FAILED: reconstruction error must be <= {VERIFY_TOL:g} and identity deviation "
              f"<= {IDENTITY_TOL:g}", file=sys.stderr)
    return 0 if ok else 1


def _write_metrics(path, items):
    with open(path, "w") as fh:
        for key, value in items:
            fh.write(f"{key}={value!r}\n" if isinstance(value, float) else f"{key}={value}\n")


def cmd_train(args) -> int:
    cfg = _train_config(args)
    ds = _load_dataset(args, cfg.seed)
    result = run_training(ds, cfg)
    out = _out_dir(args, "svdgcn-out")
    write_history_csv(result.history, out / "history.csv")
    _write_metrics(out / "metrics.txt", [
        ("variant", result.model.variant.value),
        ("nodes", ds.num_nodes),
        ("edges", ds.graph.num_edges),
        ("best_epoch", result.best_epoch),
        ("val_acc", result.val_acc),
        ("test_acc", result.test_acc),
    ])
    save_checkpoint(result.model, out / "model.ckpt", extra={"variant": cfg.variant})
    print(f"variant={result.model.variant.value} best_epoch={result.best_epoch} "
          f"val_acc={result.val_acc:.4f} test_acc={result.test_acc:.4f}")
    print(f"wrote {out / 'history.csv'}, {out / 'metrics.txt'}, {out / 'model.ckpt'}")
    return 0


def cmd_eval(args) -> int:
    header, params = load_checkpoint(args.checkpoint)
    meta = header["meta"]
    cfg = _train_config(args)
    keys = ("framelet", "alpha", "scale", "levels", "cheb_degree", "transpose_adjacency",
            "raw_scale", "hidden")
    cfg = replace(cfg, variant=header["variant"], activation=header["activation"],
                  **{k: meta[k] for k in keys if k in meta})
    ds = _load_dataset(args, cfg.seed)
    a_hat, ops = build_operators(ds.graph, cfg, header["variant"])
    model = SvdGcnModel(header["variant"], params, header["activation"], ops, a_hat, meta)
    mask = {"train": ds.train_mask, "val": ds.val_mask, "test": ds.test_mask}[args.mask]
    acc = evaluate(model, ds, mask)
    print(f"{args.mask}_acc={acc!r}")
    return 0


def cmd_denoise_bench(args) -> int:
    cfg = _train_config(args)
    ds = _load_dataset(args, cfg.seed)
    sigmas = args.sigmas or list(DEFAULT_NOISE_LEVELS)
    seeds = range(args.seeds or 5)
    rows = denoise_bench(ds, cfg, sigmas, seeds)
    out = _out_dir(args, "svdgcn-out")
    path = out / "denoise.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["model", "sigma", "mean_acc", "std_acc", "accs"])
        for name, sigma, mean, std, accs in rows:
            writer.writerow([name, repr(sigma), repr(mean), repr(std),
                             " ".join(repr(float(a)) for a in accs)])
    print(f"{'model':<10} {'sigma':>6} {'mean':>8} {'std':>8}")
    for name, sigma, mean, std, _ in rows:
        print(f"{name:<10} {sigma:>6g} {100 * mean:>8.2f} {100 * std:>8.2f}")
    print(f"wrote {path}")
    return 0


def cmd_cheb_bench(args) -> int:
    cfg = _train_config(args)
    graph = _load_graph(args, cfg.seed)
    mset = ModulationSet(cfg.framelet, cfg.alpha)
    degrees = args.degrees or [2, 6, 10, 12, 16]
    report = cheb_bench(graph, mset, degrees, levels=cfg.levels, scale=cfg.scale,
                        transpose=cfg.transpose_adjacency)
    print(f"framelet={mset} nodes={graph.num_nodes} backend={kernels.BACKEND}")
    print(f"{'degree':>6} {'max_fit_err':>12} {'op_rel_err':>12} {'cheb_s':>9} {'svd_s':>9}  band errors")
    for row in report:
        op = "n/a" if row["operator_error"] is None else f"{row['operator_error']:.3e}"
        svd_s = "n/a" if row["svd_build_s"] is None else f"{row['svd_build_s']:.4f}"
        bands = " ".join(f"{e:.2e}" for e in row["band_errors"])
        print(f"{row['degree']:>6} {row['max_error']:>12.3e} {op:>12} "
              f"{row['cheb_build_s']:>9.4f} {svd_s:>9}  {bands}")
    if args.out:
        out = _out_dir(args, args.out)
        with open(out / "cheb_bench.csv", "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["degree", "max_fit_error", "operator_error"]
                            + [f"band{k}_error" for k in range(mset.K + 1)])
            for row in report:
                writer.writerow([row["degree"], repr(row["max_error"]),
                                 "" if row["operator_error"] is None else repr(row["operator_error"])]
                                + [repr(e) for e in row["band_errors"]])
    return 0


def cmd_gen_sbm(args) -> int:
    if not args.out:
        raise ConfigError("gen-sbm needs --out DIR")
    seed = args.seed if args.seed is not None else 0
    ds = _load_dataset(argparse.Namespace(**{**vars(args), "data": None, "graph": None}), seed)
    save_dataset(ds, args.out)
    print(f"wrote {args.out}: nodes={ds.num_nodes} edges={ds.graph.num_edges} "
          f"classes={ds.num_classes} features={ds.num_features}")
    return 0


COMMANDS = {
    "verify": cmd_verify,
    "train": cmd_train,
    "eval": cmd_eval,
    "denoise-bench": cmd_denoise_bench,
    "cheb-bench": cmd_cheb_bench,
    "gen-sbm": cmd_gen_sbm,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.backend:
        print(kernels.BACKEND)
        return 0
    if args.command is None:
        parser.print_help()
        return 2
    try:
        args = _merge_config(parser, args.command, args)
        return COMMANDS[args.command](args)
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SvdGcnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
