"""Command-line entry point: synth, train, eval, gradcheck, inspect.

Exit codes: 0 success, 1 usage or config error, 2 IO failure, 3 numeric
failure, 4 gradient check above tolerance. Every subcommand validates its
full configuration before touching the filesystem.

Settings come from an optional TOML config file overridden by flags (flags
win); the schema is documented in the README with a full example.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import qsim
from .data import load_dataset, save_dataset, synth_enso
from .errors import EmptyDatasetError, OniqError, ZeroVectorError
from .eval import all_season_skill, skill_report_csv, skill_report_json
from .graph import GraphConfig
from .hybrid import backward, forward_batch, init_model, load_checkpoint, mse_loss
from .qsim import AnsatzSpec
from .train import TrainConfig, fit

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_NUMERIC = 3
EXIT_GRADCHECK = 4

class UsageError(Exception):
    """Invalid flag or config values; reported on stderr with exit code 1."""


@dataclass
class RunConfig:
    """Fully merged and validated settings for a training run."""

    hidden_dims: tuple
    activation: str
    spec: AnsatzSpec
    train: TrainConfig
    init_seed: int


DEFAULTS = {
    "model": {"hidden_dims": [16, 8], "activation": "tanh", "init_seed": 0},
    "ansatz": {"kind": "strongly", "n_layers": 4, "n_qubits": 6, "seed": 0},
    "train": {"learning_rate": 1e-3, "epochs": 5, "batch_size": 32, "seed": 0},
}


def _load_toml(path: str) -> dict:
    with open(path, "rb") as fh:
        try:
            return tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise UsageError(f"config {path}: {exc}") from exc


def _merge_run_config(args) -> RunConfig:
    """Config file values over defaults, then flags over both."""
    merged = {section: dict(values) for section, values in DEFAULTS.items()}
    if args.config is not None:
        loaded = _load_toml(args.config)
        for section, values in loaded.items():
            if section not in merged:
                raise UsageError(f"config {args.config}: unknown section [{section}]")
            if not isinstance(values, dict):
                raise UsageError(f"config {args.config}: [{section}] must be a table")
            for key, value in values.items():
                if key not in merged[section]:
                    raise UsageError(
                        f"config {args.config}: unknown key {key!r} in [{section}]"
                    )
                merged[section][key] = value
    for section, key, flag in (
        ("ansatz", "kind", "ansatz"),
        ("ansatz", "n_qubits", "qubits"),
        ("ansatz", "n_layers", "layers"),
        ("train", "learning_rate", "lr"),
        ("train", "epochs", "epochs"),
        ("train", "batch_size", "batch_size"),
        ("train", "seed", "seed"),
    ):
        value = getattr(args, flag, None)
        if value is not None:
            merged[section][key] = value

    try:
        spec = AnsatzSpec(
            kind=merged["ansatz"]["kind"],
            n_layers=int(merged["ansatz"]["n_layers"]),
            n_qubits=int(merged["ansatz"]["n_qubits"]),
            seed=int(merged["ansatz"]["seed"]),
        )
        qsim.param_count(spec)  # validates ranges for the family
        train = TrainConfig(
            learning_rate=float(merged["train"]["learning_rate"]),
            epochs=int(merged["train"]["epochs"]),
            batch_size=int(merged["train"]["batch_size"]),
            seed=int(merged["train"]["seed"]),
        )
        hidden = tuple(int(d) for d in merged["model"]["hidden_dims"])
        activation = str(merged["model"]["activation"])
        if activation not in ("relu", "tanh", "identity"):
            raise ValueError(f"unknown activation {activation!r}")
        if not hidden or any(d < 1 for d in hidden):
            raise ValueError("hidden_dims must be a non-empty list of positive ints")
    except (ValueError, TypeError, KeyError) as exc:
        raise UsageError(str(exc)) from exc
    return RunConfig(hidden, activation, spec, train, int(merged["model"]["init_seed"]))


# ---------------------------------------------------------------------------
# subcommands


def cmd_synth(args) -> int:
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    if args.nodes < 1 or args.window < 1 or args.lead < 1:
        raise UsageError("--nodes, --window, and --lead must be >= 1")
    ds = synth_enso(
        seed=args.seed,
        n_samples=args.samples,
        n_nodes=args.nodes,
        d_0=args.window,
        lead_h=args.lead,
        noise=args.noise,
    )
    save_dataset(ds, args.out)
    m = ds.manifest
    print(
        f"wrote {args.out}: {m['n_samples']} samples, {m['n_nodes']} nodes, "
        f"window {m['d_0']}, lead {m['lead_h']}, source {m['source']}"
    )
    return EXIT_OK


def cmd_train(args) -> int:
    run = _merge_run_config(args)
    ds = load_dataset(args.data)
    if len(ds) == 0:
        raise UsageError(f"dataset {args.data} is empty")
    graph_config = GraphConfig(
        n_nodes=int(ds.manifest["n_nodes"]),
        layer_dims=(int(ds.manifest["d_0"]),) + run.hidden_dims,
        activation=run.activation,
    )
    model = init_model(graph_config, run.spec, seed=run.init_seed)
    try:
        trace = fit(
            model,
            ds,
            run.train,
            log_path=args.log,
            checkpoint_path=args.out_checkpoint,
            log_timing=args.log_timing,
        )
    except ZeroVectorError as exc:
        print(f"numeric failure during training: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if not all(np.isfinite(s.train_mse) for s in trace):
        print("numeric failure: non-finite training loss", file=sys.stderr)
        return EXIT_NUMERIC
    print(f"final train mse: {trace[-1].train_mse:.6e}")
    return EXIT_OK


def cmd_eval(args) -> int:
    model = load_checkpoint(args.checkpoint)
    ds = load_dataset(args.data)
    if len(ds) == 0:
        raise UsageError(f"dataset {args.data} is empty")
    n_nodes = int(ds.manifest["n_nodes"])
    d_0 = int(ds.manifest["d_0"])
    if (
        n_nodes != model.graph_config.n_nodes
        or d_0 != model.graph_config.layer_dims[0]
    ):
        raise UsageError(
            f"checkpoint expects {model.graph_config.n_nodes} nodes x "
            f"{model.graph_config.layer_dims[0]} features, dataset has "
            f"{n_nodes} x {d_0}"
        )
    feats = ds.features_array()
    preds = np.empty(len(ds))
    try:
        for start in range(0, len(ds), 256):
            preds[start : start + 256] = forward_batch(model, feats[start : start + 256])[0]
        report = all_season_skill(
            preds, ds.targets_array(), ds.months_array(), lead_h=int(ds.manifest["lead_h"])
        )
    except OniqError as exc:
        print(f"numeric failure during evaluation: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if args.report is not None:
        with open(args.report, "w") as fh:
            fh.write(skill_report_json(report))
        csv_path = args.report.rsplit(".", 1)[0] + ".csv" if "." in args.report else args.report + ".csv"
        with open(csv_path, "w") as fh:
            fh.write(skill_report_csv(report))
    print(f"all-season skill: {report.all_season_skill:.4f}")
    print(f"mse: {report.mse:.6e}")
    if report.incomplete:
        print(f"warning: months without a defined correlation: {report.months_excluded}")
    return EXIT_OK


def _fd_grads(model, feats, targets, eps=1e-5):
    params = model.parameters()
    out = {}
    for key, arr in params.items():
        g = np.zeros_like(arr)
        flat = arr.reshape(-1)
        gflat = g.reshape(-1)
        for i in range(flat.size):
            saved = flat[i]
            flat[i] = saved + eps
            lp = mse_loss(forward_batch(model, feats)[0], targets)
            flat[i] = saved - eps
            lm = mse_loss(forward_batch(model, feats)[0], targets)
            flat[i] = saved
            gflat[i] = (lp - lm) / (2.0 * eps)
        out[key] = g
    return out


def cmd_gradcheck(args) -> int:
    try:
        spec = AnsatzSpec(
            kind=args.ansatz, n_layers=args.layers, n_qubits=args.qubits, seed=args.seed
        )
        qsim.param_count(spec)
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from exc
    config = GraphConfig(n_nodes=4, layer_dims=(3, 5, 4), activation="tanh")
    model = init_model(config, spec, seed=args.seed)
    rng = np.random.default_rng(args.seed)
    feats = rng.normal(size=(2, 4, 3))
    targets = rng.normal(size=2)

    _, cache = forward_batch(model, feats)
    analytic = backward(model, cache, targets)
    fd = _fd_grads(model, feats, targets)

    worst = 0.0
    for key in sorted(analytic):
        denom = np.maximum(1.0, np.abs(fd[key]))
        err = float(np.max(np.abs(analytic[key] - fd[key]) / denom)) if fd[key].size else 0.0
        worst = max(worst, err)
        print(f"{key}: max rel err {err:.3e}")
    print(f"worst: {worst:.3e} (tolerance {args.tolerance:.1e})")
    if worst > args.tolerance:
        print("gradient check FAILED", file=sys.stderr)
        return EXIT_GRADCHECK
    return EXIT_OK


def cmd_inspect(args) -> int:
    try:
        spec = AnsatzSpec(
            kind=args.ansatz, n_layers=args.layers, n_qubits=args.qubits, seed=args.seed
        )
        doc = qsim.sequence_to_json(spec)
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from exc
    print(json.dumps(doc, indent=2, sort_keys=True))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    # argparse defaults to exit code 2 on usage errors; the documented code is 1
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="oniq", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic HQGD dataset")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--window", type=int, default=3, help="features per node (d_0)")
    p.add_argument("--lead", type=int, default=1, help="forecast lead in months")
    p.add_argument("--noise", type=float, default=1.0, help="noise scale (0 = noiseless)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="train a model on an HQGD dataset")
    p.add_argument("--config", help="TOML config file")
    p.add_argument("--data", required=True, help="HQGD dataset path")
    p.add_argument("--out-checkpoint", help="HQGM checkpoint output path")
    p.add_argument("--log", help="CSV training log output path")
    p.add_argument("--ansatz", choices=["basic", "strongly", "random"])
    p.add_argument("--qubits", type=int)
    p.add_argument("--layers", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--seed", type=int, help="training shuffle seed")
    p.add_argument("--log-timing", action="store_true", help="record real wall seconds")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint on a dataset")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--report", help="skill report JSON path (CSV written beside it)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser(
        "gradcheck",
        help="compare every gradient path against finite differences",
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--qubits", type=int, default=2)
    p.add_argument("--layers", type=int, default=1)
    p.add_argument("--ansatz", choices=["basic", "strongly", "random"], default="strongly")
    p.add_argument("--tolerance", type=float, default=1e-4)
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("inspect", help="print a circuit as JSON")
    p.add_argument("--ansatz", choices=["basic", "strongly", "random"], default="strongly")
    p.add_argument("--qubits", type=int, default=2)
    p.add_argument("--layers", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_inspect)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage error or --help; argparse printed already
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EmptyDatasetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"io error: {exc.filename or exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OniqError as exc:
        # file-format problems (bad magic, truncation, version, shape)
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
