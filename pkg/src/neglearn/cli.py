"""Command-line pipeline: ingest, train, score, evaluate, export CSV.

Subcommands:

    neglearn train --config run.json [--seed N] [--epochs N] [--q N] [--out DIR]
    neglearn eval  --model model.nlm --normal SPEC --anomaly SPEC --out DIR [--bins N]
    neglearn sweep --config run.json --q 0,1,5,10 [--out DIR]

A run config is a strict JSON document (unknown keys are rejected); see
the README for the full schema.  Dataset SPEC arguments are either a
path to a JSON file or an inline JSON object string.

Every command is a pure function of (config, input files): rerunning
with the same inputs produces byte-identical CSV and model outputs.
Exit codes: 0 success, 2 config error, 3 data error, 4 divergence.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import data, dense, evaluation, modelio, rbm, synth, trainer
from .dense import DenseAutoencoder, OptimizerConfig
from .errors import (ConfigError, DataFormatError, DivergenceError,
                     NeglearnError)
from .rbm import CdConfig, RbmModel
from .rng import Rng
from .trainer import EvalSets, TrainingConfig

OUT_ROOT_ENV = "NEGLEARN_OUT_ROOT"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_DIVERGENCE = 4

# role tags mixed into the training seed for dataset specs without one
_ROLE_SEEDS = {"normal": 1, "anomaly": 2, "eval_normal": 3, "eval_anomaly": 4,
               "cli": 5}


def _check_keys(obj: dict, allowed, where: str):
    unknown = set(obj) - set(allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}; "
                          f"allowed: {sorted(allowed)}")


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise ConfigError(f"{where}: missing required key {key!r}")
    return obj[key]


def load_runspec(path) -> dict:
    try:
        with open(path) as f:
            spec = json.load(f)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})")
    if not isinstance(spec, dict):
        raise ConfigError(f"{path}: config root must be a JSON object")
    _check_keys(spec, {"model", "training", "data", "output_dir"}, path)
    _require(spec, "model", str(path))
    _require(spec, "training", str(path))
    _require(spec, "data", str(path))
    return spec


def config_hash(spec: dict) -> str:
    canon = json.dumps(spec, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def build_model(mspec: dict, seed: int):
    _check_keys(mspec, {"kind", "n_visible", "n_hidden", "output_activation",
                        "init_scale"}, "model")
    kind = _require(mspec, "kind", "model")
    n_vis = int(_require(mspec, "n_visible", "model"))
    n_hid = int(_require(mspec, "n_hidden", "model"))
    if n_vis <= 0 or n_hid <= 0:
        raise ConfigError(f"model: layer sizes must be positive, "
                          f"got {n_vis}-{n_hid}-{n_vis}")
    rng = Rng(seed)
    if kind == "rbm":
        if "output_activation" in mspec:
            raise ConfigError("model: output_activation applies to dense models only")
        return rbm.init_rbm(n_vis, n_hid, rng,
                            scale=float(mspec.get("init_scale", 0.01)))
    if kind == "dense":
        if "init_scale" in mspec:
            raise ConfigError("model: init_scale applies to RBM models only")
        act = mspec.get("output_activation", dense.SIGMOID)
        return dense.init_dense(n_vis, n_hid, rng, output_activation=act)
    raise ConfigError(f"model: unknown kind {kind!r} (expected rbm or dense)")


def build_optimizer(ospec: dict, model_kind: str):
    kind = _require(ospec, "kind", "training.optimizer")
    if kind == "cd1":
        if model_kind != "rbm":
            raise ConfigError("training.optimizer: cd1 requires an rbm model")
        _check_keys(ospec, {"kind", "learning_rate", "hidden_sampling"},
                    "training.optimizer")
        return CdConfig(
            learning_rate=float(ospec.get("learning_rate", 0.1)),
            hidden_sampling=ospec.get("hidden_sampling", rbm.STOCHASTIC))
    if kind in ("sgd", "adam"):
        if model_kind != "dense":
            raise ConfigError(f"training.optimizer: {kind} requires a dense model")
        _check_keys(ospec, {"kind", "learning_rate", "adam_beta1", "adam_beta2",
                            "adam_epsilon"}, "training.optimizer")
        return OptimizerConfig(
            kind=kind,
            learning_rate=float(ospec.get("learning_rate", 0.001)),
            adam_beta1=float(ospec.get("adam_beta1", 0.9)),
            adam_beta2=float(ospec.get("adam_beta2", 0.999)),
            adam_epsilon=float(ospec.get("adam_epsilon", 1e-8)))
    raise ConfigError(f"training.optimizer: unknown kind {kind!r}")


def build_training(tspec: dict, model_kind: str, overrides: dict) -> TrainingConfig:
    _check_keys(tspec, {"epochs", "batch_size", "q_negative", "seed", "shuffle",
                        "negative_rate_ratio", "checkpoint_every", "optimizer"},
                "training")
    merged = dict(tspec)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return TrainingConfig(
            epochs=int(_require(merged, "epochs", "training")),
            batch_size=int(_require(merged, "batch_size", "training")),
            optimizer=build_optimizer(
                dict(_require(merged, "optimizer", "training")), model_kind),
            q_negative=int(merged.get("q_negative", 0)),
            seed=int(merged.get("seed", 0)),
            shuffle=bool(merged.get("shuffle", True)),
            negative_rate_ratio=float(merged.get("negative_rate_ratio", 1.0)),
            checkpoint_every=int(merged.get("checkpoint_every", 0)),
        )
    except ValueError as exc:
        raise ConfigError(f"training: {exc}")


_DATASET_KEYS = {
    "idx": {"kind", "images", "labels", "include_labels", "exclude_labels",
            "take", "subsample", "seed"},
    "cifar10": {"kind", "path", "take", "subsample", "seed"},
    "dataset": {"kind", "path", "take", "subsample", "seed"},
    "synthetic-textures": {"kind", "count", "patch_size", "seed"},
    "synthetic-digits": {"kind", "count", "include_labels", "exclude_labels",
                         "take", "subsample", "seed"},
    "pgm-patches": {"kind", "paths", "patch_size", "count_per_image",
                    "reject_featureless", "seed"},
}


def build_dataset(dspec: dict, role: str, base_seed: int) -> data.Dataset:
    """Materialize one dataset spec; randomized specs default their seed
    to the training seed mixed with the role tag."""
    if not isinstance(dspec, dict):
        raise ConfigError(f"data.{role}: dataset spec must be a JSON object")
    kind = _require(dspec, "kind", f"data.{role}")
    if kind not in _DATASET_KEYS:
        raise ConfigError(f"data.{role}: unknown dataset kind {kind!r}; "
                          f"expected one of {sorted(_DATASET_KEYS)}")
    _check_keys(dspec, _DATASET_KEYS[kind], f"data.{role}")
    seed = int(dspec.get("seed", base_seed * 1000 + _ROLE_SEEDS.get(role, 0)))
    rng = Rng(seed)
    if kind == "idx":
        ds = data.load_idx(_require(dspec, "images", f"data.{role}"),
                           dspec.get("labels"))
    elif kind == "cifar10":
        ds = data.load_cifar10(_require(dspec, "path", f"data.{role}"))
    elif kind == "dataset":
        ds = modelio.load_dataset(_require(dspec, "path", f"data.{role}"))
    elif kind == "synthetic-textures":
        ds = synth.road_texture_dataset(
            int(_require(dspec, "count", f"data.{role}")), rng,
            size=int(dspec.get("patch_size", 32)))
    elif kind == "synthetic-digits":
        count = int(_require(dspec, "count", f"data.{role}"))
        labels = [i % 10 for i in range(count)]
        labels = np.asarray(labels, dtype=np.int64)[rng.permutation(count)]
        ds = synth.digit_dataset(labels, rng)
    else:  # pgm-patches
        paths = _require(dspec, "paths", f"data.{role}")
        patch = int(dspec.get("patch_size", 32))
        per_image = int(dspec.get("count_per_image", 100))
        reject = bool(dspec.get("reject_featureless", True))
        parts = [data.extract_patches(data.load_pgm(p), patch, per_image, rng,
                                      reject_featureless=reject)
                 for p in paths]
        ds = data.Dataset(np.vstack([p.samples for p in parts]),
                          source="pgm-patches", image_shape=(patch, patch))
    if "include_labels" in dspec:
        ds = data.filter_labels(ds, dspec["include_labels"])
    if "exclude_labels" in dspec:
        if ds.labels is None:
            raise ConfigError(f"data.{role}: exclude_labels needs a labeled dataset")
        keep = sorted(set(map(int, np.unique(ds.labels)))
                      - set(map(int, dspec["exclude_labels"])))
        ds = data.filter_labels(ds, keep)
    if "take" in dspec:
        ds = data.take(ds, int(dspec["take"]))
    if "subsample" in dspec:
        ds = data.subsample(ds, int(dspec["subsample"]), rng)
    return ds


def build_data(dataspec: dict, cfg: TrainingConfig):
    _check_keys(dataspec, {"normal", "anomaly", "eval_normal", "eval_anomaly",
                           "normalize"}, "data")
    normal = build_dataset(_require(dataspec, "normal", "data"), "normal", cfg.seed)
    anomaly = None
    if "anomaly" in dataspec:
        anomaly = build_dataset(dataspec["anomaly"], "anomaly", cfg.seed)
    elif cfg.q_negative > 0:
        raise ConfigError("data: anomaly dataset required when q_negative > 0")
    eval_sets = None
    if ("eval_normal" in dataspec) != ("eval_anomaly" in dataspec):
        raise ConfigError("data: eval_normal and eval_anomaly go together")
    if "eval_normal" in dataspec:
        e_n = build_dataset(dataspec["eval_normal"], "eval_normal", cfg.seed)
        e_a = build_dataset(dataspec["eval_anomaly"], "eval_anomaly", cfg.seed)
        eval_sets = (e_n, e_a)
    if dataspec.get("normalize", False):
        others = [d for d in (anomaly, *(eval_sets or ())) if d is not None]
        normal, normed, _ = data.normalize(normal, tuple(others))
        normed = list(normed)
        if anomaly is not None:
            anomaly = normed.pop(0)
        if eval_sets is not None:
            eval_sets = (normed[0], normed[1])
    ev = EvalSets(eval_sets[0].samples, eval_sets[1].samples) if eval_sets else None
    return normal, anomaly, ev


def _resolve_out(flag_value, spec: dict | None, tag: str) -> Path:
    if flag_value:
        out = Path(flag_value)
    elif spec and spec.get("output_dir"):
        out = Path(spec["output_dir"])
    else:
        root = os.environ.get(OUT_ROOT_ENV, ".")
        out = Path(root) / tag
    out.mkdir(parents=True, exist_ok=True)
    return out


def _provenance(seed: int, spec: dict) -> str:
    return f"seed={seed} config_sha256={config_hash(spec)}"


def cmd_train(args) -> int:
    spec = load_runspec(args.config)
    overrides = {"seed": args.seed, "epochs": args.epochs, "q_negative": args.q}
    model_kind = _require(spec["model"], "kind", "model")
    cfg = build_training(dict(spec["training"]), model_kind, overrides)
    model = build_model(dict(spec["model"]), cfg.seed)
    normal, anomaly, eval_sets = build_data(dict(spec["data"]), cfg)
    if normal.width != (model.n_visible if isinstance(model, RbmModel) else model.n_in):
        raise ConfigError(
            f"data width {normal.width} does not match model input width")
    out = _resolve_out(args.out, spec, f"run-{config_hash(spec)[:8]}")
    y = anomaly.samples if anomaly is not None else None
    try:
        trained, log = trainer.train(model, normal.samples, y, cfg,
                                     eval_sets=eval_sets, checkpoint_dir=out)
    except DivergenceError as err:
        if err.model is not None:
            modelio.save_model(out / "model_last_finite.nlm", err.model)
        if err.log is not None:
            err.log.to_csv(out / "trainlog.csv", _provenance(cfg.seed, spec))
        raise
    modelio.save_model(out / "model.nlm", trained)
    log.to_csv(out / "trainlog.csv", _provenance(cfg.seed, spec))
    log.to_json(out / "trainlog.json")
    with open(out / "run_config.json", "w") as f:
        json.dump(spec, f, indent=2, sort_keys=True)
        f.write("\n")
    final = log.records[-1]
    print(f"trained {model_kind} for {cfg.epochs} epochs -> {out / 'model.nlm'}")
    if not np.isnan(final.auroc):
        print(f"final auroc {final.auroc:.4f}")
    return EXIT_OK


def _parse_dataset_arg(text: str, role: str) -> dict:
    text = text.strip()
    try:
        if text.startswith("{"):
            return json.loads(text)
        with open(text) as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"--{role}: cannot read dataset spec ({exc})")


def cmd_eval(args) -> int:
    model = modelio.load_model(args.model)
    width = model.n_visible if isinstance(model, RbmModel) else model.n_in
    seed = args.seed if args.seed is not None else 0
    nspec = _parse_dataset_arg(args.normal, "normal")
    aspec = _parse_dataset_arg(args.anomaly, "anomaly")
    normal = build_dataset(nspec, "eval_normal", seed)
    anomaly = build_dataset(aspec, "eval_anomaly", seed)
    if args.normalize:
        normal, (anomaly,), _ = data.normalize(normal, (anomaly,))
    for ds, role in ((normal, "normal"), (anomaly, "anomaly")):
        if ds.width != width:
            raise ConfigError(
                f"{role} data width {ds.width} does not match model width {width}")
    out = _resolve_out(args.out, None, "eval")
    scores = evaluation.score_sets(model, normal.samples, anomaly.samples)
    curve = evaluation.roc(scores)
    hist = evaluation.histogram(scores, bins=args.bins)
    prov = f"model={Path(args.model).name} seed={seed}"
    scores.to_csv(out / "scores.csv", prov)
    curve.to_csv(out / "roc.csv", prov)
    hist.to_csv(out / "histogram.csv", prov)
    normal_scores = scores.scores[scores.labels == evaluation.LABEL_NORMAL]
    anomaly_scores = scores.scores[scores.labels == evaluation.LABEL_ANOMALY]
    summary = {
        "auroc": curve.auroc,
        "n_normal": int(len(normal_scores)),
        "n_anomaly": int(len(anomaly_scores)),
        "mean_normal_score": float(np.mean(normal_scores)),
        "mean_anomaly_score": float(np.mean(anomaly_scores)),
        "histogram_overlap": hist.overlap(),
    }
    with open(out / "summary.json", "w") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write("\n")
    print(f"auroc {curve.auroc:.4f} ({len(normal_scores)} normal / "
          f"{len(anomaly_scores)} anomaly) -> {out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    spec = load_runspec(args.config)
    try:
        q_values = [int(v) for v in args.q.split(",") if v != ""]
    except ValueError:
        raise ConfigError(f"--q: expected comma-separated integers, got {args.q!r}")
    if not q_values:
        raise ConfigError("--q: at least one Q value required")
    if len(set(q_values)) != len(q_values):
        raise ConfigError(f"--q: duplicate Q values in {q_values}")
    if any(q < 0 for q in q_values):
        raise ConfigError("--q: Q values must be >= 0")
    if "eval_normal" not in spec["data"]:
        raise ConfigError("sweep: config must define data.eval_normal/eval_anomaly")
    out = _resolve_out(args.out, spec, f"sweep-{config_hash(spec)[:8]}")
    rows = []
    for q in q_values:
        sub = argparse.Namespace(config=args.config, seed=args.seed, epochs=None,
                                 q=q, out=str(out / f"q{q}"))
        cmd_train(sub)
        with open(out / f"q{q}" / "trainlog.csv") as f:
            last = [ln for ln in f if ln.strip() and not ln.startswith(("#", "epoch"))][-1]
        auroc = float(last.strip().split(",")[3])
        rows.append((q, auroc))
        print(f"q={q} final auroc {auroc:.4f}")
    with open(out / "sweep.csv", "w") as f:
        f.write(f"# {_provenance(int(spec['training'].get('seed', 0)), spec)}\n")
        f.write("q,auroc\n")
        for q, auroc in rows:
            f.write(f"{q},{auroc!r}\n")
    print(f"sweep table -> {out / 'sweep.csv'}")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="neglearn",
        description="negative-learning autoencoder training and "
                    "reconstruction-error anomaly evaluation")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train a model from a run config")
    t.add_argument("--config", required=True, help="run config JSON file")
    t.add_argument("--seed", type=int, help="override training.seed")
    t.add_argument("--epochs", type=int, help="override training.epochs")
    t.add_argument("--q", type=int, help="override training.q_negative")
    t.add_argument("--out", help="output directory")
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("eval", help="score datasets with a trained model")
    e.add_argument("--model", required=True, help="model file (.nlm)")
    e.add_argument("--normal", required=True,
                   help="normal dataset spec (JSON file or inline JSON)")
    e.add_argument("--anomaly", required=True,
                   help="anomaly dataset spec (JSON file or inline JSON)")
    e.add_argument("--out", help="output directory")
    e.add_argument("--bins", type=int, default=100, help="histogram bins")
    e.add_argument("--seed", type=int, help="seed for randomized dataset specs")
    e.add_argument("--normalize", action="store_true",
                   help="normalize by the normal set's statistics")
    e.set_defaults(func=cmd_eval)

    s = sub.add_parser("sweep", help="train and evaluate across Q values")
    s.add_argument("--config", required=True, help="run config JSON file")
    s.add_argument("--q", required=True, help="comma-separated Q values")
    s.add_argument("--seed", type=int, help="override training.seed")
    s.add_argument("--out", help="output directory")
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataFormatError, FileNotFoundError, PermissionError, IsADirectoryError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except DivergenceError as exc:
        print(f"divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except NeglearnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
