"""Interleaved positive/negative training over either model type.

The schedule is: one initial positive pass over the normal data X, then
for each remaining epoch, ``q_negative`` negative passes over the
anomaly data Y followed by one positive pass over X.  An epoch in the
log therefore means one positive pass together with the negative passes
that preceded it.  With ``q_negative=0`` this reduces exactly to
conventional training.

Positive passes apply descent updates (CD-1 sign +1 / backprop sign +1),
negative passes apply ascent (sign -1) with the learning rate scaled by
``negative_rate_ratio``.  Gradient ascent is unbounded, so negative
passes guard against divergence: any parameter magnitude above
``PARAM_BOUND`` aborts with the last in-bounds model attached to the
error.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import dense, evaluation, rbm
from .dense import DenseAutoencoder, OptimizerConfig, OptimizerState
from .errors import DivergenceError, ShapeError
from .rbm import CdConfig, RbmModel
from .rng import Rng

PARAM_BOUND = 1e6

PHASE_POSITIVE = "P"
PHASE_NEGATIVE = "N"


@dataclass(frozen=True)
class TrainingConfig:
    epochs: int
    batch_size: int
    optimizer: CdConfig | OptimizerConfig
    q_negative: int = 0
    seed: int = 0
    shuffle: bool = True
    negative_rate_ratio: float = 1.0
    checkpoint_every: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.q_negative < 0:
            raise ValueError(f"q_negative must be >= 0, got {self.q_negative}")
        if self.negative_rate_ratio <= 0:
            raise ValueError("negative_rate_ratio must be > 0")
        if self.checkpoint_every < 0:
            raise ValueError("checkpoint_every must be >= 0")


@dataclass(frozen=True)
class EvalSets:
    """Held-out data scored after every epoch."""

    normal: np.ndarray
    anomaly: np.ndarray


@dataclass
class EpochRecord:
    epoch: int
    positive_mse: float
    negative_mse: float
    auroc: float
    wall_clock_sec: float


@dataclass
class TrainLog:
    records: list[EpochRecord] = field(default_factory=list)
    phase_trace: list[str] = field(default_factory=list)

    def to_csv(self, path, provenance: str | None = None):
        """One row per epoch.  Wall-clock is deliberately left out so
        that reruns with the same seed produce byte-identical files; it
        is available in the JSON export."""
        lines = []
        if provenance:
            lines.append(f"# {provenance}")
        lines.append("epoch,positive_mse,negative_mse,auroc")
        for r in self.records:
            lines.append(f"{r.epoch},{r.positive_mse!r},{r.negative_mse!r},{r.auroc!r}")
        with open(path, "w") as f:
            f.write("\n".join(lines) + "\n")

    def to_json(self, path):
        payload = {
            "phase_trace": self.phase_trace,
            "epochs": [
                {
                    "epoch": r.epoch,
                    "positive_mse": r.positive_mse,
                    "negative_mse": r.negative_mse,
                    "auroc": r.auroc,
                    "wall_clock_sec": r.wall_clock_sec,
                }
                for r in self.records
            ],
        }
        with open(path, "w") as f:
            json.dump(payload, f, indent=2)
            f.write("\n")


def _batches(n: int, batch_size: int, rng: Rng, shuffle: bool):
    """Yield index slices covering all n rows; the tail batch may be short."""
    order = rng.permutation(n) if shuffle else np.arange(n)
    for start in range(0, n, batch_size):
        yield order[start:start + batch_size]


def _positive_cfg(cfg: TrainingConfig):
    opt = cfg.optimizer
    if isinstance(opt, CdConfig):
        return replace(opt, zeta=1)
    return opt


def _negative_cfg(cfg: TrainingConfig):
    opt = cfg.optimizer
    lr = opt.learning_rate * cfg.negative_rate_ratio
    if isinstance(opt, CdConfig):
        return replace(opt, zeta=-1, learning_rate=lr)
    return replace(opt, learning_rate=lr)


def _apply_batch(model, batch, opt_cfg, rng, state, sign):
    """One parameter update; returns (model, state)."""
    if isinstance(model, RbmModel):
        if not isinstance(opt_cfg, CdConfig):
            raise TypeError("RBM models train with a CdConfig optimizer")
        return rbm.cd1_update(model, batch, opt_cfg, rng), state
    if isinstance(model, DenseAutoencoder):
        if not isinstance(opt_cfg, OptimizerConfig):
            raise TypeError("dense models train with an OptimizerConfig optimizer")
        grads = dense.gradients(model, batch, sign)
        if opt_cfg.kind == "adam":
            return dense.adam_step(model, grads, opt_cfg, state)
        return dense.sgd_step(model, grads, opt_cfg), state
    raise TypeError(f"cannot train model of type {type(model).__name__}")


def _fresh_state(model):
    return dense.zero_state(model) if isinstance(model, DenseAutoencoder) else None


def positive_learning(model, x: np.ndarray, cfg: TrainingConfig, rng: Rng,
                      state: OptimizerState | None = None):
    """One descent pass over x in mini-batches; returns (model, state)."""
    if x.shape[0] < 1:
        raise ShapeError("positive_learning: data must be nonempty")
    if state is None:
        state = _fresh_state(model)
    opt = _positive_cfg(cfg)
    for idx in _batches(x.shape[0], cfg.batch_size, rng, cfg.shuffle):
        model, state = _apply_batch(model, x[idx], opt, rng, state, sign=1)
    return model, state


def negative_learning(model, y: np.ndarray, cfg: TrainingConfig, rng: Rng,
                      state: OptimizerState | None = None):
    """One ascent pass over y; flags parameter divergence."""
    if y.shape[0] < 1:
        raise ShapeError("negative_learning: data must be nonempty")
    if state is None:
        state = _fresh_state(model)
    opt = _negative_cfg(cfg)
    for idx in _batches(y.shape[0], cfg.batch_size, rng, cfg.shuffle):
        new_model, new_state = _apply_batch(model, y[idx], opt, rng, state, sign=-1)
        if _param_overflow(new_model):
            raise DivergenceError(
                f"negative learning diverged (|param| > {PARAM_BOUND:g})",
                model=model)
        model, state = new_model, new_state
    return model, state


def _param_overflow(model) -> bool:
    params = model.params() if isinstance(model, DenseAutoencoder) else (
        model.weights, model.visible_bias, model.hidden_bias)
    return any(np.max(np.abs(p)) > PARAM_BOUND for p in params)


def _mean_score(model, x: np.ndarray) -> float:
    return float(np.mean(evaluation.reconstruction_scores(model, x)))


def train(model, x: np.ndarray, y: np.ndarray | None, cfg: TrainingConfig,
          eval_sets: EvalSets | None = None, checkpoint_dir=None):
    """Run the full schedule; returns (model, TrainLog).

    ``y`` may be None only when ``q_negative == 0``.  Per-epoch
    dissimilarity means and AUROC are computed on ``eval_sets`` when
    given, otherwise on the training data (AUROC then requires both
    classes and is NaN without eval sets or anomaly data).
    """
    if x.shape[0] < 1:
        raise ShapeError("train: X must be nonempty")
    if cfg.q_negative > 0 and (y is None or y.shape[0] < 1):
        raise ShapeError("train: Y must be nonempty when q_negative > 0")
    rng = Rng(cfg.seed)
    state = _fresh_state(model)
    log = TrainLog()
    try:
        for epoch in range(1, cfg.epochs + 1):
            t0 = time.perf_counter()
            if epoch > 1:
                for _ in range(cfg.q_negative):
                    model, state = negative_learning(model, y, cfg, rng, state)
                    log.phase_trace.append(PHASE_NEGATIVE)
            model, state = positive_learning(model, x, cfg, rng, state)
            log.phase_trace.append(PHASE_POSITIVE)
            log.records.append(
                _epoch_record(model, epoch, x, y, eval_sets,
                              time.perf_counter() - t0))
            if cfg.checkpoint_every and checkpoint_dir is not None \
                    and epoch % cfg.checkpoint_every == 0:
                from . import modelio
                modelio.save_model(
                    f"{checkpoint_dir}/checkpoint_epoch{epoch:04d}.nlm", model)
    except DivergenceError as err:
        err.log = log
        raise
    return model, log


def _epoch_record(model, epoch, x, y, eval_sets, elapsed) -> EpochRecord:
    normal = eval_sets.normal if eval_sets is not None else x
    anomaly = eval_sets.anomaly if eval_sets is not None else y
    pos = _mean_score(model, normal)
    neg = _mean_score(model, anomaly) if anomaly is not None and anomaly.shape[0] else float("nan")
    if eval_sets is not None:
        scores = evaluation.score_sets(model, eval_sets.normal, eval_sets.anomaly)
        auroc = evaluation.roc(scores).auroc
    else:
        auroc = float("nan")
    return EpochRecord(epoch, pos, neg, auroc, elapsed)
