"""Anomaly scoring and evaluation.

A trained model scores a sample by the per-element mean squared
difference between the sample and its deterministic reconstruction.
Anomaly is the positive class everywhere: higher dissimilarity should
mean anomaly, ROC curves sweep a threshold over the scores, and AUROC
is trapezoidal area with score ties collapsed into single threshold
steps (which makes it equal the pairwise-ranking estimate with half
credit for ties).

Also provides the closed-form two-class LDA baseline used for
comparison against the reconstruction approach.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dense as dense_mod
from . import linalg
from . import rbm as rbm_mod
from .errors import NumericError, ShapeError

LABEL_NORMAL = 0
LABEL_ANOMALY = 1


def model_reconstruct(model, x: np.ndarray) -> np.ndarray:
    """Deterministic reconstruction for any supported model value."""
    if isinstance(model, rbm_mod.RbmModel):
        return rbm_mod.reconstruct(model, x)
    if isinstance(model, dense_mod.DenseAutoencoder):
        return dense_mod.forward(model, x)[1]
    rec = getattr(model, "reconstruct", None)
    if callable(rec):
        return rec(x)
    raise TypeError(f"cannot reconstruct with {type(model).__name__}")


def reconstruction_scores(model, samples: np.ndarray) -> np.ndarray:
    """Per-sample dissimilarity mse(x, reconstruct(x))."""
    return linalg.mse_rows(model_reconstruct(model, samples), samples)


@dataclass(frozen=True)
class ScoreSet:
    """Per-sample dissimilarity scores with normal/anomaly labels."""

    sample_ids: np.ndarray
    scores: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        n = len(self.scores)
        if len(self.sample_ids) != n or len(self.labels) != n:
            raise ShapeError("sample_ids, scores and labels must align")
        if n and np.min(self.scores) < 0:
            raise ValueError("dissimilarity scores must be >= 0")
        bad = set(np.unique(self.labels)) - {LABEL_NORMAL, LABEL_ANOMALY}
        if bad:
            raise ValueError(f"labels must be 0 (normal) or 1 (anomaly), got {bad}")

    def __len__(self):
        return len(self.scores)

    def to_csv(self, path, provenance: str | None = None):
        lines = []
        if provenance:
            lines.append(f"# {provenance}")
        lines.append("sample_id,score,label")
        for i, s, l in zip(self.sample_ids, self.scores, self.labels):
            lines.append(f"{int(i)},{float(s)!r},{int(l)}")
        with open(path, "w") as f:
            f.write("\n".join(lines) + "\n")


def score(model, samples: np.ndarray, labels=LABEL_NORMAL,
          sample_ids=None) -> ScoreSet:
    """Score a batch of samples; ``labels`` is a scalar or per-row array."""
    s = reconstruction_scores(model, samples)
    n = len(s)
    labels = np.full(n, labels, dtype=np.int64) if np.isscalar(labels) \
        else np.asarray(labels, dtype=np.int64)
    ids = np.arange(n, dtype=np.int64) if sample_ids is None \
        else np.asarray(sample_ids, dtype=np.int64)
    return ScoreSet(ids, s, labels)


def score_sets(model, normal: np.ndarray, anomaly: np.ndarray) -> ScoreSet:
    """Score a normal set and an anomaly set into one labeled ScoreSet."""
    sn = reconstruction_scores(model, normal)
    sa = reconstruction_scores(model, anomaly)
    scores = np.concatenate([sn, sa])
    labels = np.concatenate([
        np.full(len(sn), LABEL_NORMAL, dtype=np.int64),
        np.full(len(sa), LABEL_ANOMALY, dtype=np.int64),
    ])
    return ScoreSet(np.arange(len(scores), dtype=np.int64), scores, labels)


@dataclass(frozen=True)
class RocCurve:
    """Operating points sorted from the strictest threshold to the laxest."""

    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray  # score at each point; +inf for the (0,0) corner
    auroc: float

    def to_csv(self, path, provenance: str | None = None):
        lines = []
        if provenance:
            lines.append(f"# {provenance}")
        lines.append(f"# auroc={self.auroc!r}")
        lines.append("fpr,tpr,threshold")
        for f_, t, th in zip(self.fpr, self.tpr, self.thresholds):
            lines.append(f"{float(f_)!r},{float(t)!r},{float(th)!r}")
        with open(path, "w") as f:
            f.write("\n".join(lines) + "\n")


def roc_curve(scores: np.ndarray, labels: np.ndarray) -> RocCurve:
    """ROC over raw score/label arrays (scores may be any real values)."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    pos = int(np.sum(labels == LABEL_ANOMALY))
    neg = int(np.sum(labels == LABEL_NORMAL))
    if pos == 0 or neg == 0:
        raise ValueError("ROC needs at least one sample of each label")
    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    is_pos = (labels[order] == LABEL_ANOMALY)
    tp = np.cumsum(is_pos)
    fp = np.cumsum(~is_pos)
    # keep only the last point of each tie group: one step per distinct score
    last = np.r_[np.nonzero(np.diff(s))[0], len(s) - 1]
    tpr = np.concatenate([[0.0], tp[last] / pos])
    fpr = np.concatenate([[0.0], fp[last] / neg])
    thresholds = np.concatenate([[np.inf], s[last]])
    auroc = float(np.sum((fpr[1:] - fpr[:-1]) * (tpr[1:] + tpr[:-1])) / 2.0)
    return RocCurve(fpr, tpr, thresholds, auroc)


def roc(scoreset: ScoreSet) -> RocCurve:
    """Threshold sweep over a ScoreSet; anomaly is the positive class."""
    return roc_curve(scoreset.scores, scoreset.labels)


@dataclass(frozen=True)
class Histogram:
    """Aligned per-label frequency tables over a shared bin range."""

    bin_edges: np.ndarray
    normal_counts: np.ndarray
    anomaly_counts: np.ndarray

    def overlap(self) -> float:
        """Summed bin-wise minimum of the two normalized curves, in [0, 1]."""
        n = self.normal_counts / max(1, self.normal_counts.sum())
        a = self.anomaly_counts / max(1, self.anomaly_counts.sum())
        return float(np.minimum(n, a).sum())

    def to_csv(self, path, provenance: str | None = None):
        lines = []
        if provenance:
            lines.append(f"# {provenance}")
        lines.append("bin_lo,bin_hi,normal_count,anomaly_count")
        for i in range(len(self.normal_counts)):
            lines.append(f"{self.bin_edges[i]!r},{self.bin_edges[i + 1]!r},"
                         f"{int(self.normal_counts[i])},{int(self.anomaly_counts[i])}")
        with open(path, "w") as f:
            f.write("\n".join(lines) + "\n")


def histogram(scoreset: ScoreSet, bins: int = 100) -> Histogram:
    """Two aligned histograms over the shared range [0, max score]."""
    if bins < 2:
        raise ValueError(f"bins must be >= 2, got {bins}")
    if len(scoreset) == 0:
        raise ValueError("cannot histogram an empty ScoreSet")
    hi = float(np.max(scoreset.scores))
    if hi <= 0.0:
        hi = 1.0
    rng_ = (0.0, hi)
    normal = scoreset.scores[scoreset.labels == LABEL_NORMAL]
    anomaly = scoreset.scores[scoreset.labels == LABEL_ANOMALY]
    n_counts, edges = np.histogram(normal, bins=bins, range=rng_)
    a_counts, _ = np.histogram(anomaly, bins=bins, range=rng_)
    return Histogram(edges, n_counts, a_counts)


@dataclass(frozen=True)
class LdaModel:
    """Two-class linear discriminant: shared covariance, per-class means."""

    means: np.ndarray       # (2, d); row 0 normal, row 1 anomaly
    cov_inv: np.ndarray     # (d, d)
    log_priors: np.ndarray  # (2,)


def lda_fit(features: np.ndarray, labels: np.ndarray,
            ridge: float = 1e-6) -> LdaModel:
    """Closed-form LDA with a +lambda*I regularized pooled covariance,
    lambda = ridge * trace / dim (raw pixel features are rank deficient)."""
    x = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels)
    d = x.shape[1]
    means = np.empty((2, d))
    scatter = np.zeros((d, d))
    counts = []
    for cls in (LABEL_NORMAL, LABEL_ANOMALY):
        xc = x[labels == cls]
        if len(xc) < 2:
            raise ValueError(f"LDA needs >= 2 samples of class {cls}")
        counts.append(len(xc))
        means[cls] = xc.mean(axis=0)
        centered = xc - means[cls]
        scatter += linalg.matmul_tn(centered, centered)
    n = sum(counts)
    cov = scatter / (n - 2)
    lam = ridge * np.trace(cov) / d
    cov = cov + lam * np.eye(d)
    try:
        cov_inv = np.linalg.inv(cov)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"singular covariance after regularization: {exc}")
    if not np.isfinite(cov_inv).all():
        raise NumericError("singular covariance after regularization")
    log_priors = np.log(np.array(counts) / n)
    return LdaModel(means, cov_inv, log_priors)


def lda_score(model: LdaModel, samples: np.ndarray) -> np.ndarray:
    """Log-odds of the anomaly class per row; antisymmetric in the labels."""
    x = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    w = model.cov_inv @ (model.means[1] - model.means[0])
    bias = (-0.5 * float((model.means[1] + model.means[0]) @ w)
            + model.log_priors[1] - model.log_priors[0])
    return x @ w + bias
