"""neglearn: negative-learning training for generative autoencoders.

Train an RBM (CD-1) or a dense autoencoder (backprop) so that it
reconstructs only the normal data distribution: descent steps on normal
data are interleaved with ascent steps on known anomaly data, and the
per-sample reconstruction error then separates anomalies from normals.
"""

from .data import Dataset, NormalizationRecord
from .dense import DenseAutoencoder, Grads, OptimizerConfig, OptimizerState
from .errors import (ConfigError, DataFormatError, DivergenceError,
                     NeglearnError, NumericError, ShapeError)
from .evaluation import (Histogram, LdaModel, RocCurve, ScoreSet, histogram,
                         lda_fit, lda_score, roc, roc_curve, score, score_sets)
from .rbm import CdConfig, RbmModel
from .rng import Rng
from .trainer import EvalSets, TrainingConfig, TrainLog, train

__version__ = "0.1.0"

__all__ = [
    "CdConfig", "ConfigError", "DataFormatError", "Dataset",
    "DenseAutoencoder", "DivergenceError", "EvalSets", "Grads", "Histogram",
    "LdaModel", "NeglearnError", "NormalizationRecord", "NumericError",
    "OptimizerConfig", "OptimizerState", "RbmModel", "Rng", "RocCurve",
    "ScoreSet", "ShapeError", "TrainLog", "TrainingConfig", "histogram",
    "lda_fit", "lda_score", "roc", "roc_curve", "score", "score_sets",
    "train",
]
