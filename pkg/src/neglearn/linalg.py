"""Dense numeric core: validated matrix operations.

A matrix throughout this package is a 2-D C-contiguous float64
numpy array; :func:`as_matrix` coerces and validates.  The operations
here add shape checking and non-finite detection on top of the active
kernel backend (see :mod:`neglearn.kernels`); they are pure functions
and safe to call concurrently.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .errors import NumericError, ShapeError


def as_matrix(x, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-D C-contiguous float64 array; reject NaN/Inf."""
    m = np.ascontiguousarray(x, dtype=np.float64)
    if m.ndim == 1:
        m = m.reshape(1, -1)
    if m.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise NumericError(f"{name} contains non-finite values")
    return m


def as_vector(x, name: str = "vector") -> np.ndarray:
    m = np.ascontiguousarray(x, dtype=np.float64)
    if m.ndim != 1:
        raise ShapeError(f"{name} must be 1-D, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise NumericError(f"{name} contains non-finite values")
    return m


def _check_finite(out: np.ndarray, op: str) -> np.ndarray:
    if not np.isfinite(out).all():
        raise NumericError(f"{op} produced non-finite values")
    return out


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product a @ b with dimension checking."""
    if a.shape[1] != b.shape[0]:
        raise ShapeError(
            f"matmul: inner dimensions differ, {a.shape} x {b.shape}")
    return _check_finite(kernels.matmul(a, b), "matmul")


def matmul_tn(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """a.T @ b with dimension checking."""
    if a.shape[0] != b.shape[0]:
        raise ShapeError(
            f"matmul_tn: leading dimensions differ, {a.shape} x {b.shape}")
    return _check_finite(kernels.matmul_tn(a, b), "matmul_tn")


def matmul_nt(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """a @ b.T with dimension checking."""
    if a.shape[1] != b.shape[1]:
        raise ShapeError(
            f"matmul_nt: trailing dimensions differ, {a.shape} x {b.shape}")
    return _check_finite(kernels.matmul_nt(a, b), "matmul_nt")


def sigmoid(x: np.ndarray) -> np.ndarray:
    """Elementwise logistic function; saturates to 0/1, never NaN."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 2:
        return kernels.sigmoid(x.reshape(1, -1)).reshape(x.shape)
    return kernels.sigmoid(x)


def mse(a: np.ndarray, b: np.ndarray) -> float:
    """Mean of squared elementwise differences.

    The per-element mean (not the raw sum) keeps scores comparable
    across input widths.
    """
    if a.shape != b.shape:
        raise ShapeError(f"mse: shapes differ, {a.shape} vs {b.shape}")
    d = a - b
    return float(np.mean(d * d))


def mse_rows(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Per-row mean squared difference (one score per sample)."""
    if a.shape != b.shape:
        raise ShapeError(f"mse_rows: shapes differ, {a.shape} vs {b.shape}")
    d = a - b
    return np.mean(d * d, axis=1)


def rng_uniform(rng, rows: int, cols: int, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
    """Seeded uniform matrix; thin wrapper over :meth:`Rng.uniform`."""
    return rng.uniform(rows, cols, lo, hi)
