"""numpy implementation of the kernel operations.

This is the pure-Python fallback backend; it delegates the matrix
products to numpy's BLAS.  Inputs are assumed validated (see
``neglearn.linalg``): 2-D, float64, finite where required.
"""

import numpy as np

NAME = "python"


def matmul(a, b):
    return a @ b


def matmul_tn(a, b):
    """a.T @ b without materializing the transpose."""
    return a.T @ b


def matmul_nt(a, b):
    """a @ b.T without materializing the transpose."""
    return a @ b.T


def sigmoid(x):
    # exp(-|x|) is always in (0, 1], so neither branch can overflow.
    e = np.exp(-np.abs(x))
    return np.where(x >= 0.0, 1.0 / (1.0 + e), e / (1.0 + e))
