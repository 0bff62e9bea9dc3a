"""Kernel backend selection.

Two interchangeable backends implement the hot operations (the three
matrix-product variants and the elementwise sigmoid):

* ``compiled`` -- the Cython extension ``neglearn.kernels._core``, plain
  C loops with a fixed summation order;
* ``python``   -- numpy (BLAS-backed matmul).

At import time the compiled backend is used when the extension was
built, otherwise the numpy backend.  ``NEGLEARN_KERNELS=python`` or
``=compiled`` in the environment forces the choice (forcing ``compiled``
when the extension is missing is an error).  ``set_backend`` switches at
runtime, which is intended for tests and benchmarks only; it is not
thread-safe.

Within one backend, results are bit-for-bit reproducible run to run.
Across backends, results may differ in the last few ulps (different
summation orders, different exp implementations).
"""

import os

from . import _pyref

try:
    from . import _core
except ImportError:
    _core = None

_BACKENDS = {"python": _pyref}
if _core is not None:
    _BACKENDS["compiled"] = _core

_active = None


def available_backends():
    return sorted(_BACKENDS)

def backend_name():
    return _active.NAME

def set_backend(name):
    global _active, matmul, matmul_tn, matmul_nt, sigmoid
    if name == "auto":
        name = "compiled" if _core is not None else "python"
    if name not in _BACKENDS:
        raise ValueError(
            f"unknown kernel backend {name!r}; available: {available_backends()}")
    _active = _BACKENDS[name]
    matmul = _active.matmul
    matmul_tn = _active.matmul_tn
    matmul_nt = _active.matmul_nt
    sigmoid = _active.sigmoid


set_backend(os.environ.get("NEGLEARN_KERNELS", "auto"))
