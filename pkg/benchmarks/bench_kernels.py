"""Compare the compiled kernel core against the numpy fallback.

Times the four kernel operations at the shapes the experiments actually
use, plus one full training epoch of each model type under each
backend.  Run:

    python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from neglearn import dense, kernels, rbm, trainer
from neglearn.dense import OptimizerConfig
from neglearn.rbm import CdConfig
from neglearn.rng import Rng
from neglearn.trainer import TrainingConfig


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_ops(repeats):
    cases = [
        ("matmul", "50x784 @ 784x500", lambda r: (r.uniform(50, 784), r.uniform(784, 500))),
        ("matmul", "32x1024 @ 1024x512", lambda r: (r.uniform(32, 1024), r.uniform(1024, 512))),
        ("matmul", "8x16 @ 16x8", lambda r: (r.uniform(8, 16), r.uniform(16, 8))),
        ("matmul_tn", "(50x784)T @ 50x500", lambda r: (r.uniform(50, 784), r.uniform(50, 500))),
        ("matmul_nt", "50x500 @ (784x500)T", lambda r: (r.uniform(50, 500), r.uniform(784, 500))),
        ("sigmoid", "200x500", lambda r: (r.uniform(200, 500, -8, 8),)),
    ]
    rows = []
    for op, label, make in cases:
        args = make(Rng(42))
        per_backend = {}
        for name in kernels.available_backends():
            kernels.set_backend(name)
            fn = getattr(kernels, op)
            fn(*args)  # warm up
            per_backend[name] = best_of(lambda: fn(*args), repeats)
        rows.append((f"{op} {label}", per_backend))
    return rows


def bench_epochs(repeats):
    rng = Rng(7)
    x_rbm = rng.uniform(2000, 784)
    rbm_model = rbm.init_rbm(784, 500, rng.split())
    rbm_cfg = TrainingConfig(epochs=1, batch_size=50, seed=1,
                             optimizer=CdConfig(learning_rate=0.1))
    x_dense = rng.uniform(2000, 1024, -1, 1)
    dense_model = dense.init_dense(1024, 512, rng.split(),
                                   output_activation="identity")
    dense_cfg = TrainingConfig(epochs=1, batch_size=32, seed=1,
                               optimizer=OptimizerConfig(kind="adam"))
    cases = [
        ("rbm cd-1 epoch (2000x784, H=500, B=50)",
         lambda: trainer.train(rbm_model, x_rbm, None, rbm_cfg)),
        ("dense adam epoch (2000x1024, H=512, B=32)",
         lambda: trainer.train(dense_model, x_dense, None, dense_cfg)),
    ]
    rows = []
    for label, fn in cases:
        per_backend = {}
        for name in kernels.available_backends():
            kernels.set_backend(name)
            per_backend[name] = best_of(fn, max(1, repeats // 3))
        rows.append((label, per_backend))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    available = kernels.available_backends()
    print(f"backends: {', '.join(available)}")
    if "compiled" not in available:
        print("compiled core not built; timing the python backend only")
    default = kernels.backend_name()

    rows = bench_ops(args.repeats) + bench_epochs(args.repeats)
    kernels.set_backend(default)

    width = max(len(label) for label, _ in rows)
    header = f"{'case':<{width}}  " + "  ".join(f"{b:>12}" for b in available)
    if len(available) == 2:
        header += f"  {'speedup':>8}"
    print(header)
    for label, per_backend in rows:
        cells = "  ".join(f"{per_backend[b] * 1e3:>10.3f}ms" for b in available)
        line = f"{label:<{width}}  {cells}"
        if len(available) == 2:
            line += f"  {per_backend['python'] / per_backend['compiled']:>7.2f}x"
        print(line)


if __name__ == "__main__":
    main()
