"""Wall-clock scaling of the rotation kernels.

Sizes are measured in interleaved rounds (every size once per round) and the
median per size is kept, so slow drifts of a shared machine hit all sizes
alike instead of biasing a single ratio.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .oracle import MAX_DENSE_QUBITS, apply_dense, build_dense
from .qcore import apply_plan, apply_qrz_fast, embed, sample_plan

PATHS = ("plan", "qrz", "dense", "transpose")


@dataclass
class BenchRow:
    path: str
    n_qubits: int
    median_s: float
    ratio_prev: float | None  # t(n) / t(n - step)


def _case(path: str, n: int, seed: int):
    rng = np.random.default_rng(seed + n)
    state = embed(rng.standard_normal((1, 1 << n)))
    if path == "qrz":
        angles = sample_plan(n, "Z", 0.01, seed).angles("Z")
        return lambda: apply_qrz_fast(state, angles)
    plan = sample_plan(n, "XYZ", 0.01, seed)
    if path == "dense":
        return lambda: apply_dense(build_dense(plan), state)
    kernel = "transpose" if path == "transpose" else "blocked"
    return lambda: apply_plan(state, plan, kernel=kernel)


def time_path(path: str, sizes, reps: int = 5, seed: int = 0, warmup: int = 1) -> dict[int, float]:
    """Median wall time per qubit count."""
    cases = {n: _case(path, n, seed) for n in sizes}
    for fn in cases.values():
        for _ in range(warmup):
            fn()
    samples = {n: [] for n in sizes}
    for _ in range(reps):
        for n, fn in cases.items():
            t0 = time.perf_counter()
            fn()
            samples[n].append(time.perf_counter() - t0)
    return {n: float(np.median(v)) for n, v in samples.items()}


def run_bench(min_qubits: int, max_qubits: int, reps: int = 5, step: int = 2,
              paths=("plan", "qrz", "dense"), dense_max: int = MAX_DENSE_QUBITS,
              dense_min: int = 8, seed: int = 0) -> list[BenchRow]:
    if not 1 <= min_qubits <= max_qubits:
        raise ValueError("need 1 <= min_qubits <= max_qubits")
    rows = []
    for path in paths:
        if path == "dense":
            sizes = list(range(max(min(dense_min, dense_max), 1), dense_max + 1, step))
        else:
            sizes = list(range(min_qubits, max_qubits + 1, step))
        if not sizes:
            continue
        medians = time_path(path, sizes, reps, seed)
        prev = None
        for n in sizes:
            ratio = medians[n] / medians[prev] if prev is not None else None
            rows.append(BenchRow(path, n, medians[n], ratio))
            prev = n
    return rows


def fit_exponent(rows, path: str) -> float:
    """Slope of log(time) against log(N) for one path."""
    pts = [(r.n_qubits, r.median_s) for r in rows if r.path == path]
    if len(pts) < 2:
        return float("nan")
    n, t = np.array(pts).T
    return float(np.polyfit(n * np.log(2), np.log(t), 1)[0])
