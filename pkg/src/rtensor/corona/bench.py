"""Wall-time and accounted-memory measurements for the demo's kernels.

For each image format the benchmark times the SSE alone, the SSE with its
gradient, and the Hessian-multiply at two pages, and records the peak bytes
each accounts through the allocation ledger.  Absolute numbers are
environment-specific; the interesting outputs are the ratios between the
operations and how the bytes scale with the pixel count.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass

import numpy as np

from .fourier import fft2, ifft2
from .model import AllocationLedger, hess_mult, sse
from .scene import make_aberration, make_ground_truth, make_source

__all__ = ["BenchRow", "benchmark", "write_bench_csv"]


@dataclass(frozen=True)
class BenchRow:
    m: int
    n: int
    op: str
    secs: float
    bytes: int


def _median_time(fn, reps):
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def benchmark(sizes, reps=3, seed=0) -> list[BenchRow]:
    """Measure sse, sse+gradient, and hess_mult(P=2) at each (M, N) format."""
    rows = []
    for m, n in sizes:
        source = make_source(m, n)
        gt, wb = make_ground_truth(source, 0.08 * min(m, n), 0.375 * min(m, n))
        phi_true = make_aberration(m, n, seed)
        xa = np.real(ifft2(fft2(gt) * np.exp(1j * phi_true)))
        phi = np.zeros((m, n))
        rng = np.random.default_rng(seed)
        dphi = rng.uniform(-0.1, 0.1, (m, n, 2))
        _, _, xt = sse(phi, xa, wb)

        t_sse = _median_time(lambda: sse(phi, xa, wb), reps)
        t_grad = _median_time(lambda: sse(phi, xa, wb, want_gradient=True), reps)
        t_hmf = _median_time(lambda: hess_mult(xt, dphi, wb), reps)

        led_sse = AllocationLedger()
        sse(phi, xa, wb, ledger=led_sse)
        led_grad = AllocationLedger()
        sse(phi, xa, wb, want_gradient=True, ledger=led_grad)
        led_hmf = AllocationLedger()
        hess_mult(xt, dphi, wb, ledger=led_hmf)

        rows.append(BenchRow(m, n, "sse", t_sse, led_sse.peak))
        rows.append(BenchRow(m, n, "sse_grad", t_grad, led_grad.peak))
        rows.append(BenchRow(m, n, "hmf", t_hmf, led_hmf.peak))
    return rows


def write_bench_csv(rows, path):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["M", "N", "op", "secs", "bytes"])
        for r in rows:
            writer.writerow([r.m, r.n, r.op, f"{r.secs:.9f}", r.bytes])
