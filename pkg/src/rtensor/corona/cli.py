"""Command line driver for the coronagraph demo (`rt-corona`).

Subcommands: ``synth`` writes a synthetic scene, ``solve`` corrects an
aberrated image by SSE minimization, ``bench`` measures kernel timings and
accounted memory, ``check`` runs the finite-difference derivative suites.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from .bench import benchmark, write_bench_csv
from .fourier import fft2, ifft2
from .model import hess_mult, sse
from .optimize import TrustRegionOptions, optimize
from .pgm import read_mask, read_pgm, write_csv, write_mask, write_pgm
from .scene import SceneConfig, make_aberration, make_instance


def _cmd_synth(args):
    cfg = SceneConfig(size=args.size, seed=args.seed)
    inst = make_instance(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_pgm(out / "source.pgm", inst.source, square=args.square)
    write_pgm(out / "ground_truth.pgm", inst.ground_truth, square=args.square)
    write_mask(out / "mask.pgm", inst.mask)
    write_pgm(out / "aberrated.pgm", inst.aberrated, square=args.square)
    # the PGM clamps negatives; the CSV keeps the exact values the solver needs
    write_csv(out / "aberrated.csv", inst.aberrated)
    print(f"wrote scene ({cfg.size}x{cfg.size}, seed {cfg.seed}) to {out}/")
    return 0


def _cmd_solve(args):
    src = Path(args.indir)
    wb = read_mask(src / "mask.pgm")
    csv_path = src / "aberrated.csv"
    if csv_path.exists():
        xa = np.loadtxt(csv_path, delimiter=",")
    else:
        xa = read_pgm(src / "aberrated.pgm")
    opts = TrustRegionOptions(
        max_iter=args.max_iter, grad_tol=args.grad_tol, verbose=args.verbose
    )
    report = optimize(xa, wb, opts)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_pgm(out / "corrected.pgm", report.corrected, square=args.square)
    write_csv(out / "phase.csv", report.phi)
    with open(out / "report.csv", "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["step", "sse", "grad_inf_norm", "secs"])
        for k, e in enumerate(report.sse_trajectory):
            writer.writerow(
                [k, f"{e:.9e}", f"{report.grad_norms[k]:.9e}",
                 f"{report.wall_times[min(k, len(report.wall_times) - 1)]:.6f}"]
            )
    first, last = report.sse_trajectory[0], report.sse_trajectory[-1]
    print(
        f"{report.iterations} iterations, sse {first:.4e} -> {last:.4e}, "
        f"stop: {report.stop_reason}; wrote {out}/corrected.pgm"
    )
    return 0


def _cmd_bench(args):
    sizes = [(int(s), int(s)) for s in args.sizes.split(",")]
    rows = benchmark(sizes, reps=args.reps)
    write_bench_csv(rows, args.out)
    for r in rows:
        print(f"{r.m:5d} {r.n:5d} {r.op:9s} {r.secs * 1e3:10.3f} ms {r.bytes:>12d} B")
    return 0


def _cmd_check(args):
    rng = np.random.default_rng(11)
    m = n = 8
    source = np.abs(fft2(rng.uniform(size=(m, n)))) ** 2
    source /= source.max()
    r = np.hypot(*np.meshgrid(np.arange(m) - m // 2, np.arange(n) - n // 2, indexing="ij"))
    wb = (r < 1) | (r > 3)
    phi_true = make_aberration(m, n, 5)
    xa = np.real(ifft2(fft2(np.sqrt(source) * ~wb) * np.exp(1j * phi_true)))
    phi = make_aberration(m, n, 6) * 0.3
    eps = 1e-5
    failures = 0

    _, grad, xt = sse(phi, xa, wb, want_gradient=True)
    for k in range(10):
        d = rng.standard_normal((m, n))
        ep, _, _ = sse(phi + eps * d, xa, wb)
        em, _, _ = sse(phi - eps * d, xa, wb)
        fd = (ep - em) / (2 * eps)
        an = float((grad * d).sum())
        scale = max(abs(fd), abs(an), 1e-12)
        if abs(fd - an) / scale > 1e-6:
            failures += 1
            print(f"gradient direction {k}: fd {fd:.6e} vs analytic {an:.6e}")

    dphi = rng.standard_normal((m, n, 3))
    f = hess_mult(xt, dphi, wb)
    for k in range(3):
        _, gp, _ = sse(phi + eps * dphi[:, :, k], xa, wb, want_gradient=True)
        _, gm, _ = sse(phi - eps * dphi[:, :, k], xa, wb, want_gradient=True)
        fd = (gp - gm) / (2 * eps)
        hv = f[:, k].reshape(m, n)
        scale = max(np.abs(fd).max(), np.abs(hv).max(), 1e-12)
        if np.abs(fd - hv).max() / scale > 1e-5:
            failures += 1
            print(f"hessian page {k}: max deviation {np.abs(fd - hv).max():.3e}")

    print("derivative checks:", "ok" if failures == 0 else f"{failures} failures")
    return 0 if failures == 0 else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="rt-corona", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic scene")
    p.add_argument("--size", type=int, default=401)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--square", action="store_true", help="square pixel values at export")
    p.set_defaults(fn=_cmd_synth)

    p = sub.add_parser("solve", help="correct an aberrated image")
    p.add_argument("--in", dest="indir", required=True)
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--grad-tol", type=float, default=1e-8)
    p.add_argument("--out", required=True)
    p.add_argument("--square", action="store_true")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("bench", help="time the kernels and account memory")
    p.add_argument("--sizes", default="64,128,256,512")
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_bench)

    p = sub.add_parser("check", help="finite-difference derivative suites")
    p.set_defaults(fn=_cmd_check)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except Exception as exc:  # surface a clean message, nonzero exit
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
