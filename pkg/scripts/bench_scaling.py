"""Timing table for the rotation kernels and the dense oracle.

    python3 scripts/bench_scaling.py --min 16 --max 24 --reps 5
"""
import argparse

from qaugment.bench import fit_exponent, run_bench


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--min", type=int, default=16)
    ap.add_argument("--max", type=int, default=24)
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--dense-max", type=int, default=12)
    ap.add_argument("--paths", default="plan,transpose,qrz,dense")
    args = ap.parse_args()

    paths = tuple(args.paths.split(","))
    rows = run_bench(args.min, args.max, args.reps, paths=paths, dense_max=args.dense_max)
    print(f"{'path':10s} {'n':>3s} {'median ms':>11s} {'t(n)/t(n-2)':>12s}")
    for r in rows:
        ratio = "" if r.ratio_prev is None else f"{r.ratio_prev:.2f}"
        print(f"{r.path:10s} {r.n_qubits:3d} {1e3 * r.median_s:11.3f} {ratio:>12s}")
    for p in paths:
        print(f"fitted exponent {p}: {fit_exponent(rows, p):.3f}")


if __name__ == "__main__":
    main()
