"""Exact point-sampling MSE against N at several times, with fitted log-log slopes.

    python3 scripts/decay_sweep.py --out decay.csv
"""

import argparse
import csv
import sys

from avgsample import AveragingScheme, SamplingGrid, exact_mse, fit_power_law, reference_model, thm2_bound

DEFAULT_T = (0.3, 0.77, 1.1, 2.05, -1.3)
DEFAULT_N = (8, 16, 32, 64, 128, 256, 512, 1024)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--w", type=float, default=2.0)
    ap.add_argument("--seed", type=int, default=2011, help="seed of the reference mass matrix")
    ap.add_argument("--t", type=float, nargs="+", default=DEFAULT_T)
    ap.add_argument("--N", type=int, nargs="+", default=DEFAULT_N)
    ap.add_argument("--out", type=argparse.FileType("w"), default=sys.stdout)
    args = ap.parse_args(argv)

    model, grid, point = reference_model(args.seed), SamplingGrid(args.w), AveragingScheme.point()
    writer = csv.writer(args.out, lineterminator="\n")
    writer.writerow(["t", "N", "exact_mse", "thm2"])
    for t in args.t:
        mse = [exact_mse(model, point, grid, t, N) for N in args.N]
        for N, e in zip(args.N, mse):
            writer.writerow([repr(t), N, repr(e), repr(thm2_bound(model, grid, t, N))])
        slope, _, resid = fit_power_law(args.N, mse)
        print(f"t={t:+.3f}  slope={slope:.4f}  max residual={resid:.3g}", file=sys.stderr)


if __name__ == "__main__":
    main()
