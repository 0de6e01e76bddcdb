"""Training time against hidden layer size on synthetic data.

Prints median seconds per h and the ratio to the smallest h; with O(N h^2)
cost the ratio for a 4x larger h should sit near 16.

    python scripts/bench_scaling.py --n 5000 --h 250 500 1000
"""

import argparse

import numpy as np

from extreme_entropy.dataset import Dataset
from extreme_entropy.evaluation import ModelConfig, bench


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, default=5000)
    ap.add_argument("--d", type=int, default=10)
    ap.add_argument("--h", type=int, nargs="+", default=[250, 500, 1000])
    ap.add_argument("--algo", default="eem", choices=("eem", "welm"))
    ap.add_argument("--runs", type=int, default=7)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    X = rng.standard_normal((args.n, args.d))
    y = np.where(np.arange(args.n) < args.n // 2, 1, -1)
    X[y == 1] += 0.5
    ds = Dataset(X, y)
    print("h\tseconds\tratio")
    base = None
    for h in args.h:
        t = bench(ds, ModelConfig(args.algo, "rbf", h), args.runs)
        base = base or t
        print(f"{h}\t{t:.4f}\t{t / base:.2f}", flush=True)


if __name__ == "__main__":
    main()
