"""Rank correlation between the mean-gap term and the full Gaussian Dcs.

Runs on the bundled sets and on a large synthetic unbalanced set.

    python scripts/spearman_table.py --projections 100 --operators 100
"""

import argparse

import numpy as np

from extreme_entropy.dataset import Dataset, load_bundled
from extreme_entropy.evaluation import spearman_experiment


def synthetic(n_pos=4000, n_neg=16000, d=8, seed=10):
    rng = np.random.default_rng(seed)
    X = np.vstack([rng.normal(0.6, 0.15, (n_pos, d)), rng.normal(0.4, 0.15, (n_neg, d))])
    return Dataset(X, np.r_[np.ones(n_pos, int), -np.ones(n_neg, int)], "synthetic-20k")


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--dims", type=int, nargs="+", default=[1, 10, 100])
    ap.add_argument("--projections", type=int, default=100)
    ap.add_argument("--operators", type=int, default=100)
    ap.add_argument("--activation", default="rbf", choices=("sig", "nsig", "rbf"))
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    sets = [load_bundled(n) for n in ("breast-cancer", "diabetes", "heart")] + [synthetic()]
    print("dataset\t" + "\t".join(f"h={h}" for h in args.dims))
    for ds in sets:
        res = spearman_experiment(ds, args.dims, args.projections, args.operators,
                                  args.seed, args.activation)
        print(ds.name + "\t" + "\t".join(f"{res[h]:.3f}" for h in args.dims), flush=True)


if __name__ == "__main__":
    main()
