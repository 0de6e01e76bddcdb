"""Cross-validated GMean as a function of the hidden layer size (TSV for plotting).

    python scripts/stability.py --data heart --activation nsig --h-min 5 --h-max 500 --h-step 5
"""

import argparse

import numpy as np

from extreme_entropy.dataset import load_bundled
from extreme_entropy.evaluation import ModelConfig, stability_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--data", default="breast-cancer")
    ap.add_argument("--algo", default="eem", choices=("eem", "welm"))
    ap.add_argument("--activation", default="rbf", choices=("sig", "nsig", "rbf"))
    ap.add_argument("--h-min", type=int, default=100)
    ap.add_argument("--h-max", type=int, default=500)
    ap.add_argument("--h-step", type=int, default=50)
    ap.add_argument("--k", type=int, default=10)
    ap.add_argument("--repeats", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    h_values = range(args.h_min, args.h_max + 1, args.h_step)
    cfg = ModelConfig(args.algo, args.activation, args.h_min)
    sweep = stability_sweep(load_bundled(args.data), h_values, cfg, args.k, args.repeats, args.seed)
    print("h\tgmean")
    for h, g in sweep:
        print(f"{h}\t{100 * g:.2f}")
    print(f"# std over h: {np.std([100 * g for _, g in sweep]):.2f}")


if __name__ == "__main__":
    main()
