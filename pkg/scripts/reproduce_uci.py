"""Grid-searched GMean on the bundled UCI sets for EEM, EEKM and WELM.

    python scripts/reproduce_uci.py --repeats 10
    python scripts/reproduce_uci.py --datasets heart --models eem_nsig welm_sig
"""

import argparse
import time

from extreme_entropy.dataset import load_bundled
from extreme_entropy.evaluation import grid_search_cv, make_grid

MODELS = {
    "eem_sig": ("eem", "sig"), "eem_nsig": ("eem", "nsig"), "eem_rbf": ("eem", "rbf"),
    "eekm": ("eekm", None),
    "welm_sig": ("welm", "sig"), "welm_nsig": ("welm", "nsig"), "welm_rbf": ("welm", "rbf"),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--datasets", nargs="+", default=["breast-cancer", "diabetes", "heart"])
    ap.add_argument("--models", nargs="+", choices=sorted(MODELS),
                    default=["eem_sig", "eem_nsig", "eem_rbf", "welm_sig", "welm_rbf"])
    ap.add_argument("--k", type=int, default=10)
    ap.add_argument("--repeats", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    print("dataset\tmodel\tbest\tgmean\tstd\tseconds")
    for name in args.datasets:
        ds = load_bundled(name)
        for key in args.models:
            algo, act = MODELS[key]
            start = time.perf_counter()
            best, reports = grid_search_cv(ds, make_grid(algo, act or "rbf"), args.k, args.repeats,
                                           args.seed, threads=args.threads)
            rep = next(r for r in reports if r.config == best)
            print(f"{name}\t{key}\t{best.label}\t{100 * rep.mean:.1f}\t{100 * rep.std:.1f}\t"
                  f"{time.perf_counter() - start:.1f}", flush=True)


if __name__ == "__main__":
    main()
