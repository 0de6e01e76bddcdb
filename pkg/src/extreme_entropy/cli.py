"""Command-line interface.

Exit codes: 0 success, 2 bad input (files, labels, dimensions, arguments),
3 numerical failure (singular covariance and other linear algebra errors).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import eem as eem_mod
from . import evaluation as ev
from .dataset import BUNDLED, DataError, apply_scaler, fit_scaler, load, load_bundled, scale_features
from .eem import EemModel, TrainingError
from .feature_map import ACTIVATIONS
from .metrics import gmean_score
from .model_io import ModelFileError, load_model, save_model
from .welm import WEIGHTINGS, WelmModel

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3


class InputError(Exception):
    """Bad user input; maps to exit code 2."""


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _costs(text):
    vals = _float_list(text)
    if len(vals) != 2 or not all(v > 0 for v in vals):
        raise argparse.ArgumentTypeError("--costs expects two positive numbers C+,C-")
    return tuple(vals)


def _load_data(args, n_features=None):
    src = args.data
    if src is None:
        raise InputError("--data is required")
    if not Path(src).exists() and src in BUNDLED:
        return load_bundled(src)
    return load(src, args.format, label_column=args.label_column, header=args.header,
                n_features=n_features)


def _config(args, h=None) -> ev.ModelConfig:
    try:
        return ev.ModelConfig(args.algo, None if args.algo == "eekm" else args.activation,
                              args.h if h is None else h, args.gamma, args.seed,
                              args.weighting, args.jitter)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _threads(args) -> int:
    return args.threads if args.threads else (os.cpu_count() or 1)


def _write(text: str, path=None):
    if path is None or path == "-":
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(path).write_text(text if text.endswith("\n") else text + "\n")


def _rule_text(model) -> str:
    if isinstance(model, WelmModel):
        return "sign(output)"
    rule = model.rule
    if rule.kind == "one_threshold":
        return f"+1 iff x >= {rule.t0!r}"
    if rule.kind == "two_threshold":
        return f"{rule.inside_label:+d} on [{rule.t_lo!r}, {rule.t_hi!r}], {-rule.inside_label:+d} outside"
    return f"constant {rule.constant_label:+d}"


def cmd_train(args) -> int:
    ds = _load_data(args)
    if len(np.unique(ds.labels)) < 2:
        raise InputError("training data must contain both classes")
    cfg = _config(args)
    scaler = fit_scaler(ds)
    data = apply_scaler(scaler, ds)
    model = ev.train(cfg, data.features, data.labels)
    train_g = gmean_score(data.labels, ev.predict(model, data.features))
    if args.model:
        save_model(args.model, model, scaling=scaler, dataset=ds.name, seed=args.seed)
    print(f"algorithm   {cfg.algorithm}")
    print(f"h           {model.beta.shape[0]}")
    if isinstance(model, EemModel):
        print(f"rule        {model.rule.kind}")
        print(f"thresholds  {', '.join(repr(t) for t in model.rule.thresholds) or '-'}")
    print(f"decision    {_rule_text(model)}")
    print(f"train_gmean {float(train_g)!r}")
    if args.model:
        print(f"model       {args.model}")
    return EXIT_OK


def cmd_predict(args) -> int:
    if not args.model:
        raise InputError("--model is required")
    model, scaler, _ = load_model(args.model)
    d = model.map.d
    ds = _load_data(args, n_features=d if args.format == "libsvm" else None)
    if ds.n_features != d:
        raise InputError(f"dimension mismatch: model expects {d} features, data has {ds.n_features}")
    X = ds.features if scaler is None else scale_features(scaler, ds.features)
    if isinstance(model, WelmModel):
        if args.proba or args.costs:
            raise InputError("--proba and --costs need an EEM/EEKM model")
        labels = ev.predict(model, X)
    elif args.costs:
        labels = eem_mod.predict_cost_sensitive(model, X, *args.costs)
    else:
        labels = eem_mod.predict(model, X)
    if args.proba:
        proba = eem_mod.predict_proba(model, X)
        lines = [f"{int(l):+d}\t{float(p)!r}" for l, p in zip(labels, proba)]
    else:
        lines = [f"{int(l):+d}" for l in labels]
    _write("\n".join(lines), args.output)
    return EXIT_OK


def _report_out(args, payload: dict, text: str):
    print(text)
    if args.report:
        Path(args.report).write_text(json.dumps(payload, indent=1) + "\n")


def cmd_evaluate(args) -> int:
    ds = _load_data(args)
    kw = dict(scale_globally=args.scale_globally, threads=_threads(args))
    if args.grid:
        h_values = args.h_values or list(ev.H_GRID)
        gammas = args.gammas or list(ev.GAMMA_GRID)
        try:
            grid = ev.make_grid(args.algo, args.activation, h_values, gammas, args.seed,
                                weighting=args.weighting, jitter=args.jitter)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        best, reports = ev.grid_search_cv(ds, grid, args.k, args.repeats, args.seed, **kw)
        best_rep = next(r for r in reports if r.config == best)
        payload = {"dataset": ds.name, "best": best_rep.to_dict(),
                   "reports": [r.to_dict() for r in reports]}
        text = ev.format_table(reports) + f"\nbest: {best_rep.summary()}"
    else:
        rep = ev.cross_validate(ds, _config(args), args.k, args.repeats, args.seed, **kw)
        payload = {"dataset": ds.name, **rep.to_dict()}
        text = ev.format_table([rep])
    _report_out(args, payload, text)
    return EXIT_OK


def cmd_tune(args) -> int:
    ds = _load_data(args)
    if args.algo == "welm":
        raise InputError("tuning needs --algo eem or eekm")
    h_values = args.h_values or list(ev.H_GRID)
    try:
        grid = ev.make_grid(args.algo, args.activation, h_values,
                            args.gammas or list(ev.GAMMA_GRID), args.seed, jitter=args.jitter)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if args.method == "dcs-gauss":
        res = ev.tune_by_gaussian_dcs(ds, grid, args.variance, args.dcs_formula, seed=args.seed)
    else:
        res = ev.tune_by_kde_dcs(ds, grid, seed=args.seed)
    payload = {"dataset": ds.name, "method": args.method, "chosen": asdict(res.config),
               "label": res.config.label, "score": res.score,
               "scores": [{"label": c.label, "score": s} for c, s in res.scores]}
    lines = [f"chosen  {res.config.label}", f"score   {float(res.score)!r}"]
    if args.cv:
        rep = ev.cross_validate(ds, res.config, args.k, args.repeats, args.seed,
                                threads=_threads(args))
        payload["cv"] = rep.to_dict()
        lines.append(f"cv      {100 * rep.mean:.1f} ± {100 * rep.std:.1f}")
    _report_out(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_experiment(args) -> int:
    ds = _load_data(args)
    if args.experiment == "spearman":
        res = ev.spearman_experiment(ds, args.dims, args.projections, args.operators,
                                     args.seed, args.activation)
        rows = ["h\tspearman"] + [f"{h}\t{float(r)!r}" for h, r in res.items()]
    elif args.experiment == "stability":
        h_values = args.h_values or list(range(100, 501, 50))
        sweep = ev.stability_sweep(ds, h_values, _config(args, h_values[0]), args.k,
                                   args.repeats, args.seed, threads=_threads(args))
        rows = ["h\tgmean"] + [f"{h}\t{float(g)!r}" for h, g in sweep]
    else:
        h_values = args.h_values or [250, 1000]
        rows = ["h\tseconds"] + [f"{h}\t{ev.bench(ds, _config(args, h), args.runs)!r}"
                                 for h in h_values]
    _write("\n".join(rows), args.output)
    return EXIT_OK


def _common(p: argparse.ArgumentParser):
    p.add_argument("--data", help=f"data file, or a bundled name: {', '.join(BUNDLED)}")
    p.add_argument("--format", choices=("libsvm", "csv"), default="libsvm")
    p.add_argument("--label-column", type=int, default=None, help="CSV label column (default 0)")
    p.add_argument("--header", action="store_true", help="CSV file has a header row")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: all cores); results do not depend on it")
    p.add_argument("-v", "--verbose", action="store_true")


def _model_flags(p: argparse.ArgumentParser):
    p.add_argument("--algo", choices=ev.ALGORITHMS, default="eem")
    p.add_argument("--activation", choices=ACTIVATIONS, default="rbf")
    p.add_argument("--h", type=int, default=100)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--jitter", type=float, default=0.0)
    p.add_argument("--weighting", choices=WEIGHTINGS, default="balanced")


def _cv_flags(p: argparse.ArgumentParser):
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--report", help="write a JSON report to this file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eem", description="Entropy-based extreme classifiers")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit a model and write a model file")
    _common(p)
    _model_flags(p)
    p.add_argument("--model", help="output model file (JSON)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="label rows with a saved model")
    _common(p)
    p.add_argument("--model", help="model file written by train")
    p.add_argument("--proba", action="store_true", help="add a P(+|x) column")
    p.add_argument("--costs", type=_costs, default=None, metavar="C+,C-")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="repeated stratified cross-validation")
    _common(p)
    _model_flags(p)
    _cv_flags(p)
    p.add_argument("--grid", action="store_true", help="grid search over h (and gamma)")
    p.add_argument("--h-values", type=_int_list, default=None)
    p.add_argument("--gammas", type=_float_list, default=None)
    p.add_argument("--scale-globally", action="store_true",
                   help="fit the [0,1] scaler on the whole set instead of each training fold")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("tune", help="entropy-based hyperparameter selection")
    _common(p)
    _model_flags(p)
    _cv_flags(p)
    p.add_argument("--method", choices=("dcs-gauss", "dcs-kde"), default="dcs-gauss")
    p.add_argument("--variance", choices=("empirical", "model"), default="empirical")
    p.add_argument("--dcs-formula", choices=("corrected", "as-printed"), default="corrected")
    p.add_argument("--h-values", type=_int_list, default=None)
    p.add_argument("--gammas", type=_float_list, default=None)
    p.add_argument("--cv", action="store_true", help="also cross-validate the chosen config")
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("experiment", help="spearman, stability and bench experiments (TSV)")
    p.add_argument("experiment", choices=("spearman", "stability", "bench"))
    _common(p)
    _model_flags(p)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--dims", type=_int_list, default=[1, 10, 100])
    p.add_argument("--projections", type=int, default=100)
    p.add_argument("--operators", type=int, default=100)
    p.add_argument("--h-values", type=_int_list, default=None)
    p.add_argument("--runs", type=int, default=3)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except np.linalg.LinAlgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InputError, DataError, ModelFileError, TrainingError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
