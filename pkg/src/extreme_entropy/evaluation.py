"""Experimental protocol: repeated stratified CV, grid search, entropy-based
model selection, the surrogate-vs-divergence rank experiment, stability sweeps
and timing.

GMean values are fractions in [0, 1]; reports multiply by 100 only when printed.
"""

from __future__ import annotations

import logging
import statistics
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import eem as eem_mod
from .dataset import Dataset, apply_scaler, fit_scaler, split_by_class, stratified_kfold
from .eem import EemModel, TrainingError
from .entropy import Gaussian1D, dcs_gaussian_1d, dcs_kde_1d, dcs_last_term
from .feature_map import ACTIVATIONS, apply_map, fit_nystrom, sample_random_map
from .linalg import ledoit_wolf
from .metrics import gmean_score, spearman
from .welm import WelmModel, fit_welm_projected, predict_welm

log = logging.getLogger(__name__)

ALGORITHMS = ("eem", "eekm", "welm")
H_GRID = (50, 100, 250, 500, 1000)
GAMMA_GRID = tuple(10.0 ** e for e in range(-10, 1))


@dataclass(frozen=True)
class ModelConfig:
    algorithm: str = "eem"
    activation: str | None = "rbf"
    h: int = 100
    gamma: float | None = None
    seed: int = 0
    weighting: str = "balanced"
    jitter: float = 0.0

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.h < 1:
            raise ValueError("h must be >= 1")
        if self.algorithm == "eekm":
            if self.gamma is None or not self.gamma > 0:
                raise ValueError("eekm requires gamma > 0")
        elif self.activation not in ACTIVATIONS:
            raise ValueError(f"{self.algorithm} requires an activation in {ACTIVATIONS}")

    @property
    def label(self) -> str:
        if self.algorithm == "eekm":
            return f"eekm(h={self.h},gamma={self.gamma:g})"
        return f"{self.algorithm}_{self.activation}(h={self.h})"

    def sort_key(self):
        return (self.h, self.gamma if self.gamma is not None else 0.0)


def make_grid(algorithm: str, activation: str = "rbf", h_values=H_GRID,
              gammas=GAMMA_GRID, seed: int = 0, **kw) -> list:
    if algorithm == "eekm":
        return [ModelConfig("eekm", None, h, g, seed, **kw) for h in h_values for g in gammas]
    return [ModelConfig(algorithm, activation, h, None, seed, **kw) for h in h_values]


def derive_seed(*parts: int) -> int:
    """Stable 63-bit seed from integer parts."""
    ss = np.random.SeedSequence([int(p) & 0xFFFFFFFFFFFFFFFF for p in parts])
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def build_map(cfg: ModelConfig, X: np.ndarray, seed: int):
    if cfg.algorithm == "eekm":
        h = min(cfg.h, X.shape[0])
        return fit_nystrom(X, h, cfg.gamma, seed)
    return sample_random_map(X.shape[1], cfg.h, cfg.activation, seed)


def train(cfg: ModelConfig, X, y, seed: int | None = None):
    """Fit the model described by `cfg` on scaled features `X` with labels `y`."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    seed = cfg.seed if seed is None else seed
    spec = build_map(cfg, X, seed)
    if cfg.algorithm == "welm":
        return fit_welm_projected(apply_map(spec, X), y, spec, cfg.weighting)
    Xp, Xm = split_by_class(X, y)
    return eem_mod.fit(Xp, Xm, spec, jitter=cfg.jitter)


def predict(model, X) -> np.ndarray:
    if isinstance(model, WelmModel):
        return predict_welm(model, X)
    return eem_mod.predict(model, X)


@dataclass
class EvalReport:
    config: ModelConfig
    fold_scores: list
    train_seconds: list
    skipped: list = field(default_factory=list)
    chosen: list = field(default_factory=list)
    k: int = 10
    repeats: int = 1
    seed: int = 0

    @property
    def mean(self) -> float:
        return float(np.mean(self.fold_scores)) if self.fold_scores else float("nan")

    @property
    def std(self) -> float:
        return float(np.std(self.fold_scores)) if self.fold_scores else float("nan")

    def to_dict(self) -> dict:
        return {
            "config": asdict(self.config),
            "label": self.config.label,
            "gmean_mean": self.mean,
            "gmean_std": self.std,
            "fold_gmeans": list(self.fold_scores),
            "train_seconds": list(self.train_seconds),
            "skipped_folds": list(self.skipped),
            "k": self.k,
            "repeats": self.repeats,
            "seed": self.seed,
        }

    def summary(self) -> str:
        return f"{self.config.label:<32s} {100 * self.mean:6.1f} ± {100 * self.std:4.1f}"


def _run_fold(cfg, ds, train_idx, test_idx, fold_seed, scaler):
    tr, te = ds.subset(train_idx), ds.subset(test_idx)
    if len(np.unique(tr.labels)) < 2:
        return None
    t = scaler if scaler is not None else fit_scaler(tr)
    tr, te = apply_scaler(t, tr), apply_scaler(t, te)
    start = time.perf_counter()
    model = train(cfg, tr.features, tr.labels, fold_seed)
    elapsed = time.perf_counter() - start
    return gmean_score(te.labels, predict(model, te.features)), elapsed


def cross_validate(ds: Dataset, cfg: ModelConfig, k: int = 10, repeats: int = 10,
                   seed: int = 0, scale_globally: bool = False, threads: int = 1,
                   plan=None) -> EvalReport:
    """Repeated stratified k-fold GMean of `cfg` on `ds`.

    Features are scaled to [0, 1] using the training fold (or the whole set
    with `scale_globally`). Each fold draws its own feature map from a seed
    derived from ``(cfg.seed, seed, fold)``; folds whose training part holds a
    single class are skipped and listed in the report.
    """
    if plan is None:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            plan = stratified_kfold(ds, k, repeats, seed)
    scaler = fit_scaler(ds) if scale_globally else None
    jobs = [(i, tr, te, derive_seed(cfg.seed, seed, i)) for i, (tr, te) in enumerate(plan)]

    def run(job):
        i, tr, te, s = job
        return _run_fold(cfg, ds, tr, te, s, scaler)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]
    report = EvalReport(cfg, [], [], k=plan.k, repeats=plan.repeats, seed=seed)
    for (i, *_), res in zip(jobs, results):
        if res is None:
            report.skipped.append(i)
            continue
        report.fold_scores.append(res[0])
        report.train_seconds.append(res[1])
    return report


def best_report(reports) -> EvalReport:
    """Highest mean GMean; ties go to the smaller h, then the smaller gamma."""
    return min(reports, key=lambda r: (-r.mean, r.config.sort_key()))


def grid_search_cv(ds: Dataset, grid, k: int = 10, repeats: int = 10, seed: int = 0,
                   **kw):
    grid = list(grid)
    if not grid:
        raise ValueError("empty grid")
    plan = kw.pop("plan", None)
    if plan is None:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            plan = stratified_kfold(ds, k, repeats, seed)
    reports = []
    for cfg in grid:
        rep = cross_validate(ds, cfg, k, repeats, seed, plan=plan, **kw)
        log.info("%s", rep.summary())
        reports.append(rep)
    return best_report(reports).config, reports


@dataclass
class TuneResult:
    config: ModelConfig
    score: float
    scores: list  # (config, score or None)
    n_fits: int


def _projections(model: EemModel, X, y):
    p = eem_mod.project(model, X)
    return p[y == 1], p[y == -1]


def _tune(ds: Dataset, grid, scorer, scale: bool, seed: int | None) -> TuneResult:
    grid = list(grid)
    if not grid:
        raise ValueError("empty grid")
    data = apply_scaler(fit_scaler(ds), ds) if scale else ds
    X, y = data.features, data.labels
    scored, fits = [], 0
    for cfg in grid:
        if cfg.algorithm == "welm":
            raise ValueError("entropy tuning needs an EEM/EEKM model")
        fits += 1
        try:
            model = train(cfg, X, y, seed)
            if model.trivial:
                raise TrainingError("trivial model")
            score = scorer(model, *_projections(model, X, y))
        except (ValueError, np.linalg.LinAlgError) as exc:
            log.info("skipping %s: %s", cfg.label, exc)
            scored.append((cfg, None))
            continue
        scored.append((cfg, score))
    ok = [(c, s) for c, s in scored if s is not None and np.isfinite(s)]
    if not ok:
        raise RuntimeError("no configuration in the grid could be fitted")
    best_cfg, best = min(ok, key=lambda cs: (-cs[1], cs[0].sort_key()))
    return TuneResult(best_cfg, best, scored, fits)


def tune_by_gaussian_dcs(ds: Dataset, grid, variance: str = "empirical",
                         formula: str = "corrected", scale: bool = True,
                         seed: int | None = None) -> TuneResult:
    """Pick the config whose single full-data fit maximises the projected Gaussian Dcs.

    `variance` selects the class spread: ``empirical`` uses the variance of
    the training projections, ``model`` uses ``beta' Sigma beta``.
    """
    if variance not in ("empirical", "model"):
        raise ValueError(f"unknown variance mode {variance!r}")
    if formula not in ("corrected", "as-printed"):
        raise ValueError(f"unknown Dcs formula {formula!r}")

    def score(model, pp, pm):
        if variance == "empirical":
            sp, sm = float(np.var(pp)), float(np.var(pm))
        else:
            sp, sm = model.projected[1], model.projected[3]
        return dcs_gaussian_1d(Gaussian1D(float(pp.mean()), sp),
                               Gaussian1D(float(pm.mean()), sm), formula)

    return _tune(ds, grid, score, scale, seed)


def tune_by_kde_dcs(ds: Dataset, grid, scale: bool = True, seed: int | None = None) -> TuneResult:
    """As `tune_by_gaussian_dcs` but scoring Dcs between KDEs of the projections."""
    return _tune(ds, grid, lambda model, pp, pm: dcs_kde_1d(pp, pm), scale, seed)


def cross_validate_tuned(ds: Dataset, grid, method: str = "dcs-gauss", k: int = 10,
                         repeats: int = 10, seed: int = 0, **tune_kw) -> EvalReport:
    """CV where each training fold picks its own config by entropy, without inner folds."""
    tuner = {"dcs-gauss": tune_by_gaussian_dcs, "dcs-kde": tune_by_kde_dcs}[method]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        plan = stratified_kfold(ds, k, repeats, seed)
    grid = list(grid)
    report = EvalReport(grid[0], [], [], k=k, repeats=repeats, seed=seed)
    for i, (tr_idx, te_idx) in enumerate(plan):
        tr, te = ds.subset(tr_idx), ds.subset(te_idx)
        if len(np.unique(tr.labels)) < 2:
            report.skipped.append(i)
            continue
        t = fit_scaler(tr)
        tr, te = apply_scaler(t, tr), apply_scaler(t, te)
        fold_seed = derive_seed(grid[0].seed, seed, i)
        start = time.perf_counter()
        res = tuner(tr, grid, scale=False, seed=fold_seed, **tune_kw)
        model = train(res.config, tr.features, tr.labels, fold_seed)
        report.train_seconds.append(time.perf_counter() - start)
        report.fold_scores.append(gmean_score(te.labels, predict(model, te.features)))
        report.chosen.append(res.config)
    return report


def spearman_experiment(ds: Dataset, dims=(1, 10, 100), n_projections: int = 100,
                        n_operators: int = 100, seed: int = 0, activation: str = "rbf",
                        scale: bool = True) -> dict:
    """Rank correlation between the mean-gap term and the full Gaussian Dcs.

    For every hidden dimension, `n_projections` random feature maps are drawn,
    class Gaussians fitted in each, and `n_operators` standard normal
    directions ``beta`` projected through them. Degenerate projections
    (non-positive variance) are dropped.
    """
    data = apply_scaler(fit_scaler(ds), ds) if scale else ds
    Xp, Xm = split_by_class(data)
    out = {}
    for h in dims:
        surrogate, full = [], []
        for p in range(n_projections):
            spec = sample_random_map(data.n_features, h, activation, derive_seed(seed, h, p))
            Hp, Hm = apply_map(spec, Xp), apply_map(spec, Xm)
            cp, cm = ledoit_wolf(Hp).matrix, ledoit_wolf(Hm).matrix
            mp, mm = Hp.mean(axis=0), Hm.mean(axis=0)
            rng = np.random.default_rng(derive_seed(seed, h, p, 1))
            B = rng.standard_normal((n_operators, h))
            sp = np.einsum("ij,jk,ik->i", B, cp, B)
            sm = np.einsum("ij,jk,ik->i", B, cm, B)
            gp_, gm_ = B @ mp, B @ mm
            for a, va, b, vb in zip(gp_, sp, gm_, sm):
                if not (va > 0 and vb > 0):
                    continue
                f, g = Gaussian1D(float(a), float(va)), Gaussian1D(float(b), float(vb))
                surrogate.append(dcs_last_term(f, g))
                full.append(dcs_gaussian_1d(f, g))
        out[h] = spearman(surrogate, full) if len(full) >= 2 else float("nan")
    return out


def stability_sweep(ds: Dataset, h_values, cfg: ModelConfig, k: int = 10,
                    repeats: int = 1, seed: int = 0, **kw) -> list:
    """``(h, mean GMean)`` for the template `cfg` at every hidden size."""
    h_values = list(h_values)
    if not h_values:
        raise ValueError("empty h list")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        plan = stratified_kfold(ds, k, repeats, seed)
    return [(h, cross_validate(ds, replace(cfg, h=h), k, repeats, seed, plan=plan, **kw).mean)
            for h in h_values]


def bench(ds: Dataset, cfg: ModelConfig, runs: int = 3) -> float:
    """Median wall-clock seconds of one training run on the scaled data."""
    data = apply_scaler(fit_scaler(ds), ds)
    times = []
    for _ in range(runs):
        start = time.perf_counter()
        train(cfg, data.features, data.labels)
        times.append(time.perf_counter() - start)
    return statistics.median(times)


def format_table(reports) -> str:
    lines = [f"{'config':<32s} {'GMean':>6s}   {'std':>4s}"]
    lines += [r.summary() for r in reports]
    return "\n".join(lines)
