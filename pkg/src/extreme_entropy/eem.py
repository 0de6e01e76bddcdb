"""Extreme Entropy Machine and its kernel (Nystrom) variant.

Training models each class in feature space as one Gaussian with a
Ledoit-Wolf covariance, then picks the direction ``beta`` that minimises
``beta' (S+ + S-) beta`` subject to ``beta' (m+ - m-) = 2``. Classification
compares the two projected 1-D class densities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import expit

from .feature_map import KernelMapSpec, MapSpec, NystromMapSpec, apply_map
from .linalg import ShrunkCovariance, SingularCovarianceError, ledoit_wolf, sym_solve

# relative variance gap below which the two projected variances count as equal
EQUAL_VARIANCE_RTOL = 1e-9
MEAN_TOL = 1e-12


class TrainingError(ValueError):
    """Training data cannot produce a model (e.g. a missing class)."""


@dataclass(frozen=True)
class ClassGaussian:
    mean: np.ndarray
    covariance: ShrunkCovariance
    count: int

    @property
    def degenerate(self) -> bool:
        return self.covariance.degenerate


@dataclass(frozen=True)
class DecisionRule:
    """Labelling rule on the 1-D projection.

    ``one_threshold``: +1 iff ``x >= t0``.
    ``two_threshold``: `inside_label` on ``[t_lo, t_hi]``, the other label outside.
    ``trivial``: `constant_label` everywhere.
    """

    kind: str
    t0: float | None = None
    t_lo: float | None = None
    t_hi: float | None = None
    inside_label: int | None = None
    constant_label: int | None = None

    def apply(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=np.float64)
        if self.kind == "one_threshold":
            return np.where(p >= self.t0, 1, -1)
        if self.kind == "two_threshold":
            inside = (p >= self.t_lo) & (p <= self.t_hi)
            return np.where(inside, self.inside_label, -self.inside_label)
        if self.kind == "trivial":
            return np.full(p.shape, self.constant_label, dtype=np.int64)
        raise ValueError(f"unknown rule kind {self.kind!r}")

    @property
    def thresholds(self) -> tuple:
        if self.kind == "one_threshold":
            return (self.t0,)
        if self.kind == "two_threshold":
            return (self.t_lo, self.t_hi)
        return ()


@dataclass(frozen=True)
class EemModel:
    map: MapSpec
    beta: np.ndarray
    projected: tuple  # (m+, S+, m-, S-)
    rule: DecisionRule
    priors: tuple = (0.5, 0.5)
    collapsed: bool = False
    info: dict = field(default_factory=dict, compare=False)

    @property
    def trivial(self) -> bool:
        return self.rule.kind == "trivial"

    @property
    def h(self) -> int:
        return self.beta.shape[0]


def fit_class_gaussians(Hp, Hm, ddof: int = 0):
    """Means and Ledoit-Wolf covariances of the two classes in feature space."""
    Hp = np.asarray(Hp, dtype=np.float64)
    Hm = np.asarray(Hm, dtype=np.float64)
    if Hp.shape[0] == 0 or Hm.shape[0] == 0:
        raise TrainingError("both classes required")
    out = []
    for H in (Hp, Hm):
        cov = ledoit_wolf(H, ddof)
        out.append(ClassGaussian(cov.location, cov, H.shape[0]))
    return tuple(out)


def solve_beta(gp: ClassGaussian, gm: ClassGaussian, jitter: float = 0.0):
    """Closed-form ``beta = 2 S^-1 m / (m' S^-1 m)`` with ``S = S+ + S-``, ``m = m+ - m-``.

    Returns None when the class means coincide (trivial classifier).
    """
    m = gp.mean - gm.mean
    if np.max(np.abs(m)) <= MEAN_TOL * max(1.0, np.max(np.abs(gp.mean)), np.max(np.abs(gm.mean))):
        return None
    if (gp.degenerate or gm.degenerate) and jitter <= 0.0:
        raise SingularCovarianceError(
            "singular covariance; a class has zero spread in feature space (use jitter)")
    S = _class_cov(gp, jitter) + _class_cov(gm, jitter)
    z = sym_solve(S, m)
    return 2.0 * z / float(m @ z)


def _class_cov(g: ClassGaussian, jitter: float) -> np.ndarray:
    C = g.covariance.matrix
    if jitter > 0.0:
        C = C + jitter * np.eye(C.shape[0])
    return C


def compute_thresholds(m_pos: float, s_pos: float, m_neg: float, s_neg: float,
                       log_ratio: float = 0.0) -> DecisionRule:
    """Points where ``C+ N(m+, S+)[t] = C- N(m-, S-)[t]``, with ``log_ratio = ln(C+/C-)``.

    Equal variances give a single threshold; with ``log_ratio == 0`` it is
    ``m- + 1`` exactly, as the unit mean gap constraint puts the midpoint there.
    Unequal variances give two crossings; the class with the smaller variance
    owns the bounded interval between them. If the weighted densities never
    cross the dominant class labels everything.
    """
    if not (s_pos > 0 and s_neg > 0):
        raise ValueError("projected variances must be > 0")
    gap = m_pos - m_neg
    if abs(s_pos - s_neg) <= EQUAL_VARIANCE_RTOL * (s_pos + s_neg):
        s = 0.5 * (s_pos + s_neg)
        if gap == 0.0:
            return DecisionRule("trivial", constant_label=1 if log_ratio >= 0 else -1)
        if log_ratio == 0.0:
            t0 = m_neg + 1.0 if abs(gap - 2.0) <= 1e-6 else m_neg + 0.5 * gap
        else:
            t0 = 0.5 * (m_pos + m_neg) - s * log_ratio / gap
        if gap > 0:
            return DecisionRule("one_threshold", t0=t0)
        # negative class sits above; express as an unbounded interval owned by -1
        return DecisionRule("two_threshold", t_lo=t0, t_hi=math.inf, inside_label=-1)
    # D(t) = 2 ln(C+ N+(t)) - 2 ln(C- N-(t)) = a t^2 + b t + c
    a = 1.0 / s_neg - 1.0 / s_pos
    b = 2.0 * m_pos / s_pos - 2.0 * m_neg / s_neg
    c = m_neg ** 2 / s_neg - m_pos ** 2 / s_pos + math.log(s_neg / s_pos) + 2.0 * log_ratio
    inside = 1 if s_pos < s_neg else -1
    disc = b * b - 4.0 * a * c
    if disc <= 0.0:
        # no crossing: the wider class dominates everywhere
        return DecisionRule("trivial", constant_label=-inside)
    root = math.sqrt(disc)
    q = -0.5 * (b + math.copysign(root, b))
    r1 = q / a
    r2 = c / q if q != 0.0 else -r1
    r1, r2 = _polish(r1, a, b, c), _polish(r2, a, b, c)
    lo, hi = min(r1, r2), max(r1, r2)
    return DecisionRule("two_threshold", t_lo=lo, t_hi=hi, inside_label=inside)


def _polish(t, a, b, c):
    # one Newton step on the quadratic tightens the stable-formula root
    f = (a * t + b) * t + c
    df = 2.0 * a * t + b
    return t - f / df if df != 0.0 else t


def printed_thresholds(m_neg: float, s_pos: float, s_neg: float):
    """Two-threshold closed form valid under ``m+ = m- + 2`` (used as a cross-check)."""
    root = math.sqrt(s_neg * s_pos * (math.log(s_neg / s_pos) * (s_neg - s_pos) + 4.0))
    t1 = m_neg + (2.0 * s_neg + root) / (s_neg - s_pos)
    t2 = m_neg + (2.0 * s_neg - root) / (s_neg - s_pos)
    return min(t1, t2), max(t1, t2)


def fit_projected(Hp, Hm, spec: MapSpec, jitter: float = 0.0, ddof: int = 0,
                  priors=(0.5, 0.5)) -> EemModel:
    """Train on already-mapped class matrices."""
    gp, gm = fit_class_gaussians(Hp, Hm, ddof)
    beta = solve_beta(gp, gm, jitter)
    h = gp.mean.shape[0]
    info = {"n_pos": gp.count, "n_neg": gm.count,
            "eps_pos": gp.covariance.epsilon, "eps_neg": gm.covariance.epsilon}
    if beta is None:
        return EemModel(spec, np.zeros(h), (0.0, 0.0, 0.0, 0.0),
                        DecisionRule("trivial", constant_label=1), tuple(priors), info=info)
    m_pos, m_neg = float(beta @ gp.mean), float(beta @ gm.mean)
    s_pos = float(beta @ _class_cov(gp, jitter) @ beta)
    s_neg = float(beta @ _class_cov(gm, jitter) @ beta)
    if not (s_pos > 0 and s_neg > 0):
        raise SingularCovarianceError("projected class variance is not positive")
    rule = compute_thresholds(m_pos, s_pos, m_neg, s_neg)
    return EemModel(spec, beta, (m_pos, s_pos, m_neg, s_neg), rule, tuple(priors), info=info)


def fit(Xp, Xm, spec: MapSpec, jitter: float = 0.0, ddof: int = 0) -> EemModel:
    """Map both classes with `spec` and train an EEM (EEKM for a Nystrom map)."""
    Xp = np.asarray(Xp, dtype=np.float64)
    Xm = np.asarray(Xm, dtype=np.float64)
    if Xp.shape[0] == 0 or Xm.shape[0] == 0:
        raise TrainingError("both classes required")
    return fit_projected(apply_map(spec, Xp), apply_map(spec, Xm), spec, jitter, ddof)


def project(model: EemModel, X) -> np.ndarray:
    return apply_map(model.map, X) @ model.beta


def predict(model: EemModel, X) -> np.ndarray:
    p = project(model, X)
    return model.rule.apply(p)


def _log_likelihood_ratio(model: EemModel, p):
    # ln N+(p) - ln N-(p) as a quadratic in p, in Horner form so that a huge
    # |p| overflows to a signed infinity rather than inf - inf
    m_pos, s_pos, m_neg, s_neg = model.projected
    a = 1.0 / s_neg - 1.0 / s_pos
    b = m_pos / s_pos - m_neg / s_neg
    c = m_neg * m_neg / s_neg - m_pos * m_pos / s_pos
    with np.errstate(over="ignore"):
        return (0.5 * a * p + b) * p + 0.5 * c - 0.5 * math.log(s_pos / s_neg)


def posterior(model: EemModel, p) -> np.ndarray:
    """``P(+ | projection p)`` from Bayes' rule on the projected class densities.

    Computed in log space, so far tails saturate to 0 or 1 instead of 0/0.
    A trivial model returns its prior.
    """
    p = np.asarray(p, dtype=np.float64)
    pp, pm = model.priors
    if model.trivial:
        return np.full(p.shape, pp / (pp + pm))
    return expit(_log_likelihood_ratio(model, p) + math.log(pp) - math.log(pm))


def predict_proba(model: EemModel, X) -> np.ndarray:
    """``P(+ | x)`` for every row of `X`."""
    return posterior(model, project(model, X))


def cost_sensitive_rule(model: EemModel, c_pos: float, c_neg: float) -> DecisionRule:
    if not (c_pos > 0 and c_neg > 0):
        raise ValueError("costs must be > 0")
    if model.trivial:
        return model.rule
    if c_pos == c_neg:
        return model.rule
    m_pos, s_pos, m_neg, s_neg = model.projected
    return compute_thresholds(m_pos, s_pos, m_neg, s_neg, math.log(c_pos) - math.log(c_neg))


def predict_cost_sensitive(model: EemModel, X, c_pos: float, c_neg: float) -> np.ndarray:
    """``argmax_y C_y P(beta' h | y)``; equals `predict` for equal costs."""
    rule = cost_sensitive_rule(model, c_pos, c_neg)
    return rule.apply(project(model, X))


def collapse_eekm(model: EemModel) -> EemModel:
    """Fold ``K~^(-1/2)`` into the output weights: a plain kernel-neuron SLFN."""
    if model.collapsed or isinstance(model.map, KernelMapSpec):
        raise ValueError("already collapsed")
    if not isinstance(model.map, NystromMapSpec):
        raise ValueError("collapse needs a Nystrom (EEKM) model")
    spec = model.map
    kmap = KernelMapSpec(spec.landmarks, spec.gamma)
    return replace(model, map=kmap, beta=spec.Kroot @ model.beta, collapsed=True)
