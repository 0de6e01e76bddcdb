"""Confusion counts, GMean and Spearman rank correlation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata


@dataclass(frozen=True)
class Confusion:
    TP: int = 0
    FP: int = 0
    TN: int = 0
    FN: int = 0

    @property
    def total(self) -> int:
        return self.TP + self.FP + self.TN + self.FN


def confusion(y_true, y_pred) -> Confusion:
    """Counts with +1 as the positive class."""
    t = np.asarray(y_true).ravel()
    p = np.asarray(y_pred).ravel()
    if t.shape != p.shape:
        raise ValueError(f"length mismatch: {t.size} labels vs {p.size} predictions")
    pos, pred_pos = t == 1, p == 1
    return Confusion(
        TP=int(np.sum(pos & pred_pos)),
        FP=int(np.sum(~pos & pred_pos)),
        TN=int(np.sum(~pos & ~pred_pos)),
        FN=int(np.sum(pos & ~pred_pos)),
    )


def gmean(c: Confusion) -> float:
    """Geometric mean of the two class recalls.

    A class absent from the evaluated labels contributes a factor of 1.
    """
    rp = c.TP / (c.TP + c.FN) if c.TP + c.FN else 1.0
    rn = c.TN / (c.TN + c.FP) if c.TN + c.FP else 1.0
    return math.sqrt(rp * rn)


def gmean_score(y_true, y_pred) -> float:
    return gmean(confusion(y_true, y_pred))


def spearman(a, b) -> float:
    """Pearson correlation of average ranks; 0 when either ranking is constant."""
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.size != b.size:
        raise ValueError("length mismatch")
    if a.size < 2:
        raise ValueError("need at least 2 observations")
    ra = rankdata(a) - (a.size + 1) / 2.0
    rb = rankdata(b) - (b.size + 1) / 2.0
    denom = math.sqrt(float(ra @ ra) * float(rb @ rb))
    if denom == 0.0:
        return 0.0
    return float(np.clip((ra @ rb) / denom, -1.0, 1.0))
