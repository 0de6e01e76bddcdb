"""Weighted Extreme Learning Machine baseline.

Least squares over random hidden neurons, ``beta = (B H)^+ (B Y)``, with
optional per-class row weights ``B``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .feature_map import MapSpec, apply_map
from .linalg import EIG_TOL, pseudoinverse

WEIGHTINGS = ("none", "balanced", "balanced-ratio")


@dataclass(frozen=True)
class WelmModel:
    map: MapSpec
    beta: np.ndarray
    weighting: str = "balanced"


def row_weights(y, weighting: str) -> np.ndarray:
    """Per-row multipliers applied to both ``H`` and ``Y``.

    ``balanced``: ``sqrt(1 / |class(i)|)``.
    ``balanced-ratio``: square root of ``|bigger class| / |class(i)|``, i.e. the
    least-squares weights equal the class-size ratio.
    """
    y = np.asarray(y)
    if weighting == "none":
        return np.ones(y.shape[0])
    counts = {c: int(np.sum(y == c)) for c in (1, -1)}
    size = np.array([counts[int(v)] for v in y], dtype=np.float64)
    if weighting == "balanced":
        return np.sqrt(1.0 / size)
    if weighting == "balanced-ratio":
        return np.sqrt(max(counts.values()) / size)
    raise ValueError(f"unknown weighting {weighting!r}")


def fit_welm_projected(H, y, spec: MapSpec | None = None, weighting: str = "balanced",
                       tol: float = EIG_TOL) -> WelmModel:
    H = np.asarray(H, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if H.shape[0] < 1:
        raise ValueError("need at least one sample")
    B = row_weights(y, weighting)
    beta = pseudoinverse(B[:, None] * H, tol) @ (B * y)
    return WelmModel(spec, beta, weighting)


def fit_welm(X, y, spec: MapSpec, weighting: str = "balanced") -> WelmModel:
    return fit_welm_projected(apply_map(spec, X), y, spec, weighting)


def project_welm(model: WelmModel, X) -> np.ndarray:
    return apply_map(model.map, X) @ model.beta


def predict_welm(model: WelmModel, X) -> np.ndarray:
    """Sign of the output; an exact zero maps to +1."""
    return np.where(project_welm(model, X) >= 0.0, 1, -1)
