"""Feature maps into the hidden (Hilbert-space) coordinates.

Three kinds of map exist:

* `RandomMapSpec` - ELM-style random neurons ``G(x, w_j, b_j)`` with
  ``sig``, ``nsig`` or ``rbf`` activation.
* `NystromMapSpec` - ``x -> K(X~, X~)^(-1/2) K(X~, x)`` over random landmarks.
* `KernelMapSpec` - the raw landmark kernel ``x -> K(X~, x)``; what a Nystrom
  model becomes once the inverse square root is folded into the output weights.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import expit

from .linalg import EIG_TOL, sym_inv_sqrt

ACTIVATIONS = ("sig", "nsig", "rbf")


@dataclass(frozen=True)
class RandomMapSpec:
    kind: str
    W: np.ndarray
    b: np.ndarray
    seed: int | None = None

    @property
    def h(self) -> int:
        return self.W.shape[0]

    @property
    def d(self) -> int:
        return self.W.shape[1]


@dataclass(frozen=True)
class NystromMapSpec:
    landmarks: np.ndarray
    gamma: float
    Kroot: np.ndarray
    seed: int | None = None

    @property
    def h(self) -> int:
        return self.landmarks.shape[0]

    @property
    def d(self) -> int:
        return self.landmarks.shape[1]


@dataclass(frozen=True)
class KernelMapSpec:
    landmarks: np.ndarray
    gamma: float

    @property
    def h(self) -> int:
        return self.landmarks.shape[0]

    @property
    def d(self) -> int:
        return self.landmarks.shape[1]


MapSpec = Union[RandomMapSpec, NystromMapSpec, KernelMapSpec]


def _check_input(X, d: int) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != d:
        raise ValueError(f"dimension mismatch: map expects {d} features, got {X.shape[1]}")
    return X


def sq_distances(A, B) -> np.ndarray:
    """Pairwise squared Euclidean distances, clipped at zero.

    Passing the same array twice gives an exactly zero diagonal.
    """
    same = A is B
    A = np.asarray(A, dtype=np.float64)
    B = A if same else np.asarray(B, dtype=np.float64)
    # one product: [a, |a|^2, 1] . [-2b, 1, |b|^2]
    Aa = np.empty((A.shape[0], A.shape[1] + 2))
    Aa[:, :-2] = A
    Aa[:, -2] = np.einsum("ij,ij->i", A, A)
    Aa[:, -1] = 1.0
    Bb = np.empty((B.shape[0], B.shape[1] + 2))
    Bb[:, :-2] = -2.0 * B
    Bb[:, -2] = 1.0
    Bb[:, -1] = np.einsum("ij,ij->i", B, B)
    D = Aa @ Bb.T
    np.maximum(D, 0.0, out=D)
    if same:
        np.fill_diagonal(D, 0.0)
    return D


def sample_random_map(d: int, h: int, kind: str = "rbf", seed: int = 0) -> RandomMapSpec:
    """Draw weights and biases uniformly from [0, 1]."""
    if h < 1:
        raise ValueError("h must be >= 1")
    if d < 1:
        raise ValueError("d must be >= 1")
    if kind not in ACTIVATIONS:
        raise ValueError(f"unknown activation {kind!r}")
    rng = np.random.default_rng(seed)
    W = rng.uniform(0.0, 1.0, size=(h, d))
    b = rng.uniform(0.0, 1.0, size=h)
    return RandomMapSpec(kind, W, b, seed)


def apply_random_map(spec: RandomMapSpec, X) -> np.ndarray:
    X = _check_input(X, spec.d)
    if spec.kind == "sig":
        return expit(X @ spec.W.T - spec.b)
    if spec.kind == "nsig":
        return expit(X @ spec.W.T / spec.d - spec.b)
    if spec.kind == "rbf":
        D = sq_distances(X, spec.W)
        D *= -spec.b
        return np.exp(D, out=D)
    raise ValueError(f"unknown activation {spec.kind!r}")


def gaussian_gram(gamma: float, A, B) -> np.ndarray:
    """``exp(-gamma * ||a_i - b_j||^2)`` for all row pairs."""
    if not gamma > 0:
        raise ValueError("gamma must be > 0")
    D = sq_distances(A, B)
    D *= -gamma
    return np.exp(D, out=D)


def fit_nystrom(X, h: int, gamma: float, seed: int = 0, tol: float = EIG_TOL) -> NystromMapSpec:
    """Pick `h` distinct training rows as landmarks and precompute ``K~^(-1/2)``."""
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    if h < 1:
        raise ValueError("h must be >= 1")
    if h > n:
        raise ValueError(f"h={h} exceeds the number of training rows ({n})")
    rng = np.random.default_rng(seed)
    idx = rng.permutation(n)[:h]
    L = X[idx].copy()
    Kroot = sym_inv_sqrt(gaussian_gram(gamma, L, L), tol)
    return NystromMapSpec(L, float(gamma), Kroot, seed)


def apply_nystrom(spec: NystromMapSpec, X) -> np.ndarray:
    X = _check_input(X, spec.d)
    # rows: (Kroot @ K(X~, x))' = K(x, X~) @ Kroot for symmetric Kroot
    return gaussian_gram(spec.gamma, X, spec.landmarks) @ spec.Kroot


def apply_map(spec: MapSpec, X) -> np.ndarray:
    if isinstance(spec, RandomMapSpec):
        return apply_random_map(spec, X)
    if isinstance(spec, NystromMapSpec):
        return apply_nystrom(spec, X)
    if isinstance(spec, KernelMapSpec):
        return gaussian_gram(spec.gamma, _check_input(X, spec.d), spec.landmarks)
    raise TypeError(f"not a feature map: {type(spec).__name__}")
