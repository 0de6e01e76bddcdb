"""JSON model files.

Floats are written with Python's shortest round-trip ``repr``, so every
64-bit value reads back bit-identical. Non-finite numbers are stored as the
strings ``"inf"``, ``"-inf"`` and ``"nan"`` to keep the file strict JSON.
The timestamp is left null unless one is passed, which keeps files written
from the same seed byte-identical.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .dataset import ScalingTransform
from .eem import DecisionRule, EemModel
from .feature_map import KernelMapSpec, NystromMapSpec, RandomMapSpec
from .welm import WelmModel

FORMAT_VERSION = 1


class ModelFileError(ValueError):
    """Malformed or unsupported model file."""


def _num(x):
    if x is None:
        return None
    x = float(x)
    if math.isfinite(x):
        return x
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")


def _unnum(x):
    # float() also parses the "inf", "-inf" and "nan" strings
    return None if x is None else float(x)


def _arr(a):
    a = np.asarray(a, dtype=np.float64)
    return {"shape": list(a.shape), "data": [_num(v) for v in a.ravel()]}


def _unarr(obj):
    data = np.array([_unnum(v) for v in obj["data"]], dtype=np.float64)
    return data.reshape(obj["shape"])


def _map_to_dict(spec):
    if isinstance(spec, RandomMapSpec):
        return {"kind": "random", "activation": spec.kind, "h": spec.h, "d": spec.d,
                "seed": spec.seed, "W": _arr(spec.W), "b": _arr(spec.b)}
    if isinstance(spec, NystromMapSpec):
        return {"kind": "nystrom", "h": spec.h, "d": spec.d, "seed": spec.seed,
                "gamma": _num(spec.gamma), "landmarks": _arr(spec.landmarks),
                "Kroot": _arr(spec.Kroot)}
    if isinstance(spec, KernelMapSpec):
        return {"kind": "kernel", "h": spec.h, "d": spec.d, "gamma": _num(spec.gamma),
                "landmarks": _arr(spec.landmarks)}
    raise ModelFileError(f"cannot serialize map {type(spec).__name__}")


def _map_from_dict(obj):
    kind = obj.get("kind")
    if kind == "random":
        return RandomMapSpec(obj["activation"], _unarr(obj["W"]), _unarr(obj["b"]), obj.get("seed"))
    if kind == "nystrom":
        return NystromMapSpec(_unarr(obj["landmarks"]), _unnum(obj["gamma"]),
                              _unarr(obj["Kroot"]), obj.get("seed"))
    if kind == "kernel":
        return KernelMapSpec(_unarr(obj["landmarks"]), _unnum(obj["gamma"]))
    raise ModelFileError(f"unknown map kind {kind!r}")


def _rule_to_dict(rule: DecisionRule):
    return {"kind": rule.kind, "t0": _num(rule.t0), "t_lo": _num(rule.t_lo),
            "t_hi": _num(rule.t_hi), "inside_label": rule.inside_label,
            "constant_label": rule.constant_label}


def _rule_from_dict(obj):
    return DecisionRule(obj["kind"], _unnum(obj["t0"]), _unnum(obj["t_lo"]),
                        _unnum(obj["t_hi"]), obj["inside_label"], obj["constant_label"])


def model_to_dict(model, scaling: ScalingTransform | None = None, dataset: str | None = None,
                  seed: int | None = None, timestamp: str | None = None) -> dict:
    """Plain-JSON representation of an EEM/EEKM/WELM model."""
    out = {"format_version": FORMAT_VERSION}
    if isinstance(model, WelmModel):
        out["algorithm"] = "welm"
        out["weighting"] = model.weighting
    elif isinstance(model, EemModel):
        nystrom = isinstance(model.map, (NystromMapSpec, KernelMapSpec))
        out["algorithm"] = "eekm" if nystrom else "eem"
        out["projected"] = {k: _num(v) for k, v in
                            zip(("m_pos", "s_pos", "m_neg", "s_neg"), model.projected)}
        out["rule"] = _rule_to_dict(model.rule)
        out["priors"] = [_num(p) for p in model.priors]
        out["collapsed"] = model.collapsed
    else:
        raise ModelFileError(f"cannot serialize {type(model).__name__}")
    out["map"] = _map_to_dict(model.map)
    out["beta"] = _arr(model.beta)
    out["scaling"] = None if scaling is None else {
        "minimum": _arr(scaling.minimum), "range": _arr(scaling.range)}
    out["metadata"] = {"dataset": dataset, "seed": seed, "timestamp": timestamp}
    return out


def model_from_dict(obj: dict):
    """Inverse of `model_to_dict`; returns ``(model, scaling, metadata)``."""
    try:
        version = obj["format_version"]
        if version != FORMAT_VERSION:
            raise ModelFileError(f"unsupported format_version {version}")
        spec = _map_from_dict(obj["map"])
        beta = _unarr(obj["beta"])
        algo = obj["algorithm"]
        if algo == "welm":
            model = WelmModel(spec, beta, obj.get("weighting", "balanced"))
        elif algo in ("eem", "eekm"):
            pr = obj["projected"]
            projected = tuple(_unnum(pr[k]) for k in ("m_pos", "s_pos", "m_neg", "s_neg"))
            model = EemModel(spec, beta, projected, _rule_from_dict(obj["rule"]),
                             tuple(_unnum(p) for p in obj["priors"]), bool(obj["collapsed"]))
        else:
            raise ModelFileError(f"unknown algorithm {algo!r}")
        sc = obj.get("scaling")
        scaling = None if sc is None else ScalingTransform(_unarr(sc["minimum"]),
                                                           _unarr(sc["range"]))
        return model, scaling, dict(obj.get("metadata") or {})
    except ModelFileError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFileError(f"malformed model file: {exc}") from None


def save_model(path, model, **kw) -> None:
    text = json.dumps(model_to_dict(model, **kw), indent=1, allow_nan=False)
    Path(path).write_text(text + "\n", encoding="utf-8")


def load_model(path):
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"not a model file: {exc}") from None
    return model_from_dict(obj)
