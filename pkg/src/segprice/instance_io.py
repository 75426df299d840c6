"""Instance files: a named construction or explicit segment data, as JSON.

Numbers survive a round trip bit for bit: float64 values use their
shortest repr, extended-precision values are stored as
``{"longdouble": "<repr>"}`` and non-finite values as the strings
``"inf"``, ``"-inf"`` and ``"nan"``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .constructions import ConstructionParams, build
from .distributions import from_params
from .errors import SpecError
from .market import MarketInstance

SCHEMA_VERSION = 1
_NONFINITE = {"inf": math.inf, "-inf": -math.inf, "nan": math.nan}


@dataclass(frozen=True)
class InstanceSpec:
    """Exactly one of ``construction`` and ``explicit`` is set.

    ``explicit`` holds ``{"cost", "segments": [{"weight", "kind", "params"}]}``;
    ``metadata`` is free-form provenance (solved parameters and the like).
    """

    construction: Optional[ConstructionParams] = None
    explicit: Optional[dict] = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if (self.construction is None) == (self.explicit is None):
            raise SpecError("an instance needs exactly one of construction or explicit")


def _encode(x):
    if isinstance(x, np.longdouble) and np.finfo(np.longdouble).eps < np.finfo(np.float64).eps:
        return {"longdouble": np.format_float_scientific(x, unique=True)}
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
        return x
    if isinstance(x, dict):
        return {str(k): _encode(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_encode(v) for v in x]
    return x


def _decode(x):
    if isinstance(x, dict):
        if set(x) == {"longdouble"}:
            return np.longdouble(x["longdouble"])
        return {k: _decode(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_decode(v) for v in x]
    if isinstance(x, str) and x in _NONFINITE:
        return _NONFINITE[x]
    return x


def to_dict(spec: InstanceSpec) -> dict:
    out = {"schema_version": SCHEMA_VERSION}
    if spec.construction is not None:
        out["construction"] = spec.construction.to_dict()
    else:
        out["explicit"] = spec.explicit
    out["metadata"] = spec.metadata
    return _encode(out)


def dumps(spec: InstanceSpec) -> str:
    return json.dumps(to_dict(spec), indent=2, sort_keys=True) + "\n"


def from_dict(raw) -> InstanceSpec:
    if not isinstance(raw, dict):
        raise SpecError("instance file must hold a JSON object")
    version = raw.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SpecError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
    unknown = set(raw) - {"schema_version", "construction", "explicit", "metadata"}
    if unknown:
        raise SpecError(f"unknown top-level keys: {sorted(unknown)}")
    data = _decode(raw)
    meta = data.get("metadata") or {}
    try:
        if "construction" in data and "explicit" not in data:
            c = data["construction"]
            if not isinstance(c, dict):
                raise SpecError("construction must be an object")
            return InstanceSpec(construction=ConstructionParams(**c), metadata=meta)
        if "explicit" in data and "construction" not in data:
            ex = data["explicit"]
            _market_from_explicit(ex)  # validate eagerly
            return InstanceSpec(explicit=ex, metadata=meta)
    except SpecError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise SpecError(f"invalid instance: {exc}") from exc
    raise SpecError("an instance needs exactly one of construction or explicit")


def loads(text: str) -> InstanceSpec:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"not valid JSON: {exc}") from exc
    return from_dict(raw)


def load(path) -> InstanceSpec:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def dump(spec: InstanceSpec, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(spec))


def _market_from_explicit(ex: dict) -> MarketInstance:
    if not isinstance(ex, dict) or not isinstance(ex.get("segments"), list):
        raise SpecError("explicit instance needs a 'segments' list")
    segs = []
    for seg in ex["segments"]:
        segs.append((seg["weight"], from_params(seg["kind"], dict(seg["params"]))))
    return MarketInstance(segs, cost=ex.get("cost", 0.0), label=ex.get("label", ""))


def build_market(spec: InstanceSpec) -> MarketInstance:
    """The market an instance description builds."""
    if spec.construction is not None:
        return build(spec.construction)
    try:
        return _market_from_explicit(spec.explicit)
    except (TypeError, ValueError, KeyError) as exc:
        raise SpecError(f"invalid instance: {exc}") from exc


def spec_from_market(m: MarketInstance, metadata: Optional[dict] = None) -> InstanceSpec:
    """Explicit description reproducing ``m`` segment by segment."""
    segs = [{"weight": w, "kind": d.kind, "params": d.params_dict()} for w, d in m.segments]
    ex = {"cost": m.cost, "segments": segs}
    if m.label:
        ex["label"] = m.label
    meta = dict(m.metadata if metadata is None else metadata)
    return InstanceSpec(explicit=_decode(_encode(ex)), metadata=_decode(_encode(meta)))


def spec_from_construction(params: ConstructionParams) -> InstanceSpec:
    """Construction description carrying the solved parameters as metadata."""
    m = build(params)
    return InstanceSpec(construction=params, metadata=_decode(_encode(m.metadata)))


__all__ = [
    "SCHEMA_VERSION", "InstanceSpec", "dumps", "loads", "dump", "load", "to_dict", "from_dict",
    "build_market", "spec_from_market", "spec_from_construction",
]
