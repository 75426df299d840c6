"""Demand distributions for a single market segment.

Each kind keeps its natural parameters (for serialization and reading)
and compiles them once into a :class:`~segprice._piecewise.Piecewise`
that does all the evaluation.  Buyers purchase iff value >= price, so
``survival(p)`` is ``Pr[theta >= p]`` and an atom at ``p`` counts as a sale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import ClassVar, Sequence

import numpy as np

from ._piecewise import TEMPLATES, Piecewise

PROB_TOL = 1e-12


class SegmentDistribution:
    """Common interface; concrete kinds are the frozen dataclasses below."""

    kind: ClassVar[str] = ""

    def _build(self) -> Piecewise:  # pragma: no cover - abstract
        raise NotImplementedError

    @property
    def piecewise(self) -> Piecewise:
        return self._pw

    def _init_pw(self):
        object.__setattr__(self, "_pw", self._build())
        _check_survival(self)

    @property
    def support_lo(self):
        return self._pw.lo

    @property
    def support_hi(self):
        return self._pw.hi

    @property
    def bounded(self) -> bool:
        return bool(np.isfinite(self._pw.hi))

    def survival(self, p):
        """``Pr[theta >= p]``."""
        return self._pw.survival(p)

    def survival_strict(self, p):
        """``Pr[theta > p]``."""
        return self._pw.survival_strict(p)

    def cdf(self, p):
        """Right-continuous CDF ``Pr[theta <= p]``."""
        return 1 - self._pw.survival_strict(p)

    @property
    def has_density(self) -> bool:
        """True when some piece carries a (possibly partial) continuous density."""
        return any(t != "const" for t in self._pw.templates)

    def pdf(self, p):
        return self._pw.pdf(p)

    def atoms(self):
        return self._pw.atoms()

    @property
    def is_atomic(self) -> bool:
        """Purely discrete: survival is a step function."""
        return all(t == "const" for t in self._pw.templates)

    def breakpoints(self):
        b = self._pw.breakpoints
        return b[np.isfinite(b)]

    def tail_integral(self, x, y):
        return self._pw.tail_integral(x, y)

    def smooth_intervals(self):
        return self._pw.smooth_intervals()

    def params_dict(self) -> dict:
        raise NotImplementedError


def _check_survival(dist: SegmentDistribution) -> None:
    pw = dist.piecewise
    lo, hi = pw.lo, pw.hi
    if dist.survival(lo) != 1:
        raise ValueError(f"{dist.kind}: survival at support_lo must be 1")
    if np.isfinite(hi) and abs(float(dist.survival_strict(hi))) > PROB_TOL:
        raise ValueError(f"{dist.kind}: F(support_hi) must equal 1")
    pts = [lo]
    for a, b in pw.smooth_intervals():
        pts.extend(np.linspace(a, b, 9))
    if not np.isfinite(hi):
        last = pw.breakpoints[-2]
        pts.extend(last * np.array([1.5, 2.0, 10.0, 1e3]) + 1)
    pts = np.sort(np.array(pts, dtype=pw.dtype))
    s = dist.survival(pts)
    if np.any(s < -PROB_TOL) or np.any(s > 1 + PROB_TOL):
        raise ValueError(f"{dist.kind}: survival outside [0, 1]")
    if np.any(np.diff(s) > PROB_TOL * np.maximum(1, np.abs(s[1:]))):
        raise ValueError(f"{dist.kind}: CDF must be nondecreasing")


@dataclass(frozen=True)
class Uniform(SegmentDistribution):
    lo: float
    hi: float
    kind: ClassVar[str] = "uniform"

    def __post_init__(self):
        if not self.hi > self.lo:
            raise ValueError("Uniform needs hi > lo")
        self._init_pw()

    def _build(self):
        return Piecewise([self.lo, self.hi], [("affine", (1.0, -1.0 / (self.hi - self.lo), self.lo))])

    def params_dict(self):
        return {"lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class TruncatedExponential(SegmentDistribution):
    """Exponential with the given rate conditioned on ``[0, L]``."""

    rate: float
    L: float
    kind: ClassVar[str] = "trunc_exp"

    def __post_init__(self):
        if not (self.rate > 0 and self.L > 0):
            raise ValueError("TruncatedExponential needs rate > 0 and L > 0")
        self._init_pw()

    def _build(self):
        return Piecewise([0.0, self.L], [("trunc_exp", (self.rate, self.L))])

    def params_dict(self):
        return {"rate": self.rate, "L": self.L}


@dataclass(frozen=True)
class Triangular(SegmentDistribution):
    """Quantile-space triangle: continuous on [0, v) plus an atom of mass q at v."""

    v: float
    q: float
    kind: ClassVar[str] = "triangular"

    def __post_init__(self):
        if not (self.v > 0 and 0 < self.q < 1):
            raise ValueError("Triangular needs v > 0 and 0 < q < 1")
        self._init_pw()

    def _build(self):
        d = self.v * self.q / (1 - self.q)
        return Piecewise([0.0, self.v], [("hyperbolic", (d, d))])

    def params_dict(self):
        return {"v": self.v, "q": self.q}


@dataclass(frozen=True)
class Dirac(SegmentDistribution):
    v: float
    kind: ClassVar[str] = "dirac"

    def __post_init__(self):
        if not self.v >= 0:
            raise ValueError("Dirac needs v >= 0")
        self._init_pw()

    def _build(self):
        return Piecewise([self.v], [])

    def params_dict(self):
        return {"v": self.v}


@dataclass(frozen=True)
class Discrete(SegmentDistribution):
    """Finitely many atoms; ``values`` strictly increasing, ``probs`` summing to 1."""

    values: tuple
    probs: tuple
    kind: ClassVar[str] = "discrete"

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        object.__setattr__(self, "probs", tuple(self.probs))
        if len(self.values) != len(self.probs) or not self.values:
            raise ValueError("Discrete needs matching non-empty values/probs")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("Discrete values must be strictly increasing")
        if min(self.probs) <= 0 or abs(math.fsum(self.probs) - 1) > PROB_TOL:
            raise ValueError("Discrete probs must be positive and sum to 1")
        self._init_pw()

    def _build(self):
        tails = [math.fsum(self.probs[i:]) for i in range(1, len(self.probs))]
        return Piecewise(list(self.values), [("const", (t,)) for t in tails])

    def params_dict(self):
        return {"values": list(self.values), "probs": list(self.probs)}


@dataclass(frozen=True)
class PiecewiseCdf(SegmentDistribution):
    """Explicit breakpoints plus one named survival template per interval."""

    bps: tuple
    pieces: tuple = field(default=())
    kind: ClassVar[str] = "piecewise"

    def __post_init__(self):
        object.__setattr__(self, "bps", tuple(self.bps))
        object.__setattr__(self, "pieces", tuple((str(t), tuple(p)) for t, p in self.pieces))
        self._init_pw()

    def _build(self):
        return Piecewise(self.bps, self.pieces)

    def params_dict(self):
        return {"breakpoints": list(self.bps),
                "pieces": [{"template": t, "params": list(p)} for t, p in self.pieces]}


KINDS = {cls.kind: cls for cls in (Uniform, TruncatedExponential, Triangular, Dirac, Discrete, PiecewiseCdf)}


def from_params(kind: str, params: dict) -> SegmentDistribution:
    """Inverse of ``params_dict``; raises ``KeyError``/``ValueError`` on bad input."""
    if kind == "piecewise":
        pieces = [(pc["template"], pc["params"]) for pc in params["pieces"]]
        return PiecewiseCdf(tuple(params["breakpoints"]), tuple(pieces))
    if kind == "discrete":
        return Discrete(tuple(params["values"]), tuple(params["probs"]))
    cls = KINDS[kind]
    return cls(**params)


def affine_survival(breaks: Sequence[float], values: Sequence[float]) -> PiecewiseCdf:
    """Continuous piecewise-linear survival through ``(breaks[i], values[i])``."""
    pieces = []
    for i in range(len(breaks) - 1):
        slope = (values[i + 1] - values[i]) / (breaks[i + 1] - breaks[i])
        pieces.append(("affine", (values[i], slope, breaks[i])))
    return PiecewiseCdf(tuple(breaks), tuple(pieces))


__all__ = [
    "SegmentDistribution", "Uniform", "TruncatedExponential", "Triangular", "Dirac",
    "Discrete", "PiecewiseCdf", "KINDS", "TEMPLATES", "from_params", "affine_survival",
]
