"""Segmented markets, profit functions and grid-based shape diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .distributions import SegmentDistribution
from .errors import ConfigurationError, DomainError
from .search import dense_grid

WEIGHT_TOL = 1e-12
SHAPE_RTOL = 1e-9
TOP_ATOM_TOL = 1e-12


@dataclass(frozen=True)
class MarketInstance:
    """Weighted segments sharing one marginal cost.

    ``segments`` is a sequence of ``(weight, distribution)`` pairs.
    ``label`` and ``metadata`` record provenance (family name, solved
    parameters) and take no part in any computation.
    """

    segments: tuple
    cost: float = 0.0
    label: str = ""
    metadata: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        segs = tuple((w, d) for w, d in self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise ValueError("a market needs at least one segment")
        weights = [float(w) for w, _ in segs]
        if min(weights) < 0:
            raise ValueError("segment weights must be nonnegative")
        if abs(math.fsum(weights) - 1.0) > WEIGHT_TOL:
            raise ValueError(f"segment weights sum to {math.fsum(weights)!r}, not 1")
        if self.cost < 0:
            raise ValueError("marginal cost must be nonnegative")
        for _, d in segs:
            if not isinstance(d, SegmentDistribution):
                raise TypeError(f"expected SegmentDistribution, got {type(d).__name__}")
            if self.cost > d.support_hi:
                raise ValueError("marginal cost exceeds the top of a segment's support")

    @property
    def K(self) -> int:
        return len(self.segments)

    @property
    def weights(self) -> np.ndarray:
        return np.array([float(w) for w, _ in self.segments])

    @property
    def dists(self) -> list:
        return [d for _, d in self.segments]

    @property
    def common_support(self) -> bool:
        """Every segment declares the same bounded support interval."""
        lo0, hi0 = self.segments[0][1].support_lo, self.segments[0][1].support_hi
        if not np.isfinite(hi0):
            return False
        return all(d.support_lo == lo0 and d.support_hi == hi0 for d in self.dists)

    @property
    def theta_bar(self):
        """Common upper support end, or ``None`` without common bounded support."""
        return self.segments[0][1].support_hi if self.common_support else None

    @property
    def is_atomic(self) -> bool:
        return all(d.is_atomic for d in self.dists)


def segment_search_hi(dist: SegmentDistribution, cost: float, cap=None):
    """Upper end of the price range searched for one segment.

    Bounded supports use ``support_hi``.  For unbounded supports an explicit
    ``cap`` wins; otherwise a flat profit tail (survival ``A/p`` at zero
    cost) is capped one unit past the last finite breakpoint.
    """
    if dist.bounded:
        return dist.support_hi
    if cap is not None:
        return cap
    pw = dist.piecewise
    name, params = pw.templates[-1], pw.params[-1]
    if name == "ratio_affine" and params[1] == 0 and cost == 0:
        return pw.breakpoints[-2] + 1
    raise ConfigurationError(
        "unbounded support without a flat profit tail; pass an explicit price cap")


def market_search_hi(m: MarketInstance, cap=None):
    return max(segment_search_hi(d, m.cost, cap) for d in m.dists)


def _profit(dist: SegmentDistribution, cost, p):
    p = np.asarray(p)
    return (p - cost) * dist.survival(p)


def segment_profit(dist: SegmentDistribution, cost: float, p):
    """``(p - c) * Pr[theta >= p]``; prices below cost are rejected."""
    arr = np.asarray(p)
    if np.any(arr < cost):
        raise DomainError(f"price {p!r} is below marginal cost {cost!r}")
    out = _profit(dist, cost, arr)
    return float(out) if out.ndim == 0 else out


def market_profit(m: MarketInstance, prices: Sequence) -> float:
    """Weighted sum of segment profits when segment k is charged ``prices[k]``."""
    if len(prices) != m.K:
        raise ValueError(f"expected {m.K} prices, got {len(prices)}")
    return math.fsum(float(w) * float(segment_profit(d, m.cost, p))
                     for (w, d), p in zip(m.segments, prices))


def uniform_profit(m: MarketInstance, p):
    """Total profit when every segment faces the same price ``p`` (vectorized)."""
    p = np.asarray(p)
    total = None
    for w, d in m.segments:
        term = float(w) * _profit(d, m.cost, p)
        total = term if total is None else total + term
    return total


@dataclass(frozen=True)
class ShapeDiagnosis:
    """Grid-certified shape flags, one entry per segment.

    ``regular`` and ``mhr`` are ``None`` where no density is available.
    These are necessary-condition checks on the sampled grid, not proofs.
    """

    concave_profit: tuple
    regular: tuple
    mhr: tuple
    common_support: bool
    grid_used: int

    @property
    def all_concave(self) -> bool:
        return all(self.concave_profit)


def _nonincreasing(y, abs_floor):
    d = np.diff(y)
    tol = SHAPE_RTOL * (np.abs(y[1:]) + np.abs(y[:-1])) + abs_floor
    return bool(np.all(d <= tol))


def profit_is_concave(dist: SegmentDistribution, cost, lo, hi, grid_n: int) -> bool:
    """Chord slopes of the profit curve are nonincreasing on a refined grid.

    The grid is ``grid_n`` uniform points on ``[lo, hi]`` plus a sub-grid in
    every smooth piece and every breakpoint, so narrow pieces are resolved.
    """
    intervals = dist.smooth_intervals()
    per = max(16, grid_n // max(1, len(intervals)))
    x = dense_grid(lo, hi, grid_n, intervals, per, extra=list(dist.breakpoints()))
    if len(x) < 3:
        return True
    y = _profit(dist, cost, x)
    h = np.diff(x)
    s = np.diff(y) / h
    vmax = np.max(np.abs(y))
    width = (hi - lo) if hi > lo else 1.0
    eps = np.finfo(y.dtype).eps
    rise = s[1:] - s[:-1]
    noise = 8 * eps * max(vmax, 1e-300) / np.minimum(h[1:], h[:-1])
    tol = SHAPE_RTOL * (np.abs(s[1:]) + np.abs(s[:-1]) + vmax / width) + noise
    return bool(np.all(rise <= tol))


def _hazard_samples(dist: SegmentDistribution, per: int):
    """Interior points of each density piece with positive density."""
    if dist.is_atomic:
        return None
    pw = dist.piecewise
    pts = []
    b = pw.breakpoints
    for i, name in enumerate(pw.templates):
        if name == "const":
            continue
        a, c = b[i], b[i + 1]
        if not np.isfinite(c):
            c = 2 * a + 1
        t = (np.arange(per) + 0.5) / per
        pts.append(a + (c - a) * t)
    if not pts:
        return None
    x = np.sort(np.concatenate(pts))
    f = pw.pdf(x)
    keep = f > 0
    if not np.any(keep):
        return None
    return x[keep], pw.survival_strict(x[keep]) / f[keep]


def diagnose_shape(m: MarketInstance, grid_n: int = 512, domain_hi=None) -> ShapeDiagnosis:
    """Concavity, regularity and MHR flags for each segment.

    Concavity is tested on ``[c, H]`` with ``H`` the top of the market's
    price range (override with ``domain_hi``).  Profit is zero past a
    segment's support, so positive profit at the top of a bounded support
    (an atom there) is a downward jump and counts against concavity even
    when ``H`` is that support end.  Atoms lighter than ``TOP_ATOM_TOL``
    are below probability resolution and ignored.
    Regularity (nondecreasing ``p - (1-F)/f``) and MHR (nonincreasing
    ``(1-F)/f``) are sampled where each segment has a density.
    """
    if grid_n < 16:
        raise ValueError("grid_n must be at least 16")
    lo = m.cost
    hi = domain_hi if domain_hi is not None else market_search_hi(m)
    concave, regular, mhr = [], [], []
    for d in m.dists:
        top_jump = (d.bounded and float(_profit(d, m.cost, d.support_hi)) > 0
                    and float(d.survival(d.support_hi)) > TOP_ATOM_TOL)
        concave.append(not top_jump and profit_is_concave(d, m.cost, lo, hi, grid_n))
        hz = _hazard_samples(d, max(16, grid_n))
        if hz is None:
            regular.append(None)
            mhr.append(None)
            continue
        x, inv_hazard = hz
        # rounding noise of p - (1-F)/f is a few ulps of the largest sampled price
        floor = 64 * np.finfo(x.dtype).eps * max(x.dtype.type(1), np.max(np.abs(x)))
        phi = x - inv_hazard
        regular.append(_nonincreasing(-phi, floor))
        mhr.append(_nonincreasing(inv_hazard, floor))
    return ShapeDiagnosis(tuple(concave), tuple(regular), tuple(mhr), m.common_support, grid_n)


__all__ = [
    "MarketInstance", "ShapeDiagnosis", "segment_profit", "market_profit", "uniform_profit",
    "diagnose_shape", "profit_is_concave", "segment_search_hi", "market_search_hi",
]
