"""Pricing policies: per-segment optima, uniform pricing and its simple proxies."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .distributions import SegmentDistribution
from .errors import ConfigurationError, PreconditionError
from .market import (MarketInstance, _profit, market_search_hi, profit_is_concave,
                     segment_search_hi, uniform_profit)
from .search import bisect_decreasing, dense_grid, golden_max, pick_lowest_tie

GRID_N = 10_000
CONCAVITY_GRID = 1024
QUAD_N = 2048
GOLDEN_RTOL = 1e-10
DISAGREE_RTOL = 1e-6


@dataclass(frozen=True)
class PricingReport:
    """Profits of every pricing policy on one market.

    Fields that need common bounded support are ``None`` when it is absent.
    """

    per_segment_prices: tuple
    per_segment_profits: tuple  # r_k = alpha_k * pi_k(p_k*)
    pi_star: float
    pi_uniform: float
    uniform_price: object
    midpoint_price: Optional[object]
    pi_midpoint: Optional[float]
    pi_lower_envelope: Optional[float]
    pi_random_expect: Optional[float]
    ratio: float
    notes: tuple = ()


def _candidates_in(dist: SegmentDistribution, lo, hi):
    pts = [lo, hi]
    pts += [b for b in dist.breakpoints() if lo <= b <= hi]
    return pts


def _slope(segments, cost, p) -> float:
    """Right derivative of the weighted profit ``sum w (p - c) S(p)`` between atoms."""
    total = 0.0
    for w, d in segments:
        total += float(w) * float(d.survival_strict(p) - (p - cost) * d.pdf(p))
    return total


def _polish(segments, cost, f, a, b):
    """Refine a maximizer bracketed by ``[a, b]``.

    Golden section stalls near ``sqrt(eps)`` on a flat top, so when every
    segment has a density the sign change of the slope is bisected instead
    (kinks show up as sign changes; atoms and breakpoints are evaluated
    separately as exact candidates).
    """
    if all(d.has_density for _, d in segments):
        return bisect_decreasing(lambda p: _slope(segments, cost, p), a, b)
    return golden_max(f, a, b, GOLDEN_RTOL)[0]


def optimal_segment_price(dist: SegmentDistribution, cost: float = 0.0, cap=None,
                          grid_n: int = GRID_N):
    """Profit-maximizing price for one segment and its (unweighted) profit.

    Concave profits are maximized over the whole range by the local polish
    (slope bisection, or golden section without a density); other shapes by
    a dense grid with the same polish around the best cell.  Breakpoints
    and atoms are always evaluated exactly; ties go to the lowest price.
    """
    hi = segment_search_hi(dist, cost, cap)
    lo = cost
    f = lambda p: float(_profit(dist, cost, p))
    if dist.is_atomic:
        cands = [lo] + [a for a, _ in dist.atoms() if a >= lo]
    else:
        cands = _candidates_in(dist, lo, hi)
    n_exact = len(cands)
    if not dist.is_atomic:
        if profit_is_concave(dist, cost, lo, hi, CONCAVITY_GRID):
            cands.append(_polish([(1.0, dist)], cost, f, lo, hi))
        else:
            intervals = dist.smooth_intervals()
            per = max(16, grid_n // max(1, len(intervals)))
            x = dense_grid(lo, hi, grid_n, intervals, per)
            y = np.asarray(_profit(dist, cost, x), dtype=float)
            i = pick_lowest_tie(x, y)
            cands.append(x[i])
            a, b = x[max(i - 1, 0)], x[min(i + 1, len(x) - 1)]
            if b > a:
                cands.append(_polish([(1.0, dist)], cost, f, a, b))
    vals = [f(p) for p in cands]
    exact = [i < n_exact for i in range(len(cands))]
    j = pick_lowest_tie(np.array(cands), vals, exact=exact)
    return cands[j], vals[j]


def _segment_optima(m: MarketInstance, grid_n: int):
    return [optimal_segment_price(d, m.cost, None, grid_n) for d in m.dists]


def _jointly_concave(m: MarketInstance, lo, hi) -> bool:
    """Every segment has a density, ends at ``hi`` and has a concave profit on ``[lo, hi]``."""
    return all(d.has_density and d.bounded and d.support_hi == hi
               and profit_is_concave(d, m.cost, lo, hi, CONCAVITY_GRID) for d in m.dists)


def optimal_uniform_price(m: MarketInstance, grid_n: int = GRID_N, segment_optima=None,
                          notes: Optional[list] = None):
    """Best single price for all segments and the resulting total profit.

    Searches ``[c, max_k sup Theta_k]`` with a dense grid plus a local
    polish (or, when every segment profit is concave on a shared range,
    bisects the slope directly), and evaluates every per-segment optimum,
    breakpoint and atom exactly.  Purely atomic markets are solved by enumerating atoms.
    """
    lo = m.cost
    hi = market_search_hi(m)
    f = lambda p: float(uniform_profit(m, p))
    if m.is_atomic:
        cands = [lo] + sorted({a for d in m.dists for a, _ in d.atoms() if a >= lo})
        vals = np.asarray(uniform_profit(m, np.array(cands)), dtype=float)
        j = pick_lowest_tie(np.array(cands), vals)
        return cands[j], float(vals[j])

    if segment_optima is None:
        segment_optima = _segment_optima(m, grid_n)
    if _jointly_concave(m, lo, hi):
        # a sum of concave profits is concave: the slope changes sign once
        cands = [_polish(m.segments, m.cost, f, lo, hi)]
        grid_best = f(cands[0])
    else:
        intervals = sorted({(a, b) for d in m.dists for a, b in d.smooth_intervals()})
        per = max(3, grid_n // max(1, len(intervals)))
        x = dense_grid(lo, hi, grid_n, intervals, per)
        y = np.asarray(uniform_profit(m, x), dtype=float)
        i = pick_lowest_tie(x, y)
        cands = [x[i]]
        a, b = x[max(i - 1, 0)], x[min(i + 1, len(x) - 1)]
        if b > a:
            cands.append(_polish(m.segments, m.cost, f, a, b))
        grid_best = max(float(y[i]), f(cands[-1]))
    exact = [lo, hi] + [p for p, _ in segment_optima if lo <= p <= hi]
    exact += [bp for d in m.dists for bp in d.breakpoints() if lo <= bp <= hi]
    n_grid = len(cands)
    cands += exact
    vals = np.asarray(uniform_profit(m, np.array(cands)), dtype=float)
    j = pick_lowest_tie(np.array(cands), vals, exact=[i >= n_grid for i in range(len(cands))])
    best_p, best_v = cands[j], float(vals[j])
    if notes is not None and best_v - grid_best > DISAGREE_RTOL * max(1.0, abs(best_v)):
        notes.append("uniform optimum sits at a kink or atom the grid does not resolve "
                     f"(grid {grid_best:.12g} vs exact {best_v:.12g})")
    if not all(d.bounded for d in m.dists):
        beyond = f(2 * hi)
        if beyond > best_v + DISAGREE_RTOL * max(1.0, abs(best_v)):
            raise ConfigurationError("uniform profit still rising past the search cap")
    return best_p, best_v


def _require_common_hi(m: MarketInstance, theta_bar):
    for d in m.dists:
        if d.support_hi != theta_bar:
            raise PreconditionError("segments do not share the upper support end theta_bar")
    if not np.isfinite(theta_bar):
        raise PreconditionError("theta_bar must be finite")


def midpoint_price_profit(m: MarketInstance, theta_bar):
    """The price halfway between cost and ``theta_bar`` and its uniform profit."""
    _require_common_hi(m, theta_bar)
    ps = (m.cost + theta_bar) / 2
    return ps, float(uniform_profit(m, ps))


def envelope_value(p, peaks, peak_profits, cost, theta_bar):
    """Sum of the triangles through ``(c, 0)``, ``(p_k, r_k)``, ``(theta_bar, 0)`` at ``p``."""
    total = 0.0
    for pk, rk in zip(peaks, peak_profits):
        if p <= pk:
            total += rk * float((p - cost) / (pk - cost)) if pk > cost else rk
        else:
            total += rk * float((theta_bar - p) / (theta_bar - pk)) if theta_bar > pk else rk
    return total


def lower_envelope_profit(m: MarketInstance, theta_bar, segment_optima=None,
                          grid_n: int = GRID_N) -> float:
    """Maximum of the summed triangular lower envelopes over the per-segment optima."""
    _require_common_hi(m, theta_bar)
    if segment_optima is None:
        segment_optima = _segment_optima(m, grid_n)
    peaks = [p for p, _ in segment_optima]
    r = [float(w) * v for w, (_, v) in zip(m.weights, segment_optima)]
    return max(envelope_value(p, peaks, r, m.cost, theta_bar) for p in peaks)


def _simpson(x, y):
    h = (x[-1] - x[0]) / (len(x) - 1)
    return float(h / 3 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum()))


def random_pricing_expectation(m: MarketInstance, theta_bar, quad_n: int = QUAD_N) -> float:
    """Expected uniform profit when the price is drawn from ``U[c, theta_bar]``.

    Composite Simpson with the range split at every breakpoint; each
    sub-interval takes its endpoint values as one-sided limits, so atoms
    and kinks do not pollute the quadrature.
    """
    if quad_n < 2:
        raise ValueError("quad_n must be at least 2")
    _require_common_hi(m, theta_bar)
    lo, hi = m.cost, theta_bar
    if hi <= lo:
        return 0.0
    cuts = sorted({lo, hi} | {b for d in m.dists for b in d.breakpoints() if lo < b < hi})
    width = hi - lo
    xs, heads = [], []
    for a, b in zip(cuts[:-1], cuts[1:]):
        n = max(2, int(math.ceil(quad_n * float((b - a) / width))))
        n += n % 2
        heads.append(sum(len(x) for x in xs))
        xs.append(np.linspace(a, b, n + 1))
    x = np.concatenate(xs)
    heads = np.array(heads)
    y = np.zeros(len(x), dtype=np.result_type(x.dtype, np.float64))
    for w, d in m.segments:
        s = d.survival(x)
        s[heads] = d.survival_strict(x[heads])
        y += float(w) * (x - m.cost) * s
    total = 0.0
    for h, seg in zip(heads, xs):
        total += _simpson(seg, y[h:h + len(seg)])
    return total / float(width)


def analyze(m: MarketInstance, grid_n: int = GRID_N, quad_n: int = QUAD_N) -> PricingReport:
    """Every profit in the report for one market."""
    notes: list = []
    optima = list(_segment_optima(m, grid_n))
    pu, vu = optimal_uniform_price(m, grid_n, optima, notes)
    # a segment can never earn more at the uniform price than at its own optimum
    for k, d in enumerate(m.dists):
        at_pu = float(_profit(d, m.cost, pu))
        if at_pu > optima[k][1] * (1 + 1e-12) + 1e-300:
            optima[k] = (pu, at_pu)
    r = [float(w) * v for w, (_, v) in zip(m.weights, optima)]
    pi_star = math.fsum(r)
    if pi_star > 0:
        ratio = vu / pi_star
        if 1 < ratio <= 1 + 1e-12:
            ratio = 1.0
    else:
        ratio = 1.0
    ps = vs = env = rnd = None
    tb = m.theta_bar
    if tb is not None:
        ps, vs = midpoint_price_profit(m, tb)
        env = lower_envelope_profit(m, tb, optima)
        rnd = random_pricing_expectation(m, tb, quad_n)
    return PricingReport(
        per_segment_prices=tuple(p for p, _ in optima),
        per_segment_profits=tuple(r),
        pi_star=pi_star,
        pi_uniform=vu,
        uniform_price=pu,
        midpoint_price=ps,
        pi_midpoint=vs,
        pi_lower_envelope=env,
        pi_random_expect=rnd,
        ratio=ratio,
        notes=tuple(notes),
    )


__all__ = [
    "PricingReport", "optimal_segment_price", "optimal_uniform_price", "midpoint_price_profit",
    "envelope_value", "lower_envelope_profit", "random_pricing_expectation", "analyze",
]
