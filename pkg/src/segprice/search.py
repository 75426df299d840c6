"""One-dimensional search primitives used by the pricing optimizers."""

from __future__ import annotations

import numpy as np

INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0
TIE_RTOL = 1e-12


def golden_max(f, lo, hi, rtol: float = 1e-10, max_iter: int = 400):
    """Maximize a unimodal scalar function on ``[lo, hi]`` by golden-section search.

    Stops once the bracket is narrower than ``rtol * max(1, |x|)``.
    Returns ``(x, f(x))`` for the better interior probe; endpoints are the
    caller's business (they are always evaluated as candidates).
    """
    a, b = lo, hi
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a <= rtol * max(1.0, abs(float(x1))):
            break
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = f(x2)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def bisect_decreasing(g, lo, hi, max_iter: int = 200):
    """Last point where a nonincreasing ``g`` is positive on ``[lo, hi]``, to full precision.

    Endpoints are never evaluated (one-sided derivatives there are
    unreliable); an exact zero is returned as soon as it is hit.
    """
    a, b = lo, hi
    for _ in range(max_iter):
        mid = a + (b - a) / 2
        if mid <= a or mid >= b:
            break
        gm = g(mid)
        if gm == 0:
            return mid
        if gm > 0:
            a = mid
        else:
            b = mid
    return a


def pick_lowest_tie(prices, values, rtol: float = TIE_RTOL, exact=None):
    """Index of the lowest price whose value is within ``rtol`` of the maximum.

    ``exact`` optionally flags candidates evaluated at known kinks or atoms;
    when any of them is tied, the lowest tied exact candidate wins so that
    grid noise just below a kink cannot displace it.
    """
    values = np.asarray(values, dtype=float)
    prices = np.asarray(prices)
    best = values.max()
    slack = rtol * max(abs(best), 1e-300)
    ties = np.flatnonzero(values >= best - slack)
    if exact is not None:
        exact = np.asarray(exact, dtype=bool)
        if exact[ties].any():
            ties = ties[exact[ties]]
    return int(ties[np.argmin(prices[ties])])


def dense_grid(lo, hi, n: int, intervals=(), per_interval: int = 0, extra=()):
    """Sorted unique points: ``n`` uniform points on [lo, hi], ``per_interval``
    points inside each given interval (clipped to [lo, hi]) and ``extra`` points."""
    parts = [np.linspace(lo, hi, n)]
    if per_interval:
        for a, b in intervals:
            a, b = max(a, lo), min(b, hi)
            if b > a:
                parts.append(np.linspace(a, b, per_interval))
    ex = [x for x in extra if lo <= x <= hi]
    if ex:
        parts.append(np.array(ex))
    dt = np.result_type(*parts)
    pts = np.unique(np.concatenate([p.astype(dt) for p in parts]))
    return pts
