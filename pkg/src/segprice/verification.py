"""Random instance generators and the invariant suite run by ``segprice verify``."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constructions import tight_pair
from .distributions import Discrete, affine_survival
from .market import MarketInstance, diagnose_shape, uniform_profit
from .pricing import PricingReport, analyze

ABS_TOL = 1e-9
QUAD_TOL = 1e-6
PINNED_EPS = 1e-3
PINNED_RANGE = (0.5, 0.5015)


def _concave_survival(rng: np.random.Generator, top: float):
    """Concave piecewise-linear survival on ``[0, top]`` from 1 down to 0.

    Half the time it is a mixture of ``Uniform(a_i, top)`` laws, otherwise a
    ramp with random widths and increasingly steep slopes.
    """
    if rng.random() < 0.5:
        n = int(rng.integers(1, 5))
        starts = np.sort(rng.uniform(0, top, n)) * (rng.random(n) < 0.8)
        mix = rng.dirichlet(np.ones(n))
        breaks = np.unique(np.concatenate([[0.0, top], starts]))
        values = [float(np.dot(mix, np.clip((top - b) / (top - starts), 0, 1))) for b in breaks]
        values[0], values[-1] = 1.0, 0.0
    else:
        n = int(rng.integers(1, 6))
        cuts = np.sort(rng.uniform(0, top, n - 1))
        breaks = np.concatenate([[0.0], cuts, [top]])
        slopes = np.sort(rng.exponential(1.0, n))  # steeper further out
        if rng.random() < 0.3:
            slopes[0] = 0.0  # flat start: everyone buys at low prices
        drop = slopes * np.diff(breaks)
        if drop.sum() <= 0:
            slopes, drop = np.ones(n), np.diff(breaks)
        cum = np.concatenate([[0.0], np.cumsum(drop / drop.sum())])
        values = list(1.0 - cum)
        values[0], values[-1] = 1.0, 0.0
    keep = [0] + [i for i in range(1, len(breaks)) if breaks[i] > breaks[i - 1]]
    b = [float(breaks[i]) for i in keep]
    v = [float(values[i]) for i in keep]
    return affine_survival(b, v)


def random_concave_market(rng: np.random.Generator, max_k: int = 16) -> MarketInstance:
    """Common-support market whose segment profits are certified concave."""
    while True:
        K = int(rng.integers(1, max_k + 1))
        top = float(rng.uniform(0.5, 5.0))
        cost = 0.0 if rng.random() < 0.5 else float(rng.uniform(0, 0.4 * top))
        w = rng.dirichlet(np.ones(K))
        w[-1] = 1.0 - float(np.sum(w[:-1]))
        if w[-1] < 0:
            continue
        m = MarketInstance([(float(wk), _concave_survival(rng, top)) for wk in w], cost=cost,
                           label="random_concave")
        if diagnose_shape(m).all_concave:
            return m


def random_atomic_market(rng: np.random.Generator, max_k: int = 3, max_atoms: int = 5) -> MarketInstance:
    """Purely discrete market; atom values sit on a coarse lattice so ties occur."""
    K = int(rng.integers(1, max_k + 1))
    segs = []
    w = rng.dirichlet(np.ones(K))
    w[-1] = 1.0 - float(np.sum(w[:-1]))
    for k in range(K):
        n = int(rng.integers(1, max_atoms + 1))
        vals = np.sort(rng.choice(np.arange(1, 41), size=n, replace=False)) / 8.0
        probs = rng.dirichlet(np.ones(n))
        probs[-1] = 1.0 - float(np.sum(probs[:-1]))
        if probs[-1] <= 0:
            probs = np.full(n, 1.0 / n)
        segs.append((float(w[k]), Discrete(tuple(float(x) for x in vals), tuple(float(p) for p in probs))))
    cost = 0.0 if rng.random() < 0.7 else float(rng.integers(0, 4)) / 8.0
    return MarketInstance(segs, cost=cost, label="random_atomic")


def check_report(m: MarketInstance, r: PricingReport, concave: bool) -> list:
    """Violated invariants (as messages) for one analyzed market."""
    bad = []
    tol = ABS_TOL * max(1.0, abs(r.pi_star))
    if r.pi_uniform > r.pi_star + tol:
        bad.append(f"uniform profit {r.pi_uniform!r} exceeds discrimination profit {r.pi_star!r}")
    if r.pi_star > 0 and r.ratio < 1.0 / m.K - ABS_TOL:
        bad.append(f"ratio {r.ratio!r} below 1/K")
    peaks = np.array([float(p) for p in r.per_segment_prices])
    best_peak = float(np.max(uniform_profit(m, peaks)))
    if best_peak > r.pi_uniform + tol:
        bad.append(f"a per-segment optimum beats the uniform optimum ({best_peak!r})")
    if r.pi_midpoint is not None:
        if r.pi_midpoint > r.pi_uniform + tol:
            bad.append("midpoint profit exceeds uniform optimum")
        if r.pi_lower_envelope > r.pi_uniform + tol:
            bad.append("lower envelope exceeds uniform optimum")
        if concave:
            if r.ratio < 0.5 - ABS_TOL:
                bad.append(f"half guarantee fails: ratio {r.ratio!r}")
            if r.pi_midpoint < 0.5 * r.pi_star - tol:
                bad.append(f"midpoint price earns less than half: {r.pi_midpoint!r} vs {r.pi_star!r}")
            if r.pi_random_expect < 0.5 * r.pi_star - QUAD_TOL:
                bad.append(f"random pricing earns less than half: {r.pi_random_expect!r}")
    return bad


@dataclass
class VerifyResult:
    seed: int
    n_instances: int
    min_ratio: float = 1.0
    failures: list = field(default_factory=list)  # (index, messages, market)
    pinned_ratio: float = float("nan")
    pinned_ok: bool = False

    @property
    def ok(self) -> bool:
        return not self.failures and self.pinned_ok


def run_verify(seed: int, n_instances: int, max_k: int = 16) -> VerifyResult:
    """Sample concave common-support markets and check every invariant on each."""
    if n_instances < 1:
        raise ValueError("n_instances must be at least 1")
    rng = np.random.default_rng(seed)
    res = VerifyResult(seed, n_instances)
    for i in range(n_instances):
        m = random_concave_market(rng, max_k)
        r = analyze(m)
        res.min_ratio = min(res.min_ratio, r.ratio)
        bad = check_report(m, r, concave=True)
        if bad:
            res.failures.append((i, bad, m))
    pinned = analyze(tight_pair(2.0, PINNED_EPS))
    res.pinned_ratio = pinned.ratio
    res.pinned_ok = PINNED_RANGE[0] <= pinned.ratio <= PINNED_RANGE[1]
    return res


__all__ = [
    "random_concave_market", "random_atomic_market", "check_report", "run_verify", "VerifyResult",
]
