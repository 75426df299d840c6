"""Sequential screening restricted to deterministic threshold allocations.

Each interim type k is served iff its ex-post value reaches a threshold
``tau_k``.  Interim incentive compatibility then reads

    u_k >= u_j + A_k(tau_j) - A_k(tau_k),    A_k(t) = int_t^top (1 - F_k),

a system of difference constraints whose least nonnegative solution is a
longest-path problem.  The seller's value of a profile is
``sum_k alpha_k (tau_k - c) S_k(tau_k) - sum_k alpha_k u_k``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InfeasibleProfile, InvariantViolation, PreconditionError
from .market import MarketInstance, _profit
from .pricing import _segment_optima, optimal_uniform_price, GRID_N

DEFAULT_GRID = 50
EXHAUSTIVE_MAX_K = 3
RENT_TOL = 1e-12
SANDWICH_TOL = 1e-9
MAX_SWEEPS = 200


@dataclass(frozen=True)
class ScreeningInstance:
    """Interim types sharing one bounded value range ``[lo, theta_bar]``."""

    market: MarketInstance
    grid: int = DEFAULT_GRID

    def __post_init__(self):
        if self.market.theta_bar is None:
            raise PreconditionError("screening needs a common bounded support")
        if self.grid < 2:
            raise ValueError("grid must have at least 2 points")

    @property
    def K(self) -> int:
        return self.market.K

    @property
    def theta_bar(self):
        return self.market.theta_bar


@dataclass(frozen=True)
class ScreeningReport:
    """Static, threshold-restricted sequential and discrimination-bound profits.

    ``pi_seq_threshold`` is the best threshold profile found; the true
    dynamic optimum may be higher, so it is a lower bound on it.
    """

    pi_static: float
    pi_seq_threshold: float
    pi_star_bound: float
    thresholds: tuple
    base_utilities: tuple
    exhaustive: bool
    profiles_feasible: int
    profiles_infeasible: int
    backend: str


def static_profit(s: ScreeningInstance, grid_n: int = GRID_N) -> float:
    """Best single threshold for every type, which is the uniform-price optimum."""
    return optimal_uniform_price(s.market, grid_n)[1]


def _tail_table(s: ScreeningInstance, points) -> np.ndarray:
    top = s.theta_bar
    return np.array([[d.tail_integral(t, top) for t in points] for d in s.market.dists], dtype=float)


def _tol(A) -> float:
    return RENT_TOL * max(1.0, float(np.max(np.abs(A))) if A.size else 1.0)


def interim_rent_floor(thresholds, s: ScreeningInstance) -> np.ndarray:
    """Least nonnegative base utilities making the threshold profile interim-IC.

    Raises :class:`InfeasibleProfile` when the constraints contain a
    positive-gain cycle.
    """
    if len(thresholds) != s.K:
        raise ValueError(f"expected {s.K} thresholds, got {len(thresholds)}")
    lo = min(d.support_lo for d in s.market.dists)
    for t in thresholds:
        if not lo <= t <= s.theta_bar:
            raise ValueError(f"threshold {t!r} outside the value range")
    A = _tail_table(s, thresholds)
    u, ok = kernels.rent_floor_from(A, np.arange(s.K), _tol(A))
    if not ok:
        raise InfeasibleProfile("threshold profile admits a positive-gain deviation cycle")
    return np.asarray(u)


def threshold_candidates(s: ScreeningInstance, uniform_price=None, segment_prices=()):
    """Grid on ``[c, theta_bar]`` plus the uniform and per-type optimal prices."""
    c, top = s.market.cost, s.theta_bar
    pts = [float(x) for x in np.linspace(float(c), float(top), s.grid)]
    extra = ([] if uniform_price is None else [uniform_price]) + list(segment_prices)
    pts += [float(p) for p in extra if c <= p <= top]
    return np.unique(np.array(pts))


def _profile_value(A, R, alpha, idx, tol):
    u, ok = kernels.rent_floor_from(A, idx, tol)
    if not ok:
        return None, u
    val = 0.0
    for k in range(len(idx)):
        val = val + R[k, idx[k]]
    for k in range(len(idx)):
        val = val - alpha[k] * u[k]
    return val, u


def _coordinate_ascent(A, R, alpha, start, tol):
    K, n = A.shape
    idx = np.array(start, dtype=np.intp)
    best, best_u = _profile_value(A, R, alpha, idx, tol)
    nf, ni = 1, 0
    for _ in range(MAX_SWEEPS):
        improved = False
        for k in range(K):
            for j in range(n):
                if j == idx[k]:
                    continue
                trial = idx.copy()
                trial[k] = j
                val, u = _profile_value(A, R, alpha, trial, tol)
                if val is None:
                    ni += 1
                    continue
                nf += 1
                if val > best + 1e-15 * max(1.0, abs(best)):
                    best, best_u, idx, improved = val, u, trial, True
        if not improved:
            break
    return best, idx, best_u, nf, ni


def threshold_seq_optimum(s: ScreeningInstance, grid_n: int = GRID_N) -> ScreeningReport:
    """Best threshold profile: exhaustive for up to three types, coordinate ascent beyond.

    Coordinate ascent starts from the common uniform-price profile, so the
    static profit is always a feasible floor.  The sandwich
    ``static <= threshold <= discrimination`` is checked before returning.
    """
    m = s.market
    optima = _segment_optima(m, grid_n)
    pu, pi_static = optimal_uniform_price(m, grid_n, optima)
    pi_star = math.fsum(float(w) * v for w, (_, v) in zip(m.weights, optima))
    pts = threshold_candidates(s, pu, [p for p, _ in optima])
    A = _tail_table(s, pts)
    R = np.array([float(w) * np.asarray(_profit(d, m.cost, pts), dtype=float)
                  for w, d in m.segments])
    alpha = m.weights
    tol = _tol(A)
    exhaustive = s.K <= EXHAUSTIVE_MAX_K
    if exhaustive:
        val, idx, u, nf, ni = kernels.search_profiles(A, R, alpha, tol)
    else:
        start = [int(np.searchsorted(pts, float(pu)))] * s.K
        val, idx, u, nf, ni = _coordinate_ascent(A, R, alpha, start, tol)
    val = float(val)
    scale = max(1.0, abs(pi_star))
    if val < pi_static - SANDWICH_TOL * scale or val > pi_star + SANDWICH_TOL * scale:
        raise InvariantViolation(
            f"screening sandwich failed: static {pi_static!r}, threshold {val!r}, bound {pi_star!r}")
    return ScreeningReport(
        pi_static=float(pi_static),
        pi_seq_threshold=val,
        pi_star_bound=pi_star,
        thresholds=tuple(float(pts[i]) for i in idx),
        base_utilities=tuple(float(x) for x in u),
        exhaustive=exhaustive,
        profiles_feasible=int(nf),
        profiles_infeasible=int(ni),
        backend=kernels.BACKEND,
    )


def check_rent_floor(thresholds, u, s: ScreeningInstance) -> float:
    """Smallest slack over all interim IC constraints and nonnegativity."""
    A = _tail_table(s, thresholds)
    slack = min(float(x) for x in u)
    for k, j in itertools.product(range(s.K), repeat=2):
        slack = min(slack, u[k] - u[j] - (A[k, j] - A[k, k]))
    return slack


__all__ = [
    "ScreeningInstance", "ScreeningReport", "static_profit", "interim_rent_floor",
    "threshold_candidates", "threshold_seq_optimum", "check_rent_floor",
]
