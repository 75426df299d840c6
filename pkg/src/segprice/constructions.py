"""Named worst-case and boundary instance families.

Every generator returns a :class:`MarketInstance` whose ``metadata``
records the parameters it solved for, so an instance file can be
regenerated bit-for-bit from its construction parameters.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .distributions import Dirac, PiecewiseCdf, Triangular, TruncatedExponential
from .errors import ConstructionError
from .market import MarketInstance

FAMILIES = ("tight_pair", "unbounded_flat", "staircase", "triangular_regular",
            "trunc_exp_mhr", "dirac_worst_case")
KAPPA_START = 0.5
KAPPA_HALVINGS = 60
BISECT_STEPS = 200
KAPPA_MARGIN = 1e-3


@dataclass(frozen=True)
class ConstructionParams:
    family: str
    K: Optional[int] = None
    epsilon: Optional[float] = None
    a: Optional[float] = None
    L: Optional[float] = None
    kappa: Optional[float] = None
    peaks: Optional[tuple] = None

    def __post_init__(self):
        if self.peaks is not None:
            object.__setattr__(self, "peaks", tuple(float(x) for x in self.peaks))
        fam = self.family
        if fam not in FAMILIES:
            raise ValueError(f"unknown family {fam!r}; expected one of {', '.join(FAMILIES)}")
        if fam == "tight_pair":
            if self.a is None or not self.a > 1:
                raise ValueError("tight_pair needs a > 1")
            if self.epsilon is None or not 0 < self.epsilon < 1:
                raise ValueError("tight_pair needs 0 < epsilon < 1")
            if self.kappa is not None and not 0 < self.kappa < 1:
                raise ValueError("kappa must lie in (0, 1)")
        elif fam == "unbounded_flat":
            if not self.peaks and not self.K:
                raise ValueError("unbounded_flat needs peaks or K")
        elif fam == "dirac_worst_case":
            if self.K is None or self.K < 1:
                raise ValueError("dirac_worst_case needs K >= 1")
            if self.epsilon is None or not self.epsilon > 0:
                raise ValueError("dirac_worst_case needs epsilon > 0")
        else:
            if self.K is None or self.K < 2:
                raise ValueError(f"{fam} needs K >= 2")
            if fam == "trunc_exp_mhr" and (self.L is None or not self.L > 1):
                raise ValueError("trunc_exp_mhr needs L > 1")

    def to_dict(self) -> dict:
        d = {k: v for k, v in asdict(self).items() if v is not None}
        if "peaks" in d:
            d["peaks"] = list(d["peaks"])
        return d


def build(params: ConstructionParams) -> MarketInstance:
    fam = params.family
    if fam == "tight_pair":
        return tight_pair(params.a, params.epsilon, params.kappa)
    if fam == "unbounded_flat":
        peaks = params.peaks or tuple(float(k) for k in range(1, params.K + 1))
        return unbounded_flat(peaks)
    if fam == "staircase":
        return staircase(params.K)
    if fam == "triangular_regular":
        return triangular_regular(params.K)
    if fam == "trunc_exp_mhr":
        return trunc_exp_mhr(params.K, params.L)
    return dirac_worst_case(params.K, params.epsilon)


# ----------------------------------------------------------------- tight pair

def _exp_ratio(x):
    return -np.expm1(-x) / x


def solve_exp_ratio(y, dtype=np.float64):
    """Positive ``x`` with ``(1 - e^-x)/x = y`` for ``0 < y < 1``, by bisection."""
    y = dtype(y)
    if not 0 < y < 1:
        raise ValueError("target must lie in (0, 1)")
    lo, hi = dtype(0), 1 / y + 1
    for _ in range(BISECT_STEPS):
        mid = (lo + hi) / 2
        if mid == lo or mid == hi:
            break
        if _exp_ratio(mid) > y:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            break
    return (lo + hi) / 2


def _kappa_concave(a: float, eps: float, kappa: float) -> bool:
    """Sufficient concavity condition, evaluated in logs so huge M never overflows."""
    log_inv_eps = -math.log(eps)
    e_pow = math.exp(-log_inv_eps / kappa)  # eps^(1/kappa), may underflow to 0
    lhs = -1.0 / (eps / a + e_pow)
    num = 1.0 - (a * e_pow + eps)
    if num <= 0:
        return False
    log_m_minus_a = log_inv_eps / kappa
    # log(M - 2a) with M - a = eps^(-1/kappa)
    inner = 1.0 - a * e_pow
    if inner <= 0:
        return False
    log_den = log_m_minus_a + math.log(inner)
    return lhs >= math.log(num) - log_den


def select_kappa(a: float, eps: float) -> float:
    """Halve kappa from 0.5 until the sufficient condition holds, then bisect
    back toward the last failing value to keep M as small as possible."""
    kappa = KAPPA_START
    for _ in range(KAPPA_HALVINGS + 1):
        if _kappa_concave(a, eps, kappa):
            break
        kappa /= 2
    else:
        raise ConstructionError(
            f"no kappa within {KAPPA_HALVINGS} halvings satisfies the concavity condition", "kappa-concavity")
    if kappa == KAPPA_START:
        return kappa
    good, bad = kappa, 2 * kappa
    for _ in range(80):
        mid = (good + bad) / 2
        if _kappa_concave(a, eps, mid):
            good = mid
        else:
            bad = mid
    # at the boundary the two sides agree to within rounding; keep a margin
    return good * (1 - KAPPA_MARGIN)


def tight_pair(a: float, epsilon: float, kappa: Optional[float] = None) -> MarketInstance:
    """Two concave equal-weight segments whose uniform/discrimination ratio is
    at most ``1/2 + epsilon (a + 1) / 2``.

    ``M`` grows like ``exp(a / epsilon)``; when it leaves the float64 range
    the instance is built in ``numpy.longdouble``.
    """
    ConstructionParams("tight_pair", a=a, epsilon=epsilon, kappa=kappa)
    a = float(a)
    eps = float(epsilon)
    x1 = float(solve_exp_ratio(1.0 / a))
    lam1 = x1 / a
    if kappa is None:
        kappa = select_kappa(a, eps)
    elif not _kappa_concave(a, eps, kappa):
        raise ConstructionError(f"kappa={kappa} violates the concavity condition", "kappa-concavity")

    LD = np.longdouble
    with np.errstate(over="ignore"):
        m_minus_a = np.exp(LD(-math.log(eps)) / LD(kappa))
    if not np.isfinite(m_minus_a):
        raise ConstructionError(
            f"M = a + eps^(-1/kappa) with kappa={kappa:.6g} overflows extended precision",
            "M-representable")
    M = LD(a) + m_minus_a
    extended = not np.isfinite(np.float64(M)) or float(M) > 1e300
    num = LD if extended else (lambda v: float(v))
    if not M > 2 * a:
        raise ConstructionError(f"M={M} does not exceed 2a", "M>2a")
    y2 = LD(eps) / LD(a) + 1 / (M - LD(a))
    if not y2 < 1:
        raise ConstructionError("eps/a + 1/(M-a) >= 1", "lambda2-solvable")
    x2 = solve_exp_ratio(y2, LD)
    lam2 = x2 / LD(a)
    base = LD(a) / (M - LD(a)) + LD(eps)  # pi_2(a)
    slope = (1 - base) / (M - 2 * LD(a))
    if not np.exp(-lam2 * LD(a)) >= slope:
        raise ConstructionError("exp(-lambda_2 a) < right slope at a", "slope-at-a")

    a_, M_ = num(a), num(M)
    f1 = PiecewiseCdf((0.0, a_, M_), (
        ("exp_ratio", (num(lam1),)),
        ("ratio_affine", (num(1.0), num(-1 / (M - LD(a))), a_)),
    ))
    top = num(M - LD(a))
    bps2 = [0.0, a_, top, M_]
    pieces2 = [("exp_ratio", (num(lam2),)),
               ("ratio_affine", (num(base), num(slope), a_)),
               ("ratio_affine", (num(1.0), num(-1 / LD(a)), top))]
    if not top < M_:  # a is below the resolution of M: the last piece has zero width
        bps2.pop()
        pieces2.pop()
    f2 = PiecewiseCdf(tuple(bps2), tuple(pieces2))
    meta = {
        "family": "tight_pair", "a": a, "epsilon": eps, "kappa": kappa,
        "lambda1": lam1, "lambda2": float(lam2), "M": M_ if extended else float(M),
        "log_M": float(np.log(M)), "extended_precision": extended,
        "bound": 0.5 + 0.5 * eps * (a + 1),
    }
    return MarketInstance(((0.5, f1), (0.5, f2)), 0.0, "tight_pair", meta)


# ------------------------------------------------------- other named families

def staircase(K: int) -> MarketInstance:
    """Concave triangles with nested, distinct supports; ratio ``1/H_K``."""
    ConstructionParams("staircase", K=K)
    v = [1.0 / (K - k + 1) for k in range(1, K + 1)]
    eps = [(v[k + 1] - v[k]) / 2 for k in range(K - 1)] + [v[-1] * 1e-3]
    segs = []
    for vk, ek in zip(v, eps):
        dist = PiecewiseCdf((0.0, vk, vk + ek), (
            ("const", (1.0,)),
            ("ratio_affine", (vk, -vk / ek, vk)),
        ))
        segs.append((1.0 / K, dist))
    return MarketInstance(tuple(segs), 0.0, "staircase",
                          {"family": "staircase", "K": K, "v": v, "eps_k": eps})


def triangular_regular(K: int) -> MarketInstance:
    """Regular quantile-triangle segments ``v_k = 1/(K-k+1)``, ``q_k = 1/2``."""
    ConstructionParams("triangular_regular", K=K)
    v = [1.0 / (K - k + 1) for k in range(1, K + 1)]
    segs = tuple((1.0 / K, Triangular(vk, 0.5)) for vk in v)
    return MarketInstance(segs, 0.0, "triangular_regular",
                          {"family": "triangular_regular", "K": K, "v": v, "q": 0.5})


def trunc_exp_mhr(K: int, L: float) -> MarketInstance:
    """MHR segments: exponential with rate ``K-k+1`` truncated to ``[0, L]``."""
    ConstructionParams("trunc_exp_mhr", K=K, L=L)
    segs = tuple((1.0 / K, TruncatedExponential(float(K - k + 1), float(L)))
                 for k in range(1, K + 1))
    return MarketInstance(segs, 0.0, "trunc_exp_mhr",
                          {"family": "trunc_exp_mhr", "K": K, "L": float(L)})


def dirac_prices(K: int, epsilon: float):
    r = (1 + epsilon) / epsilon
    p = [epsilon / K * r ** k for k in range(1, K)]
    p.append(r ** (K - 1) / K)
    return p


def dirac_worst_case(K: int, epsilon: float) -> MarketInstance:
    """Point-mass segments whose uniform/discrimination ratio is ``(1+eps)/K``."""
    ConstructionParams("dirac_worst_case", K=K, epsilon=epsilon)
    prices = dirac_prices(K, epsilon)
    weights = [1.0 / (K * p) for p in prices]
    if abs(math.fsum(weights) - 1.0) > 1e-12:
        raise ConstructionError("weights do not telescope to 1", "sum-alpha")
    segs = tuple((w, Dirac(p)) for w, p in zip(weights, prices))
    return MarketInstance(segs, 0.0, "dirac_worst_case",
                          {"family": "dirac_worst_case", "K": K, "epsilon": epsilon,
                           "prices": prices})


def unbounded_flat(peaks) -> MarketInstance:
    """Concave profits on an unbounded support, flat past each peak.

    Below its peak ``p*`` a segment uses the ramp ``h(p) = p - p^2 / (2 p*)``
    (survival ``1 - p / (2 p*)``); above it the survival is ``(p*/2) / p`` so
    profit stays at ``p*/2``.
    """
    peaks = [float(x) for x in peaks]
    if not peaks or min(peaks) <= 0:
        raise ValueError("peaks must be strictly positive")
    if any(b < a for a, b in zip(peaks, peaks[1:])):
        raise ValueError("peaks must be sorted")
    K = len(peaks)
    segs = []
    for pk in peaks:
        dist = PiecewiseCdf((0.0, pk, math.inf), (
            ("affine", (1.0, -1.0 / (2 * pk), 0.0)),
            ("ratio_affine", (pk / 2, 0.0, pk)),
        ))
        segs.append((1.0 / K, dist))
    _check_ramp(peaks)
    return MarketInstance(tuple(segs), 0.0, "unbounded_flat",
                          {"family": "unbounded_flat", "peaks": peaks,
                           "ramp": "h(p) = p - p^2 / (2 p*)"})


def _check_ramp(peaks):
    """h increasing and concave with h(0)=0, h(p)/p -> 1 and h(p)/p decreasing."""
    for pk in peaks:
        x = np.linspace(pk * 1e-6, pk, 257)
        h = x - x * x / (2 * pk)
        ratio = h / x
        if not (np.all(np.diff(h) > 0) and np.all(np.diff(h, 2) <= 1e-12 * pk)
                and np.all(np.diff(ratio) < 0) and abs(ratio[0] - 1) < 1e-5):
            raise ConstructionError("ramp h_k fails its shape requirements", "ramp")


__all__ = [
    "FAMILIES", "ConstructionParams", "build", "tight_pair", "staircase",
    "triangular_regular", "trunc_exp_mhr", "dirac_worst_case", "unbounded_flat",
    "solve_exp_ratio", "select_kappa", "dirac_prices",
]
