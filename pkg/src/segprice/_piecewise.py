"""Piecewise survival functions built from a small set of closed-form templates.

Every distribution kind compiles to a :class:`Piecewise`: breakpoints
``b_0 < b_1 < ... < b_m`` (``b_m`` may be ``inf``) and one template per
interval.  Survival is the *closed* tail ``Pr[theta >= p]``, which is
left-continuous, so a piece owns the half-open interval ``(b_i, b_{i+1}]``.
The strict tail ``Pr[theta > p]`` is right-continuous and uses
``[b_i, b_{i+1})``.  Jumps between the two at a breakpoint are atoms.

Templates (survival ``S`` on one interval):

==============  ===============  ==========================================
name            params           S(p)
==============  ===============  ==========================================
const           A                A
affine          A, B, p0         A + B (p - p0)
ratio_affine    A, B, p0         (A + B (p - p0)) / p
exp_ratio       lam              (1 - exp(-lam p)) / (lam p)
trunc_exp       r, L             (exp(-r p) - exp(-r L)) / (1 - exp(-r L))
hyperbolic      A, D             A / (p + D)
==============  ===============  ==========================================

Parameters may be ``numpy.longdouble`` for instances whose prices exceed
the float64 exponent range; evaluation then runs in extended precision.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right

import numpy as np
from scipy import special

EULER_GAMMA = 0.57721566490153286061


def _ein(t):
    """Entire exponential integral ``Ein(t) = int_0^t (1 - e^-s)/s ds`` for t >= 0."""
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    small = t < 0.5
    ts = t[small]
    # alternating series, 20 terms is far below float eps for t < 0.5
    acc = np.zeros_like(ts)
    term = np.ones_like(ts)
    for n in range(1, 21):
        term = term * ts / n
        acc += (-1) ** (n + 1) * term / n
    out[small] = acc
    tl = t[~small]
    out[~small] = EULER_GAMMA + np.log(tl) + special.exp1(tl)
    return out


def _s_const(p, A):
    return A + 0 * p


def _f_const(p, A):
    return 0 * p + 0 * A


def _i_const(x, y, A):
    return A * (y - x)


def _s_affine(p, A, B, p0):
    return A + B * (p - p0)


def _f_affine(p, A, B, p0):
    return -B + 0 * p


def _i_affine(x, y, A, B, p0):
    return A * (y - x) + B * ((y - p0) ** 2 - (x - p0) ** 2) / 2


def _s_ratio_affine(p, A, B, p0):
    return (A + B * (p - p0)) / p


def _f_ratio_affine(p, A, B, p0):
    return (A - B * p0) / p / p


def _i_ratio_affine(x, y, A, B, p0):
    return (A - B * p0) * np.log(y / x) + B * (y - x)


def _s_exp_ratio(p, lam):
    x = lam * p
    with np.errstate(invalid="ignore", divide="ignore"):
        s = -np.expm1(-x) / x
    return np.where(x == 0, 1, s)


def _f_exp_ratio(p, lam):
    x = lam * p
    with np.errstate(invalid="ignore", divide="ignore"):
        f = (-np.expm1(-x) - x * np.exp(-x)) / (lam * p) / p
    # series 1 - e^-x (1 + x) = x^2/2 - x^3/3 + ... for tiny x
    return np.where(x < 1e-4, lam * (0.5 - x / 3), f)


def _i_exp_ratio(x, y, lam):
    lam_f = float(lam) if np.ndim(lam) == 0 else np.asarray(lam, dtype=float)
    ex = _ein(np.asarray(lam * x, dtype=float))
    ey = _ein(np.asarray(lam * y, dtype=float))
    return (ey - ex) / lam_f


def _s_trunc_exp(p, r, L):
    return -np.exp(-r * p) * np.expm1(-r * (L - p)) / -np.expm1(-r * L)


def _f_trunc_exp(p, r, L):
    return r * np.exp(-r * p) / -np.expm1(-r * L)


def _i_trunc_exp(x, y, r, L):
    norm = -np.expm1(-r * L)
    head = (np.exp(-r * x) - np.exp(-r * y)) / r
    return (head - (y - x) * np.exp(-r * L)) / norm


def _s_hyperbolic(p, A, D):
    return A / (p + D)


def _f_hyperbolic(p, A, D):
    return A / (p + D) ** 2


def _i_hyperbolic(x, y, A, D):
    return A * np.log((y + D) / (x + D))


TEMPLATES = {
    "const": (1, _s_const, _f_const, _i_const),
    "affine": (3, _s_affine, _f_affine, _i_affine),
    "ratio_affine": (3, _s_ratio_affine, _f_ratio_affine, _i_ratio_affine),
    "exp_ratio": (1, _s_exp_ratio, _f_exp_ratio, _i_exp_ratio),
    "trunc_exp": (2, _s_trunc_exp, _f_trunc_exp, _i_trunc_exp),
    "hyperbolic": (2, _s_hyperbolic, _f_hyperbolic, _i_hyperbolic),
}


def working_dtype(values) -> type:
    """``np.longdouble`` if any value is extended precision, else ``float``."""
    for v in values:
        if isinstance(v, np.longdouble):
            return np.longdouble
    return np.float64


class Piecewise:
    """Canonical piecewise survival function; immutable after construction."""

    __slots__ = ("breakpoints", "templates", "params", "dtype", "_groups", "_blist", "_plist")

    def __init__(self, breakpoints, pieces):
        pieces = [(str(t), tuple(pr)) for t, pr in pieces]
        if len(breakpoints) != len(pieces) + 1:
            raise ValueError("need exactly one more breakpoint than pieces")
        flat = list(breakpoints) + [x for _, pr in pieces for x in pr]
        self.dtype = working_dtype(flat)
        b = np.array([self.dtype(x) for x in breakpoints], dtype=self.dtype)
        if np.any(np.diff(b) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        if not np.isfinite(b[0]) or np.any(~np.isfinite(b[:-1])):
            raise ValueError("only the last breakpoint may be infinite")
        self.breakpoints = b
        self.templates = tuple(t for t, _ in pieces)
        self.params = tuple(pr for _, pr in pieces)
        self._blist = list(b)
        self._plist = [tuple(self.dtype(x) for x in pr) for pr in self.params]
        groups = {}
        for i, (name, pr) in enumerate(pieces):
            if name not in TEMPLATES:
                raise ValueError(f"unknown piece template {name!r}")
            arity = TEMPLATES[name][0]
            if len(pr) != arity:
                raise ValueError(f"template {name!r} takes {arity} params, got {len(pr)}")
            groups.setdefault(name, []).append(i)
        m = len(pieces)
        self._groups = []
        for name, idx in groups.items():
            arity = TEMPLATES[name][0]
            table = np.zeros((m, arity), dtype=self.dtype)
            for i in idx:
                table[i] = [self.dtype(x) for x in self.params[i]]
            mask = np.zeros(m, dtype=bool)
            mask[idx] = True
            self._groups.append((name, mask, table))

    @property
    def n_pieces(self) -> int:
        return len(self.templates)

    @property
    def lo(self):
        return self.breakpoints[0]

    @property
    def hi(self):
        return self.breakpoints[-1]

    def _eval(self, p, which: int, side: str):
        """which: 1 survival, 2 pdf.  side: 'left' closed tail, 'right' strict tail."""
        if np.ndim(p) == 0:
            return self._eval_scalar(p, which, side)
        p = np.asarray(p)
        dt = np.result_type(p.dtype, self.dtype) if p.dtype.kind == "f" else self.dtype
        p = p.astype(dt, copy=False)
        b = self.breakpoints
        out = np.zeros(p.shape, dtype=dt)
        if which == 1:
            below = p <= b[0] if side == "left" else p < b[0]
            out[below] = 1
        if self.n_pieces == 0:
            return out
        idx = np.searchsorted(b, p, side=side) - 1
        inside = (idx >= 0) & (idx < self.n_pieces)
        if side == "left":
            inside &= p > b[0]
        for name, mask, table in self._groups:
            sel = inside & mask[np.clip(idx, 0, self.n_pieces - 1)]
            if not np.any(sel):
                continue
            cols = table[idx[sel]].T
            fn = TEMPLATES[name][which]
            out[sel] = fn(p[sel], *cols)
        return out

    def _eval_scalar(self, p, which: int, side: str):
        # same semantics as the array path without the numpy call overhead
        dt = np.longdouble if (self.dtype is np.longdouble or isinstance(p, np.longdouble)) else np.float64
        p = dt(p)
        b = self._blist
        if p < b[0] or (side == "left" and p == b[0]):
            return dt(1) if which == 1 else dt(0)
        i = (bisect_left(b, p) if side == "left" else bisect_right(b, p)) - 1
        if i >= len(self._plist):
            return dt(0)
        return dt(TEMPLATES[self.templates[i]][which](p, *self._plist[i]))

    def survival(self, p):
        return self._eval(p, 1, "left")

    def survival_strict(self, p):
        return self._eval(p, 1, "right")

    def pdf(self, p):
        """Density of the continuous part; zero outside pieces, undefined at atoms."""
        return self._eval(p, 2, "right")

    def atoms(self, tol: float = 1e-15):
        """(location, mass) for every jump of the survival function."""
        b = self.breakpoints
        finite = b[np.isfinite(b)]
        left = self.survival(finite)
        right = self.survival_strict(finite)
        return [(finite[i], float(left[i] - right[i]))
                for i in range(len(finite)) if left[i] - right[i] > tol]

    def tail_integral(self, x, y):
        """Exact ``int_x^y S(z) dz`` for ``x <= y`` via per-template antiderivatives."""
        if y <= x:
            return 0.0
        b = self.breakpoints
        total = 0.0
        if x < b[0]:
            total += float(min(y, b[0]) - x)
        for i, name in enumerate(self.templates):
            lo = max(x, b[i])
            hi = min(y, b[i + 1])
            if hi <= lo:
                continue
            integ = TEMPLATES[name][3]
            total += float(integ(lo, hi, *[self.dtype(v) for v in self.params[i]]))
        return total

    def smooth_intervals(self):
        """Finite (lo, hi) intervals on which the survival is a single template."""
        b = self.breakpoints
        return [(b[i], b[i + 1]) for i in range(self.n_pieces) if np.isfinite(b[i + 1])]
