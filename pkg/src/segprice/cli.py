"""Command-line front end: ``generate``, ``analyze``, ``sweep``, ``verify``, ``screen``.

Exit codes: 0 success, 2 bad arguments or unreadable instance,
3 construction failure, 4 invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass
from typing import Optional

from .constructions import ConstructionParams
from .errors import ConstructionError, InvariantViolation, PreconditionError, SpecError
from .instance_io import (InstanceSpec, build_market, dumps, load, spec_from_construction,
                          spec_from_market)
from .market import MarketInstance, diagnose_shape
from .pricing import GRID_N, analyze
from .screening import DEFAULT_GRID, ScreeningInstance, threshold_seq_optimum
from .verification import run_verify

EXIT_OK, EXIT_USAGE, EXIT_CONSTRUCTION, EXIT_INVARIANT = 0, 2, 3, 4

FAMILY_NAMES = {
    "tight-pair": "tight_pair",
    "staircase": "staircase",
    "triangular": "triangular_regular",
    "trunc-exp": "trunc_exp_mhr",
    "dirac": "dirac_worst_case",
    "unbounded-flat": "unbounded_flat",
}
K_FAMILIES = ("staircase", "triangular", "trunc-exp", "dirac", "unbounded-flat")
RECORD_FIELDS = ("instance_id", "K", "family", "pi_star", "pi_uniform", "pi_midpoint",
                 "pi_lower_envelope", "pi_random_expect", "ratio", "concave_profit",
                 "regular", "mhr", "common_support")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class ReportRecord:
    """One analyzed instance; fields needing common bounded support may be ``None``."""

    instance_id: str
    K: int
    family: str
    pi_star: float
    pi_uniform: float
    pi_midpoint: Optional[float]
    pi_lower_envelope: Optional[float]
    pi_random_expect: Optional[float]
    ratio: float
    concave_profit: bool
    regular: Optional[bool]
    mhr: Optional[bool]
    common_support: bool

    def __post_init__(self):
        for name in ("pi_star", "pi_uniform", "pi_midpoint", "pi_lower_envelope",
                     "pi_random_expect", "ratio"):
            v = getattr(self, name)
            if v is not None and not math.isfinite(v):
                raise InvariantViolation(f"{name} is not finite: {v!r}")
        if not 0 <= self.ratio <= 1:
            raise InvariantViolation(f"ratio {self.ratio!r} outside [0, 1]")


def _all_known(flags):
    known = [f for f in flags if f is not None]
    return all(known) if known else None


def _opt(x):
    return None if x is None else float(x)


def make_record(m: MarketInstance, instance_id: str, family: str, grid_n: int = GRID_N) -> ReportRecord:
    r = analyze(m, grid_n)
    diag = diagnose_shape(m)
    return ReportRecord(
        instance_id=instance_id,
        K=m.K,
        family=family,
        pi_star=float(r.pi_star),
        pi_uniform=float(r.pi_uniform),
        pi_midpoint=_opt(r.pi_midpoint),
        pi_lower_envelope=_opt(r.pi_lower_envelope),
        pi_random_expect=_opt(r.pi_random_expect),
        ratio=float(r.ratio),
        concave_profit=diag.all_concave,
        regular=_all_known(diag.regular),
        mhr=_all_known(diag.mhr),
        common_support=diag.common_support,
    )


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render(obj: dict, fmt: str) -> str:
    if fmt == "machine":
        return json.dumps(obj, sort_keys=True) + "\n"
    width = max(len(k) for k in obj)
    return "".join(f"{k:<{width}}  {_fmt(v) if not isinstance(v, (list, tuple)) else ' '.join(_fmt(x) for x in v)}\n"
                   for k, v in obj.items())


def _params_from_args(family: str, args, K=None) -> ConstructionParams:
    fam = FAMILY_NAMES[family]
    K = args.k if K is None else K
    peaks = None
    if getattr(args, "peaks", None):
        try:
            peaks = tuple(float(x) for x in args.peaks.split(","))
        except ValueError as exc:
            raise UsageError(f"bad --peaks: {exc}") from exc
    try:
        return ConstructionParams(fam, K=K, epsilon=args.eps, a=args.a, L=args.l_cap,
                                  kappa=getattr(args, "kappa", None), peaks=peaks)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _construction_id(p: ConstructionParams) -> str:
    parts = [p.family]
    for key in ("K", "a", "epsilon", "L"):
        v = getattr(p, key)
        if v is not None:
            parts.append(f"{key}={_fmt(v)}")
    return ":".join(parts)


def _load_spec(path: str) -> InstanceSpec:
    try:
        return load(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except SpecError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _spec_identity(spec: InstanceSpec, path: str):
    if spec.construction is not None:
        return _construction_id(spec.construction), spec.construction.family
    iid = spec.metadata.get("id") or (spec.explicit or {}).get("label") or \
        os.path.splitext(os.path.basename(path))[0]
    return str(iid), str(spec.metadata.get("family", "explicit"))


# ------------------------------------------------------------------ commands

def cmd_generate(args) -> int:
    params = _params_from_args(args.family, args)
    spec = spec_from_construction(params)
    if args.explicit:
        spec = spec_from_market(build_market(spec), spec.metadata)
    _emit(dumps(spec), args.out)
    return EXIT_OK


def cmd_analyze(args) -> int:
    spec = _load_spec(args.instance)
    m = build_market(spec)
    iid, fam = _spec_identity(spec, args.instance)
    rec = make_record(m, iid, fam, args.grid)
    _emit(_render(asdict(rec), args.format), args.out)
    return EXIT_OK


def _parse_k_list(text: str):
    try:
        ks = [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --k list: {exc}") from exc
    if not ks:
        raise UsageError("--k needs at least one value")
    return ks


def cmd_sweep(args) -> int:
    if args.family not in K_FAMILIES:
        raise UsageError(f"family {args.family!r} has no K parameter to sweep")
    ks = _parse_k_list(args.k)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RECORD_FIELDS)
    for K in ks:
        params = _params_from_args(args.family, args, K=K)
        spec = spec_from_construction(params)
        rec = make_record(build_market(spec), _construction_id(params), params.family, args.grid)
        row = asdict(rec)
        writer.writerow([_fmt(row[f]) for f in RECORD_FIELDS])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    res = run_verify(args.seed, args.n)
    summary = {
        "seed": args.seed,
        "n_instances": args.n,
        "failures": len(res.failures),
        "min_ratio": res.min_ratio,
        "pinned_tight_pair_ratio": float(res.pinned_ratio),
        "pinned_ok": res.pinned_ok,
        "status": "pass" if res.ok else "fail",
    }
    _emit(_render(summary, args.format), args.out)
    for i, msgs, m in res.failures:
        sys.stderr.write(f"instance {i}: {'; '.join(msgs)}\n")
        sys.stderr.write(dumps(spec_from_market(m)))
    return EXIT_OK if res.ok else EXIT_INVARIANT


def cmd_screen(args) -> int:
    spec = _load_spec(args.instance)
    m = build_market(spec)
    try:
        s = ScreeningInstance(m, grid=args.grid if args.grid is not None else DEFAULT_GRID)
    except (PreconditionError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    rep = threshold_seq_optimum(s)
    iid, _ = _spec_identity(spec, args.instance)
    out = {"instance_id": iid, **asdict(rep)}
    out["thresholds"] = list(out["thresholds"])
    out["base_utilities"] = list(out["base_utilities"])
    del out["backend"]  # keeps output identical across backends
    _emit(_render(out, args.format), args.out)
    return EXIT_OK


# -------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="segprice",
                                description="Uniform pricing versus third-degree price discrimination.")
    sub = p.add_subparsers(dest="command", required=True)

    def family_flags(sp, k_type=int):
        sp.add_argument("--k", type=k_type, default=None, help="number of segments")
        sp.add_argument("--eps", type=float, default=None, help="epsilon (tight-pair, dirac)")
        sp.add_argument("--a", type=float, default=None, help="kink price a > 1 (tight-pair)")
        sp.add_argument("--l-cap", type=float, default=None, dest="l_cap",
                        help="truncation point L (trunc-exp)")
        sp.add_argument("--peaks", default=None, help="comma-separated peak prices (unbounded-flat)")

    g = sub.add_parser("generate", help="write an instance file for a named family")
    g.add_argument("family", choices=sorted(FAMILY_NAMES))
    family_flags(g)
    g.add_argument("--kappa", type=float, default=None, help="fix kappa (tight-pair)")
    g.add_argument("--explicit", action="store_true", help="write segment data instead of the recipe")
    g.add_argument("--out", default=None)
    g.set_defaults(func=cmd_generate)

    a = sub.add_parser("analyze", help="profits and ratio for an instance file")
    a.add_argument("instance")
    a.add_argument("--grid", type=int, default=GRID_N)
    a.add_argument("--format", choices=("table", "machine"), default="table")
    a.add_argument("--out", default=None)
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("sweep", help="CSV of reports over a list of K")
    s.add_argument("family", choices=sorted(FAMILY_NAMES))
    family_flags(s, k_type=str)
    s.add_argument("--grid", type=int, default=GRID_N)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", help="check the invariants on random concave instances")
    v.add_argument("--seed", type=int, default=1)
    v.add_argument("--n", type=int, default=1000)
    v.add_argument("--format", choices=("table", "machine"), default="table")
    v.add_argument("--out", default=None)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("screen", help="sequential-screening profits for an instance file")
    c.add_argument("instance")
    c.add_argument("--grid", type=int, default=None, help=f"threshold grid points (default {DEFAULT_GRID})")
    c.add_argument("--format", choices=("table", "machine"), default="table")
    c.add_argument("--out", default=None)
    c.set_defaults(func=cmd_screen)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"segprice {args.command}: {exc}\n")
        return EXIT_USAGE
    except SpecError as exc:
        sys.stderr.write(f"segprice {args.command}: {exc}\n")
        return EXIT_USAGE
    except ConstructionError as exc:
        sys.stderr.write(f"segprice {args.command}: construction failed [{exc.condition}]: {exc}\n")
        return EXIT_CONSTRUCTION
    except InvariantViolation as exc:
        sys.stderr.write(f"segprice {args.command}: invariant violated: {exc}\n")
        return EXIT_INVARIANT


__all__ = ["main", "build_parser", "ReportRecord", "make_record", "FAMILY_NAMES"]
