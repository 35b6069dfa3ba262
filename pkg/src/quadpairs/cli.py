"""quadpairs command line: expsum, verify and count subcommands.

Exit codes: 0 success, 1 a check failed, 2 invalid input, 3 budget refused.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
import warnings
from typing import Sequence

from . import counting, expsums, verify
from .errors import BudgetError, QuadPairsError, ValidationError
from .forms import as_mvec, new_quad_pair

DEFAULT_PAIR = "1,1,1,-1,1"


def _ints(text: str | Sequence[int], n: int | None = None, what: str = "value") -> list[int]:
    if isinstance(text, str):
        try:
            vals = [int(x) for x in text.split(",") if x.strip()]
        except ValueError as exc:
            raise ValidationError(f"bad integer list for {what}: {text!r}") from exc
    else:
        vals = [int(x) for x in text]
    if n is not None and len(vals) != n:
        raise ValidationError(f"{what} needs {n} integers, got {len(vals)}")
    return vals


def _floats(text: str | Sequence[float], what: str) -> list[float]:
    if isinstance(text, str):
        try:
            return [float(x) for x in text.split(",") if x.strip()]
        except ValueError as exc:
            raise ValidationError(f"bad number list for {what}: {text!r}") from exc
    return [float(x) for x in text]


class _Settings:
    """Flags over JSON config over defaults."""

    def __init__(self, args: argparse.Namespace, defaults: dict):
        self.config: dict = {}
        if getattr(args, "config", None):
            try:
                with open(args.config) as fh:
                    self.config = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise ValidationError(f"cannot read config {args.config}: {exc}") from exc
            if not isinstance(self.config, dict):
                raise ValidationError("config must be a JSON object")
        self.args = args
        self.defaults = defaults

    def get(self, key: str):
        val = getattr(self.args, key, None)
        if val is not None:
            return val
        for k in (key, key.replace("_", "-")):
            if k in self.config:
                return self.config[k]
        return self.defaults.get(key)


def _ms(start: float, no_timing: bool) -> float:
    return 0.0 if no_timing else (time.perf_counter() - start) * 1000.0


def _emit(rows: list[dict], fmt: str, out: str | None, extra: dict | None = None) -> None:
    if fmt == "json":
        payload = {**(extra or {}), "rows": rows}
        text = json.dumps(payload, indent=2) + "\n"
    elif fmt == "csv":
        buf = io.StringIO()
        if rows:
            w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
        text = buf.getvalue()
    else:
        raise ValidationError(f"unknown format {fmt!r}")
    _write(text, out)


def _write(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_expsum(args: argparse.Namespace) -> int:
    st = _Settings(args, {"pair": DEFAULT_PAIR, "d": 1, "q": 1, "method": "local", "format": "csv",
                          "budget": expsums.DEFAULT_BUDGET})
    P = new_quad_pair(_ints(st.get("pair"), 5, "--pair"))
    if st.get("m") is None:
        raise ValidationError("--m is required")
    m = as_mvec(_ints(st.get("m"), 6, "--m"))
    d, q = int(st.get("d")), int(st.get("q"))
    method = st.get("method")
    start = time.perf_counter()
    val = expsums.S_dq(P, d, q, m, method=method, budget=int(st.get("budget")))
    ms = _ms(start, args.no_timing)
    row = {"d": d, "q": q, **{f"m{i + 1}": x for i, x in enumerate(m)}, "re": val.re, "im": val.im,
           "method": method, "ms": ms}
    extra = {"pair": list(P.coeffs), "n_terms": val.n_terms}
    _emit([row], st.get("format"), st.get("out"), extra)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    st = _Settings(args, {"pair": DEFAULT_PAIR, "seed": 1, "format": "json"})
    suite = st.get("suite")
    if suite is None:
        raise ValidationError("--suite is required")
    if suite not in verify.EXPLICIT_SUITES + verify.GROWTH_SUITES:
        raise ValidationError(f"unknown suite {suite!r}")
    P = new_quad_pair(_ints(st.get("pair"), 5, "--pair"))
    ranges = st.config.get("ranges")
    window = st.config.get("window")
    if isinstance(window, dict):
        window = {k: tuple(v) for k, v in window.items()}
    elif isinstance(window, list):
        window = tuple(window)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        report = verify.run_suite(suite, P, ranges=ranges, seed=int(st.get("seed")), window=window)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    fmt = st.get("format")
    if fmt == "json":
        _write(report.to_json() + "\n", st.get("out"))
    elif fmt == "csv":
        _write(report.to_csv(), st.get("out"))
    else:
        raise ValidationError(f"unknown format {fmt!r}")
    print(
        f"{report.check_name}: {report.status} (instances={report.instances}, worst_ratio={report.worst_ratio!r}, "
        f"fitted_exponent={report.fitted_exponent!r})",
        file=sys.stderr,
    )
    if suite in verify.GROWTH_SUITES:
        return 0
    return 0 if report.passed else 1


def _weights(st: _Settings) -> counting.WeightSpec:
    w = st.config.get("weights")
    if w is None:
        return counting.WeightSpec()
    if not isinstance(w, dict):
        raise ValidationError("weights must be a JSON object")
    try:
        return counting.WeightSpec.from_dict(w)
    except TypeError as exc:
        raise ValidationError(f"bad weights: {exc}") from exc


def cmd_count(args: argparse.Namespace) -> int:
    st = _Settings(args, {"workers": 1, "format": "csv", "budget": counting.DEFAULT_BUDGET})
    pair, linear = st.get("pair"), st.get("linear")
    if (pair is None) == (linear is None):
        raise ValidationError("give exactly one of --pair or --linear")
    W = _weights(st)
    workers = int(st.get("workers"))
    if workers < 1:
        raise ValidationError("--workers must be >= 1")
    if st.get("B") is not None and st.get("B_list") is not None:
        raise ValidationError("give --B or --B-list, not both")
    if st.get("B") is not None:
        Bs = [float(st.get("B"))]
    elif st.get("B_list") is not None:
        Bs = _floats(st.get("B_list"), "--B-list")
    else:
        raise ValidationError("--B or --B-list is required")
    budget = int(st.get("budget"))
    check = bool(args.check_identity or st.config.get("check_identity", False))
    if check and linear is None:
        raise ValidationError("--check-identity needs --linear")
    L = counting.LinearSystem.from_flat(_ints(linear, 8, "--linear")) if linear is not None else None
    P = counting.reduce_to_pair(L) if L is not None else new_quad_pair(_ints(pair, 5, "--pair"))

    rows = []
    ok = True
    for B in Bs:
        start = time.perf_counter()
        if L is None:
            value = counting.count_S(P, W, B, workers=workers, budget=budget)
        else:
            value = counting.count_T(L, W, B, workers=workers, budget=budget)
        row = {"B": B, "value": value, "ms": _ms(start, args.no_timing), "workers": workers}
        if check:
            s_val = counting.count_S(P, W, math.sqrt(B), workers=workers, budget=budget)
            dev = abs(value - s_val) / max(abs(value), abs(s_val)) if (value or s_val) else 0.0
            row.update({"S_sqrtB": s_val, "rel_dev": dev})
            ok &= dev <= 1e-9
        rows.append(row)
    extra = {"pair": list(P.coeffs)}
    if L is not None:
        extra["linear"] = _ints(linear, 8)
    _emit(rows, st.get("format"), st.get("out"), extra)
    if check:
        print(f"identity T(B) = S(sqrt B): {'ok' if ok else 'FAILED'}", file=sys.stderr)
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quadpairs", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON file with default values for any flag")
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.add_argument("--format", choices=("csv", "json"))
        sp.add_argument("--no-timing", action="store_true", help="write ms=0 so output is reproducible")

    e = sub.add_parser("expsum", help="evaluate S_{d,q}(m)")
    e.add_argument("--pair")
    e.add_argument("--m")
    e.add_argument("--d", type=int)
    e.add_argument("--q", type=int)
    e.add_argument("--method", choices=expsums.METHODS)
    e.add_argument("--budget", type=int)
    common(e)
    e.set_defaults(func=cmd_expsum)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite")
    v.add_argument("--pair")
    v.add_argument("--seed", type=int)
    v.add_argument("--workers", type=int, help="accepted for symmetry; suites run serially")
    common(v)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("count", help="weighted lattice-point counts")
    c.add_argument("--pair")
    c.add_argument("--linear", help="a1,b1,a2,b2,a3,b3,a4,b4")
    c.add_argument("--B", type=float)
    c.add_argument("--B-list", dest="B_list")
    c.add_argument("--workers", type=int)
    c.add_argument("--budget", type=int)
    c.add_argument("--check-identity", action="store_true")
    common(c)
    c.set_defaults(func=cmd_count)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except BudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValidationError, QuadPairsError, ValueError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
