"""Sweeps that check the exponential-sum bounds numerically.

Explicit suites compare a computed value against a bound with a stated
constant; every instance must satisfy value <= bound.  Growth suites fit a
log-log slope and compare it with a window.  A slope outside its window by
less than ``WARN_BAND`` is reported as a warning, anything further as a
failure.
"""
from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Callable, Sequence

import numpy as np

from . import expsums as X
from .arith import (
    QuadCongruence,
    gcd_vec,
    jacobi,
    omega,
    primes_upto,
    ramanujan,
    rho_quadratic,
    tau,
    v_p,
)
from .errors import InsufficientData, PreconditionViolated, ValidationError
from .forms import MClass, QuadPair, as_mvec, count_all_classes, count_delta_level, profile, q_poly

EXPLICIT_SUITES = ("lem_rho", "hyp_rho", "need2", "mawkish_bound", "sigma_claim", "mawkish_main")
GROWTH_SUITES = ("need1_sigma", "need3_mixed", "ghoul", "bad_m", "qq_bound")
WARN_BAND = 0.15

# (low, high) slope windows; None means unbounded on that side
DEFAULT_WINDOWS: dict[str, dict[str, tuple[float | None, float | None]]] = {
    "need1_sigma": {"M1": (None, 2.9), "M2": (None, 3.4), "M3": (None, 3.4), "M4": (None, 4.4)},
    "need3_mixed": {"ratio": (None, 0.5)},
    "ghoul": {"ratio": (None, 0.5)},
    "qq_bound": {"ratio": (None, 0.5)},
    "bad_m": {
        "R2": (3.4, 4.4),
        "R3": (3.4, 4.4),
        "R4": (1.6, 2.6),
        "R(A=0)": (1.6, 2.6),
        "R(A=1)": (1.6, 2.6),
    },
}

# pairs with d | q^oo and q | d^oo
_MIXED_PAIRS = ((3, 3), (3, 9), (9, 3), (5, 5), (7, 7), (9, 9), (11, 11), (5, 25), (25, 5), (13, 13), (17, 17))

_PRIME_POWER_GRID = {"primes": (3, 5, 7, 11), "r_max": 2, "n_m": 20}

DEFAULT_RANGES: dict[str, dict] = {
    "lem_rho": {"p_max": 31, "r_max": 3, "n_f": 200, "coef": 10**4},
    "hyp_rho": {"primes": (3, 5, 7), "r_max": 2},
    "need2": {"d_max": 45, "n_m": 50},
    "mawkish_bound": dict(_PRIME_POWER_GRID),
    "sigma_claim": dict(_PRIME_POWER_GRID),
    "mawkish_main": {"p_max": 97, "n_m": 20},
    "need1_sigma": {"x_grid": (2500, 5000, 10000, 20000), "n_m": 5, "mclass": "M1"},
    "need3_mixed": {"pairs": _MIXED_PAIRS, "n_m": 10},
    "ghoul": {"pairs": _MIXED_PAIRS, "n_m": 10},
    "qq_bound": {"q_max": 63, "n_m": 10},
    "bad_m": {"M_grid": tuple(range(2, 13)), "A_list": (0, 1)},
}

BASELINE_RESOURCE = "mawkish_baseline.json"


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


@dataclass
class Row:
    instance: str
    value: float
    bound: float
    ratio: float
    passed: bool


@dataclass
class CheckReport:
    check_name: str
    instances: int
    worst_ratio: float
    worst_instance: str
    fitted_exponent: float | None
    passed: bool
    status: str = "pass"
    window: tuple | None = None
    fits: dict[str, float] = field(default_factory=dict)
    rows: list[Row] = field(default_factory=list)

    @property
    def hard_fail(self) -> bool:
        return self.status == "fail"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        d["rows"] = [{**r, "pass": r.pop("passed")} for r in d["rows"]]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def csv_rows(self) -> list[list]:
        return [[self.check_name, r.instance, r.value, r.bound, r.ratio, r.passed] for r in self.rows]

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if header:
            w.writerow(["check_name", "instance", "value", "bound", "ratio", "pass"])
        w.writerows(self.csv_rows())
        return buf.getvalue()


def _fmt(**kw) -> str:
    return ";".join(f"{k}={v}" for k, v in kw.items())


def _explicit_report(name: str, rows: list[Row]) -> CheckReport:
    if not rows:
        raise InsufficientData(f"{name}: no admissible instances")
    worst = max(rows, key=lambda r: r.ratio)
    ok = all(r.passed for r in rows)
    return CheckReport(name, len(rows), worst.ratio, worst.instance, None, ok, "pass" if ok else "fail", rows=rows)


def _row_le(instance: str, value: int, bound_sq: Fraction | int, bound: float) -> Row:
    """Row for |value| <= sqrt(bound_sq), compared exactly."""
    value = abs(int(value))
    ok = Fraction(value) ** 2 <= bound_sq
    return Row(instance, float(value), bound, value / bound, ok)


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------


def sample_m(P: QuadPair, rng: np.random.Generator, mclass: MClass | str | None = None, bound: int = 20) -> tuple:
    """Frequency vector with coordinates in [-bound, bound], optionally of a given class.

    The sub-box radius is itself random so rare classes (delta a square, Q2* = 0,
    H = 0) are reached by rejection in reasonable time.
    """
    target = None if mclass is None else (MClass[mclass] if isinstance(mclass, str) else MClass(mclass))
    radii = [r for r in (1, 2, 5, bound) if r <= bound] or [bound]
    for _ in range(200_000):
        R = radii[int(rng.integers(len(radii)))]
        m = [int(x) for x in rng.integers(-R, R + 1, size=6)]
        if target in (MClass.M3, MClass.M4) and rng.random() < 0.5:
            k = int(rng.integers(3))
            m[2 * k] = m[2 * k + 1] = 0
        if target is None or profile(P, m).mclass == target:
            return tuple(m)
    raise InsufficientData(f"could not sample a vector of class {target}")


def stratified_ms(P: QuadPair, n: int, seed: int, bound: int = 20) -> list[tuple]:
    """n vectors cycling through the four classes."""
    rng = np.random.default_rng(seed)
    classes = list(MClass)
    return [sample_m(P, rng, classes[i % 4], bound) for i in range(n)]


def class_ms(P: QuadPair, n: int, seed: int, mclass, bound: int = 20) -> list[tuple]:
    rng = np.random.default_rng(seed)
    return [sample_m(P, rng, mclass, bound) for _ in range(n)]


# ---------------------------------------------------------------------------
# explicit-constant suites
# ---------------------------------------------------------------------------


def _random_quadratics(rng: np.random.Generator, n: int, coef: int, p_max: int) -> list[QuadCongruence]:
    """A third uniform, a third with a prime-power content, a third with p-adically close roots."""
    primes = [p for p in primes_upto(p_max) if p > 2]
    out: list[QuadCongruence] = []
    while len(out) < n:
        kind = len(out) % 3
        if kind == 0:
            c = [int(x) for x in rng.integers(-coef, coef + 1, size=3)]
        elif kind == 1:
            p = primes[int(rng.integers(len(primes)))]
            k = p ** int(rng.integers(1, 4))
            c = [k * int(x) for x in rng.integers(-50, 51, size=3)]
        else:
            p = primes[int(rng.integers(len(primes)))]
            a = int(rng.integers(-100, 101))
            b = a + p ** int(rng.integers(1, 5)) * int(rng.integers(1, 10))
            lead = int(rng.integers(1, 20))
            c = [lead, -lead * (a + b), lead * a * b]
        f = QuadCongruence(*c)
        if f.disc != 0:
            out.append(f)
    return out


def _lem_rho(P, rg, seed):
    rng = np.random.default_rng(seed)
    fs = _random_quadratics(rng, rg["n_f"], rg["coef"], rg["p_max"])
    rows = []
    for i, f in enumerate(fs):
        for p in primes_upto(rg["p_max"]):
            if p == 2:
                continue
            v = v_p(f.disc, p)
            for r in range(1, rg["r_max"] + 1):
                rho_f = rho_quadratic(f, p, r)
                rows.append(
                    _row_le(_fmt(f=i, c=(f.c0, f.c1, f.c2), p=p, r=r), rho_f, 4 * p**v, 2 * p ** (v / 2))
                )
    return rows


def _hyp_rho(P, rg, seed):
    rows = []
    for p in rg["primes"]:
        if P.delta_v % p == 0:
            continue
        for r in range(1, rg["r_max"] + 1):
            val = X.rho_count(P, p**r)
            b = (1 + r) ** 3 * p ** (4 * r)
            rows.append(_row_le(_fmt(p=p, r=r), val, b * b, float(b)))
    return rows


def need2_bound(P: QuadPair, d: int, m: Sequence[int]) -> int:
    delta = profile(P, m).delta
    return 4 ** omega(d) * tau(d) ** 2 * d * d * gcd_vec(d, m) * math.gcd(d, delta)


def _need2(P, rg, seed):
    rows = []
    ms = stratified_ms(P, rg["n_m"], seed)
    for m in ms:
        for d in range(1, rg["d_max"] + 1, 2):
            if math.gcd(d, P.delta_v) != 1:
                continue
            val = X.d_local_exact(P, d, m)
            b = need2_bound(P, d, m)
            rows.append(_row_le(_fmt(d=d, m=m), val, b * b, float(b)))
    return rows


def mawkish_bound(P: QuadPair, p: int, r: int, m: Sequence[int]) -> tuple[int, int]:
    """(c, e) with the bound equal to c * p^(e/2)."""
    v = v_p(profile(P, m).delta, p)
    e = 2 * r if v == math.inf else min(2 * r, int(v))
    return 4 * (r + 1), 4 * r + e


def _good_primes(P, primes):
    return [p for p in primes if p % 2 and P.delta_v % p]


def _mawkish_bound(P, rg, seed):
    rows = []
    ms = stratified_ms(P, rg["n_m"], seed)
    for m in ms:
        for p in _good_primes(P, rg["primes"]):
            for r in range(1, rg["r_max"] + 1):
                val = X.dstar_prime_power(P, p, r, tuple(m))
                c, e = mawkish_bound(P, p, r, m)
                rows.append(_row_le(_fmt(p=p, r=r, m=m), val, c * c * p**e, c * p ** (e / 2)))
    return rows


def _sigma_claim(P, rg, seed):
    rng = np.random.default_rng(seed)
    rows = []
    for p in _good_primes(P, rg["primes"]):
        for r in range(1, rg["r_max"] + 1):
            for _ in range(rg["n_m"]):
                m = [int(x) for x in rng.integers(-20, 21, size=6)]
                m[0] *= p**r
                m[1] *= p**r
                prof = profile(P, m)
                val = ramanujan(p**r, prof.sigma)
                v = v_p(prof.delta, p)
                e = 2 * r if v == math.inf else min(2 * r, int(v))
                rows.append(_row_le(_fmt(p=p, r=r, m=tuple(m)), val, p**e, p ** (e / 2)))
    return rows


# ---------------------------------------------------------------------------
# the main term of D*_p
# ---------------------------------------------------------------------------


def mawkish_defects(P: QuadPair, ms: Sequence[Sequence[int]], p_max: int, engine: str = "local") -> list[Row]:
    """|D*_p(m) - p^2 chi_p(-delta(m))| / p over odd p <= p_max coprime to Delta_V H(m).

    ``engine`` is "local" (exact orbit formula) or "grid" (sum over primitive b).
    Each row's ``bound`` holds 1 + chi_p(delta) and ``ratio`` the root count of q_m mod p;
    ``passed`` records whether they agree when p does not divide c0 delta.
    """
    rows = []
    for m in ms:
        prof = profile(P, m)
        for p in primes_upto(p_max):
            if p == 2 or (P.delta_v * prof.H) % p == 0:
                continue
            if engine == "local":
                dstar = float(X.dstar_prime_power(P, p, 1, tuple(m)))
            elif engine == "grid":
                dstar = X.D_star(P, p, m).re
            else:
                raise ValidationError(f"unknown engine {engine!r}")
            defect = abs(dstar - p * p * jacobi(-prof.delta, p)) / p
            roots = rho_quadratic(q_poly(P, m), p, 1)
            expect = 1 + jacobi(prof.delta, p)
            ok = roots == expect or (prof.c0 * prof.delta) % p == 0
            rows.append(Row(_fmt(p=p, m=tuple(m)), defect, float(expect), float(roots), ok))
    return rows


def _main_ms(P: QuadPair, n: int, seed: int) -> list[tuple]:
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        m = tuple(int(x) for x in rng.integers(-20, 21, size=6))
        if profile(P, m).H != 0:
            out.append(m)
    return out


def record_mawkish_baseline(P: QuadPair, seed: int = 1, n_m: int = 20, p_max: int = 97) -> dict:
    """Largest defect found by the grid oracle; what gets written to the baseline file."""
    rows = mawkish_defects(P, _main_ms(P, n_m, seed), p_max, engine="grid")
    worst = max(rows, key=lambda r: r.value)
    return {
        "pair": list(P.coeffs),
        "seed": seed,
        "n_m": n_m,
        "p_max": p_max,
        "max_defect": worst.value,
        "worst_instance": worst.instance,
    }


def load_mawkish_baseline() -> dict:
    return json.loads(resources.files("quadpairs").joinpath("data").joinpath(BASELINE_RESOURCE).read_text())


def _mawkish_main(P, rg, seed):
    base = rg.get("baseline") or load_mawkish_baseline()
    if list(P.coeffs) != base["pair"] or seed != base["seed"] or rg["n_m"] != base["n_m"] or rg["p_max"] != base["p_max"]:
        raise PreconditionViolated("no recorded baseline for this pair/seed/range")
    rows = mawkish_defects(P, _main_ms(P, rg["n_m"], seed), rg["p_max"])
    limit = base["max_defect"] + 1e-6
    # ratio column: defect over baseline; pass also needs the root-count identity
    return [Row(r.instance, r.value, limit, r.value / limit, r.passed and r.value <= limit) for r in rows]


_EXPLICIT: dict[str, Callable] = {
    "lem_rho": _lem_rho,
    "hyp_rho": _hyp_rho,
    "need2": _need2,
    "mawkish_bound": _mawkish_bound,
    "sigma_claim": _sigma_claim,
    "mawkish_main": _mawkish_main,
}


def _ranges(suite: str, ranges: dict | None) -> dict:
    rg = dict(DEFAULT_RANGES[suite])
    if ranges:
        unknown = set(ranges) - set(rg) - {"baseline", "m_list"}
        if unknown:
            raise ValidationError(f"unknown range keys for {suite}: {sorted(unknown)}")
        rg.update(ranges)
    return rg


def check_explicit(suite: str, P: QuadPair, ranges: dict | None = None, seed: int = 1) -> CheckReport:
    if suite not in _EXPLICIT:
        raise ValidationError(f"unknown explicit suite {suite!r}; choose from {EXPLICIT_SUITES}")
    return _explicit_report(suite, _EXPLICIT[suite](P, _ranges(suite, ranges), seed))


# ---------------------------------------------------------------------------
# growth suites
# ---------------------------------------------------------------------------


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """OLS slope of log y against log x."""
    pts = [(x, y) for x, y in zip(xs, ys) if x > 0 and y > 0]
    if len(pts) < 4:
        raise InsufficientData(f"need >= 4 positive grid points, got {len(pts)}")
    lx = np.log([p[0] for p in pts])
    ly = np.log([p[1] for p in pts])
    return float(np.polyfit(lx, ly, 1)[0])


def window_miss(slope: float, window: tuple[float | None, float | None]) -> float:
    lo, hi = window
    miss = 0.0
    if lo is not None and slope < lo:
        miss = lo - slope
    if hi is not None and slope > hi:
        miss = slope - hi
    return miss


def _growth_report(name: str, fits: dict[str, float], windows: dict[str, tuple], rows: list[Row]) -> CheckReport:
    misses = {k: window_miss(s, windows[k]) for k, s in fits.items()}
    worst_key = max(fits, key=lambda k: (misses[k], fits[k]))
    worst = misses[worst_key]
    status = "pass" if worst == 0 else ("warn" if worst < WARN_BAND else "fail")
    if status == "warn":
        warnings.warn(f"{name}: slope {fits[worst_key]:.3f} for {worst_key} misses {windows[worst_key]} by {worst:.3f}")
    hi = windows[worst_key][1]
    for k, s in fits.items():
        lo_k, hi_k = windows[k]
        rows.append(Row(f"slope[{k}]", s, hi_k if hi_k is not None else math.nan,
                        s / hi_k if hi_k else math.nan, misses[k] == 0))
    ratio = fits[worst_key] / hi if hi else math.nan
    return CheckReport(
        name,
        len(rows),
        ratio,
        worst_key,
        fits[worst_key],
        status == "pass",
        status,
        windows[worst_key],
        dict(fits),
        rows,
    )


def sigma_series(P: QuadPair, m: Sequence[int], x_grid: Sequence[int]) -> tuple[list[int], list[int]]:
    """(Sigma(x), max_{y <= x} |Sigma(y)|) at each x of the grid."""
    prof = profile(P, m)
    excl = abs(P.delta_v * prof.N)
    terms = X.sigma_terms(P, m, max(x_grid), excl)
    vals, sups = [], []
    run, sup = 0, 0
    grid = sorted(x_grid)
    k = 0
    for d in range(1, max(grid) + 1):
        run += int(terms[d])
        sup = max(sup, abs(run))
        while k < len(grid) and grid[k] == d:
            vals.append(run)
            sups.append(sup)
            k += 1
    return vals, sups


def _need1_sigma(P, rg, seed, windows):
    ms = rg.get("m_list") or class_ms(P, rg["n_m"], seed, rg["mclass"])
    xs = list(rg["x_grid"])
    fits, wins, rows = {}, {}, []
    for m in ms:
        m = as_mvec(m)
        cls = profile(P, m).mclass.name
        vals, sups = sigma_series(P, m, xs)
        for x, v, s in zip(xs, vals, sups):
            rows.append(Row(_fmt(m=m, x=x, sup=s), float(v), math.nan, math.nan, True))
        key = f"{cls}:{m}"
        fits[key] = loglog_slope(xs, sups)
        wins[key] = windows[cls]
        try:
            pointwise = loglog_slope(xs, [abs(v) for v in vals])
        except InsufficientData:
            pointwise = math.nan
        rows.append(Row(_fmt(m=m, pointwise_slope=True), pointwise, math.nan, math.nan, True))
    return fits, wins, rows


def need3_explicit_part(P: QuadPair, d: int, q: int, m: Sequence[int]) -> int:
    prof = profile(P, m)
    return d * d * q**3 * gcd_vec(d, m) * gcd_vec(q, m) ** 2 * math.gcd(d, prof.delta) * math.gcd(q, prof.q2_star)


def _integral(z: complex) -> float:
    """|z| for a sum known to be a rational integer, with float noise removed."""
    k = round(z.real)
    if abs(z.real - k) < 1e-3 and abs(z.imag) < 1e-3:
        return float(abs(k))
    return abs(z)


def _pair_ratio_fit(name, P, rg, seed, windows, value_fn, bound_fn):
    pairs = [(d, q) for d, q in rg["pairs"] if math.gcd(d, P.delta_v) == 1]
    ms = rg.get("m_list") or stratified_ms(P, rg["n_m"], seed)
    rows, xs, ys = [], [], []
    for d, q in pairs:
        worst = 0.0
        for m in ms:
            val = _integral(value_fn(d, q, m))
            b = bound_fn(d, q, m)
            rows.append(Row(_fmt(d=d, q=q, m=tuple(m)), val, float(b), val / b, True))
            worst = max(worst, val / b)
        xs.append(d * q)
        ys.append(worst)
    # moduli where every sampled sum vanishes carry no growth information
    if sum(1 for y in ys if y > 0) < 4:
        raise InsufficientData(f"{name}: need >= 4 (d, q) pairs with a nonzero sum")
    return {"ratio": loglog_slope(xs, ys)}, {"ratio": windows["ratio"]}, rows


def _need3_mixed(P, rg, seed, windows):
    return _pair_ratio_fit(
        "need3_mixed", P, rg, seed, windows,
        lambda d, q, m: X.M_dq(P, d, q, m).value,
        lambda d, q, m: need3_explicit_part(P, d, q, m),
    )


def _ghoul(P, rg, seed, windows):
    def bound(d, r, m):
        prof = profile(P, m)
        return d**4 * r**3 * math.gcd(d, prof.delta) * math.gcd(r, prof.q2_star)

    return _pair_ratio_fit(
        "ghoul", P, rg, seed, windows,
        lambda d, r, m: X.onion_inner(P, d, r, 1, m).value,
        bound,
    )


def _qq_bound(P, rg, seed, windows):
    qs = [q for q in range(3, rg["q_max"] + 1, 2) if math.gcd(q, P.delta_v) == 1]
    ms = rg.get("m_list") or stratified_ms(P, rg["n_m"], seed)
    rows, ys = [], []
    for q in qs:
        worst = 0.0
        for m in ms:
            val = _integral(X.Q_q(P, q, m).value)
            b = need3_explicit_part(P, 1, q, m)
            rows.append(Row(_fmt(q=q, m=tuple(m)), val, float(b), val / b, True))
            worst = max(worst, val / b)
        ys.append(worst)
    return {"ratio": loglog_slope(qs, ys)}, {"ratio": windows["ratio"]}, rows


def _bad_m(P, rg, seed, windows):
    Ms = list(rg["M_grid"])
    series: dict[str, list[int]] = {"R2": [], "R3": [], "R4": []}
    for A in rg["A_list"]:
        series[f"R(A={A})"] = []
    rows = []
    for M in Ms:
        counts = count_all_classes(P, M)
        for i in (2, 3, 4):
            series[f"R{i}"].append(counts[MClass(i)])
        for A in rg["A_list"]:
            series[f"R(A={A})"].append(count_delta_level(P, A, M))
        for k in series:
            rows.append(Row(_fmt(series=k, M=M), float(series[k][-1]), math.nan, math.nan, True))
    fits = {k: loglog_slope(Ms, v) for k, v in series.items()}
    wins = {k: windows.get(k, windows.get("R(A=0)")) for k in fits}
    return fits, wins, rows


_GROWTH: dict[str, Callable] = {
    "need1_sigma": _need1_sigma,
    "need3_mixed": _need3_mixed,
    "ghoul": _ghoul,
    "qq_bound": _qq_bound,
    "bad_m": _bad_m,
}


def check_growth(
    suite: str,
    P: QuadPair,
    ranges: dict | None = None,
    window: dict | tuple | None = None,
    seed: int = 1,
) -> CheckReport:
    """Fit growth exponents; ``window`` overrides the defaults (a tuple applies to every series)."""
    if suite not in _GROWTH:
        raise ValidationError(f"unknown growth suite {suite!r}; choose from {GROWTH_SUITES}")
    windows = dict(DEFAULT_WINDOWS[suite])
    if isinstance(window, tuple):
        windows = {k: window for k in windows}
    elif window:
        windows.update(window)
    fits, wins, rows = _GROWTH[suite](P, _ranges(suite, ranges), seed, windows)
    return _growth_report(suite, fits, wins, rows)


def run_suite(suite: str, P: QuadPair, ranges: dict | None = None, seed: int = 1, window=None) -> CheckReport:
    if suite in _EXPLICIT:
        return check_explicit(suite, P, ranges, seed)
    if suite in _GROWTH:
        return check_growth(suite, P, ranges, window, seed)
    raise ValidationError(f"unknown suite {suite!r}")
