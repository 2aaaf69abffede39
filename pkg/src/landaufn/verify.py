"""Dichotomic range verification with largest-counterexample reporting.

``ok_rec`` finds the largest n in [n1, n2] violating a pointwise predicate
while evaluating it as rarely as possible: a sufficient-condition predicate
``good_interval(n1, n2)`` certifies whole intervals, and the recursion
always enters the upper half first, so the first failure found is the
largest one and the lower half is never visited after that.

Every registered suite evaluates its predicates bound-first: a cheap
certified bracket decides most points, a thin margin escalates to mpmath,
and only a genuinely straddling point falls back to exact evaluation
(table DP below the capacity caps, bounded-exchange h above them). PASSes
are certified with the bracket's error budget folded in; FAILs are
re-established at high precision before being reported as counterexamples.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import mpmath as mp
import numpy as np

from . import landau, logint, primes as pr, sequences as sq, superchampion as sc
from .errors import CapacityError, DomainError, UsageError

TWO_MINUS_SQRT2_3 = (2 - math.sqrt(2)) / 3


@dataclass
class Counters:
    ok_calls: int = 0
    good_interval_calls: int = 0
    escalations: int = 0
    exact_evals: int = 0


@dataclass
class Certificate:
    """Outcome of a range verification run."""

    theorem_id: str
    range: tuple
    verdict: str                 # 'all-pass' | 'largest-fail'
    largest_fail: int | None
    witness: dict | None
    counters: Counters
    bound_trail: list
    wall_time: float

    @property
    def all_pass(self) -> bool:
        return self.verdict == "all-pass"

    def to_json(self) -> str:
        return json.dumps({
            "theorem_id": self.theorem_id,
            "range": list(self.range),
            "verdict": self.verdict,
            "largest_fail": self.largest_fail,
            "witness": self.witness,
            "counters": vars(self.counters),
            "bound_trail": self.bound_trail,
            "wall_time": self.wall_time,
        }, indent=1)

    @property
    def exit_code(self) -> int:
        return 0 if self.all_pass else 1


@dataclass
class TheoremSuite:
    """One verification target: pointwise predicate + interval certificate."""

    name: str
    domain: tuple
    ok: callable                    # n -> bool (exact/decided)
    good_interval: callable         # (n1, n2) -> bool (sufficient condition)
    description: str = ""
    slice_ok: callable | None = None   # (rec1, rec2) -> bool on slices
    witness_fn: callable | None = None


def ok_rec(suite: TheoremSuite, n1: int, n2: int,
           max_calls: int = 20_000_000) -> Certificate:
    """Verify ok on [n1, n2]; report the exact largest failing n if any."""
    if n1 > n2:
        raise UsageError("empty range")
    lo_dom, hi_dom = suite.domain
    if n1 < lo_dom or (hi_dom is not None and n2 > hi_dom):
        raise DomainError(
            f"[{n1}, {n2}] outside {suite.name} domain {suite.domain}")
    t0 = time.time()
    counters = Counters()
    trail: list = []

    def rec(a: int, b: int):
        counters.good_interval_calls += 1
        if counters.good_interval_calls + counters.ok_calls > max_calls:
            raise CapacityError(f"{suite.name}: call budget exhausted on [{a}, {b}]")
        if suite.good_interval(a, b):
            return None
        if a == b:
            counters.ok_calls += 1
            return None if suite.ok(a) else a
        m = (a + b) // 2
        hit = rec(m + 1, b)
        if hit is not None:
            return hit
        return rec(a, m)

    fail = rec(n1, n2)
    witness = None
    if fail is not None and suite.witness_fn is not None:
        witness = suite.witness_fn(fail)
    return Certificate(
        theorem_id=suite.name, range=(n1, n2),
        verdict="all-pass" if fail is None else "largest-fail",
        largest_fail=fail, witness=witness, counters=counters,
        bound_trail=trail, wall_time=time.time() - t0)


def brute_force_largest_fail(suite: TheoremSuite, n1: int, n2: int):
    """Reference evaluation of ok at every point (test oracle)."""
    worst = None
    for n in range(n1, n2 + 1):
        if not suite.ok(n):
            worst = n
    return worst


# ---------------------------------------------------------------------------
# slice scan


@dataclass
class SliceScanReport:
    suite: str
    ell_limit: int
    largest_fail_n1: int | None     # ell(N1) of the last failing slice
    pass_from: int | None           # every slice with ell(N1) >= this passes
    slices: int
    wall_time: float


def slice_scan(suite: TheoremSuite, ell_limit: int,
               ell_start: int = 7) -> SliceScanReport:
    """Walk consecutive superchampion pairs, applying the suite's slice bound.

    Reports the largest ell(N1) whose slice fails the sufficient condition:
    below that, pointwise dichotomy is needed; above it the scan certifies
    the property over every slice.
    """
    if suite.slice_ok is None:
        raise UsageError(f"suite {suite.name} has no slice bound")
    t0 = time.time()
    e = sc.shared_enum()
    e.ensure(ell_limit)
    recs = list(sc.enumerate_superchampions(ell_limit))
    largest_fail = None
    pass_from = recs[0].ell if recs else None
    count = 0
    for r1, r2 in zip(recs, recs[1:]):
        if r1.ell < ell_start:
            continue
        count += 1
        if not suite.slice_ok(r1, r2):
            largest_fail = r1.ell
            pass_from = r2.ell
    return SliceScanReport(suite.name, ell_limit, largest_fail, pass_from,
                           count, time.time() - t0)


# ---------------------------------------------------------------------------
# bound-first predicate helpers


def _phi18_mp(n, prec=140):
    return logint.phi_u(mp.mpf(1) / 8, mp.mpf(n), prec=prec)


def _phi18_f(n):
    return float(logint.phi_u_f64(0.125, np.float64(n)))


def _h_exact_log_mp(n: int):
    """Exact log h(n) at any scale (DP below the cap, exchanges above)."""
    if n <= landau.H_LIMIT:
        return landau.h_exact(n).log_value_mp(140)
    return landau.h_exact_exchange(n).log_h_mp


from functools import lru_cache


@lru_cache(maxsize=1 << 14)
def _g_up(n: int) -> float:
    """Certified upper bound for log g(n): the chord through the slice."""
    loc = sc.locate(n)
    rho = loc.nsecond.rho
    return float(loc.nprime.logN) + (n - loc.nprime.ell) / rho + 1e-9


@lru_cache(maxsize=1 << 14)
def _g_low(n: int) -> float:
    """Certified lower bound for log g(n): a greedy completion of N'."""
    return sc.greedy_completion_log(n) - 1e-9


@lru_cache(maxsize=1 << 12)
def _h_exact_log(n: int) -> float:
    if n <= landau.H_LIMIT:
        return float(landau.logh_table(n)[n])
    return landau.h_exact_exchange(n).log_h


# ---------------------------------------------------------------------------
# suites


def make_minhn_suite() -> TheoremSuite:
    """log h(n) >= Phi_{1/8}(n), the lower-bound side of the growth theorem."""

    def ok(n: int) -> bool:
        br = landau.h_log_bracket(n)
        phi = _phi18_f(n)
        if br.low > phi + 1e-6:
            return True
        if br.high < phi - 1e-6:
            return False
        with mp.workprec(150):
            phi_mp = _phi18_mp(n)
            h_mp = _h_exact_log_mp(n)
            diff = h_mp - phi_mp
            if abs(diff) < mp.mpf(2) ** -40:
                raise CapacityError(f"minhn margin too thin at n={n}")
            return diff >= 0

    def good_interval(n1: int, n2: int) -> bool:
        if n1 < 2:
            return False
        br = landau.h_log_bracket(n1)
        phi = _phi18_f(n2)
        if br.low > phi + 1e-6:
            return True
        if br.high < phi - 1e-4:
            return False
        with mp.workprec(150):
            lo, _ = landau.h_log_bracket_mp(n1)
            return lo - _phi18_mp(n2) > mp.mpf(2) ** -30

    def slice_ok(r1, r2) -> bool:
        # theta(p_k) > Phi_{1/8}(sigma_{k+1}) specialized to prime-sum slices
        return good_interval(r1.ell, r2.ell)

    def witness(n: int) -> dict:
        with mp.workprec(150):
            h = _h_exact_log_mp(n)
            phi = _phi18_mp(n)
            return {"log_h": mp.nstr(h, 20), "phi_1_8": mp.nstr(phi, 20),
                    "gap": mp.nstr(h - phi, 8)}

    return TheoremSuite(
        "minhn", (2, None), ok, good_interval,
        "sqrt(n log n)(1 + (llog n - 1)/(2 log n) - (llog n)^2/(8 log^2 n)) <= log h(n)",
        slice_ok=slice_ok, witness_fn=witness)


def make_maxgn_suite() -> TheoremSuite:
    """log g(n) <= sqrt(n log n)(1 + (llog n - 1)/(2 log n)) for n >= 4."""

    def rhs(n: float) -> float:
        L = math.log(n)
        lam = math.log(L)
        return math.sqrt(n * L) * (1 + (lam - 1) / (2 * L))

    def ok(n: int) -> bool:
        if n <= landau.G_LIMIT:
            g = float(landau.logg_table(n)[n])
            margin = rhs(n) - g
            if abs(margin) < 1e-7 * max(abs(g), 1):
                with mp.workprec(150):
                    L = mp.ln(n)
                    r = mp.sqrt(n * L) * (1 + (mp.ln(L) - 1) / (2 * L))
                    return landau.g_exact(n).log_value_mp(150) <= r
            return margin > 0
        if _g_up(n) <= rhs(n):
            return True
        if _g_low(n) > rhs(n):
            return False
        raise CapacityError(f"maxgn bounds straddle at n={n}")

    def good_interval(n1: int, n2: int) -> bool:
        if n1 < 4:
            return False
        # rhs is increasing; g is nondecreasing
        if n2 <= landau.G_LIMIT:
            return float(landau.logg_table(n2)[n2]) < rhs(n1) - 1e-9
        return _g_up(n2) < rhs(n1) - 1e-9

    def slice_ok(r1, r2) -> bool:
        # z-pruning: endpoint z values in [0, e] push z >= min > 0 slice-wide
        z1 = sq.z_value(r1.ell, r1.logN)
        z2 = sq.z_value(r2.ell, r2.logN)
        return 0 < z1 <= math.e and 0 < z2 <= math.e

    return TheoremSuite("maxgn", (4, None), ok, good_interval,
                        "log g(n) <= sqrt(n log n)(1 + (llog n - 1)/(2 log n))",
                        slice_ok=slice_ok)


def _beta_point_bounds(n: int) -> tuple:
    """(beta_lo, beta_hi) certified from g/h brackets at one n."""
    br = landau.h_log_bracket(n)
    glo, gup = _g_low(n), _g_up(n)
    lo = sq.beta_value(n, max(glo, br.low), br.high)
    hi = sq.beta_value(n, gup, br.low)
    return lo, hi


def make_beta_upper_suite() -> TheoremSuite:
    """beta_n <= 2.43 (the upper-gap theorem's tail condition)."""

    def ok(n: int) -> bool:
        if n <= landau.H_LIMIT:
            g = float(landau.logg_table(n)[n])
            h = float(landau.logh_table(n)[n])
            return sq.beta_value(n, g, h) <= 2.43
        h = _h_exact_log(n)
        if sq.beta_value(n, _g_up(n), h) <= 2.43 - 1e-7:
            return True
        if sq.beta_value(n, _g_low(n), h) > 2.43 + 1e-7:
            return False
        raise CapacityError(
            f"beta_upper needs exact large-n g,h at n={n}: bounded, not exact")

    def good_interval(n1: int, n2: int) -> bool:
        # majorize beta over [n1, n2] from monotone g, h
        if n1 < 7:
            return False
        br1 = landau.h_log_bracket(n1)
        gup = _g_up(n2) if n2 > landau.G_LIMIT else float(landau.logg_table(n2)[n2])
        L2 = math.log(n2)
        bound = (6 * math.sqrt(2) * L2 ** 0.75 * (gup - br1.low) / n1 ** 0.25
                 - 4 * math.log(n1) - math.log(math.log(n1)))
        return bound <= 2.43 - 1e-9

    def slice_ok(r1, r2) -> bool:
        t = pr.shared_table()
        b1 = landau.h_log_bracket(r1.ell, t)
        L2 = math.log(r2.ell)
        bound = (6 * math.sqrt(2) * L2 ** 0.75 * (r2.logN - b1.low) / r1.ell ** 0.25
                 - 4 * math.log(r1.ell) - math.log(math.log(r1.ell)))
        return bound <= 2.43 - 1e-9

    return TheoremSuite("beta_upper", (7, None), ok, good_interval,
                        "beta_n <= 2.43", slice_ok=slice_ok)


def make_beta_lower_suite() -> TheoremSuite:
    """beta_n > -11.6 (the lower-gap theorem's tail condition)."""

    def ok(n: int) -> bool:
        if n <= landau.H_LIMIT:
            g = float(landau.logg_table(n)[n])
            h = float(landau.logh_table(n)[n])
            return sq.beta_value(n, g, h) > -11.6
        h = _h_exact_log(n)
        if sq.beta_value(n, _g_low(n), h) > -11.6 + 1e-7:
            return True
        if sq.beta_value(n, _g_up(n), h) <= -11.6 - 1e-7:
            return False
        raise CapacityError(f"beta_lower undecided by bounds at n={n}")

    def good_interval(n1: int, n2: int) -> bool:
        if n1 < 7:
            return False
        # requires g(n1) >= h(n2); use certified ends
        g1 = _g_low(n1) if n1 > landau.G_LIMIT else float(landau.logg_table(n1)[n1])
        br2 = landau.h_log_bracket(n2)
        if g1 <= br2.high:
            return False
        L1 = math.log(n1)
        bound = (6 * math.sqrt(2) * L1 ** 0.75 * (g1 - br2.high) / n2 ** 0.25
                 - 4 * math.log(n2) - math.log(math.log(n2)))
        return bound > -11.6 + 1e-9

    def slice_ok(r1, r2) -> bool:
        t = pr.shared_table()
        b2 = landau.h_log_bracket(r2.ell, t)
        if r1.logN <= b2.high:
            return False
        L1 = math.log(r1.ell)
        bound = (6 * math.sqrt(2) * L1 ** 0.75 * (r1.logN - b2.high) / r2.ell ** 0.25
                 - 4 * math.log(r2.ell) - math.log(math.log(r2.ell)))
        return bound > -11.6 + 1e-9

    return TheoremSuite("beta_lower", (2, None), ok, good_interval,
                        "beta_n > -11.6", slice_ok=slice_ok)


def make_d_max_suite(threshold: float = 0.62059) -> TheoremSuite:
    """d_n < threshold (locating the global maximum of the gap ratio)."""

    def ok(n: int) -> bool:
        if n <= landau.H_LIMIT:
            return sq.gap_ratio(n) < threshold
        h = _h_exact_log(n)
        if sq.d_value(n, _g_up(n), h) < threshold - 1e-9:
            return True
        if sq.d_value(n, _g_low(n), h) >= threshold + 1e-9:
            return False
        raise CapacityError(f"d_max undecided by bounds at n={n}")

    def good_interval(n1: int, n2: int) -> bool:
        if n1 < 2:
            return False
        br1 = landau.h_log_bracket(n1) if n1 >= 2 else None
        gup = _g_up(n2) if n2 > landau.G_LIMIT else float(landau.logg_table(n2)[n2])
        m = (gup - br1.low) / (n1 * math.log(n1)) ** 0.25
        return m < threshold - 1e-12

    def slice_ok(r1, r2) -> bool:
        t = pr.shared_table()
        b1 = landau.h_log_bracket(r1.ell, t)
        m = (r2.logN - b1.low) / (r1.ell * math.log(r1.ell)) ** 0.25
        return m < 0.62 - 1e-12

    def witness(n: int) -> dict:
        return {"d_n": sq.gap_ratio(n)} if n <= landau.H_LIMIT else {}

    return TheoremSuite("d_max", (2, None), ok, good_interval,
                        f"d_n < {threshold}", slice_ok=slice_ok,
                        witness_fn=witness)


def make_a_upper_suite(m_coeff: float = 1.02) -> TheoremSuite:
    """a_n <= (2-sqrt2)/3 + c + m llog n / log n, for the stated m."""

    c = sq.ZETA_ZERO_SUM

    def rhs(n: float) -> float:
        L = math.log(n)
        return TWO_MINUS_SQRT2_3 + c + m_coeff * math.log(L) / L

    def ok(n: int) -> bool:
        if n <= landau.G_LIMIT:
            a = sq.a_value(n, float(landau.logg_table(n)[n]))
            margin = rhs(n) - a
            if abs(margin) < 1e-9:
                with mp.workprec(150):
                    am = sq.a_value_mp(n, landau.g_exact(n).log_value_mp(150))
                    L = mp.ln(n)
                    return am <= mp.mpf(TWO_MINUS_SQRT2_3) + mp.mpf(c) \
                        + m_coeff * mp.ln(L) / L
            return margin > 0
        alo = sq.a_value(n, _g_up(n))
        if alo > rhs(n):
            return False
        aup = sq.a_value(n, _g_low(n))
        if aup <= rhs(n):
            return True
        raise CapacityError(f"a_upper undecided at n={n}")

    def good_interval(n1: int, n2: int) -> bool:
        if n1 < 16:
            return False  # llog/log only decreasing from 16 on
        g1 = float(landau.logg_table(n1)[n1]) if n1 <= landau.G_LIMIT else _g_low(n1)
        sq_li = math.sqrt(float(logint.li_inv_f64(np.float64(n2))))
        R = (sq_li - g1) / (n1 * math.log(n1)) ** 0.25
        return R <= rhs(n2) - 1e-9

    def slice_ok(r1, r2) -> bool:
        sq_li = math.sqrt(float(logint.li_inv_f64(np.float64(r2.ell))))
        R = (sq_li - r1.logN) / (r1.ell * math.log(r1.ell)) ** 0.25
        return R <= rhs(r2.ell) - 1e-9

    def witness(n: int) -> dict:
        if n <= landau.G_LIMIT:
            return {"a_n": sq.a_value(n, float(landau.logg_table(n)[n])),
                    "rhs": rhs(n)}
        return {}

    return TheoremSuite("a_upper", (2, None), ok, good_interval,
                        "a_n <= (2-sqrt2)/3 + c + 1.02 llog n/log n",
                        slice_ok=slice_ok, witness_fn=witness)


def suite_catalog() -> dict:
    """All registered verification suites."""
    return {
        "minhn": make_minhn_suite(),
        "maxgn": make_maxgn_suite(),
        "beta_upper": make_beta_upper_suite(),
        "beta_lower": make_beta_lower_suite(),
        "d_max": make_d_max_suite(),
        "a_upper": make_a_upper_suite(),
    }


# ---------------------------------------------------------------------------
# convexity scans (minimum of a_n / z_n over superchampion points)


@dataclass
class ScanMinimum:
    mode: str
    ell_range: tuple
    arg_ell: int
    value: float
    hypothesis_ok: bool
    points: int


def scan_sequence_minimum(mode: str, ell_lo: int, ell_hi: int) -> ScanMinimum:
    """Minimum of a or z over superchampion points in [ell_lo, ell_hi].

    With the endpoint hypotheses verified at every visited record, the
    convexity lemma extends the minimum to every integer n in the range.
    """
    e = sc.shared_enum()
    e.ensure(ell_hi)
    A = e._arrays
    i0 = e.first_index()
    mask = (A["ell"][i0:] >= ell_lo) & (A["ell"][i0:] <= ell_hi)
    ells = A["ell"][i0:][mask].astype(np.float64)
    logNs = A["logN"][i0:][mask]
    if mode == "z_n":
        vals = sq.z_vec(ells, logNs)
        hyp = bool((vals >= 0).all() and (vals <= math.e).all())
    elif mode == "a_n":
        vals = sq.a_vec(ells, logNs)
        hyp = bool((vals >= 0).all() and (vals <= 1).all())
    else:
        raise UsageError(f"unknown mode {mode}")
    j = int(np.argmin(vals))
    return ScanMinimum(mode, (ell_lo, ell_hi), int(ells[j]), float(vals[j]),
                       hyp, int(vals.size))
