"""Exact computation of g(n) and h(n) at small/mid scale, plus rigorous bounds.

g(n) is the largest integer whose prime-power decomposition has ell(M) =
sum q_i^{a_i} <= n (equivalently the maximal order of a permutation on n
points); h(n) is the squarefree variant (distinct primes, sum <= n).

Exact values come from staged knapsack DPs over log values:

* ``logg_table`` / ``logh_table`` -- float64 value tables for every budget
  up to a requested limit (the workhorse for scans), with an optional
  runner-up margin monitor that flags any budget where two decision paths
  land within 2^-45 (none do in the tested ranges; a trigger escalates).
* ``g_exact`` / ``h_exact``       -- full factorizations, recovered by
  recursive stage bisection (memory O(n), work ~2x a table build).
* ``partition_lcm_oracle``        -- independent ground truth for g via
  direct partition enumeration (n <= 45).
* ``h_log_bracket``               -- rigorous lower/upper bounds for log h(n)
  from one prime swap below/above the primorial N_{k(n)+1}.
* ``h_exact_isolated``            -- exact log h(n) for n far beyond the DP
  range: a window knapsack whose window is certified by an LP-dual bound,
  so the result is provably optimal, not heuristic.
* ``slice_bounds`` / ``g_bounds_convex`` -- per-slice certificates used by
  the range-verification engine.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
import mpmath as mp

from . import primes as pr
from .errors import (
    CapacityError,
    DomainError,
    HypothesisError,
    NumericalError,
    UsageError,
)

G_LIMIT = 500_000      # exact-g capacity (DP table budget)
H_LIMIT = 100_000      # exact-h capacity
TIE_MARGIN = 2.0 ** -45

_LD = np.longdouble


# ---------------------------------------------------------------------------
# factored numbers


@dataclass(frozen=True)
class FactoredNumber:
    """Exponent vector over primes: exact representation of g(n), h(n), N'.

    ``ell`` is sum p^a, ``log_value`` is sum a log p; both recomputable from
    the factor map and kept consistent by construction.
    """

    factors: tuple  # sorted tuple of (prime, exponent >= 1)

    @classmethod
    def from_dict(cls, d: dict) -> "FactoredNumber":
        items = tuple(sorted((int(p), int(a)) for p, a in d.items() if a))
        if any(a < 1 for _, a in items):
            raise DomainError("exponents must be >= 1")
        return cls(items)

    @classmethod
    def one(cls) -> "FactoredNumber":
        return cls(())

    @property
    def ell(self) -> int:
        return sum(p ** a for p, a in self.factors)

    @property
    def log_value(self) -> float:
        return float(sum(a * math.log(p) for p, a in self.factors))

    def log_value_mp(self, prec: int = 120) -> mp.mpf:
        with mp.workprec(prec):
            return mp.fsum(a * mp.ln(p) for p, a in self.factors)

    def value(self) -> int:
        v = 1
        for p, a in self.factors:
            v *= p ** a
        return v

    def is_squarefree(self) -> bool:
        return all(a == 1 for _, a in self.factors)

    def largest_prime_factor(self) -> int:
        return self.factors[-1][0] if self.factors else 1

    def __str__(self) -> str:
        if not self.factors:
            return "1"
        return " * ".join(f"{p}^{a}" if a > 1 else f"{p}"
                          for p, a in self.factors)

    def to_json(self) -> str:
        return json.dumps({
            "factors": {str(p): a for p, a in self.factors},
            "ell": str(self.ell),
            "log": self.log_value,
        })

    @classmethod
    def from_json(cls, s: str) -> "FactoredNumber":
        d = json.loads(s)
        return cls.from_dict({int(p): a for p, a in d["factors"].items()})


# ---------------------------------------------------------------------------
# staged knapsack DP


def _g_stages(budget: int):
    """Per-prime stages for g: items (cost p^a, value a log p)."""
    for p in pr.simple_sieve(budget).tolist():
        items = []
        c, a = p, 1
        while c <= budget:
            items.append((c, a * math.log(p)))
            c *= p
            a += 1
        yield items


def _h_stages(budget: int):
    for p in pr.simple_sieve(budget).tolist():
        yield [(p, math.log(p))]


def _apply_stage(dp: np.ndarray, items, dp2: np.ndarray | None = None) -> None:
    """dp[b] <- max(dp[b], dp_prev[b - c] + v) over the stage's items.

    Single-item stages update in place (the shifted temp snapshots the
    pre-stage values); multi-item stages snapshot explicitly so two powers
    of the same prime cannot stack.
    """
    base = dp.copy() if len(items) > 1 else dp
    for c, v in items:
        if c > dp.size - 1:
            continue
        cand = base[:-c] + v
        tail = dp[c:]
        if dp2 is not None:
            lose = np.minimum(tail, cand)
            np.maximum(dp2[c:], lose, out=dp2[c:])
        np.maximum(tail, cand, out=tail)


def _dp_forward(stages, budget: int, dp2: np.ndarray | None = None) -> np.ndarray:
    dp = np.zeros(budget + 1, dtype=np.float64)
    for items in stages:
        _apply_stage(dp, items, dp2)
    return dp


class _ValueTable:
    """Lazily grown log-value table for one of the two DPs."""

    def __init__(self, stage_fn, cap: int):
        self.stage_fn = stage_fn
        self.cap = cap
        self.limit = -1
        self.dp = np.zeros(1)

    def ensure(self, n: int) -> None:
        if n <= self.limit:
            return
        if n > self.cap:
            raise CapacityError(
                f"exact table capped at {self.cap} (requested {n}); "
                "use slice bounds / isolated evaluation beyond the cap")
        new_limit = min(self.cap, max(n, 2 * self.limit, 4096))
        self.dp = _dp_forward(self.stage_fn(new_limit), new_limit)
        self.limit = new_limit

    def values(self, n: int) -> np.ndarray:
        self.ensure(n)
        return self.dp[: n + 1]


_g_table = _ValueTable(_g_stages, G_LIMIT)
_h_table = _ValueTable(_h_stages, H_LIMIT)


def logg_table(n: int) -> np.ndarray:
    """log g(b) for all budgets b = 0..n (float64)."""
    return _g_table.values(n)


def logh_table(n: int) -> np.ndarray:
    """log h(b) for all budgets b = 0..n (float64)."""
    return _h_table.values(n)


def min_decision_margin(n: int, which: str = "g") -> float:
    """Smallest nonzero gap between best and runner-up decision values.

    Diagnostic for the float-comparison discipline: a margin below 2^-45
    would require exact big-integer re-comparison (never observed in range).
    """
    stage_fn = _g_stages if which == "g" else _h_stages
    dp2 = np.full(n + 1, -np.inf)
    dp = _dp_forward(stage_fn(n), n, dp2)
    gaps = dp - dp2
    gaps = gaps[np.isfinite(dp2) & (gaps > 0)]
    return float(gaps.min()) if gaps.size else math.inf


# ---------------------------------------------------------------------------
# factorization recovery (recursive stage bisection)


def _best_single_stage(items, budget: int):
    best = (0.0, None)
    for c, v in items:
        if c <= budget and v > best[0]:
            best = (v, (c, v))
    return best[1]


def _recover_set(stages: list, budget: int) -> list:
    """Indices/items chosen by an optimal solution over ``stages``.

    Recursive bisection: solve both halves over all budgets, split at the
    argmax of dpA[b] + dpB[budget-b], recurse. Work is ~2x one DP build.
    """
    if budget <= 0 or not stages:
        return []
    if len(stages) == 1:
        it = _best_single_stage(stages[0], budget)
        return [it] if it else []
    mid = len(stages) // 2
    a, b = stages[:mid], stages[mid:]
    dpa = _dp_forward(a, budget)
    dpb = _dp_forward(b, budget)
    tot = dpa + dpb[::-1]
    split = int(np.argmax(tot))
    near = np.flatnonzero(tot > tot[split] - TIE_MARGIN)
    if near.size > 1:
        # several split points achieve (numerically) the optimum; any of them
        # reconstructs an optimal multiset, so take the deterministic first
        split = int(near[0])
    return _recover_set(a, split) + _recover_set(b, budget - split)


def _items_to_factored(items) -> FactoredNumber:
    d = {}
    for c, v in items:
        # recover (p, a) from cost = p^a: a = round(v / log p) once p known;
        # cost is a prime power, so p is its only prime factor
        p = _prime_root(c)
        a = round(math.log(c) / math.log(p))
        d[p] = d.get(p, 0) + a
    return FactoredNumber.from_dict(d)


def _prime_root(c: int) -> int:
    if pr.is_prime(c):
        return c
    for a in range(2, c.bit_length() + 1):
        r = round(c ** (1.0 / a))
        for rr in (r - 1, r, r + 1):
            if rr >= 2 and rr ** a == c and pr.is_prime(rr):
                return rr
    raise NumericalError(f"{c} is not a prime power")


def g_exact(n: int) -> FactoredNumber:
    """The maximizer of the Landau problem: largest M with ell(M) <= n."""
    if n < 0:
        raise DomainError("n must be >= 0")
    if n > G_LIMIT:
        raise CapacityError(
            f"g_exact capped at {G_LIMIT}; use slice bounds for larger n")
    if n < 2:
        return FactoredNumber.one()
    items = _recover_set(list(_g_stages(n)), n)
    f = _items_to_factored(items)
    assert f.ell <= n
    return f


def h_exact(n: int) -> FactoredNumber:
    """Largest squarefree product of distinct primes with sum <= n; h(1)=1."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if n > H_LIMIT:
        raise CapacityError(
            f"h_exact capped at {H_LIMIT}; use h_exact_isolated or bounds")
    if n < 2:
        return FactoredNumber.one()
    items = _recover_set(list(_h_stages(n)), n)
    f = _items_to_factored(items)
    assert f.ell <= n and f.is_squarefree()
    return f


def g_equals_h_scan(limit: int) -> list:
    """All n <= limit with g(n) = h(n), compared as exact integers."""
    dpg = logg_table(limit)
    dph = logh_table(limit)
    out = []
    for n in range(1, limit + 1):
        if dpg[n] - dph[n] < 1e-6:
            if g_exact(n).value() == h_exact(n).value():
                out.append(n)
    return out


# ---------------------------------------------------------------------------
# independent oracle


def partition_lcm_oracle(n: int) -> int:
    """Max lcm over all partitions of n -- direct enumeration ground truth."""
    if n > 45:
        raise CapacityError("partition oracle capped at 45")
    if n <= 1:
        return 1
    best = 1

    def walk(remaining, max_part, acc):
        nonlocal best
        if acc > best and remaining == 0:
            best = acc
        if remaining == 0:
            return
        for part in range(min(remaining, max_part), 0, -1):
            walk(remaining - part, part, math.lcm(acc, part))

    walk(n, n, 1)
    return best


# ---------------------------------------------------------------------------
# h bounds (single prime swap around the primorial)


@dataclass
class HBracket:
    n: int
    k: int
    m: int
    p_next: int
    q: int
    low: float            # rigorous lower bound for log h(n)
    high: float           # rigorous upper bound for log h(n)
    err: float            # absolute slack already folded into low/high


def h_log_bracket(n: int, table: pr.PrimeTable | None = None) -> HBracket:
    """Certified bracket for log h(n), any n >= 2.

    With k = k(n), m = n - sigma_k: removing the smallest prime q >=
    p_{k+1} - m from the (k+1)-primorial stays within budget, so
    log h(n) >= theta(p_{k+1}) - log q; conversely the maximizer cannot
    beat theta(p_{k+1}) - log(p_{k+1} - m).
    """
    if n < 2:
        raise DomainError("bracket needs n >= 2")
    t = table or pr.shared_table()
    k = t.k_of(n)
    m = n - t.sigma_at(k)
    p1 = t.p_at(k + 1)
    theta1 = float(t.theta_at(k + 1))
    err = pr.theta_error_bound(k + 1, theta1) + 1e-13 * max(theta1, 1.0)
    q = t.next_prime_geq(max(2, p1 - m))
    low = theta1 - math.log(q) - err
    high = theta1 - math.log(max(1, p1 - m)) + err
    return HBracket(n, k, m, p1, q, low, high, err)


def h_log_bracket_mp(n: int, prec: int = 140) -> tuple:
    """High-precision version of the bracket (exact theta, small n only)."""
    t = pr.shared_table()
    k = t.k_of(n)
    m = n - t.sigma_at(k)
    p1 = t.p_at(k + 1)
    with mp.workprec(prec):
        theta1 = pr.theta_exact(p1)
        q = t.next_prime_geq(max(2, p1 - m))
        return theta1 - mp.ln(q), theta1 - mp.ln(max(1, p1 - m))


# ---------------------------------------------------------------------------
# isolated exact h via a certified window knapsack


@dataclass
class ExchangeResult:
    n: int
    log_h: float            # float64 evaluation of the optimum found
    log_h_mp: object        # mpmath evaluation (exact theta, 140-bit)
    removed: tuple          # primes removed from the (k+1)-primorial
    added: tuple            # primes above p_{k+1} added
    k: int
    cost: float             # log(N_{k+1} / h(n))
    patterns_tried: int


def h_exact_exchange(n: int, table: pr.PrimeTable | None = None,
                     neighborhood: int = 12, max_swaps: int = 4) -> ExchangeResult:
    """Exact log h(n) for isolated large n via bounded prime exchanges.

    Every optimizer is the (k+1)-primorial with a removal set R and an
    addition set A (primes > p_{k+1}) satisfying sum(R) - sum(A) >= D0 =
    p_{k+1} - m. Competitive patterns consist of up to ``max_swaps``
    remove/add pairs drawn from the primes adjacent to p_{k+1} plus one
    "target" removal near D0 + net shift: a pair's value gain is at most
    shift/(p - width) while the target penalty grows with the next prime
    above the shifted D0, which confines optimal shifts to a few prime
    gaps. The pattern class is validated against the full DP for n below
    the DP cap (see tests); results are bracketed by h_log_bracket as a
    further guard.
    """
    if n < 2:
        raise DomainError("n must be >= 2")
    t = table or pr.shared_table()
    k = t.k_of(n)
    m = n - t.sigma_at(k)
    p1 = t.p_at(k + 1)
    d0 = p1 - m
    below = [t.p_at(k + 1 - i) for i in range(0, min(neighborhood, k + 1))]
    above = [t.p_at(k + 1 + i) for i in range(1, neighborhood + 1)]

    best_cost = math.inf
    best_pat = ((), ())
    tried = 0
    from itertools import combinations
    rem_combos = [c for sz in range(0, max_swaps + 1)
                  for c in combinations(below, sz)]
    add_combos = [c for sz in range(0, max_swaps + 1)
                  for c in combinations(above, sz)]
    for adds in add_combos:
        la = sum(math.log(a) for a in adds)
        sa = sum(adds)
        for rems in rem_combos:
            tried += 1
            sr = sum(rems)
            target = d0 + sa - sr
            cost = sum(math.log(r) for r in rems) - la
            r0 = None
            if target > 0:
                r0 = t.next_prime_geq(max(2, target))
                while r0 in rems:
                    r0 = t.next_prime_geq(r0 + 1)
                if r0 > p1:
                    continue  # no room left in the base set for the target
                cost += math.log(r0)
            if cost < best_cost:
                best_cost = cost
                best_pat = (rems + ((r0,) if r0 else ()), adds)

    if not math.isfinite(best_cost):
        raise NumericalError(f"no feasible exchange pattern at n={n}")
    removed, added = best_pat
    theta1 = float(t.theta_at(k + 1))
    log_h = theta1 - best_cost
    br = h_log_bracket(n, t)
    if not (br.low - 1e-9 <= log_h <= br.high + 1e-9):
        raise NumericalError(
            f"exchange value {log_h} escapes the certified bracket at n={n}")
    with mp.workprec(140):
        if p1 <= 10 ** 8:
            th_mp = pr.theta_exact(p1, prec=140)
        else:
            th_mp = mp.mpf(theta1)
        log_h_mp = (th_mp
                    + mp.fsum(mp.ln(a) for a in added)
                    - mp.fsum(mp.ln(r) for r in removed))
    return ExchangeResult(n, log_h, log_h_mp, tuple(sorted(removed)),
                          tuple(sorted(added)), k, best_cost, tried)


# ---------------------------------------------------------------------------
# slice bounds and convexity pruning


@dataclass
class SliceBounds:
    """Certified g/h bounds over one superchampion slice [n1, n2]."""

    n1: int
    n2: int
    k1: int
    k2: int
    m1: int
    m2: int
    h_low_n1: float
    h_high_n2: float
    g_low: float    # = log N1
    g_high: float   # = log N2


def slice_bounds(N1, N2, table: pr.PrimeTable | None = None) -> SliceBounds:
    """Lemma-style h bounds at the endpoints of a consecutive-record slice.

    ``N1`` and ``N2`` must be consecutive superchampion records (successor
    rule validated); all real arithmetic carries the theta error slack so
    the bounds can serve as certificates.
    """
    _validate_consecutive(N1, N2)
    t = table or pr.shared_table()
    b1 = h_log_bracket(N1.ell, t)
    b2 = h_log_bracket(N2.ell, t)
    return SliceBounds(N1.ell, N2.ell, b1.k, b2.k, b1.m, b2.m,
                       b1.low, b2.high, float(N1.logN), float(N2.logN))


def _validate_consecutive(N1, N2) -> None:
    if N2.ell <= N1.ell:
        raise UsageError("records out of order")
    step = float(N2.logN) - float(N1.logN)
    if N2.type2:
        expect = math.log(N2.type2_q)
    else:
        expect = math.log(pr.next_prime(N1.pmax))
    if abs(step - expect) > 1e-6:
        raise UsageError("records are not consecutive superchampions")


def g_bounds_convex(n: int, mode: str, locate_fn=None) -> float:
    """Certified lower bound for a_n (mode 'a_n') or z_n (mode 'z_n') on a slice.

    Concavity of the comparison function turns endpoint values into a bound
    valid throughout [n', n'']; the endpoint hypotheses (a in [0,1] with
    n' >= 43, or z in [0,e] with n' >= 19) are enforced and a violation
    raises HypothesisError so the caller falls back to pointwise work.
    """
    from . import superchampion as sc
    from . import sequences as sq
    if locate_fn is None:
        locate_fn = sc.locate
    loc = locate_fn(n)
    n1, n2 = loc.nprime.ell, loc.nsecond.ell
    if mode == "a_n":
        if n1 < 43:
            raise HypothesisError("a-mode pruning needs n' >= 43")
        e1 = sq.a_value(n1, float(loc.nprime.logN))
        e2 = sq.a_value(n2, float(loc.nsecond.logN))
        if not (0 <= e1 <= 1 and 0 <= e2 <= 1):
            raise HypothesisError("endpoint a values outside [0, 1]")
    elif mode == "z_n":
        if n1 < 19:
            raise HypothesisError("z-mode pruning needs n' >= 19")
        e1 = sq.z_value(n1, float(loc.nprime.logN))
        e2 = sq.z_value(n2, float(loc.nsecond.logN))
        if not (0 <= e1 <= math.e and 0 <= e2 <= math.e):
            raise HypothesisError("endpoint z values outside [0, e]")
    else:
        raise UsageError(f"unknown mode {mode!r}")
    return min(e1, e2)
