"""Superchampion machinery: xi profiles, N_rho construction, enumeration.

A superchampion is an integer N minimizing ell(M) - rho*log M for some
parameter rho > 0 (a vertex of the convex hull of the point set
(log M, ell(M))). The enumeration walks the event set

    E = { p/log p } u { (p^(a+1) - p^a)/log p : a >= 1 }   over primes p,

in increasing value: a fresh-prime event appends the next prime, a type-2
event bumps an existing prime's exponent. Distinctness of event values
(except the single 2/log 2 = (4-2)/log 2 coincidence) is asserted with
120-bit evaluation and precision escalation, so the walk order is certain.

The xi profile of a parameter rho collects xi = xi_1 (root of t/log t =
rho) and the decreasing roots xi_j of (t^j - t^(j-1))/log t = rho; a prime
p enters N_rho with exponent j exactly when xi_(j+1) <= p < xi_j, decided
here by the equivalent exact inequality on event values rather than by the
floating xi_j themselves.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import cached_property

import mpmath as mp
import numpy as np

from . import primes as pr
from .landau import FactoredNumber
from .errors import (
    DomainError,
    IntegrityError,
    NumericalError,
    ResourceError,
)

RHO_MIN_STR = "5/log 5"
_LD = np.longdouble

EVENT_PREC = 120
EVENT_MARGIN = mp.mpf(2) ** -40


def rho_min() -> float:
    return 5.0 / math.log(5.0)


# ---------------------------------------------------------------------------
# events


def event_value_mp(p: int, a: int, prec: int = EVENT_PREC) -> mp.mpf:
    """(p^(a+1) - p^a)/log p for a >= 1; p/log p for a = 0."""
    with mp.workprec(prec):
        if a == 0:
            return mp.mpf(p) / mp.ln(p)
        return mp.mpf(p ** (a + 1) - p ** a) / mp.ln(p)


def compare_event_to_rho(p: int, a: int, rho, prec: int = EVENT_PREC) -> int:
    """Sign of event(p, a) - rho with escalation on thin margins.

    rho may be a float/mpf or an exact event tuple (q, b). Exact ties are
    only possible between (2,0) and (2,1); any other sub-margin comparison
    escalates precision and finally fails loudly.
    """
    if isinstance(rho, tuple):
        q, b = rho
        if (p, a) == (q, b):
            return 0
        if p == q:
            # same prime: values strictly increase with a (except a=0,1 tie)
            if {a, b} == {0, 1} and p == 2:
                return 0
            return -1 if a < b else 1
        rho_val = None
    else:
        rho_val = rho
    for prec_try in (prec, 2 * prec, 4 * prec):
        with mp.workprec(prec_try):
            lhs = event_value_mp(p, a, prec_try)
            rhs = event_value_mp(*rho, prec_try) if rho_val is None else mp.mpf(rho_val)
            diff = lhs - rhs
            if abs(diff) > abs(rhs) * mp.mpf(2) ** (-prec_try // 3):
                return 1 if diff > 0 else -1
    if rho_val is not None:
        # an exact float rho can legitimately equal an event value
        with mp.workprec(4 * prec):
            if event_value_mp(p, a, 4 * prec) == mp.mpf(rho_val):
                return 0
    raise NumericalError(
        f"event comparison margin below 2^-40: (p={p}, a={a}) vs rho={rho}")


def exponent_in_N_rho(p: int, rho, closed: bool) -> int:
    """Exponent of p in N_rho (closed=False) or N_rho^+ (closed=True)."""
    a = 0
    while True:
        s = compare_event_to_rho(p, a, rho)
        if s < 0 or (closed and s == 0):
            a += 1
        else:
            return a


# ---------------------------------------------------------------------------
# xi profiles


@dataclass
class XiProfile:
    """rho with xi = xi_1 and the decreasing sequence xi_j (j = 2..floor(J))."""

    rho: mp.mpf
    xi: mp.mpf
    xi_j: list          # xi_j[i] is xi_(i+2)
    J: mp.mpf

    def xi_at(self, j: int) -> mp.mpf:
        if j == 1:
            return self.xi
        return self.xi_j[j - 2]


def _bisect_root(f, lo: mp.mpf, hi: mp.mpf) -> mp.mpf:
    """Root of increasing f on [lo, hi] by bisection + Newton polish."""
    flo, fhi = f(lo), f(hi)
    if flo > 0 or fhi < 0:
        raise NumericalError("root not bracketed")
    for _ in range(mp.mp.prec + 20):
        mid = (lo + hi) / 2
        if mid == lo or mid == hi:
            break
        if f(mid) <= 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= abs(mid) * mp.mpf(2) ** (8 - mp.mp.prec):
            break
    # Newton polish with numeric derivative, kept inside the bracket
    x = (lo + hi) / 2
    for _ in range(6):
        h = abs(x) * mp.mpf(2) ** (-mp.mp.prec // 2)
        d = (f(x + h) - f(x - h)) / (2 * h)
        if d == 0:
            break
        nxt = x - f(x) / d
        if not (lo <= nxt <= hi):
            break
        x = nxt
    return x


def _solve_xi1(rho: mp.mpf) -> mp.mpf:
    # t / log t = rho on t >= e (increasing branch)
    f = lambda t: t / mp.ln(t) - rho
    lo = mp.e + mp.mpf("1e-9")
    hi = rho * (mp.ln(rho) + mp.ln(mp.ln(rho) + 2) + 2) + 9
    while f(hi) < 0:
        hi *= 2
    return _bisect_root(f, lo, hi)


def _solve_xi_j(rho: mp.mpf, j: int, xi1: mp.mpf) -> mp.mpf:
    f = lambda t: (t ** j - t ** (j - 1)) / mp.ln(t) - rho
    hi = xi1 ** (mp.mpf(1) / j) + 1
    lo = mp.mpf(1) + mp.mpf("1e-12")
    return _bisect_root(f, lo, hi)


def xi_profile(rho, prec: int = EVENT_PREC) -> XiProfile:
    """Solve the full xi system for one parameter (rho >= 5/log 5)."""
    with mp.workprec(prec):
        if isinstance(rho, tuple):
            rho_m = event_value_mp(*rho, prec)
        else:
            rho_m = mp.mpf(rho)
        if rho_m < mp.mpf(5) / mp.ln(5) * (1 - mp.mpf(2) ** -50):
            raise DomainError(f"rho must be >= {RHO_MIN_STR} = 3.1066...")
        xi1 = _solve_xi1(rho_m)
        J = (mp.ln(xi1) + mp.ln(2 * mp.ln(2)) - mp.ln(mp.ln(xi1))) / mp.ln(2)
        xis = []
        for j in range(2, int(mp.floor(J)) + 1):
            xis.append(_solve_xi_j(rho_m, j, xi1))
        prof = XiProfile(rho_m, xi1, xis, J)
        _validate_profile(prof)
        return prof


def _validate_profile(prof: XiProfile) -> None:
    rho = prof.rho
    seq = [prof.xi] + prof.xi_j
    for a, b in zip(seq, seq[1:]):
        if not b < a:
            raise NumericalError("xi_j not strictly decreasing")
    for j, x in enumerate(prof.xi_j, start=2):
        if not x > 1:
            raise NumericalError("xi_j must exceed 1")
        resid = (x ** j - x ** (j - 1)) / mp.ln(x) - rho
        if abs(resid) > abs(rho) * mp.mpf(2) ** -60:
            raise NumericalError(f"xi_{j} residual too large: {resid}")
        if x > prof.xi ** (mp.mpf(1) / j) * (1 + mp.mpf(2) ** -50):
            raise NumericalError("xi_j exceeds xi^(1/j)")
    if prof.xi_j and not prof.xi_j[-1] >= 2:
        raise NumericalError("floor(J) should index the last xi_j >= 2")


def build_N_rho(rho, mode: str = "open", prime_limit: int | None = None) -> FactoredNumber:
    """Exponent vector of N_rho ('open': p < xi_j) or N_rho^+ ('closed').

    Membership is decided by exact event-vs-rho comparisons, never by the
    floating xi_j values.
    """
    closed = {"open": False, "closed": True}[mode]
    with mp.workprec(EVENT_PREC):
        rho_m = event_value_mp(*rho) if isinstance(rho, tuple) else mp.mpf(rho)
        if rho_m < mp.mpf(5) / mp.ln(5) * (1 - mp.mpf(2) ** -50):
            raise DomainError("rho below 5/log 5")
        xi1 = _solve_xi1(rho_m)
    limit = prime_limit or int(mp.floor(xi1)) + 2
    t = pr.shared_table()
    if limit > t.hard_limit:
        raise ResourceError(f"N_rho needs primes to {limit}")
    d = {}
    for p in t.primes_between(2, limit).tolist():
        a = exponent_in_N_rho(int(p), rho if isinstance(rho, tuple) else rho_m, closed)
        if a:
            d[int(p)] = a
    return FactoredNumber.from_dict(d)


# ---------------------------------------------------------------------------
# enumeration (desk scale, vectorized event walk)


@dataclass
class Superchampion:
    """One enumerated record (the state after its creating event)."""

    ell: int
    logN: float
    pmax: int
    type2: bool
    type2_q: int | None
    rho_event: tuple      # (p, a) whose value is the associated parameter
    prefix_ell: int       # ell of the squarefull part
    prefix_logA: float

    @property
    def rho(self) -> float:
        p, a = self.rho_event
        if a == 0:
            return p / math.log(p)
        return (p ** (a + 1) - p ** a) / math.log(p)


class EnumTable:
    """Lazily grown arrays of superchampion records ordered by ell.

    Columns: ell, logN (compensated float64), pmax, event (p, a), running
    prefix (squarefull part) data. Record 0 is N = 12 (ell = 7).
    """

    MAX_ELL = 1 << 45     # desk-scale cap; the streaming engine goes beyond

    def __init__(self):
        self.limit_ell = 0
        self._arrays = None

    def ensure(self, limit_ell: int) -> None:
        if limit_ell <= self.limit_ell:
            return
        if limit_ell > self.MAX_ELL:
            raise ResourceError(
                f"in-memory enumeration capped at ell <= {self.MAX_ELL}")
        target = max(limit_ell, 2 * self.limit_ell, 1 << 12)
        self._build(target)

    def _build(self, limit_ell: int) -> None:
        xi_max = int(1.3 * math.sqrt(limit_ell * math.log(limit_ell + 3))) + 64
        while True:
            ev_p, ev_a, ev_v = _event_list(xi_max)
            ell = np.cumsum(_event_increments(ev_p, ev_a))
            if ell[-1] > limit_ell + xi_max:
                break
            xi_max = int(1.5 * xi_max) + 64
        logs = np.log(ev_p.astype(np.float64))
        logN = pr.comp_cumsum(logs).astype(np.float64)
        pmax = np.maximum.accumulate(np.where(ev_a == 0, ev_p, 0))
        pre_inc = np.where(ev_a >= 1, _event_increments(ev_p, ev_a)
                           + np.where(ev_a == 1, ev_p, 0), 0)
        prefix_ell = np.cumsum(pre_inc)
        prefix_logA = np.cumsum(np.where(ev_a >= 1, logs * np.where(ev_a == 1, 2.0, 1.0), 0.0))
        self._arrays = dict(p=ev_p, a=ev_a, v=ev_v, ell=ell, logN=logN,
                            pmax=pmax, prefix_ell=prefix_ell,
                            prefix_logA=prefix_logA)
        self.limit_ell = int(ell[-1] - xi_max)

    def record(self, i: int) -> Superchampion:
        A = self._arrays
        return Superchampion(
            ell=int(A["ell"][i]), logN=float(A["logN"][i]),
            pmax=int(A["pmax"][i]), type2=bool(A["a"][i] >= 1),
            type2_q=int(A["p"][i]) if A["a"][i] >= 1 else None,
            rho_event=(int(A["p"][i]), int(A["a"][i])),
            prefix_ell=int(A["prefix_ell"][i]),
            prefix_logA=float(A["prefix_logA"][i]))

    def first_index(self) -> int:
        # first record with ell >= 7 (N = 12)
        return int(np.searchsorted(self._arrays["ell"], 7, side="left"))

    def bracket(self, n: int) -> tuple[int, int]:
        """Indices (i, i+1) with ell[i] <= n < ell[i+1]."""
        self.ensure(n + 1)
        A = self._arrays
        j = int(np.searchsorted(A["ell"], n, side="right"))
        if j == 0 or j >= A["ell"].size:
            raise ResourceError(f"enumeration does not bracket n={n}")
        return j - 1, j


def _event_list(xi_max: int):
    """All events with value <= xi_max/log xi_max, sorted by value."""
    t = pr.shared_table()
    rho_max = xi_max / math.log(xi_max)
    ps = t.primes_between(2, xi_max)
    vals = [ps.astype(np.float64) / np.log(ps.astype(np.float64))]
    pcol = [ps]
    acol = [np.zeros(ps.size, dtype=np.int16)]
    for p in ps.tolist():
        a = 1
        while True:
            v = (p ** (a + 1) - p ** a) / math.log(p)
            if v > rho_max:
                break
            vals.append(np.array([v]))
            pcol.append(np.array([p], dtype=np.int64))
            acol.append(np.array([a], dtype=np.int16))
            a += 1
        if p * p - p > rho_max * math.log(p):
            if p > 3 and (p - 1) * p > rho_max * math.log(p) * 2:
                break
    v = np.concatenate(vals)
    p = np.concatenate(pcol)
    a = np.concatenate(acol)
    order = np.lexsort((a, v))
    v, p, a = v[order], p[order], a[order]
    _assert_event_separation(v, p, a)
    return p, a, v


def _assert_event_separation(v, p, a) -> None:
    close = np.flatnonzero(np.diff(v) < np.abs(v[1:]) * 1e-12)
    for i in close.tolist():
        pa1 = (int(p[i]), int(a[i]))
        pa2 = (int(p[i + 1]), int(a[i + 1]))
        if {pa1, pa2} == {(2, 0), (2, 1)}:
            continue  # the single genuine coincidence 2/log2 = (4-2)/log2
        s = compare_event_to_rho(*pa1, pa2)
        if s == 0:
            raise NumericalError(f"unexpected exact event tie: {pa1} vs {pa2}")
        if s > 0:
            raise NumericalError(f"event sort order wrong near {pa1}, {pa2}")


def _event_increments(p: np.ndarray, a: np.ndarray) -> np.ndarray:
    inc = p.astype(np.int64).copy()
    t2 = a >= 1
    pw = p[t2].astype(np.int64)
    av = a[t2].astype(np.int64)
    inc[t2] = pw ** (av + 1) - pw ** av
    return inc


_enum: EnumTable | None = None


def shared_enum() -> EnumTable:
    global _enum
    if _enum is None:
        _enum = EnumTable()
    return _enum


def enumerate_superchampions(limit_ell: int, cache: "Type2Cache | None" = None):
    """Yield every superchampion with ell(N) <= limit_ell in increasing order.

    With a cache, the successor rule consults the precomputed type-2 table
    instead of re-deriving exponent events, and a cache that does not cover
    the requested range is rejected.
    """
    if cache is not None and cache.limit_ell < limit_ell:
        raise IntegrityError(
            f"type-2 cache covers ell <= {cache.limit_ell}, need {limit_ell}")
    e = shared_enum()
    e.ensure(limit_ell)
    i = e.first_index()
    if cache is not None:
        _crosscheck_cache(e, cache, limit_ell)
    while True:
        rec = e.record(i)
        if rec.ell > limit_ell:
            return
        yield rec
        i += 1


def _crosscheck_cache(e: EnumTable, cache: "Type2Cache", limit_ell: int) -> None:
    A = e._arrays
    mask = (A["a"] >= 1) & (A["ell"] >= 7) & (A["ell"] <= limit_ell)
    ells = A["ell"][mask]
    qs = A["p"][mask]
    want = [(el, q) for el, q in cache.entries_upto(limit_ell)]
    have = list(zip(ells.tolist(), qs.tolist()))
    if want != have:
        raise IntegrityError("type-2 cache disagrees with enumeration events")


# ---------------------------------------------------------------------------
# type-2 cache


class Type2Cache:
    """Triplets (ell(N), q, log N) for every type-2 superchampion."""

    VERSION = 1

    def __init__(self, limit_ell: int, ells, qs, logNs):
        self.limit_ell = int(limit_ell)
        self.ells = [int(x) for x in ells]
        self.qs = [int(x) for x in qs]
        self.logNs = [float(x) for x in logNs]
        self._validate()

    def _validate(self):
        for a, b in zip(self.ells, self.ells[1:]):
            if b <= a:
                raise IntegrityError("cache ells must be strictly increasing")
        for q in self.qs:
            if not pr.is_prime(q):
                raise IntegrityError(f"cache quotient {q} is not prime")

    def __len__(self):
        return len(self.ells)

    def entries_upto(self, limit_ell: int):
        for el, q in zip(self.ells, self.qs):
            if el > limit_ell:
                break
            yield el, q

    def save(self, path: str) -> None:
        tmp = path + ".tmp"
        with open(tmp, "w") as f:
            f.write(f"landaufn-type2cache v{self.VERSION} limit={self.limit_ell}\n")
            for el, q, lg in zip(self.ells, self.qs, self.logNs):
                f.write(f"{el},{q},{float(lg).hex()}\n")
        os.replace(tmp, path)

    @classmethod
    def load(cls, path: str) -> "Type2Cache":
        with open(path) as f:
            head = f.readline().split()
            if len(head) != 3 or head[0] != "landaufn-type2cache":
                raise IntegrityError("bad cache header")
            if head[1] != f"v{cls.VERSION}":
                raise IntegrityError(f"unsupported cache version {head[1]}")
            limit = int(head[2].split("=")[1])
            ells, qs, logNs = [], [], []
            for line in f:
                el, q, lg = line.strip().split(",")
                ells.append(int(el))
                qs.append(int(q))
                logNs.append(float.fromhex(lg))
        return cls(limit, ells, qs, logNs)


def build_type2_cache(limit_ell: int) -> Type2Cache:
    """Exactly the type-2 triplets with ell(N) <= limit_ell (desk scale)."""
    e = shared_enum()
    e.ensure(limit_ell)
    A = e._arrays
    mask = (A["a"] >= 1) & (A["ell"] >= 7) & (A["ell"] <= limit_ell)
    return Type2Cache(limit_ell, A["ell"][mask].tolist(),
                      A["p"][mask].tolist(), A["logN"][mask].tolist())


# ---------------------------------------------------------------------------
# locate / excesses


@dataclass
class Location:
    nprime: Superchampion
    nsecond: Superchampion

    @property
    def rho_event(self) -> tuple:
        return self.nsecond.rho_event

    @property
    def rho(self) -> float:
        return self.nsecond.rho

    @cached_property
    def profile(self) -> XiProfile:
        return xi_profile(self.rho_event)


def locate(n: int) -> Location:
    """The superchampion pair with ell(N') <= n < ell(N'') and its parameter."""
    if n < 7:
        raise DomainError("locate is defined for n >= 7")
    e = shared_enum()
    i, j = e.bracket(n)
    return Location(e.record(i), e.record(j))


@dataclass
class ExcessReport:
    n: int
    E: int                  # additive excess of N', exact
    Estar: mp.mpf           # multiplicative excess of N'
    s: int
    i0: int | None          # index of the largest prime factor of N'
    xi: float
    rho_event: tuple


def excesses(n: int, i0: int | None = "auto") -> ExcessReport:
    """Exact E(N'), high-precision E*(N'), and s(n) for the located slice."""
    loc = locate(n)
    return excesses_at(loc.rho_event, n, i0=i0)


def excesses_at(rho_event: tuple, n: int, i0="auto",
                ell_nprime: int | None = None) -> ExcessReport:
    """Excesses computed from the parameter itself (usable beyond locate's range).

    ``ell_nprime`` overrides ell(N') when the caller knows it (it equals
    sum_{p<xi} p + E, which needs the full prime sum at xi scale).
    """
    with mp.workprec(EVENT_PREC):
        rho_m = event_value_mp(*rho_event)
        xi1 = _solve_xi1(rho_m)
    t = pr.shared_table()
    xi2_ceiling = int(mp.floor(xi1 ** mp.mpf(0.5))) + 2
    E = 0
    estar_terms = []
    for p in t.primes_between(2, xi2_ceiling).tolist():
        a = exponent_in_N_rho(int(p), rho_event, closed=False)
        if a >= 2:
            E += p ** a - p
            estar_terms.append((int(p), a))
    with mp.workprec(140):
        Estar = mp.fsum((a - 1) * mp.ln(p) for p, a in estar_terms)

    # s(n): count primes past the largest prime factor of N' whose running
    # sum stays within n - ell(N') + E(N')
    if ell_nprime is None:
        loc = locate(n)
        ell_nprime = loc.nprime.ell
    budget = n - ell_nprime + E
    xi_floor = int(mp.floor(xi1))
    start = xi_floor if _is_int_power_xi(xi1, xi_floor) else xi_floor + 1
    s = 0
    acc = 0
    for p in _primes_after(start - 1):
        if acc + p > budget:
            break
        acc += p
        s += 1
    if i0 == "auto":
        i0 = t.pi(start - 1) if start - 1 <= t.hard_limit and start - 1 <= 2 * 10 ** 9 else None
    return ExcessReport(n, E, Estar, s, i0, float(xi1), rho_event)


def _is_int_power_xi(xi1, xi_floor: int) -> bool:
    return mp.almosteq(xi1, xi_floor, rel_eps=mp.mpf(2) ** -70)


def _primes_after(x: int):
    """Primes > x in increasing order (windowed sieve)."""
    lo = x + 1
    width = max(1 << 16, 64 * int(math.log(max(x, 10))) ** 2)
    while True:
        hi = lo + width
        for p in _window_sieve(lo, hi):
            yield int(p)
        lo = hi


def _window_sieve(lo: int, hi: int) -> np.ndarray:
    if hi <= 2:
        return np.empty(0, dtype=np.int64)
    lo = max(lo, 2)
    base = pr.simple_sieve(math.isqrt(hi) + 1)
    size = hi - lo
    mask = np.ones(size, dtype=bool)
    for p in base.tolist():
        start = max(p * p, ((lo + p - 1) // p) * p)
        if start < hi:
            mask[start - lo:: p] = False
    if lo <= 1:
        mask[: 2 - lo] = False
    return (lo + np.flatnonzero(mask)).astype(np.int64)


# ---------------------------------------------------------------------------
# xi_2 estimate machinery (the W_a analysis and bound checks)


def W_a(a, t, prec: int = 120) -> mp.mpf:
    """Sign witness for the xi_2 upper bound with coefficient a.

    Positive iff xi_2 < sqrt(xi/2)(1 - a/log xi) at xi = exp(2t).
    """
    with mp.workprec(prec):
        am, tm = mp.mpf(a), mp.mpf(t)
        return (-am + am ** 2 / (4 * tm) + mp.mpf(3) / 2 * mp.ln(2) + mp.ln(tm)
                - mp.ln(2 * tm - am) - mp.e ** -tm * mp.sqrt(2) / 2 * (2 * tm - am))


def W_a_prime(a, t, prec: int = 120) -> mp.mpf:
    """d/dt of W_a (via the polynomial form U / (4 t^2 (2t - a)))."""
    with mp.workprec(prec):
        am, tm = mp.mpf(a), mp.mpf(t)
        U = (-2 * am * (am + 2) * tm + am ** 3
             + 2 * mp.sqrt(2) * mp.e ** -tm
             * (4 * tm ** 4 - 4 * (am + 1) * tm ** 3 + am * (am + 2) * tm ** 2))
        return U / (4 * tm ** 2 * (2 * tm - am))


def xi2_threshold_root(prec: int = 120) -> tuple:
    """Root w0 of W_{log2/2} and exp(2 w0): the xi_2 upper-bound threshold."""
    with mp.workprec(prec):
        a = mp.ln(2) / 2
        w0 = mp.findroot(lambda t: W_a(a, t, prec), mp.mpf(5))
        return w0, mp.e ** (2 * w0)


def xi2_double_root(prec: int = 120) -> tuple:
    """(a0, t0) where W_a has a double root: the best constant for lower bounds."""
    with mp.workprec(prec):
        f = lambda a, t: [W_a(a, t, prec), W_a_prime(a, t, prec)]
        sol = mp.findroot(f, (mp.mpf("0.37"), mp.mpf("7.9")))
        return sol[0], sol[1]


def xi2_of(xi, prec: int = 120) -> mp.mpf:
    """xi_2 for the parameter rho = xi/log xi."""
    with mp.workprec(prec):
        xim = mp.mpf(xi)
        rho = xim / mp.ln(xim)
        return _solve_xi_j(rho, 2, xim)


@dataclass
class XiBoundResult:
    name: str
    xi: float
    passed: bool
    lhs: float
    rhs: float


def check_xi_bounds(xi_samples, table: pr.PrimeTable | None = None) -> list:
    """Rigorous pass/fail of the xi_2 bracket/log/theta/pi_2 bounds per sample.

    Samples must lie in each bound's validity range (xi >= 10^10+19 for the
    theta/pi_2 corollaries; the xi_2 bracket pieces have their own
    thresholds). theta and pi_2 are evaluated exactly at xi_2 scale.
    """
    t = table or pr.shared_table()
    x0 = 10 ** 10 + 19
    out = []
    for xi in xi_samples:
        xi = float(xi)
        with mp.workprec(140):
            xim = mp.mpf(xi)
            L = mp.ln(xim)
            xi2 = xi2_of(xim)
            root = mp.sqrt(xim / 2)
            if xi >= 31643:
                rhs = root * (1 - mp.mpf("0.346") / L)
                out.append(XiBoundResult("xi2_upper", xi, xi2 < rhs, float(xi2), float(rhs)))
                rhs2 = root * (1 - mp.ln(2) / (2 * L))
                out.append(XiBoundResult("xi2_upper_log2", xi, xi2 < rhs2, float(xi2), float(rhs2)))
            if xi >= 4.28e9:
                rhs = root * (1 - mp.mpf("0.366") / L)
                out.append(XiBoundResult("xi2_lower", xi, xi2 > rhs, float(xi2), float(rhs)))
            if xi >= x0:
                inv = 1 / mp.ln(xi2)
                lo = (2 / L) * (1 + mp.ln(2) / L)
                hi = (2 / L) * (1 + mp.mpf("0.75") / L)
                out.append(XiBoundResult("inv_log_xi2_lower", xi, inv >= lo, float(inv), float(lo)))
                out.append(XiBoundResult("inv_log_xi2_upper", xi, inv <= hi, float(inv), float(hi)))
                xi2i = int(mp.floor(xi2))
                t.ensure(xi2i + 1000)
                th_lo = float(t.theta_strict(xi2i + (1 if _xi2_is_prime(xi2, xi2i) else 0)))
                th_hi = float(t.theta_of(xi2i))
                err = pr.theta_error_bound(t.pi(xi2i), th_hi)
                lo_b = float(root * (1 - mp.mpf("0.521") / L))
                hi_b = float(root * (1 - mp.mpf("0.346") / L))
                out.append(XiBoundResult("theta_xi2_lower", xi,
                                         th_lo - err >= lo_b, th_lo, lo_b))
                out.append(XiBoundResult("theta_xi2_upper", xi,
                                         th_hi + err <= hi_b, th_hi, hi_b))
                pi2 = pr.pi_r(2, xi2i)
                scale = float(xim ** mp.mpf(1.5) / (3 * mp.sqrt(2) * L))
                lo_p = scale * float(1 + mp.mpf("0.122") / L)
                hi_p = scale * float(1 + mp.mpf("0.458") / L)
                out.append(XiBoundResult("pi2_xi2_lower", xi,
                                         pi2.strict_value >= lo_p, float(pi2.strict_value), lo_p))
                out.append(XiBoundResult("pi2_xi2_upper", xi,
                                         pi2.value <= hi_p, float(pi2.value), hi_p))
    return out


def _xi2_is_prime(xi2, xi2i: int) -> bool:
    return mp.almosteq(xi2, xi2i, rel_eps=mp.mpf(2) ** -70) and pr.is_prime(xi2i)


def greedy_completion_log(n: int) -> float:
    """Certified lower bound for log g(n): N' extended greedily within budget.

    Starting from the located N', repeatedly applies the cheapest available
    move (bump a prime's exponent, or append the next fresh prime) while the
    exact ell stays <= n. The result is the log of a concrete integer M with
    ell(M) <= n, so log g(n) >= value; it tracks the chord bound to within
    roughly the cost of one move.
    """
    loc = locate(n)
    t = pr.shared_table()
    slack = n - loc.nprime.ell
    value = float(loc.nprime.logN)
    if slack <= 0:
        return value
    # exponent vector of N' on the small primes (only they can be bumped
    # within one slice's slack) plus the fresh-prime frontier
    with mp.workprec(EVENT_PREC):
        xi = _solve_xi1(event_value_mp(*loc.rho_event))
    small_cap = int(mp.floor(xi ** mp.mpf(0.5))) + 3
    expo = {}
    for p in t.primes_between(2, small_cap).tolist():
        expo[int(p)] = exponent_in_N_rho(int(p), loc.rho_event, closed=False)
    frontier = t.next_prime_geq(loc.nprime.pmax + 1)
    while True:
        best = None  # (cost, log gain, kind, p)
        for p, a in expo.items():
            if a == 0:
                continue
            cost = p ** (a + 1) - p ** a
            if cost <= slack and (best is None or math.log(p) / cost > best[1] / best[0]):
                best = (cost, math.log(p), "bump", p)
        if frontier <= slack and (best is None
                                  or math.log(frontier) / frontier > best[1] / best[0]):
            best = (frontier, math.log(frontier), "fresh", frontier)
        if best is None:
            return value
        cost, gain, kind, p = best
        slack -= cost
        value += gain
        if kind == "bump":
            expo[p] += 1
        else:
            frontier = t.next_prime_geq(frontier + 1)


def xi_window_for_n(n: int) -> tuple:
    """Certified [lower, upper] for xi(n), n >= nu0-scale (closed forms)."""
    L = math.log(n)
    lam = math.log(L)
    lo = math.sqrt(n * L) * (1 + (lam - 1) / (2 * L) - lam * lam / (8 * L * L)
                             + 0.38 * lam / (L * L))
    hi = math.sqrt(n * L) * (1 + (lam - 1) / (2 * L) - 13 * lam * lam / (10000 * L * L))
    return lo, hi
