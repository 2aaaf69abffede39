"""Segmented prime generation and exact accumulation of prime sums.

Provides the streaming backbone used everywhere else:

* ``PrimeStream``     -- odd-only segmented sieve of Eratosthenes with
  deterministic, absolutely-aligned segment layout (so a restarted stream
  emits bit-identical arrays).
* ``ChebyshevState``  -- running (k, p_k, sigma_k, theta_k) where
  sigma_k = p_1 + ... + p_k (exact integer) and theta_k = sum log p
  (80-bit extended floats, compensated).
* ``chebyshev_scan``  -- fold the stream until a monotone stop predicate
  holds; O(log) predicate evaluations per segment. Restarting from a
  checkpoint replays the anchor segment, so resumed scans agree
  field-for-field with uninterrupted ones.
* ``pi_r``            -- exact power sums sum_{p<=x} p^r (and the strict
  variant over p < x), big-integer arithmetic throughout.
* ``W``               -- sum_{p<=x} log p / (1 - 1/p).
* ``PrimeTable``      -- in-RAM prefix arrays (primes, sigma, theta) with
  searchsorted helpers, grown on demand.

theta is accumulated in numpy longdouble (64-bit mantissa) with a two-pass
Fast2Sum correction, so prefix values carry an absolute error bounded by
``theta_error_bound``; callers needing rigorous comparisons escalate to
``theta_exact`` (mpmath) when a margin is smaller than that bound.
"""

from __future__ import annotations

import io
import math
import os
import struct
from dataclasses import dataclass

import numpy as np
import mpmath as mp

from .errors import (
    DomainError,
    RangeExhaustedError,
    ResourceError,
    CapacityError,
    IntegrityError,
)

DEFAULT_SEGMENT_SPAN = 1 << 26      # integers covered per segment (odd-only bitmap)
SIEVE_HARD_LIMIT = 1 << 40          # sieving beyond this is out of scope
MAX_SEGMENTS = 1 << 20

_LD = np.longdouble
_LD_EPS = float(np.finfo(_LD).eps)


def simple_sieve(limit: int) -> np.ndarray:
    """All primes <= limit as an int64 array (plain Eratosthenes)."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    is_p = np.ones(limit + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_p[p]:
            is_p[p * p:: p] = False
    return np.flatnonzero(is_p).astype(np.int64)


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin (the fixed base set is exact to ~3.3e24)."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n: int) -> int:
    """Smallest prime > n."""
    if n < 2:
        return 2
    if n == 2:
        return 3
    c = n + 1 if n % 2 == 0 else n + 2
    if c % 2 == 0:
        c += 1
    while not is_prime(c):
        c += 2
    return c


def prev_prime(n: int) -> int:
    """Largest prime < n."""
    if n <= 2:
        raise DomainError("no prime below 2")
    if n == 3:
        return 2
    c = n - 1 if n % 2 == 0 else n - 2
    while c >= 3 and not is_prime(c):
        c -= 2
    return c if c >= 3 else 2


# ---------------------------------------------------------------------------
# exact / compensated accumulation helpers

_BLOCK = 1024


def block_int_sum(arr: np.ndarray) -> int:
    """Exact sum of an int64 array (1024-element blocks cannot overflow)."""
    if arr.size == 0:
        return 0
    idx = np.arange(0, arr.size, _BLOCK)
    blocks = np.add.reduceat(arr, idx)
    return sum(int(b) for b in blocks)


def comp_cumsum(values: np.ndarray, offset=0.0) -> np.ndarray:
    """Compensated prefix sums of ``values`` starting at ``offset``.

    Two-pass vectorized Kahan: the per-step rounding error of the plain
    longdouble cumsum is recovered with Fast2Sum (exact once the running sum
    dominates each increment, which holds for log-prime accumulation after
    the first couple of terms) and folded back in.
    """
    v = values.astype(_LD, copy=False)
    c = np.cumsum(v)
    if offset:
        c += _LD(offset)
    prev = np.empty_like(c)
    prev[0] = _LD(offset)
    prev[1:] = c[:-1]
    err = (prev - c) + v
    np.cumsum(err, out=err)
    return c + err


def two_sum(a, b):
    """Knuth TwoSum in longdouble: returns (s, err) with s+err == a+b exactly."""
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def theta_error_bound(k: int, theta: float) -> float:
    """Conservative absolute error bound for a compensated theta prefix.

    Dominated by the 1-ulp error of each np.log evaluation plus the single
    rounding of the (anchor + local) query; the compensated summation itself
    contributes O(k eps^2), folded into the safety factor.
    """
    per_log = 2.0 * _LD_EPS * (k + 16) * max(math.log(max(theta, 3.0)), 1.0)
    collapse = 8.0 * _LD_EPS * max(theta, 1.0)
    return per_log + collapse


def theta_exact(x: int, prec: int = 160) -> mp.mpf:
    """theta(x) = sum_{p<=x} log p via mpmath at ``prec`` bits (small x only).

    Primes are multiplied exactly in chunks and the chunk products logged,
    which is far cheaper than one mp.ln per prime.
    """
    if x > 10 ** 8:
        raise CapacityError("exact theta limited to x <= 1e8")
    primes = simple_sieve(int(x)).tolist()
    chunk = 4096
    with mp.workprec(prec + 20):
        total = mp.mpf(0)
        for i in range(0, len(primes), chunk):
            total += mp.ln(math.prod(primes[i: i + chunk]))
    with mp.workprec(prec):
        return +total


def split_longdouble(x) -> tuple[float, float]:
    """Exact (hi, lo) double decomposition of a 64-bit-mantissa longdouble."""
    hi = float(x)
    lo = float(x - _LD(hi))
    return hi, lo


def join_longdouble(hi: float, lo: float):
    return _LD(hi) + _LD(lo)


# ---------------------------------------------------------------------------
# streaming sieve


class PrimeStream:
    """Odd-only segmented sieve streaming int64 prime arrays up to ``limit``.

    Segment boundaries are absolute (multiples of ``segment_span``), so a
    stream restarted at a boundary yields arrays bit-identical to the
    uninterrupted stream from that point on.
    """

    def __init__(self, limit: int, segment_span: int = DEFAULT_SEGMENT_SPAN,
                 start_after: int = 1):
        if limit < 2:
            raise DomainError("limit must be >= 2")
        if limit > SIEVE_HARD_LIMIT:
            raise ResourceError(f"sieving beyond 2^40 is unsupported (limit={limit})")
        nseg = (limit // segment_span) + 1
        if nseg > MAX_SEGMENTS:
            raise ResourceError(
                f"limit {limit} needs {nseg} segments of span {segment_span}; "
                f"budget is {MAX_SEGMENTS} segments (raise segment_span)")
        self.limit = int(limit)
        self.segment_span = int(segment_span)
        self.start_after = int(start_after)
        self._base = simple_sieve(math.isqrt(limit) + 1)

    def segments(self):
        base_odd = self._base[1:]
        limit = self.limit
        if self.start_after < 2 and limit >= 2:
            yield np.array([2], dtype=np.int64)
        lo = max(3, self.start_after + 1)
        if lo % 2 == 0:
            lo += 1
        while lo <= limit:
            seg_index = lo // self.segment_span
            hi = min((seg_index + 1) * self.segment_span, limit + 1)
            count = (hi - lo + 1) // 2
            mask = np.ones(count, dtype=bool)
            for p in base_odd:
                p = int(p)
                if p * p >= hi:
                    break
                start = max(p * p, ((lo + p - 1) // p) * p)
                if start % 2 == 0:
                    start += p
                if start >= hi:
                    continue
                mask[(start - lo) // 2:: p] = False
            idx = np.flatnonzero(mask)
            if idx.size:
                yield lo + 2 * idx.astype(np.int64)
            lo = hi if hi % 2 == 1 else hi + 1


def primes_upto(limit: int, segment_span: int = DEFAULT_SEGMENT_SPAN) -> PrimeStream:
    """Stream of exactly the primes <= limit in increasing order."""
    return PrimeStream(limit, segment_span=segment_span)


# ---------------------------------------------------------------------------
# Chebyshev scan


@dataclass
class _Anchor:
    """Accumulator state at a segment boundary (everything below ``restart_from``).

    theta is carried as an unevaluated longdouble pair (hi, lo); folding whole
    segment totals via TwoSum keeps queries deterministic under replay.
    """

    restart_from: int       # sieve resumes with start_after = restart_from
    k: int
    sigma: int
    theta_hi: np.longdouble
    theta_lo: np.longdouble

    @classmethod
    def fresh(cls) -> "_Anchor":
        return cls(1, 0, 0, _LD(0.0), _LD(0.0))

    def fold_segment(self, seg: np.ndarray, local_theta_total) -> "_Anchor":
        hi, err = two_sum(self.theta_hi, local_theta_total)
        return _Anchor(int(seg[-1]), self.k + seg.size,
                       self.sigma + block_int_sum(seg), hi, self.theta_lo + err)

    def theta_query(self, local):
        return (self.theta_hi + local) + self.theta_lo


@dataclass
class ChebyshevState:
    """Prefix state after consuming the first k primes.

    sigma_k is an exact integer; theta_k is a longdouble whose absolute error
    is bounded by ``theta_error_bound(k, theta_k)``. ``logN_k`` aliases
    theta_k: log(p_1 ... p_k) equals the sum of the logs.
    """

    k: int
    p_k: int
    sigma_k: int
    theta_k: np.longdouble
    anchor: _Anchor | None = None

    @property
    def logN_k(self) -> np.longdouble:
        return self.theta_k

    @property
    def theta_err(self) -> float:
        return theta_error_bound(self.k, float(self.theta_k))

    def checkpoint(self) -> "Checkpoint":
        a = self.anchor if self.anchor is not None else _Anchor.fresh()
        return Checkpoint(self.p_k, self.k, self.sigma_k,
                          split_longdouble(self.theta_k),
                          a.restart_from, a.k, a.sigma,
                          split_longdouble(a.theta_hi),
                          split_longdouble(a.theta_lo))


@dataclass
class Checkpoint:
    """Versioned scan checkpoint (spec'd binary layout, see to_bytes)."""

    last_prime: int
    k: int
    sigma_k: int
    theta_hexpair: tuple[float, float]
    anchor_restart: int
    anchor_k: int
    anchor_sigma: int
    anchor_hi: tuple[float, float]
    anchor_lo: tuple[float, float]

    MAGIC = b"LFCP"
    VERSION = 1

    @property
    def theta(self):
        return join_longdouble(*self.theta_hexpair)

    def _anchor(self) -> _Anchor:
        return _Anchor(self.anchor_restart, self.anchor_k, self.anchor_sigma,
                       join_longdouble(*self.anchor_hi),
                       join_longdouble(*self.anchor_lo))

    def state(self) -> ChebyshevState:
        return ChebyshevState(self.k, self.last_prime, self.sigma_k,
                              self.theta, self._anchor())

    def to_bytes(self) -> bytes:
        buf = io.BytesIO()
        buf.write(self.MAGIC)
        buf.write(struct.pack("<I", self.VERSION))
        buf.write(struct.pack("<QQ", self.last_prime, self.k))
        buf.write(self.sigma_k.to_bytes(16, "little"))
        _write_hexfloats(buf, self.theta_hexpair)
        buf.write(struct.pack("<QQ", self.anchor_restart, self.anchor_k))
        buf.write(self.anchor_sigma.to_bytes(16, "little"))
        _write_hexfloats(buf, self.anchor_hi)
        _write_hexfloats(buf, self.anchor_lo)
        return buf.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "Checkpoint":
        buf = io.BytesIO(data)
        if buf.read(4) != cls.MAGIC:
            raise IntegrityError("bad checkpoint magic")
        (ver,) = struct.unpack("<I", buf.read(4))
        if ver != cls.VERSION:
            raise IntegrityError(f"unsupported checkpoint version {ver}")
        last_prime, k = struct.unpack("<QQ", buf.read(16))
        sigma = int.from_bytes(buf.read(16), "little")
        theta = _read_hexfloats(buf)
        restart, ak = struct.unpack("<QQ", buf.read(16))
        asigma = int.from_bytes(buf.read(16), "little")
        ahi = _read_hexfloats(buf)
        alo = _read_hexfloats(buf)
        return cls(last_prime, k, sigma, theta, restart, ak, asigma, ahi, alo)

    def write(self, path: str) -> None:
        tmp = path + ".tmp"
        with open(tmp, "wb") as f:
            f.write(self.to_bytes())
        os.replace(tmp, path)

    @classmethod
    def read(cls, path: str) -> "Checkpoint":
        with open(path, "rb") as f:
            return cls.from_bytes(f.read())


def _write_hexfloats(buf, pair):
    for part in pair:
        h = float(part).hex().encode()
        buf.write(struct.pack("<H", len(h)))
        buf.write(h)


def _read_hexfloats(buf):
    out = []
    for _ in range(2):
        (n,) = struct.unpack("<H", buf.read(2))
        out.append(float.fromhex(buf.read(n).decode()))
    return tuple(out)


def chebyshev_scan(limit: int, stop, checkpoint: Checkpoint | None = None,
                   segment_span: int = DEFAULT_SEGMENT_SPAN) -> ChebyshevState:
    """Fold primes <= limit until ``stop(state, next_prime)`` first holds.

    ``stop`` must be monotone along the scan (once true it stays true); every
    threshold predicate used in this library is. Returns the first state at
    which it holds. Raises RangeExhaustedError (carrying the final state) if
    the stream ends first. Restarting from ``checkpoint`` replays the anchor
    segment so all downstream states match an uninterrupted scan exactly.
    """
    if checkpoint is None:
        anchor = _Anchor.fresh()
        skip_upto = 0
    else:
        anchor = checkpoint._anchor()
        skip_upto = checkpoint.last_prime
    stream = PrimeStream(limit, segment_span=segment_span,
                         start_after=anchor.restart_from)

    seg_iter = stream.segments()
    cur = next(seg_iter, None)
    if cur is None:
        raise RangeExhaustedError("empty stream",
                                  _state_from_anchor(anchor))
    for nxt in seg_iter:
        hit = _scan_segment(anchor, cur, int(nxt[0]), stop, skip_upto)
        if hit is not None:
            return hit
        anchor = anchor.fold_segment(cur, comp_cumsum(np.log(cur.astype(_LD)))[-1])
        cur = nxt
    hit = _scan_segment(anchor, cur, None, stop, skip_upto)
    if hit is not None:
        return hit
    anchor = anchor.fold_segment(cur, comp_cumsum(np.log(cur.astype(_LD)))[-1])
    raise RangeExhaustedError("stop never held before stream exhaustion",
                              _state_from_anchor(anchor))


def _state_from_anchor(anchor: _Anchor) -> ChebyshevState:
    return ChebyshevState(anchor.k, anchor.restart_from, anchor.sigma,
                          anchor.theta_query(_LD(0.0)), anchor)


def _scan_segment(anchor, seg, next_first, stop, skip_upto):
    n_test = seg.size if next_first is not None else seg.size - 1
    if skip_upto:
        start = int(np.searchsorted(seg, skip_upto, side="right"))
    else:
        start = 0
    if n_test <= start:
        return None
    sig = np.cumsum(seg)
    th = comp_cumsum(np.log(seg.astype(_LD)))

    def state_at(i):
        return ChebyshevState(anchor.k + i + 1, int(seg[i]),
                              anchor.sigma + int(sig[i]),
                              anchor.theta_query(th[i]), anchor)

    def succ(i):
        return int(seg[i + 1]) if i + 1 < seg.size else int(next_first)

    last = n_test - 1
    if not stop(state_at(last), succ(last)):
        return None
    if stop(state_at(start), succ(start)):
        return state_at(start)
    lo, hi = start, last      # False at lo, True at hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if stop(state_at(mid), succ(mid)):
            hi = mid
        else:
            lo = mid
    return state_at(hi)


# ---------------------------------------------------------------------------
# power sums


@dataclass
class PowerSum:
    """Exact sum_{p<=x} p^r, with the strict (p < x) companion value."""

    r: int
    x: int
    value: int
    strict_value: int


def pi_r(r: int, x: int, segment_span: int = DEFAULT_SEGMENT_SPAN) -> PowerSum:
    """Exact power sum pi_r(x) = sum_{p<=x} p^r for 0 <= r <= 6."""
    return pi_r_multi((r,), x, segment_span=segment_span)[r]


def pi_r_multi(rs, x: int, segment_span: int = DEFAULT_SEGMENT_SPAN) -> dict:
    """Exact pi_r(x) for several exponents in a single sieve pass."""
    rs = tuple(rs)
    if any(not (0 <= r <= 6) for r in rs):
        raise DomainError("r must be in 0..6")
    if x < 2:
        raise DomainError("x must be >= 2")
    x = int(x)
    totals = {r: 0 for r in rs}
    for seg in PrimeStream(x, segment_span=segment_span).segments():
        lst = None
        for r in rs:
            if r == 0:
                totals[r] += int(seg.size)
            elif r == 1:
                totals[r] += block_int_sum(seg)
            elif r == 2 and x <= 3_000_000_000:
                totals[r] += block_int_sum(seg * seg)
            else:
                if lst is None:
                    lst = seg.tolist()
                totals[r] += sum(p ** r for p in lst)
    out = {}
    for r in rs:
        total = totals[r]
        if total >= 1 << 256:
            raise CapacityError(f"pi_{r}({x}) exceeds the 256-bit accumulator")
        if is_prime(x):
            strict = total - (x ** r if r > 0 else 1)
        else:
            strict = total
        out[r] = PowerSum(r, x, total, strict)
    return out


def W(x: int, prec: int | None = None):
    """W(x) = sum_{p<=x} log p / (1 - 1/p), nondecreasing in x.

    With ``prec`` set, evaluates in mpmath at that many bits (small x only);
    otherwise returns a longdouble computed segment-wise.
    """
    if x < 2:
        raise DomainError("x must be >= 2")
    if prec is not None:
        if x > 10 ** 7:
            raise CapacityError("mpmath W limited to x <= 1e7")
        with mp.workprec(prec):
            return mp.fsum(mp.ln(int(p)) * mp.mpf(int(p)) / (int(p) - 1)
                           for p in simple_sieve(int(x)))
    total = _LD(0.0)
    for seg in PrimeStream(int(x)).segments():
        p = seg.astype(_LD)
        total = comp_cumsum(np.log(p) * (p / (p - 1)), total)[-1]
    return total


# ---------------------------------------------------------------------------
# in-RAM prefix table


class PrimeTable:
    """Cached prefix arrays (primes, sigma, theta) up to a growable limit.

    sigma is an exact int64 cumulative sum (fine for table limits well under
    1e10); theta is a compensated longdouble cumulative sum. Grown
    geometrically on demand, capped to keep memory bounded.
    """

    def __init__(self, initial_limit: int = 1 << 21, hard_limit: int = 1 << 31):
        self.hard_limit = hard_limit
        self.limit = 0
        self.primes = np.empty(0, dtype=np.int64)
        self.sigma = np.empty(0, dtype=np.int64)
        self.theta = np.empty(0, dtype=_LD)
        self.ensure(initial_limit)

    def ensure(self, limit: int) -> None:
        if limit <= self.limit:
            return
        if limit > self.hard_limit:
            raise ResourceError(
                f"prime table capped at {self.hard_limit}; requested {limit}")
        new_limit = min(max(limit, 2 * self.limit, 1 << 21), self.hard_limit)
        if new_limit <= (1 << 27):
            primes = simple_sieve(new_limit)
        else:
            primes = np.concatenate(list(PrimeStream(new_limit).segments()))
        self.primes = primes
        self.sigma = np.cumsum(primes)
        self.theta = comp_cumsum(np.log(primes.astype(_LD)))
        self.limit = new_limit

    # -- queries (k is 1-based: k=1 is the prime 2) --

    def k_of(self, n: int) -> int:
        """Largest k with sigma_k <= n."""
        while self.sigma.size == 0 or int(self.sigma[-1]) <= n:
            self.ensure(self.limit * 2)
        return int(np.searchsorted(self.sigma, n, side="right"))

    def p_at(self, k: int) -> int:
        """The k-th prime (k >= 1)."""
        while k > self.primes.size:
            self.ensure(self.limit * 2)
        return int(self.primes[k - 1])

    def sigma_at(self, k: int) -> int:
        if k == 0:
            return 0
        self.p_at(k)
        return int(self.sigma[k - 1])

    def theta_at(self, k: int):
        if k == 0:
            return _LD(0.0)
        self.p_at(k)
        return self.theta[k - 1]

    def pi(self, x: int) -> int:
        """Number of primes <= x."""
        while x > self.limit:
            self.ensure(self.limit * 2)
        return int(np.searchsorted(self.primes, x, side="right"))

    def theta_of(self, x: int):
        """theta(x) = sum_{p<=x} log p."""
        return self.theta_at(self.pi(x))

    def theta_strict(self, x: int):
        """theta^-(x) = sum_{p<x} log p."""
        i = self.pi(x)
        if i and self.p_at(i) == x:
            i -= 1
        return self.theta_at(i)

    def sigma_strict(self, x: int) -> int:
        """sum_{p<x} p."""
        i = self.pi(x)
        if i and self.p_at(i) == x:
            i -= 1
        return self.sigma_at(i)

    def next_prime_geq(self, x: int) -> int:
        while self.primes.size == 0 or x > int(self.primes[-1]):
            self.ensure(self.limit * 2)
        i = int(np.searchsorted(self.primes, x, side="left"))
        return int(self.primes[i])

    def primes_between(self, lo: int, hi: int) -> np.ndarray:
        """Primes p with lo <= p <= hi as a view into the table."""
        while hi > self.limit:
            self.ensure(self.limit * 2)
        i = int(np.searchsorted(self.primes, lo, side="left"))
        j = int(np.searchsorted(self.primes, hi, side="right"))
        return self.primes[i:j]


_table: PrimeTable | None = None


def shared_table() -> PrimeTable:
    """Process-wide PrimeTable used by desk-scale helpers."""
    global _table
    if _table is None:
        _table = PrimeTable()
    return _table
