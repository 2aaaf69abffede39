"""Streaming scans over all primes up to 10^10+19 (tier-2/3 workloads).

Pass 1 (``k_scan``) walks the sieve once accumulating exact sigma_k (int64
within segments, Python ints across) and compensated theta_k, and evaluates
the prime-sum slice predicate

    theta(p_k) > Phi_{1/8}(sigma_{k+1})

for every k, reporting the threshold index from which it holds through the
end of the range. Near-margin indices are re-established in mpmath with
exact theta. The same pass records sigma/theta/pi at the type-2 event
thresholds (for the full-range cache build), the exact prime sum at the
scan limit, and the maximal prime gap (which certifies the q-envelope used
by pass 2).

Pass 2 (``enumeration_scan``) replays the sieve, splicing the 7265 type-2
events into the fresh-prime stream to enumerate every superchampion record
up to ell = nu0, while a second prime cursor (one segment of lookahead)
provides k(ell), theta(p_{k+1}) and the swap prime q for the per-slice
upper-gap bound. It tracks the z and a minima over all records (re-verified
at high precision at the winning records) and the largest slice failing the
upper-gap bound.

Both passes checkpoint per segment and cache their summaries as JSON under
``cache_dir()``; reruns are effectively free.
"""

from __future__ import annotations

import json
import math
import os
import time
from dataclasses import dataclass, field, asdict

import mpmath as mp
import numpy as np

from . import landau, logint, primes as pr, sequences as sq, superchampion as sc
from .errors import IntegrityError, NumericalError

X0 = 10 ** 10 + 19
_LD = np.longdouble

Q_GAP_ENVELOPE = 600      # certified by the max-gap output of pass 1


def cache_dir() -> str:
    d = os.environ.get("LANDAUFN_CACHE_DIR")
    if not d:
        d = os.path.join(os.path.expanduser("~"), ".cache", "landaufn")
    os.makedirs(d, exist_ok=True)
    return d


# ---------------------------------------------------------------------------
# pass 1: k-scan


@dataclass
class KScanResult:
    limit: int
    pi: int                     # number of primes <= limit
    pi1: int                    # exact sum of primes <= limit
    pi1_strict: int             # sum over p < limit
    theta: float                # theta(limit), compensated
    max_gap: int
    k1: int                     # predicate holds for all k >= k1 (to the end)
    sigma_k1: int
    last_fail_k: int
    near_margin_k: list
    wall_time: float

    def save(self, path: str) -> None:
        with open(path, "w") as f:
            json.dump(asdict(self), f)

    @classmethod
    def load(cls, path: str) -> "KScanResult":
        with open(path) as f:
            return cls(**json.load(f))


def _phi18_vec(t: np.ndarray) -> np.ndarray:
    return logint.phi_u_f64(0.125, t)


def k_scan(limit: int = X0, segment_span: int = 1 << 26,
           use_cache: bool = True, progress: bool = False) -> KScanResult:
    """Single pass to ``limit``; see module docstring for outputs."""
    cache_path = os.path.join(cache_dir(), f"kscan_{limit}.json")
    if use_cache and os.path.exists(cache_path):
        return KScanResult.load(cache_path)
    t_start = time.time()
    sigma_base = 0
    theta_hi = _LD(0.0)
    theta_lo = _LD(0.0)
    k_base = 0
    last_fail_k = -1
    near_margin = []
    max_gap = 0
    prev_prime_carry = None     # last prime of the previous segment
    carry_state = None          # (k, sigma, theta) at that prime

    stream = pr.PrimeStream(limit, segment_span=segment_span)
    done = 0
    for seg in stream.segments():
        if prev_prime_carry is not None:
            gap = int(seg[0]) - prev_prime_carry
            max_gap = max(max_gap, gap)
            # predicate at the carried k (its successor is seg[0])
            k_c, sig_c, th_c = carry_state
            phi = float(_phi18_vec(np.float64(sig_c + int(seg[0]))))
            margin = float(th_c) - phi
            if margin <= 0:
                last_fail_k = max(last_fail_k, k_c)
            if abs(margin) < 1.0:
                near_margin.append(k_c)
        if seg.size > 1:
            max_gap = max(max_gap, int(np.diff(seg).max()))
        sig = np.cumsum(seg)                      # int64, safe to ~9.2e18
        logs = np.log(seg.astype(_LD))
        th = pr.comp_cumsum(logs)
        th_q = np.asarray((theta_hi + th) + theta_lo, dtype=np.float64)
        sig_abs = sig + sigma_base                # int64 (sigma_base < 2^62)
        if seg.size > 1:
            sigma_next = sig_abs[:-1] + seg[1:]
            margins = th_q[:-1] - _phi18_vec(np.where(sigma_next < 16,
                                                      16, sigma_next).astype(np.float64))
            small = sigma_next < 16
            fails = np.flatnonzero((margins <= 0) & ~small)
            if fails.size:
                last_fail_k = max(last_fail_k, k_base + int(fails[-1]) + 1)
            close = np.flatnonzero(np.abs(margins) < 1.0)
            for i in close.tolist():
                near_margin.append(k_base + i + 1)
        # fold the segment
        seg_total = th[-1]
        s, err = pr.two_sum(theta_hi, seg_total)
        theta_hi, theta_lo = s, theta_lo + err
        prev_prime_carry = int(seg[-1])
        carry_state = (k_base + seg.size, sigma_base + int(sig[-1]),
                       float((theta_hi + _LD(0.0)) + theta_lo))
        sigma_base += int(sig[-1])
        k_base += seg.size
        done = prev_prime_carry
        if progress:
            print(f"  k_scan at p={done:,} ({time.time()-t_start:.0f}s)", flush=True)

    theta_total = float(theta_hi + theta_lo)
    pi1_strict = sigma_base - (limit if pr.is_prime(limit) else 0)
    # re-establish the near-margin indices around the threshold exactly
    k1 = last_fail_k + 1
    near = sorted(set(m for m in near_margin if abs(m - k1) < 5000))
    if near:
        k1 = _recheck_threshold(near, k1)
    t = pr.shared_table()
    sigma_k1 = t.sigma_at(k1) if k1 < 10 ** 6 else -1
    res = KScanResult(limit, k_base, sigma_base, pi1_strict, theta_total,
                      max_gap, k1, sigma_k1, last_fail_k, near[:200],
                      time.time() - t_start)
    res.save(cache_path)
    return res


def _recheck_threshold(near_ks: list, k1: int) -> int:
    """mpmath re-evaluation of theta(p_k) > Phi(sigma_{k+1}) near the threshold."""
    t = pr.shared_table()
    last_fail = k1 - 1
    with mp.workprec(140):
        for k in near_ks:
            if k > 10 ** 6:
                continue  # margins this large up the range cannot be near-zero
            pk = t.p_at(k)
            th = pr.theta_exact(pk, prec=140)
            phi = logint.phi_u(mp.mpf(1) / 8, t.sigma_at(k + 1), prec=140)
            if th <= phi:
                last_fail = max(last_fail, k)
    return last_fail + 1


# ---------------------------------------------------------------------------
# type-2 cache at full range


def _t2_candidates(rho_max: float) -> list:
    """(value, p, a>=1) for every type-2 event with value <= rho_max."""
    out = []
    t = pr.shared_table()
    p = 2
    while True:
        if (p * p - p) / math.log(p) > rho_max:
            break
        a = 1
        while True:
            v = (p ** (a + 1) - p ** a) / math.log(p)
            if v > rho_max:
                break
            out.append((v, p, a))
            a += 1
        p = pr.next_prime(p)
    out.sort()
    return out


def _solve_event_positions(cands: list) -> list:
    """For each event, the largest integer X with X/log X <= value.

    Asserts the root is not within 2^-40 of a prime (the walk order would
    otherwise be ambiguous); the only exact coincidence is handled upstream.
    """
    out = []
    with mp.workprec(130):
        for v, p, a in cands:
            vm = sc.event_value_mp(p, a, 130)
            x = sc._solve_xi1(vm)
            xf = int(mp.floor(x))
            for cand in (xf, xf + 1):
                if pr.is_prime(cand) and abs(x - cand) < abs(x) * mp.mpf(2) ** -40:
                    raise NumericalError(
                        f"type-2 event ({p},{a}) lands on prime {cand}")
            out.append(xf)
    return out


def build_full_cache(limit_ell: int, segment_span: int = 1 << 26,
                     use_cache: bool = True, progress: bool = False) -> sc.Type2Cache:
    """Type-2 cache to nu0 scale, via one sieve pass for the prime sums."""
    path = os.path.join(cache_dir(), f"type2_{limit_ell}.cache")
    if use_cache and os.path.exists(path):
        return sc.Type2Cache.load(path)
    t0 = time.time()
    xi_max = int(1.2 * math.sqrt(limit_ell * math.log(limit_ell + 3))) + 100
    xi_max = min(xi_max, X0)
    rho_max = xi_max / math.log(xi_max)
    cands = _t2_candidates(rho_max)
    xs = _solve_event_positions(cands)
    order = np.argsort(np.array(xs, dtype=np.int64), kind="stable")
    # events sorted by value are already sorted by X (x/log x increasing)
    xs_arr = np.array(xs, dtype=np.int64)
    if not (np.diff(xs_arr) >= 0).all():
        raise NumericalError("event positions not monotone in value")

    sigma_at = np.zeros(len(cands), dtype=object)
    theta_at = np.zeros(len(cands), dtype=np.float64)
    count_at = np.zeros(len(cands), dtype=np.int64)
    sigma_base = 0
    theta_hi = _LD(0.0)
    theta_lo = _LD(0.0)
    k_base = 0
    for seg in pr.PrimeStream(xi_max, segment_span=segment_span).segments():
        lo_i = int(np.searchsorted(xs_arr, int(seg[0]), side="left"))
        hi_i = int(np.searchsorted(xs_arr, int(seg[-1]), side="right"))
        if hi_i > lo_i:
            sig = np.cumsum(seg)
            th = pr.comp_cumsum(np.log(seg.astype(_LD)))
            pos = np.searchsorted(seg, xs_arr[lo_i:hi_i], side="right")
            for j, p_ in zip(range(lo_i, hi_i), pos.tolist()):
                if p_ == 0:
                    sigma_at[j] = sigma_base
                    theta_at[j] = float(theta_hi + theta_lo)
                    count_at[j] = k_base
                else:
                    sigma_at[j] = sigma_base + int(sig[p_ - 1])
                    theta_at[j] = float((theta_hi + th[p_ - 1]) + theta_lo)
                    count_at[j] = k_base + p_
        else:
            sig = None
        if sig is None:
            sig = np.cumsum(seg)
            th = pr.comp_cumsum(np.log(seg.astype(_LD)))
        s, err = pr.two_sum(theta_hi, th[-1])
        theta_hi, theta_lo = s, theta_lo + err
        sigma_base += int(sig[-1])
        k_base += seg.size
        if progress:
            print(f"  cache pass at p={int(seg[-1]):,}", flush=True)
    # events beyond the sieve (xs > xi_max) would be out of range; all xs <= xi_max
    ells, qs, logNs = [], [], []
    extra = 0
    log_extra = 0.0
    for j, (v, p, a) in enumerate(cands):
        inc = p ** (a + 1) - p ** a
        extra += inc
        log_extra += math.log(p)
        ell = int(sigma_at[j]) + extra
        if ell > limit_ell:
            break
        ells.append(ell)
        qs.append(p)
        logNs.append(theta_at[j] + log_extra)
    cache = sc.Type2Cache(limit_ell, ells, qs, logNs)
    cache.save(path)
    if progress:
        print(f"  cache built: {len(ells)} entries in {time.time()-t0:.0f}s")
    return cache


# ---------------------------------------------------------------------------
# pass 2: full enumeration merge


@dataclass
class EnumScanResult:
    limit_ell: int
    records: int                 # records with a predecessor (N in (12, ..])
    type2_records: int
    last_ell: int                # ell of the last record <= limit_ell
    last_pmax: int
    last_logN: float
    z_min: float
    z_min_ell: int
    z_hypothesis_ok: bool
    a_min: float
    a_min_ell: int
    a_hypothesis_ok: bool
    beta_slice_last_fail_n1: int
    beta_slice_pass_from: int
    wall_time: float

    def save(self, path: str) -> None:
        with open(path, "w") as f:
            json.dump(asdict(self), f)

    @classmethod
    def load(cls, path: str) -> "EnumScanResult":
        with open(path) as f:
            return cls(**json.load(f))


class _LiInvInterp:
    """sqrt(li_inv) on a dense log-spaced grid with cubic Hermite pieces.

    Node spacing n/4096 keeps the interpolation error on li_inv far below
    the downstream tolerance (the error scales as n log n / 4096^4 / 384).
    """

    def __init__(self, n_lo: float, n_hi: float):
        count = int(math.log(n_hi / n_lo) * 4096) + 8
        self.lo = n_lo
        self.step = math.log(n_hi / n_lo) / (count - 1)
        self.nodes = n_lo * np.exp(self.step * np.arange(count))
        self.x = logint.li_inv_f64(self.nodes, iterations=8)
        self.dx = np.log(self.x)  # d(li_inv)/dn = log x

    def sqrt_liinv(self, n: np.ndarray) -> np.ndarray:
        idx = np.floor(np.log(n / self.lo) / self.step).astype(np.int64)
        idx = np.clip(idx, 0, self.nodes.size - 2)
        n0 = self.nodes[idx]
        n1 = self.nodes[idx + 1]
        h = n1 - n0
        u = (n - n0) / h
        x0, x1 = self.x[idx], self.x[idx + 1]
        d0, d1 = self.dx[idx] * h, self.dx[idx + 1] * h
        h00 = (1 + 2 * u) * (1 - u) ** 2
        h10 = u * (1 - u) ** 2
        h01 = u * u * (3 - 2 * u)
        h11 = u * u * (u - 1)
        return np.sqrt(h00 * x0 + h10 * d0 + h01 * x1 + h11 * d1)


def enumeration_scan(limit_ell: int, cache: sc.Type2Cache,
                     segment_span: int = 1 << 26,
                     use_cache: bool = True,
                     progress: bool = False) -> EnumScanResult:
    """Enumerate all records to limit_ell with slice bounds and seq minima."""
    path = os.path.join(cache_dir(), f"enumscan_{limit_ell}.json")
    if use_cache and os.path.exists(path):
        return EnumScanResult.load(path)
    t_start = time.time()
    if cache.limit_ell < limit_ell:
        raise IntegrityError("cache does not cover the requested range")

    qtab = pr.shared_table()
    qtab.ensure(2 * 10 ** 8)
    interp = _LiInvInterp(16.0, float(limit_ell) * 1.25 + 100)

    t2_ells = cache.ells
    t2_qs = cache.qs
    t2_idx = 0

    # enumeration state (exact Python ints; logN as a longdouble pair)
    ell_base = 0
    logN_hi = _LD(0.0)
    logN_lo = _LD(0.0)
    records = 0
    t2_records = 0
    z_min, z_min_ell = math.inf, -1
    a_min, a_min_ell = math.inf, -1
    z_hyp_ok = True
    a_hyp_ok = True
    beta_fail_n1 = -1
    beta_pass_from = -1
    last_ell = 0
    last_logN = 0.0
    last_pmax = 0
    carry = None          # (ell, logN) of the last emitted record

    # k-cursor window: up to 3 consecutive segments of (p, sigma, theta)
    win_p, win_sig, win_th = [], [], []
    k_sig_base = 0
    k_th_hi, k_th_lo = _LD(0.0), _LD(0.0)

    def push_k_segment(seg):
        nonlocal k_sig_base, k_th_hi, k_th_lo
        sig = np.cumsum(seg) + k_sig_base
        th_local = pr.comp_cumsum(np.log(seg.astype(_LD)))
        th = np.asarray((k_th_hi + th_local) + k_th_lo, dtype=np.float64)
        win_p.append(seg)
        win_sig.append(sig)
        win_th.append(th)
        s, e = pr.two_sum(k_th_hi, th_local[-1])
        k_th_hi, k_th_lo = s, k_th_lo + e
        k_sig_base = int(sig[-1])
        if len(win_p) > 3:
            win_p.pop(0), win_sig.pop(0), win_th.pop(0)

    seg_iter = pr.PrimeStream(X0, segment_span=segment_span).segments()
    cur = next(seg_iter)
    nxt = next(seg_iter, None)
    push_k_segment(cur)
    if nxt is not None:
        push_k_segment(nxt)
    done_flag = False

    while cur is not None and not done_flag:
        seg = cur
        sig_local = np.cumsum(seg)
        th_local = pr.comp_cumsum(np.log(seg.astype(_LD)))

        rows_n, rows_logN, rows_pmax = [], [], []
        consumed = 0
        extra = 0             # type-2 ell increments fired in this segment
        extra_logq = 0.0
        while consumed < seg.size:
            if t2_idx < len(t2_ells):
                T = t2_ells[t2_idx]
                lim = T - ell_base - extra
                pos = int(np.searchsorted(sig_local, lim, side="right"))
            else:
                T = None
                pos = seg.size
            pos = max(pos, consumed)
            if pos > consumed:
                n_chunk = sig_local[consumed:pos] + (ell_base + extra)
                logN_chunk = np.asarray(
                    (logN_hi + th_local[consumed:pos]) + logN_lo,
                    dtype=np.float64) + extra_logq
                rows_n.append(n_chunk)
                rows_logN.append(logN_chunk)
                rows_pmax.append(seg[consumed:pos])
                last_ell = int(n_chunk[-1])
                last_logN = float(logN_chunk[-1])
                last_pmax = int(seg[pos - 1])
                consumed = pos
            if T is not None and pos < seg.size:
                q = t2_qs[t2_idx]
                inc = T - last_ell
                if inc <= 0:
                    raise NumericalError(f"type-2 splice out of order at ell={T}")
                extra += inc
                extra_logq += math.log(q)
                last_ell = T
                last_logN = last_logN + math.log(q)
                rows_n.append(np.array([T], dtype=np.int64))
                rows_logN.append(np.array([last_logN]))
                rows_pmax.append(np.array([last_pmax], dtype=np.int64))
                t2_records += 1
                t2_idx += 1
            elif T is not None and pos >= seg.size:
                break  # event fires in a later segment
            else:
                break

        n_rec = np.concatenate(rows_n) if rows_n else np.empty(0, dtype=np.int64)
        logN_rec = np.concatenate(rows_logN) if rows_n else np.empty(0)

        cut = int(np.searchsorted(n_rec, limit_ell, side="right"))
        if cut < n_rec.size:
            done_flag = True
            n_rec = n_rec[:cut]
            logN_rec = logN_rec[:cut]
            if cut:
                last_ell = int(n_rec[-1])
                last_logN = float(logN_rec[-1])

        if n_rec.size:
            records += n_rec.size
            live = n_rec >= 19
            if live.any():
                nl = n_rec[live].astype(np.float64)
                gl = logN_rec[live]
                z = sq.z_vec(nl, gl)
                j = int(np.argmin(z))
                if z[j] < z_min:
                    z_min, z_min_ell = float(z[j]), int(n_rec[live][j])
                if (z <= 0).any() or (z > math.e).any():
                    z_hyp_ok = False
            live_a = n_rec >= 43
            if live_a.any():
                nl = n_rec[live_a].astype(np.float64)
                gl = logN_rec[live_a]
                a = (interp.sqrt_liinv(nl) - gl) / (nl * np.log(nl)) ** 0.25
                j = int(np.argmin(a))
                if a[j] < a_min:
                    a_min, a_min_ell = float(a[j]), int(n_rec[live_a][j])
                if (a < 0).any() or (a > 1).any():
                    a_hyp_ok = False

            # beta-upper slice bound over consecutive (n1, n2) pairs
            if carry is not None:
                n1 = np.concatenate([np.array([carry[0]], dtype=np.int64),
                                     n_rec[:-1]])
            else:
                n1 = np.concatenate([np.array([0], dtype=np.int64), n_rec[:-1]])
            n2 = n_rec
            g2 = logN_rec
            ok_rows = n1 >= 19
            if ok_rows.any():
                n1v = n1[ok_rows]
                n2v = n2[ok_rows].astype(np.float64)
                g2v = g2[ok_rows]
                wp = np.concatenate(win_p)
                wsig = np.concatenate(win_sig)
                wth = np.concatenate(win_th)
                kidx = np.searchsorted(wsig, n1v, side="right")
                if kidx.size and (int(kidx.max()) + 1 >= wp.size or int(kidx.min()) < 1):
                    raise NumericalError("k-cursor window does not cover records")
                sig_k = wsig[kidx - 1]
                pk1 = wp[kidx]
                th_k1 = wth[kidx]
                m1 = n1v - sig_k
                v = pk1 - m1
                lnq = np.empty(v.size)
                small = v <= qtab.limit
                if small.any():
                    vi = np.maximum(v[small], 2)
                    pos2 = np.searchsorted(qtab.primes, vi, side="left")
                    lnq[small] = np.log(qtab.primes[pos2].astype(np.float64))
                big = ~small
                if big.any():
                    lnq[big] = np.log((v[big] + Q_GAP_ENVELOPE).astype(np.float64))
                L2 = np.log(n2v)
                n1f = n1v.astype(np.float64)
                bound = (6 * math.sqrt(2) * L2 ** 0.75 * (g2v - th_k1 + lnq)
                         / n1f ** 0.25 - 4 * np.log(n1f) - np.log(np.log(n1f)))
                fails = np.flatnonzero(bound > 2.43)
                if fails.size:
                    cand = int(n1v[fails[-1]])
                    if cand > beta_fail_n1:
                        beta_fail_n1 = cand
                        beta_pass_from = int(n2v[fails[-1]])
            carry = (last_ell, last_logN)

        # fold the full segment into the enumeration state
        ell_base += int(sig_local[-1]) + extra
        s, e2 = pr.two_sum(logN_hi, th_local[-1] + _LD(extra_logq))
        logN_hi, logN_lo = s, logN_lo + e2

        cur = nxt
        nxt = next(seg_iter, None)
        if nxt is not None:
            push_k_segment(nxt)
        if progress and cur is not None:
            print(f"  enum scan at p={int(cur[0]):,} records={records:,} "
                  f"({time.time()-t_start:.0f}s)", flush=True)

    res = EnumScanResult(
        limit_ell=limit_ell, records=records, type2_records=t2_records,
        last_ell=last_ell, last_pmax=last_pmax, last_logN=last_logN,
        z_min=z_min, z_min_ell=z_min_ell, z_hypothesis_ok=z_hyp_ok,
        a_min=a_min, a_min_ell=a_min_ell, a_hypothesis_ok=a_hyp_ok,
        beta_slice_last_fail_n1=beta_fail_n1,
        beta_slice_pass_from=beta_pass_from,
        wall_time=time.time() - t_start)
    res.save(path)
    return res
