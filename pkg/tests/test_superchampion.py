"""Tests for xi profiles, N_rho, enumeration, the type-2 cache, and excesses."""

import math
import random

import mpmath as mp
import numpy as np
import pytest

from landaufn import landau, primes as pr, superchampion as sc
from landaufn.errors import DomainError, IntegrityError

random.seed(11)

X0 = 10 ** 10 + 19

FIG1 = [
    (7, 12, False, None),
    (12, 60, False, None),
    (19, 420, False, None),
    (30, 4620, False, None),
    (43, 60060, False, None),
    (49, 180180, True, 3),
    (53, 360360, True, 2),
    (70, 6126120, False, None),
    (89, 116396280, False, None),
]


# --- brute-force oracle: convex hull of (log M, ell(M)) ---------------------------

def hull_superchampions(limit):
    """Lower convex hull vertices of {(log M, ell(M)) : M <= limit}."""
    ell = np.zeros(limit + 1, dtype=np.int64)
    for p in pr.simple_sieve(limit).tolist():
        pk = p
        prev = 0
        while pk <= limit:
            ell[pk::pk] += pk - prev    # lift the p-contribution to p^a
            prev = pk
            pk *= p
    ms = np.arange(1, limit + 1)
    logs = np.log(ms.astype(np.float64))
    pts = sorted(zip(logs.tolist(), ell[1:].tolist(), ms.tolist()))
    hull = []
    for x, y, m in pts:
        # lower hull: keep strict left turns (slopes increase along the hull)
        while len(hull) >= 2:
            (x1, y1, _), (x2, y2, _) = hull[-2], hull[-1]
            if (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1) > 1e-12:
                break
            hull.pop()
        hull.append((x, y, m))
    return [(m, y) for x, y, m in hull]


def test_hull_oracle_matches_enumeration():
    limit = 8 * 10 ** 6
    hull = hull_superchampions(limit)
    # only vertices a full successor-ratio inside the range are certain
    # (the hull frays at the boundary where the next true vertex is cut off)
    trusted = [(m, l) for m, l in hull if 12 <= m <= limit // 18]
    assert trusted == [(12, 7), (60, 12), (420, 19), (4620, 30),
                       (60060, 43), (180180, 49), (360360, 53)]
    got = [r.ell for r in sc.enumerate_superchampions(trusted[-1][1])]
    assert got == [l for _, l in trusted]
    # first type-2 record overall is at ell = 49
    first_t2 = next(r for r in sc.enumerate_superchampions(10 ** 4)
                    if r.type2 and r.ell > 7)
    assert first_t2.ell == 49


# --- Fig-1-scale checks --------------------------------------------------------------

def test_first_records():
    recs = list(sc.enumerate_superchampions(89))
    assert [(r.ell, r.type2 if r.ell > 7 else False,
             r.type2_q if r.ell > 7 else None) for r in recs] == \
        [(l, t, q) for l, _, t, q in FIG1]
    for (l, N, _, _), r in zip(FIG1, recs):
        assert abs(r.logN - math.log(N)) < 1e-9


def test_record_n_equals_g_of_ell():
    # N = g(ell(N)) (tested against the independent DP)
    for r in sc.enumerate_superchampions(20000):
        g = landau.logg_table(20000)[r.ell]
        assert abs(r.logN - g) < 1e-8, r.ell


def test_successor_log_steps():
    recs = list(sc.enumerate_superchampions(10 ** 5))
    for a, b in zip(recs, recs[1:]):
        if b.type2:
            assert abs((b.logN - a.logN) - math.log(b.type2_q)) < 1e-9
        else:
            assert abs((b.logN - a.logN) - math.log(pr.next_prime(a.pmax))) < 1e-9
        assert b.ell > a.ell and b.logN > a.logN


def test_ell_gap_at_most_xi():
    recs = list(sc.enumerate_superchampions(10 ** 6))
    for a, b in zip(recs[1:], recs[2:]):
        loc = sc.locate(a.ell)
        xi = float(loc.profile.xi)
        assert b.ell - a.ell <= xi * (1 + 1e-12)


def test_prefix_is_squarefull_part():
    for r in sc.enumerate_superchampions(3000):
        f = landau.g_exact(r.ell)
        pre = [(p, a) for p, a in f.factors if a >= 2]
        assert r.prefix_ell == sum(p ** a for p, a in pre)
        assert abs(r.prefix_logA - sum(a * math.log(p) for p, a in pre)) < 1e-9


# --- N_rho ---------------------------------------------------------------------------

def test_N_rho_examples():
    assert sc.build_N_rho((3, 1), "open").value() == 60060
    assert sc.build_N_rho((3, 1), "closed").value() == 180180
    assert sc.build_N_rho((17, 0), "open").value() == 360360
    assert sc.build_N_rho((17, 0), "closed").value() == 6126120


def test_N_rho_non_event():
    a = sc.build_N_rho(6.1, "open")
    b = sc.build_N_rho(6.1, "closed")
    assert a.value() == b.value()


def test_N_rho_matches_enumeration():
    # recompute ell and log N from scratch at sampled records
    recs = list(sc.enumerate_superchampions(10 ** 5))
    for r in random.sample(recs[1:], 25):
        f = sc.build_N_rho(r.rho_event, "closed")
        assert f.ell == r.ell
        assert abs(f.log_value - r.logN) < 1e-9


def test_domain_errors():
    with pytest.raises(DomainError):
        sc.xi_profile(2.0)
    with pytest.raises(DomainError):
        sc.locate(6)


# --- xi profile -----------------------------------------------------------------------

def test_xi_profile_at_x0():
    prof = sc.xi_profile((X0, 0))
    assert mp.nstr(prof.J, 7) == "29.16533"
    assert float(prof.xi_at(2)) == pytest.approx(69588.859, abs=0.01)
    assert float(prof.xi_at(3)) == pytest.approx(1468.86, abs=0.01)
    assert float(prof.xi_at(4)) == pytest.approx(220.259, abs=0.01)
    assert float(prof.xi_at(5)) == pytest.approx(71.595, abs=0.01)
    assert 2.0 <= float(prof.xi_at(29)) < 2.01
    assert len(prof.xi_j) == 28  # j = 2..29


def test_xi_monotone_lemma():
    # xi_j <= (xi/j)^(1/j) for 2 <= j <= 8 when xi >= lambda_j
    lambdas = {2: 80, 3: 586, 4: 6381, 5: 89017, 6: 1499750,
               7: 29511244, 8: 663184075}
    for xi in (1e5, 1e7, 1e9, 1e10):
        prof = sc.xi_profile(xi / math.log(xi))
        for j in range(2, min(9, len(prof.xi_j) + 2)):
            if xi >= lambdas[j]:
                assert float(prof.xi_at(j)) <= (xi / j) ** (1 / j) * (1 + 1e-12)
            assert float(prof.xi_at(j)) <= xi ** (1 / j) * (1 + 1e-12)


def test_xi2_brackets():
    res = sc.check_xi_bounds([X0, 2 * X0, 31650.0, 4.3e9])
    assert all(r.passed for r in res)


def test_xi2_contains_x2_0():
    lo = math.sqrt(X0 / 2) * (1 - 0.366 / math.log(X0))
    hi = math.sqrt(X0 / 2) * (1 - 0.346 / math.log(X0))
    xi2 = float(sc.xi2_of(X0))
    assert lo < xi2 < hi
    assert 69588.8 <= xi2 < 69588.9


def test_threshold_constants():
    w0, e2w0 = sc.xi2_threshold_root()
    assert abs(float(w0) - 5.1811243) < 1e-6
    assert abs(float(e2w0) - 31642.25) < 0.01
    a0, t0 = sc.xi2_double_root()
    assert abs(float(a0) - 0.370612465) < 1e-8
    assert abs(float(t0) - 7.86682407) < 1e-7


# --- type-2 cache ----------------------------------------------------------------------

def test_cache_entries():
    cache = sc.build_type2_cache(10 ** 5)
    d = {el: (q, lg) for el, q, lg in zip(cache.ells, cache.qs, cache.logNs)}
    assert 49 in d and d[49][0] == 3
    assert abs(d[49][1] - math.log(180180)) < 1e-9
    assert 53 in d and d[53][0] == 2
    assert abs(d[53][1] - math.log(360360)) < 1e-9
    # first type-2 entry beyond the seed record is ell = 49
    assert min(e for e in cache.ells if e > 7) == 49


def test_cache_file_roundtrip(tmp_path):
    cache = sc.build_type2_cache(10 ** 5)
    path = str(tmp_path / "t2.cache")
    cache.save(path)
    loaded = sc.Type2Cache.load(path)
    assert loaded.ells == cache.ells
    assert loaded.qs == cache.qs
    assert loaded.logNs == cache.logNs


def test_cache_gap_rejected():
    cache = sc.build_type2_cache(10 ** 4)
    with pytest.raises(IntegrityError, match="cache"):
        list(sc.enumerate_superchampions(10 ** 6, cache=cache))


def test_cache_validation():
    with pytest.raises(IntegrityError):
        sc.Type2Cache(100, [49, 49], [3, 2], [1.0, 2.0])
    with pytest.raises(IntegrityError):
        sc.Type2Cache(100, [49, 53], [4, 2], [1.0, 2.0])


# --- locate / excesses -------------------------------------------------------------------

def test_locate_45():
    loc = sc.locate(45)
    assert loc.nprime.ell == 43
    assert loc.nsecond.ell == 49
    assert abs(loc.rho - 6 / math.log(3)) < 1e-12
    assert float(loc.profile.xi) == pytest.approx(14.6673, abs=1e-3)


def test_locate_70():
    loc = sc.locate(70)
    assert abs(loc.nprime.logN - math.log(6126120)) < 1e-9


def test_locate_at_record_point():
    for r in sc.enumerate_superchampions(5000):
        loc = sc.locate(r.ell)
        assert loc.nprime.ell == r.ell


def test_excess_small():
    ex = sc.excesses(12)   # N' = 60 = 2^2*3*5: E = (4-2) = 2
    assert ex.E == 2


def test_excess_identities():
    # ell(N') = sum_{p<xi} p + E and log N' = theta^-(xi) + E*
    t = pr.shared_table()
    for n in (45, 100, 1000, 54321):
        loc = sc.locate(n)
        ex = sc.excesses(n)
        xi_floor = int(float(loc.profile.xi))
        # careful when xi is an integer (prime) boundary: p < xi
        sig = t.sigma_strict(xi_floor if abs(float(loc.profile.xi) - xi_floor) > 1e-9
                             else xi_floor)
        if abs(float(loc.profile.xi) - round(float(loc.profile.xi))) < 1e-9:
            sig = t.sigma_strict(round(float(loc.profile.xi)))
        else:
            sig = t.sigma_strict(int(float(loc.profile.xi)) + 1)
        assert loc.nprime.ell == sig + ex.E
        th = float(t.theta_strict(round(float(loc.profile.xi)))
                   if abs(float(loc.profile.xi) - round(float(loc.profile.xi))) < 1e-9
                   else t.theta_strict(int(float(loc.profile.xi)) + 1))
        assert abs(loc.nprime.logN - (th + float(ex.Estar))) < 1e-7


def test_excesses_nu0_constants():
    ex = sc.excesses_at((X0, 0), n=0, i0=None, ell_nprime=0)
    assert ex.E == 10517469635602
    assert abs(float(ex.Estar) - 70954.46) < 0.01


def test_s_of_n_small():
    # definition check: sum of s primes past P+(N') fits in n - ell(N') + E
    t = pr.shared_table()
    for n in (45, 500, 12345):
        ex = sc.excesses(n)
        loc = sc.locate(n)
        budget = n - loc.nprime.ell + ex.E
        i0 = ex.i0
        acc = 0
        s = 0
        while True:
            p = t.p_at(i0 + s + 1)
            if acc + p > budget:
                break
            acc += p
            s += 1
        assert s == ex.s
