"""Tests for the segmented sieve, Chebyshev scans, and exact power sums."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from landaufn import primes
from landaufn.errors import DomainError, RangeExhaustedError


# --- independent oracles -----------------------------------------------------

def trial_division_primes(limit):
    """Independent oracle: primality by trial division."""
    out = []
    for n in range(2, limit + 1):
        if all(n % d for d in range(2, math.isqrt(n) + 1)):
            out.append(n)
    return out


ORACLE_PRIMES_200 = trial_division_primes(200)


def collect(limit, **kw):
    return np.concatenate(list(primes.PrimeStream(limit, **kw).segments()))


# --- PrimeStream --------------------------------------------------------------

def test_first_primes():
    assert collect(10).tolist() == [2, 3, 5, 7]


def test_against_trial_division():
    assert collect(200).tolist() == ORACLE_PRIMES_200


def test_count_to_1e6():
    # oracle: a second, independent sieve implementation
    is_p = bytearray([1]) * (10 ** 6 + 1)
    is_p[0] = is_p[1] = 0
    for p in range(2, 1001):
        if is_p[p]:
            for q in range(p * p, 10 ** 6 + 1, p):
                is_p[q] = 0
    oracle_count = sum(is_p)
    assert oracle_count == 78498
    assert collect(10 ** 6).size == 78498


def test_strictly_increasing_no_gaps():
    ps = collect(10 ** 5, segment_span=1 << 12)
    assert (np.diff(ps) > 0).all()
    assert ps.tolist() == primes.simple_sieve(10 ** 5).tolist()


def test_segment_span_does_not_change_emission():
    a = collect(3 * 10 ** 4, segment_span=1 << 10)
    b = collect(3 * 10 ** 4, segment_span=1 << 20)
    assert a.tolist() == b.tolist()


def test_resource_error_names_segment_count():
    with pytest.raises(primes.ResourceError, match="segments"):
        primes.PrimeStream(1 << 39, segment_span=1 << 8)


def test_is_prime_matches_oracle():
    for n in range(200):
        assert primes.is_prime(n) == (n in ORACLE_PRIMES_200)
    assert primes.is_prime(10 ** 10 + 19)
    assert not primes.is_prime(10 ** 10 + 17)
    assert primes.next_prime(10 ** 10) == 10 ** 10 + 19
    assert primes.prev_prime(10 ** 10) == 9999999967


# --- Chebyshev scan ------------------------------------------------------------

def test_scan_sigma_17():
    st_ = primes.chebyshev_scan(100, lambda s, p_next: s.sigma_k + p_next > 17)
    assert (st_.k, st_.p_k, st_.sigma_k) == (4, 7, 17)


def test_scan_sigma_100():
    # oracle: direct summation
    acc, k = 0, 0
    for p in ORACLE_PRIMES_200:
        acc += p
        k += 1
        if acc >= 100:
            break
    assert (k, acc) == (9, 100)
    st_ = primes.chebyshev_scan(1000, lambda s, p_next: s.sigma_k >= 100)
    assert (st_.k, st_.sigma_k) == (9, 100)


def test_scan_exhaustion_carries_state():
    with pytest.raises(RangeExhaustedError) as ei:
        primes.chebyshev_scan(50, lambda s, p_next: False)
    state = ei.value.state
    assert state.sigma_k == sum(p for p in ORACLE_PRIMES_200 if p <= 50)


def test_scan_theta_matches_reference():
    st_ = primes.chebyshev_scan(10 ** 5, lambda s, p_next: s.k >= 5000,
                                segment_span=1 << 12)
    assert st_.k == 5000
    ref = primes.theta_exact(st_.p_k, prec=256)
    assert abs(float(ref) - float(st_.theta_k)) <= st_.theta_err
    # 2^-60 relative agreement with the high-precision reference
    assert abs(float(ref) - float(st_.theta_k)) <= float(ref) * 2 ** -60


def test_sigma_increments_are_primes():
    table = primes.shared_table()
    for k in range(1, 200):
        assert table.sigma_at(k) - table.sigma_at(k - 1) == table.p_at(k)


def test_checkpoint_roundtrip_and_determinism():
    stop_a = lambda s, p_next: s.k >= 700
    stop_b = lambda s, p_next: s.k >= 2300
    sa = primes.chebyshev_scan(10 ** 5, stop_a, segment_span=1 << 12)
    cp = sa.checkpoint()
    cp2 = primes.Checkpoint.from_bytes(cp.to_bytes())
    assert cp2 == cp
    resumed = primes.chebyshev_scan(10 ** 5, stop_b, checkpoint=cp2,
                                    segment_span=1 << 12)
    direct = primes.chebyshev_scan(10 ** 5, stop_b, segment_span=1 << 12)
    assert resumed.k == direct.k
    assert resumed.p_k == direct.p_k
    assert resumed.sigma_k == direct.sigma_k
    assert resumed.theta_k == direct.theta_k  # bit-for-bit


def test_checkpoint_file_roundtrip(tmp_path):
    s = primes.chebyshev_scan(10 ** 4, lambda st_, p: st_.k >= 100)
    path = str(tmp_path / "scan.ckpt")
    s.checkpoint().write(path)
    assert primes.Checkpoint.read(path) == s.checkpoint()


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=5, max_value=2000))
def test_scan_checkpoint_determinism_property(mid_k):
    stop_mid = lambda s, p_next: s.k >= mid_k
    stop_end = lambda s, p_next: s.k >= 2500
    m = primes.chebyshev_scan(10 ** 5, stop_mid, segment_span=1 << 12)
    r = primes.chebyshev_scan(10 ** 5, stop_end, checkpoint=m.checkpoint(),
                              segment_span=1 << 12)
    d = primes.chebyshev_scan(10 ** 5, stop_end, segment_span=1 << 12)
    assert (r.k, r.p_k, r.sigma_k) == (d.k, d.p_k, d.sigma_k)
    assert r.theta_k == d.theta_k


# --- power sums ----------------------------------------------------------------

def test_pi_r_trivial():
    assert primes.pi_r(0, 2).value == 1
    assert primes.pi_r(0, 2).strict_value == 0


def test_pi_r_oracle_r2():
    # oracle: direct summation over trial-division primes
    oracle = sum(p * p for p in ORACLE_PRIMES_200 if p <= 100)
    ps = primes.pi_r(2, 100)
    assert ps.value == oracle
    assert ps.strict_value == oracle  # 100 is not prime


def test_pi_r_strict_vs_inclusive():
    for r in range(4):
        for x in (97, 100, 101):
            ps = primes.pi_r(r, x)
            expected = x ** r if (primes.is_prime(x) and r > 0) else (1 if primes.is_prime(x) else 0)
            if r == 0:
                expected = 1 if primes.is_prime(x) else 0
            assert ps.value - ps.strict_value == expected


def test_pi_r_domain():
    with pytest.raises(DomainError):
        primes.pi_r(7, 100)
    with pytest.raises(DomainError):
        primes.pi_r(1, 1)


# --- W(x) -----------------------------------------------------------------------

def test_W_single_term():
    assert math.isclose(float(primes.W(2)), 2 * math.log(2), rel_tol=1e-15)


def test_W7_printed_value():
    w7 = primes.W(7, prec=120)
    assert str(w7 / 7).startswith("1.045176")


def test_W_monotone():
    vals = [float(primes.W(x)) for x in (2, 3, 10, 50, 97, 120)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))


# --- PrimeTable ------------------------------------------------------------------

def test_table_k_of():
    t = primes.shared_table()
    assert t.k_of(17) == 4
    assert t.k_of(16) == 3
    assert t.k_of(1) == 0
    assert t.k_of(2) == 1


def test_table_next_prime_geq():
    t = primes.shared_table()
    assert t.next_prime_geq(14) == 17
    assert t.next_prime_geq(17) == 17


def test_table_theta_strict():
    t = primes.shared_table()
    assert math.isclose(float(t.theta_strict(7)), math.log(2 * 3 * 5), rel_tol=1e-15)
    assert math.isclose(float(t.theta_of(7)), math.log(2 * 3 * 5 * 7), rel_tol=1e-15)
