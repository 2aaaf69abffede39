"""Tests for li, li_inv, Phi_u, the concavity gap, and the fixed-point helper."""

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from landaufn import logint
from landaufn.errors import DomainError


# --- quadrature oracle --------------------------------------------------------
#
# Independent of the series: principal value via the symmetric substitution
# t = 1 +/- u, with the u -> 0 cancellation removed analytically:
#   1/log(1+u) + 1/log(1-u) = log(1-u^2) / (log(1+u) log(1-u)).

def li_quadrature(x, prec=140):
    with mp.workprec(prec):
        xm = mp.mpf(x)

        def sym(u):
            num = mp.log1p(-u * u)
            den = mp.log1p(u) * mp.log1p(-u)
            return num / den if u != 0 else mp.mpf(1)

        li2 = mp.quad(sym, [0, 1])
        if xm == 2:
            return li2
        return li2 + mp.quad(lambda t: 1 / mp.ln(t), [2, xm])


# frozen from the oracle above (280-bit run): li(2)
LI2_STR = "1.04516378011749278484458888919461313652261557815120157583291"


def li2_oracle():
    return mp.mpf(LI2_STR)


def test_oracle_self_consistent():
    with mp.workprec(220):
        assert abs(li_quadrature(2, prec=220) - li2_oracle()) < mp.mpf("1e-55")


def test_li_2_matches_quadrature_oracle():
    with mp.workprec(140):
        v = logint.li_value(2, prec=130)
        assert abs(v - li2_oracle()) < mp.mpf("1e-36")


def test_li_definition_increment():
    # li(x) - li(2) = integral_2^x dt/log t, cross-checked with quadrature
    with mp.workprec(150):
        for x in (10, 100, 5000):
            inc = logint.li_value(x, prec=130) - logint.li_value(2, prec=130)
            quad = mp.quad(lambda t: 1 / mp.ln(t), [2, x])
            assert abs(inc - quad) / abs(inc) < mp.mpf("1e-25")


def test_li_asymptotic_expansion_1e8():
    # remainder after N terms of sum (k-1)! x / log^k x is positive and of
    # the order of the next term (factor-2 slack)
    with mp.workprec(130):
        x = mp.mpf(10) ** 8
        L = mp.ln(x)
        v = logint.li_value(x, prec=120)
        for N in (3, 4, 5):
            sN = sum(mp.factorial(k - 1) * x / L ** k for k in range(1, N + 1))
            nxt = mp.factorial(N) * x / L ** (N + 1)
            assert 0 < v - sN < 2 * nxt


def test_li_domain_error():
    with pytest.raises(DomainError):
        logint.li(1.0)
    with pytest.raises(DomainError):
        logint.li(0.5)


def test_li_error_bound_honest():
    with mp.workprec(200):
        for x in (2, 1e3, 1e9, 1e12):
            lv = logint.li(x, prec=96)
            ref = li_quadrature(x, prec=200) if x <= 1e6 else mp.li(mp.mpf(x))
            assert abs(lv.value - ref) <= lv.error_bound + abs(ref) * mp.mpf(2) ** -92


def test_li_inv_printed_value():
    assert mp.nstr(logint.li_inv(1), 3) == "1.97"
    assert str(logint.li_inv(1))[:4] == "1.96"


def test_li_inv_roundtrip_spot():
    for y in (-5.0, 0.0, 10.0, 1e6):
        x = logint.li_inv(y, prec=96)
        assert x > 1
        r = logint.li_value(x, prec=120) - y
        assert abs(r) <= mp.mpf(2) ** -70 * max(1, abs(y))


def test_li_inv_of_li_1e6():
    y = logint.li_value(10 ** 6, prec=120)
    x = logint.li_inv(y, prec=120)
    assert abs(x - 10 ** 6) / 10 ** 6 < mp.mpf("1e-10")


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=-10, max_value=1e9, allow_nan=False))
def test_li_inv_roundtrip_property(y):
    x = logint.li_inv(y)
    assert abs(logint.li_value(x, prec=130) - y) <= mp.mpf(2) ** -70 * max(1, abs(y))


def test_li_monotone_and_inverse_monotone():
    xs = [1.5, 2, 3, 10, 100, 1e5]
    vals = [logint.li_value(x) for x in xs]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    ys = [-3, 0, 1, 5, 100]
    invs = [logint.li_inv(y) for y in ys]
    assert all(a < b for a, b in zip(invs, invs[1:]))


# --- Phi_u ---------------------------------------------------------------------

def test_phi_u_at_e_e():
    # at t = e^e: log t = e, loglog t = 1, so the middle term vanishes and
    # Phi_u(e^e) = sqrt(e^e * e) * (1 - u/e^2); for u=0 that is e^((e+1)/2)
    with mp.workprec(140):
        t = mp.exp(mp.e)
        v0 = logint.phi_u(0, t, prec=130)
        assert abs(v0 - mp.exp((mp.e + 1) / 2)) < mp.mpf("1e-35")
        v8 = logint.phi_u(0.125, t, prec=130)
        expected = mp.sqrt(t * mp.e) * (1 - mp.mpf("0.125") / mp.e ** 2)
        assert abs(v8 - expected) < mp.mpf("1e-35")


def test_phi_u_monotone_in_t_and_u():
    assert logint.phi_u(0.125, 10 ** 6) < logint.phi_u(0.125, 10 ** 6 + 1)
    assert logint.phi_u(0.25, 10 ** 6) < logint.phi_u(0.125, 10 ** 6)
    # grid check of increasingness
    ts = np.geomspace(16, 1e12, 200)
    vals = logint.phi_u_f64(0.125, ts)
    assert (np.diff(vals) > 0).all()


def test_phi_u_domain():
    with pytest.raises(DomainError):
        logint.phi_u(0.125, 10.0)
    with pytest.raises(DomainError):
        logint.phi_u(3.0, 100.0)


def test_phi_u_f64_matches_scalar():
    for t in (16.0, 1e4, 1e10):
        a = float(logint.phi_u(0.125, t))
        b = float(logint.phi_u_f64(0.125, np.array([t]))[0])
        assert math.isclose(a, b, rel_tol=1e-13)


# --- concavity -------------------------------------------------------------------

def test_chord_margin_a0():
    g = logint.sqrt_liinv_concave_gap(0, 100, 200)
    assert g.margin >= 0


def test_chord_margin_a1_31_1000():
    g = logint.sqrt_liinv_concave_gap(1, 31, 1000)
    assert g.margin >= 0


def test_chord_margin_degenerate():
    g = logint.sqrt_liinv_concave_gap(0.5, 77, 77)
    assert abs(g.margin) < mp.mpf("1e-20")


def test_concavity_second_divided_differences_grid():
    # second divided differences <= 0 on consecutive triples, a in {0, 1/2, 1}
    ts = np.geomspace(31, 1e7, 1000)
    for a in (0.0, 0.5, 1.0):
        f = np.sqrt(logint.li_inv_f64(ts)) - a * (ts * np.log(ts)) ** 0.25
        s1 = (f[1:-1] - f[:-2]) / (ts[1:-1] - ts[:-2])
        s2 = (f[2:] - f[1:-1]) / (ts[2:] - ts[1:-1])
        dd2 = (s2 - s1) / (ts[2:] - ts[:-2])
        # allow float noise on what is provably <= 0
        assert (dd2 <= 1e-12).all()


# --- fixed point -------------------------------------------------------------------

def test_f_iter_root_residual():
    # oracle: bisection on t - f(t)
    n, delta = 10 ** 6, 1.0

    def f(t):
        return math.sqrt(n * (2 * math.log(t) - delta))

    lo, hi = math.sqrt(n), float(n)
    for _ in range(80):
        mid = (lo + hi) / 2
        if f(mid) > mid:
            lo = mid
        else:
            hi = mid
    r_oracle = (lo + hi) / 2
    r = logint.f_iter_root(n, delta)
    assert abs(float(r) - r_oracle) / r_oracle < 1e-10
    assert abs(float(mp.sqrt(n * (2 * mp.ln(r) - delta))) - float(r)) <= 2 ** -59 * float(r)


def test_f_maps_bracket_inside():
    n, delta = 10 ** 4, 2.0
    f = lambda t: math.sqrt(n * (2 * math.log(t) - delta))
    assert f(math.sqrt(n)) > math.sqrt(n)
    assert f(n) < n


def test_f_contraction():
    n = 10 ** 5
    ts = np.linspace(math.sqrt(n), n, 500)
    fp = math.sqrt(n) / (ts * np.sqrt(2 * np.log(ts) - 1.5))
    assert (fp <= 0.5 + 1e-12).all()
    assert (fp > 0).all()


# --- float64 fast paths ---------------------------------------------------------

def test_li_f64_vs_series():
    xs = np.array([2.0, 10.0, 1e6, 1e12])
    fast = logint.li_f64(xs)
    for x, f in zip(xs, fast):
        assert math.isclose(f, float(logint.li_value(x)), rel_tol=5e-15)


def test_li_inv_f64_vs_scalar():
    ys = np.geomspace(19, 2.2e18, 25)
    xs = logint.li_inv_f64(ys)
    for y, x in zip(ys, xs):
        hi = float(logint.li_inv(float(y), prec=110))
        assert math.isclose(x, hi, rel_tol=2e-14)
