"""Logarithmic integral li(x), its inverse, and analytic helper functions.

The scalar implementations run in mpmath at a configurable working precision
(>= 80-bit mantissa by default). li uses the rapidly convergent alternating
series

    li(x) = gamma + log log x + sqrt(x) * sum_{n>=1} a_n (log x)^n,
    a_n   = (-1)^(n-1) / (n! 2^(n-1)) * sum_{m=0}^{floor((n-1)/2)} 1/(2m+1),

with coefficients built from exact rationals and rounded once. The inverse
is a Newton iteration safeguarded by bracketing bisection, so convergence
cannot be lost.

Vectorized float64 fast paths (``li_f64``, ``li_inv_f64``) back the large
scans; they rely on li(x) = Ei(log x) for x > 1 via scipy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp
import numpy as np
from scipy import special as _sp

from .errors import DomainError, NumericalError

DEFAULT_PREC = 96          # working mantissa bits for scalar paths
E_POW_E = math.exp(math.e)

_coeff_cache: list[Fraction] = []


def _series_coeff(n: int) -> Fraction:
    """Exact rational a_n of the li series."""
    while len(_coeff_cache) < n:
        m = len(_coeff_cache) + 1
        odd_sum = sum(Fraction(1, 2 * j + 1) for j in range((m - 1) // 2 + 1))
        a = Fraction((-1) ** (m - 1), math.factorial(m) * 2 ** (m - 1)) * odd_sum
        _coeff_cache.append(a)
    return _coeff_cache[n - 1]


@dataclass
class LiValue:
    """li evaluated at x, with a truncation/rounding error bound."""

    x: object
    value: mp.mpf
    error_bound: mp.mpf


def li(x, prec: int = DEFAULT_PREC) -> LiValue:
    """Principal-value logarithmic integral for x > 1.

    The series is truncated once terms stay below 2^-80 of the partial sum
    for 8 consecutive indices.
    """
    xm = mp.mpf(x) if not isinstance(x, mp.mpf) else x
    if xm <= 1:
        raise DomainError("li(x) requires x > 1 on this branch")
    L = mp.ln(xm)
    guard = 48 + int(0.25 * float(L)) + int(2 * math.log2(float(L) + 2))
    with mp.workprec(prec + guard):
        L = mp.ln(xm)
        sqrt_x = mp.sqrt(xm)
        total = mp.euler + mp.ln(L)
        s = mp.mpf(0)
        power = mp.mpf(1)
        small_run = 0
        n = 0
        last_terms = []
        while small_run < 8:
            n += 1
            if n > 20000:
                raise NumericalError("li series failed to converge")
            power *= L
            term = mp.mpf(_series_coeff(n).numerator) / _series_coeff(n).denominator * power
            s += term
            partial = total + sqrt_x * s
            if abs(sqrt_x * term) < abs(partial) * mp.mpf(2) ** -80:
                small_run += 1
            else:
                small_run = 0
            last_terms.append(abs(sqrt_x * term))
            if len(last_terms) > 8:
                last_terms.pop(0)
        value = total + sqrt_x * s
        err = 2 * max(last_terms) + abs(value) * mp.mpf(2) ** (1 - (prec + guard))
    with mp.workprec(prec):
        return LiValue(xm, +value, +err)


def li_value(x, prec: int = DEFAULT_PREC) -> mp.mpf:
    return li(x, prec=prec).value


def li_inv(y, prec: int = DEFAULT_PREC) -> mp.mpf:
    """x > 1 with li(x) = y, to relative residual 2^-70 * max(1, |y|).

    Newton from x0 = y log y (y >= 3; fixed seed 2 otherwise), safeguarded by
    a maintained bracket so non-convergence is impossible by construction.
    """
    with mp.workprec(prec + 30):
        ym = mp.mpf(y)
        target = mp.mpf(2) ** -70 * max(1, abs(ym))
        x = ym * mp.ln(ym) if ym >= 3 else mp.mpf(2)
        # establish a bracket [lo, hi] with li(lo) <= y <= li(hi)
        lo, hi = mp.mpf("1.0000000001"), x
        while li_value(hi, prec=prec + 30) < ym:
            lo = hi
            hi = 2 * hi + 2
        if x <= lo or x >= hi:
            x = (lo + hi) / 2
        for _ in range(200):
            r = li_value(x, prec=prec + 30) - ym
            if abs(r) <= target:
                with mp.workprec(prec):
                    return +x
            if r > 0:
                hi = min(hi, x)
            else:
                lo = max(lo, x)
            step = -r * mp.ln(x)
            nxt = x + step
            if not (lo < nxt < hi):
                nxt = (lo + hi) / 2
            x = nxt
    raise NumericalError("li_inv: Newton failed to reach residual target")


def phi_u(u, t, prec: int = DEFAULT_PREC) -> mp.mpf:
    """sqrt(t log t) * (1 + (loglog t - 1)/(2 log t) - u (loglog t)^2 / log^2 t).

    Increasing and concave in t for t >= e^e; that domain is enforced because
    the convexity-based pruning depends on it.
    """
    with mp.workprec(prec):
        um = mp.mpf(u)
        tm = mp.mpf(t)
        if not (0 <= um <= mp.e):
            raise DomainError("phi_u requires 0 <= u <= e")
        if tm < mp.exp(mp.e) * (1 - mp.mpf(2) ** -50):
            raise DomainError("phi_u requires t >= e^e")
        L = mp.ln(tm)
        lam = mp.ln(L)
        return mp.sqrt(tm * L) * (1 + (lam - 1) / (2 * L) - um * lam ** 2 / L ** 2)


def phi_u_f64(u: float, t) -> np.ndarray:
    """Vectorized float64 Phi_u for scans (no domain check)."""
    t = np.asarray(t, dtype=np.float64)
    L = np.log(t)
    lam = np.log(L)
    return np.sqrt(t * L) * (1.0 + (lam - 1.0) / (2.0 * L) - u * lam * lam / (L * L))


@dataclass
class ChordGap:
    t1: mp.mpf
    t2: mp.mpf
    mid: mp.mpf
    f_t1: mp.mpf
    f_t2: mp.mpf
    f_mid: mp.mpf
    margin: mp.mpf  # f(mid) - chord midpoint; >= 0 iff locally concave


def sqrt_liinv_concave_gap(a, t1, t2, prec: int = DEFAULT_PREC) -> ChordGap:
    """Midpoint-vs-chord margin of t -> sqrt(li_inv(t)) - a (t log t)^(1/4).

    The map is concave for t >= 31 and a <= 1, so the margin is nonnegative
    there; convexity pruning relies on exactly this evaluation.
    """
    with mp.workprec(prec):
        am, t1m, t2m = mp.mpf(a), mp.mpf(t1), mp.mpf(t2)
        if am > 1:
            raise DomainError("requires a <= 1")
        if not (31 <= t1m <= t2m):
            raise DomainError("requires 31 <= t1 <= t2")

        def f(t):
            return mp.sqrt(li_inv(t, prec=prec)) - am * (t * mp.ln(t)) ** mp.mpf("0.25")

        mid = (t1m + t2m) / 2
        f1, f2, fm = f(t1m), f(t2m), f(mid)
        return ChordGap(t1m, t2m, mid, f1, f2, fm, fm - (f1 + f2) / 2)


def f_iter_root(n, delta, prec: int = DEFAULT_PREC) -> mp.mpf:
    """Unique fixed point in (sqrt n, n) of t -> sqrt(n (2 log t - delta)).

    Monotone iteration from sqrt(n); the map is increasing with derivative
    <= 1/2 on the bracket, so the iterates converge from below.
    """
    with mp.workprec(prec + 20):
        nm, dm = mp.mpf(n), mp.mpf(delta)
        if not nm > mp.exp(6):
            raise DomainError("requires n > e^6")
        if not (1 <= dm <= 2):
            raise DomainError("requires 1 <= delta <= 2")

        def f(t):
            return mp.sqrt(nm * (2 * mp.ln(t) - dm))

        t = mp.sqrt(nm)
        target = mp.mpf(2) ** -60
        for _ in range(500):
            ft = f(t)
            if abs(ft - t) <= target * t:
                with mp.workprec(prec):
                    return +ft
            t = ft
    raise NumericalError("fixed-point iteration did not reach residual target")


# ---------------------------------------------------------------------------
# float64 fast paths


def li_f64(x):
    """Vectorized float64 li via Ei(log x); accurate to a few ulp for x > 1."""
    x = np.asarray(x, dtype=np.float64)
    return _sp.expi(np.log(x))


def li_inv_f64(y, iterations: int = 6):
    """Vectorized float64 li_inv for y >= 5 (Newton, converges to ~1 ulp)."""
    y = np.asarray(y, dtype=np.float64)
    ly = np.log(y)
    x = y * (ly + np.log(np.maximum(ly, 2.0)))
    for _ in range(iterations):
        x += (y - _sp.expi(np.log(x))) * np.log(x)
    return x
