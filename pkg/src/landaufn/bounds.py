"""Checkable effective prime-sum estimates and their integration constants.

Each registered bound family pairs an exact left-hand side (computed from
sieved primes with big-integer power sums, or theta with an explicit error
budget) against a closed-form right-hand side evaluated in mpmath at 120
bits with the comparison margin folded outward, so a PASS is a rigorous
certificate for the sampled point. Requests outside a family's stated
validity range raise a precondition error naming the threshold.

``proposition_constants`` evaluates the integration constants C0 / C0_hat
of the pi_r estimates and the quartic root r0(alpha); these need the exact
power sums pi_r(x1) and theta(x1) at the relevant unconditional theta
threshold x1(alpha).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath as mp
import numpy as np

from . import primes as pr
from . import logint
from .errors import DomainError

#: unconditional |theta(x) - x| < alpha x / log^3 x thresholds
THETA_X1 = {1.0: 89_967_803, 0.5: 767_135_587, 0.15: 19_035_709_163}

RHS_PREC = 120


@dataclass
class BoundCheck:
    family: str
    x: int
    passed: bool
    lhs: float
    rhs: float
    margin: float       # rhs - lhs for <=-claims (positive = pass), signed


@dataclass
class _Family:
    name: str
    x_min: int
    x_max: int | None
    lhs: callable        # x -> (value, abs_err)
    rhs: callable        # mpf x -> mpf
    sense: str           # 'le' (lhs <= rhs) or 'ge' (lhs >= rhs)


def _pi_exact(x):
    return float(pr.pi_r(0, x).value), 0.0


def _pi1_exact(x):
    return float(pr.pi_r(1, x).value), 0.0


def _pi2_exact(x):
    return float(pr.pi_r(2, x).value), 0.0


def _pi2_strict(x):
    return float(pr.pi_r(2, x).strict_value), 0.0


def _pi3(x):
    return float(pr.pi_r(3, x).value), 0.0


def _pi4(x):
    return float(pr.pi_r(4, x).value), 0.0


def _pi5(x):
    return float(pr.pi_r(5, x).value), 0.0


_theta_cache: dict = {}


def _theta(x):
    t = pr.shared_table()
    if x <= t.hard_limit:
        t.ensure(min(t.hard_limit, max(x + 1000, 1 << 21)))
        v = float(t.theta_of(x))
        return v, pr.theta_error_bound(t.pi(x), v)
    raise DomainError(f"theta beyond table capacity at x={x}")


def _theta_strict(x):
    t = pr.shared_table()
    v = float(t.theta_strict(x))
    return v, pr.theta_error_bound(t.pi(x), max(v, 1.0))


def _m(s):
    return mp.mpf(s)


FAMILIES = {
    "pi126": _Family(
        "pi126", 2, None, _pi_exact,
        lambda x: _m("1.26") * x / mp.ln(x), "le"),
    "theta_lt_x": _Family(
        "theta_lt_x", 2, 10 ** 19, _theta, lambda x: x, "le"),
    "theta_upper79": _Family(
        "theta_upper79", 2, None, _theta,
        lambda x: x * (1 + _m("0.000079") / mp.ln(x)), "le"),
    "theta_strict_lower0746": _Family(
        "theta_strict_lower0746", 48758, None, _theta_strict,
        lambda x: x * (1 - _m("0.0746") / mp.ln(x)), "ge"),
    "dusart_a1": _Family(
        "dusart_a1", THETA_X1[1.0], None, _theta,
        lambda x: x / mp.ln(x) ** 3, "dusart"),
    "pi1maj": _Family(
        "pi1maj", 110_117_910, None, _pi1_exact,
        lambda x: x ** 2 / (2 * mp.ln(x)) + x ** 2 / (4 * mp.ln(x) ** 2)
        + x ** 2 / (4 * mp.ln(x) ** 3) + 107 * x ** 2 / (160 * mp.ln(x) ** 4),
        "le"),
    "pi1min": _Family(
        "pi1min", 905_238_547, None, _pi1_exact,
        lambda x: x ** 2 / (2 * mp.ln(x)) + x ** 2 / (4 * mp.ln(x) ** 2)
        + x ** 2 / (4 * mp.ln(x) ** 3) + 3 * x ** 2 / (20 * mp.ln(x) ** 4),
        "ge"),
    "pi2maj": _Family(
        "pi2maj", 60_173, None, _pi2_exact,
        lambda x: x ** 3 / (3 * mp.ln(x)) + x ** 3 / (9 * mp.ln(x) ** 2)
        + 2 * x ** 3 / (27 * mp.ln(x) ** 3) + 1181 * x ** 3 / (648 * mp.ln(x) ** 4),
        "le"),
    "pi2majred": _Family(
        "pi2majred", 60_297, None, _pi2_exact,
        lambda x: x ** 3 / (3 * mp.ln(x)) * (1 + _m("0.385") / mp.ln(x)), "le"),
    "pi2min": _Family(
        "pi2min", 1_091_239, None, _pi2_exact,
        lambda x: x ** 3 / (3 * mp.ln(x)) + x ** 3 / (9 * mp.ln(x) ** 2)
        + 2 * x ** 3 / (27 * mp.ln(x) ** 3) - 1069 * x ** 3 / (648 * mp.ln(x) ** 4),
        "ge"),
    "pi2minred": _Family(
        "pi2minred", 32_322, None, _pi2_strict,
        lambda x: x ** 3 / (3 * mp.ln(x)) * (1 + _m("0.248") / mp.ln(x)), "ge"),
    "pi3maj": _Family(
        "pi3maj", 664, None, _pi3,
        lambda x: _m("0.271") * x ** 4 / mp.ln(x), "le"),
    "pi4maj": _Family(
        "pi4maj", 200, None, _pi4,
        lambda x: _m("0.237") * x ** 5 / mp.ln(x), "le"),
    "pi5maj": _Family(
        "pi5maj", 44, None, _pi5,
        lambda x: _m("0.226") * x ** 6 / mp.ln(x), "le"),
}


def check_effective_bounds(family: str, x_samples, allow_below: bool = False) -> list:
    """Per-sample rigorous PASS/FAIL of a registered inequality.

    With ``allow_below`` the validity-range precondition is skipped so the
    crossing behavior just under the threshold can be probed (the expected
    use is exhibiting the witness where a bound first fails).
    """
    if family not in FAMILIES:
        raise DomainError(f"unknown bound family {family!r}; "
                          f"known: {sorted(FAMILIES)}")
    fam = FAMILIES[family]
    out = []
    for x in x_samples:
        x = int(x)
        if not allow_below and x < fam.x_min:
            raise DomainError(
                f"{family} is stated for x >= {fam.x_min} (got {x})")
        if fam.x_max is not None and x > fam.x_max:
            raise DomainError(f"{family} is stated for x <= {fam.x_max}")
        lhs, err = fam.lhs(x)
        with mp.workprec(RHS_PREC):
            if fam.sense == "dusart":
                rhs = float(fam.rhs(mp.mpf(x)))
                margin = rhs - abs(lhs - x) - err
                passed = margin > 0
            else:
                rhs = float(fam.rhs(mp.mpf(x)))
                if fam.sense == "le":
                    margin = rhs - lhs - err
                else:
                    margin = lhs - rhs - err
                passed = margin > 0
        out.append(BoundCheck(family, x, bool(passed), lhs, rhs, float(margin)))
    return out


def grid_check(family: str, count: int = 1000, x_max: int | None = None,
               rng_seed: int = 7) -> list:
    """Spot grid over a family's validity range (log-spaced samples)."""
    fam = FAMILIES[family]
    hi = x_max or min(fam.x_max or 10 ** 7, 10 ** 7)
    hi = max(hi, fam.x_min + 10)
    lo = fam.x_min
    xs = np.unique(np.geomspace(lo, hi, count).astype(np.int64))
    xs = np.maximum(xs, lo)
    return check_effective_bounds(family, xs.tolist())


# ---------------------------------------------------------------------------
# pi_r integration constants


@dataclass
class PropositionConstants:
    r: int
    alpha: float
    x1: int
    C0: mp.mpf
    C0_hat: mp.mpf
    r0: mp.mpf


@lru_cache(maxsize=None)
def _pi_r_at_x1(x1: int) -> dict:
    return {r: ps.value for r, ps in pr.pi_r_multi((2, 3, 4, 5), x1).items()}


@lru_cache(maxsize=None)
def _theta_at_x1(x1: int):
    if x1 > 10 ** 8:
        raise DomainError("x1 beyond exact-theta capacity")
    return pr.theta_exact(x1, prec=200)


def _pi_r_theta_at_x1(r: int, x1: int):
    if r in (2, 3, 4, 5):
        pir = _pi_r_at_x1(x1)[r]
    else:
        pir = pr.pi_r(r, x1).value
    return pir, _theta_at_x1(x1)


def r0_of_alpha(alpha: float, prec: int = 120) -> mp.mpf:
    """Positive root of 3r^4 + 8r^3 + 6r^2 - 24/alpha - 1."""
    with mp.workprec(prec):
        am = mp.mpf(alpha)
        f = lambda r: 3 * r ** 4 + 8 * r ** 3 + 6 * r ** 2 - 24 / am - 1
        return mp.findroot(f, mp.mpf(1.2))


def proposition_constants(r: int, alpha: float = 1.0,
                          prec: int = 160) -> PropositionConstants:
    """Integration constants of the pi_r upper/lower estimates.

    Requires exact pi_r(x1) and theta(x1) at x1 = x1(alpha) plus
    li(x1^(r+1)); alpha must be one of the tabulated theta thresholds.
    """
    if alpha not in THETA_X1:
        raise DomainError(f"alpha must be one of {sorted(THETA_X1)}")
    x1 = THETA_X1[alpha]
    pir_x1, theta_x1 = _pi_r_theta_at_x1(r, x1)
    with mp.workprec(prec):
        a = mp.mpf(alpha)
        rm = mp.mpf(r)
        x1m = mp.mpf(x1)
        L = mp.ln(x1m)
        li_val = logint.li_value(x1m ** (r + 1), prec=prec)
        xr1 = x1m ** (r + 1)
        C0 = (mp.mpf(pir_x1) - x1m ** r * theta_x1 / L
              - (3 * a * rm ** 4 + 8 * a * rm ** 3 + 6 * a * rm ** 2 + 24 - a) / 24 * li_val
              + (3 * a * rm ** 3 + 5 * a * rm ** 2 + a * rm + 24 - a) * xr1 / (24 * L)
              + a * (3 * rm ** 2 + 2 * rm - 1) * xr1 / (24 * L ** 2)
              + a * (3 * rm - 1) * xr1 / (12 * L ** 3)
              - a * xr1 / (4 * L ** 4))
        C0_hat = (mp.mpf(pir_x1) - x1m ** r * theta_x1 / L
                  + (3 * a * rm ** 4 + 8 * a * rm ** 3 + 6 * a * rm ** 2 - a - 24) / 24 * li_val
                  - (3 * a * rm ** 3 + 5 * a * rm ** 2 + a * rm - a - 24) * xr1 / (24 * L)
                  - a * (3 * rm ** 2 + 2 * rm - 1) * xr1 / (24 * L ** 2)
                  - a * (3 * rm - 1) * xr1 / (12 * L ** 3)
                  + a * xr1 / (4 * L ** 4))
        return PropositionConstants(r, alpha, x1, +C0, +C0_hat, r0_of_alpha(alpha, prec))
