"""Derived comparison sequences for g and h, exact or as interval enclosures.

For n >= 2, writing L = log n and lam = log log n:

    a_n = (sqrt(li_inv n) - log g(n)) / (n L)^(1/4)
    b_n = (sqrt(li_inv n) - log h(n)) / (n L)^(1/4)
    d_n = b_n - a_n = (log g(n) - log h(n)) / (n L)^(1/4)
    z_n : log g(n) = sqrt(n L) (1 + (lam-1)/(2L) - z_n lam^2/L^2)
    beta_n = 6 sqrt(2) L^(3/4) (log g(n) - log h(n)) / n^(1/4) - 4L - lam

beta is evaluated from that closed form (rather than by solving its
defining relation) to avoid cancellation. The constant ``ZETA_ZERO_SUM`` is
the sum of 1/|rho(rho+1)| over the nontrivial zeta zeros; its derivation is
external analytic machinery, so the value is stored, never recomputed.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from . import landau, logint
from .errors import CapacityError, DomainError

#: sum over nontrivial zeta zeros of 1/|rho(rho+1)| (stored literal; the
#: computation runs over zero tables and is out of scope here)
ZETA_ZERO_SUM = 0.046117644421509
ZETA_ZERO_SUM_STR = "0.046117644421509"


def constant_c() -> float:
    """The zeta-zero sum constant (stored, not derived -- see module note)."""
    return ZETA_ZERO_SUM


# --- scalar float forms ------------------------------------------------------


def a_value(n: int, log_g: float) -> float:
    L = math.log(n)
    return (math.sqrt(float(logint.li_inv_f64(np.float64(n)))) - log_g) / (n * L) ** 0.25


def b_value(n: int, log_h: float) -> float:
    return a_value(n, log_h)


def d_value(n: int, log_g: float, log_h: float) -> float:
    L = math.log(n)
    return (log_g - log_h) / (n * L) ** 0.25


def z_value(n: int, log_g: float) -> float:
    L = math.log(n)
    lam = math.log(L)
    return (1 + (lam - 1) / (2 * L) - log_g / math.sqrt(n * L)) * L * L / (lam * lam)


def beta_value(n: int, log_g: float, log_h: float) -> float:
    L = math.log(n)
    return 6 * math.sqrt(2) * L ** 0.75 * (log_g - log_h) / n ** 0.25 \
        - 4 * L - math.log(L)


# --- scalar mpmath forms -------------------------------------------------------


def a_value_mp(n, log_g, prec: int = 120) -> mp.mpf:
    with mp.workprec(prec):
        L = mp.ln(n)
        return (mp.sqrt(logint.li_inv(mp.mpf(n), prec=prec)) - log_g) / (n * L) ** mp.mpf("0.25")


def z_value_mp(n, log_g, prec: int = 120) -> mp.mpf:
    with mp.workprec(prec):
        L = mp.ln(n)
        lam = mp.ln(L)
        return (1 + (lam - 1) / (2 * L) - log_g / mp.sqrt(n * L)) * L ** 2 / lam ** 2


def beta_value_mp(n, log_g, log_h, prec: int = 120) -> mp.mpf:
    with mp.workprec(prec):
        L = mp.ln(n)
        return (6 * mp.sqrt(2) * L ** mp.mpf("0.75") * (log_g - log_h)
                / mp.mpf(n) ** mp.mpf("0.25") - 4 * L - mp.ln(L))


# --- vector forms ----------------------------------------------------------------


def a_vec(n: np.ndarray, log_g: np.ndarray, sqrt_liinv: np.ndarray | None = None) -> np.ndarray:
    n = np.asarray(n, dtype=np.float64)
    if sqrt_liinv is None:
        sqrt_liinv = np.sqrt(logint.li_inv_f64(n))
    return (sqrt_liinv - log_g) / (n * np.log(n)) ** 0.25


def z_vec(n: np.ndarray, log_g: np.ndarray) -> np.ndarray:
    n = np.asarray(n, dtype=np.float64)
    L = np.log(n)
    lam = np.log(L)
    return (1.0 + (lam - 1.0) / (2.0 * L) - log_g / np.sqrt(n * L)) * L * L / (lam * lam)


def d_vec(n: np.ndarray, log_g: np.ndarray, log_h: np.ndarray) -> np.ndarray:
    n = np.asarray(n, dtype=np.float64)
    return (log_g - log_h) / (n * np.log(n)) ** 0.25


def beta_vec(n: np.ndarray, log_g: np.ndarray, log_h: np.ndarray) -> np.ndarray:
    n = np.asarray(n, dtype=np.float64)
    L = np.log(n)
    return 6 * math.sqrt(2) * L ** 0.75 * (log_g - log_h) / n ** 0.25 \
        - 4 * L - np.log(L)


# --- sequence points with provenance ------------------------------------------------


@dataclass
class SequencePoint:
    """All five sequence values at one n, exact or as outward enclosures.

    When a source is 'bounds', the corresponding fields are (lo, hi) tuples
    enclosing the true value; exact fields are plain floats.
    """

    n: int
    log_g: object
    log_h: object
    a: object
    b: object
    z: object
    d: object
    beta: object
    g_provenance: str
    h_provenance: str

    def to_row(self) -> dict:
        def fmt(v):
            if isinstance(v, tuple):
                return f"[{v[0]!r},{v[1]!r}]"
            return repr(v)

        return {
            "n": self.n,
            "log_g": fmt(self.log_g), "log_h": fmt(self.log_h),
            "a": fmt(self.a), "b": fmt(self.b), "z": fmt(self.z),
            "d": fmt(self.d), "beta": fmt(self.beta),
            "g_source": self.g_provenance, "h_source": self.h_provenance,
        }


def _g_bracket(n: int) -> tuple:
    """Certified (lo, hi) for log g(n) from the superchampion chord."""
    from . import superchampion as sc
    loc = sc.locate(n)
    lo = float(loc.nprime.logN) - 1e-9
    rho = float(loc.rho)
    hi = float(loc.nprime.logN) + (n - loc.nprime.ell) / rho + 1e-9
    return lo, hi


def point(n: int, g_source: str = "exact", h_source: str = "exact") -> SequencePoint:
    """Sequence values at n; sources are 'exact' (DP) or 'bounds'.

    Bound mode produces outward-rounded enclosures built from the h bracket
    and the superchampion chord for g.
    """
    if n < 2:
        raise DomainError("sequence values start at n = 2")
    if g_source == "exact":
        if n > landau.G_LIMIT:
            raise CapacityError("exact g beyond capacity; use g_source='bounds'")
        glo = ghi = float(landau.logg_table(n)[n])
    elif g_source == "bounds":
        glo, ghi = _g_bracket(n)
    else:
        raise DomainError(f"unknown g_source {g_source!r}")
    if h_source == "exact":
        if n > landau.H_LIMIT:
            raise CapacityError("exact h beyond capacity; use h_source='bounds'")
        hlo = hhi = float(landau.logh_table(n)[n])
    elif h_source == "bounds":
        br = landau.h_log_bracket(n)
        hlo, hhi = br.low, br.high
    else:
        raise DomainError(f"unknown h_source {h_source!r}")
    # h <= g always; tighten crosswise
    hhi = min(hhi, ghi)
    glo = max(glo, hlo)

    gex = g_source == "exact"
    hex_ = h_source == "exact"
    if gex and hex_:
        g, h = glo, hlo
        return SequencePoint(n, g, h, a_value(n, g), b_value(n, h),
                             z_value(n, g), d_value(n, g, h),
                             beta_value(n, g, h), g_source, h_source)

    sq = math.sqrt(float(logint.li_inv_f64(np.float64(n))))
    sq_lo, sq_hi = sq * (1 - 1e-13), sq * (1 + 1e-13)
    scale = (n * math.log(n)) ** 0.25

    def pair(lo, hi):
        return (lo, hi) if hi >= lo else (hi, lo)

    a = pair((sq_lo - ghi) / scale, (sq_hi - glo) / scale)
    b = pair((sq_lo - hhi) / scale, (sq_hi - hlo) / scale)
    d = pair((glo - hhi) / scale, (ghi - hlo) / scale)
    z = pair(z_value(n, ghi), z_value(n, glo))
    beta = pair(beta_value(n, glo, hhi), beta_value(n, ghi, hlo))
    return SequencePoint(
        n=n,
        log_g=glo if gex else (glo, ghi),
        log_h=hlo if hex_ else (hlo, hhi),
        a=a, b=b, z=z, d=d, beta=beta,
        g_provenance=g_source,
        h_provenance=h_source,
    )


def gap_ratio(n: int) -> float:
    """d_n = (log g(n) - log h(n)) / (n log n)^(1/4), exact sources."""
    if n > landau.H_LIMIT:
        raise CapacityError("gap_ratio needs exact g and h")
    return d_value(n, float(landau.logg_table(n)[n]), float(landau.logh_table(n)[n]))


def emit_table(ns, g_source: str = "exact", h_source: str = "exact",
               fmt: str = "csv") -> str:
    """CSV or JSON rows of sequence values with a provenance column."""
    pts = [point(int(n), g_source, h_source) for n in ns]
    rows = [p.to_row() for p in pts]
    if fmt == "json":
        import json
        return json.dumps(rows, indent=1)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()
