"""Command-line interface tying the library's operations together.

Verbs map one-to-one onto module operations:

    g, h          exact values with factorizations
    li, liinv     logarithmic integral and its inverse
    enum          superchampion enumeration (--table for the classic layout)
    cache-build   type-2 cache construction (+ file output)
    excess        additive/multiplicative excesses and s(n)
    sequences     a/b/z/d/beta table emission
    verify        run a theorem suite's dichotomy over a range
    check-bounds  effective-estimate certificates at sample points
    repro         named reproduction recipes with stored expected values

Exit codes: 0 all-pass, 1 counterexample found, 2 resource failure,
64 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import mpmath as mp

from . import bounds, landau, logint, sequences, superchampion, verify
from .errors import LandauError, CapacityError, ResourceError

EXIT_OK = 0
EXIT_COUNTEREXAMPLE = 1
EXIT_RESOURCE = 2
EXIT_USAGE = 64


def _add_common(p):
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--precision", type=int, default=96,
                   help="working mantissa bits (min 64)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="landaufn",
        description="Landau function, superchampions, and certified growth bounds")
    sub = ap.add_subparsers(dest="verb")

    p = sub.add_parser("g", help="largest permutation order with ell <= n")
    p.add_argument("n", type=int)
    _add_common(p)

    p = sub.add_parser("h", help="largest squarefree prime product with sum <= n")
    p.add_argument("n", type=int)
    _add_common(p)

    p = sub.add_parser("li", help="logarithmic integral")
    p.add_argument("x", type=float)
    _add_common(p)

    p = sub.add_parser("liinv", help="inverse logarithmic integral")
    p.add_argument("y", type=float)
    _add_common(p)

    p = sub.add_parser("enum", help="enumerate superchampions")
    p.add_argument("--limit-ell", type=int, required=True)
    p.add_argument("--table", action="store_true",
                   help="classic table with rho and xi columns")
    p.add_argument("--cache", help="type-2 cache file to consult")
    _add_common(p)

    p = sub.add_parser("cache-build", help="build the type-2 cache")
    p.add_argument("--limit-ell", type=int, required=True)
    p.add_argument("--out", help="output file (default: print summary)")
    _add_common(p)

    p = sub.add_parser("excess", help="additive/multiplicative excess and s(n)")
    p.add_argument("n", type=int)
    _add_common(p)

    p = sub.add_parser("sequences", help="emit a/b/z/d/beta values")
    p.add_argument("ns", type=int, nargs="+")
    p.add_argument("--g-source", choices=["exact", "bounds"], default="exact")
    p.add_argument("--h-source", choices=["exact", "bounds"], default="exact")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    _add_common(p)

    p = sub.add_parser("verify", help="run a theorem suite over [min, max]")
    p.add_argument("suite", choices=sorted(verify.suite_catalog().keys()))
    p.add_argument("--min", type=int, default=2)
    p.add_argument("--max", type=int, required=True)
    p.add_argument("--threads", type=int, default=0,
                   help="worker count for scans (0 = sequential)")
    _add_common(p)

    p = sub.add_parser("check-bounds", help="effective-estimate certificates")
    p.add_argument("family", choices=sorted(bounds.FAMILIES.keys()))
    p.add_argument("xs", type=int, nargs="+")
    p.add_argument("--allow-below", action="store_true",
                   help="probe points below the stated validity threshold")
    _add_common(p)

    p = sub.add_parser("repro", help="named reproduction recipes")
    p.add_argument("recipe", choices=sorted(RECIPES.keys()))
    _add_common(p)

    return ap


def _print_factored(f) -> None:
    # plain integers only while they stay well under 10^18
    if f.value().bit_length() <= 59:
        print(f"{f.value()} = {f}")
    else:
        print(f"{f}   (log = {f.log_value:.9f})")


def cmd_g(args) -> int:
    f = landau.g_exact(args.n)
    print(f.to_json()) if args.json else _print_factored(f)
    return EXIT_OK


def cmd_h(args) -> int:
    f = landau.h_exact(args.n)
    print(f.to_json()) if args.json else _print_factored(f)
    return EXIT_OK


def cmd_li(args) -> int:
    lv = logint.li(args.x, prec=max(64, args.precision))
    if args.json:
        print(json.dumps({"x": args.x, "li": mp.nstr(lv.value, 25),
                          "error_bound": mp.nstr(lv.error_bound, 4)}))
    else:
        print(mp.nstr(lv.value, 25))
    return EXIT_OK


def cmd_liinv(args) -> int:
    v = logint.li_inv(args.y, prec=max(64, args.precision))
    if args.json:
        print(json.dumps({"y": args.y, "li_inv": mp.nstr(v, 25)}))
    else:
        print(mp.nstr(v, 25))
    return EXIT_OK


def cmd_enum(args) -> int:
    cache = superchampion.Type2Cache.load(args.cache) if args.cache else None
    recs = list(superchampion.enumerate_superchampions(args.limit_ell, cache=cache))
    if args.json:
        rows = [{"ell": r.ell, "logN": r.logN, "pmax": r.pmax,
                 "type2": r.type2, "type2_q": r.type2_q,
                 "rho_event": list(r.rho_event)} for r in recs]
        print(json.dumps(rows, indent=1))
        return EXIT_OK
    if args.table:
        print(f"{'ell(N)':>12} {'N or logN':>24} {'rho':>10} {'xi':>10}")
        for r1, r2 in zip(recs, recs[1:]):
            n_str = (str(landau.g_exact(r1.ell).value())
                     if r1.ell <= 300 else f"exp({r1.logN:.6f})")
            rho = r2.rho
            with mp.workprec(80):
                xi = float(superchampion._solve_xi1(mp.mpf(rho)))
            print(f"{r1.ell:>12} {n_str:>24} {rho:>10.2f} {xi:>10.2f}")
        r = recs[-1]
        n_str = (str(landau.g_exact(r.ell).value())
                 if r.ell <= 300 else f"exp({r.logN:.6f})")
        print(f"{r.ell:>12} {n_str:>24} {'':>10} {'':>10}")
    else:
        for r in recs:
            tag = f" type2 q={r.type2_q}" if r.type2 else ""
            print(f"ell={r.ell} logN={r.logN:.9f} pmax={r.pmax}{tag}")
    return EXIT_OK


def cmd_cache_build(args) -> int:
    cache = superchampion.build_type2_cache(args.limit_ell)
    if args.out:
        cache.save(args.out)
    if args.json:
        print(json.dumps({"limit_ell": cache.limit_ell, "entries": len(cache)}))
    else:
        print(f"type-2 cache: {len(cache)} entries up to ell = {cache.limit_ell}")
    return EXIT_OK


def cmd_excess(args) -> int:
    ex = superchampion.excesses(args.n)
    if args.json:
        print(json.dumps({"n": ex.n, "E": str(ex.E), "Estar": mp.nstr(ex.Estar, 20),
                          "s": ex.s, "i0": ex.i0, "xi": ex.xi}))
    else:
        print(f"E(N') = {ex.E}")
        print(f"E*(N') = {mp.nstr(ex.Estar, 15)}")
        print(f"s(n) = {ex.s}   i0 = {ex.i0}   xi = {ex.xi:.6f}")
    return EXIT_OK


def cmd_sequences(args) -> int:
    out = sequences.emit_table(args.ns, args.g_source, args.h_source,
                               fmt="json" if (args.json or args.format == "json") else "csv")
    print(out)
    return EXIT_OK


def cmd_verify(args) -> int:
    suite = verify.suite_catalog()[args.suite]
    cert = verify.ok_rec(suite, args.min, args.max)
    if args.json:
        print(cert.to_json())
    else:
        if cert.all_pass:
            print(f"{args.suite}: all n in [{args.min}, {args.max}] pass "
                  f"(good_interval={cert.counters.good_interval_calls}, "
                  f"ok={cert.counters.ok_calls}, {cert.wall_time:.1f}s)")
        else:
            print(f"{args.suite}: largest failing n = {cert.largest_fail} "
                  f"witness={cert.witness} "
                  f"(good_interval={cert.counters.good_interval_calls}, "
                  f"ok={cert.counters.ok_calls}, {cert.wall_time:.1f}s)")
    return cert.exit_code


def cmd_check_bounds(args) -> int:
    res = bounds.check_effective_bounds(args.family, args.xs,
                                        allow_below=args.allow_below)
    worst = EXIT_OK
    if args.json:
        print(json.dumps([vars(r) for r in res], indent=1))
    for r in res:
        if not args.json:
            print(f"{r.family} x={r.x}: {'PASS' if r.passed else 'FAIL'} "
                  f"(lhs={r.lhs:.6g}, rhs={r.rhs:.6g})")
        if not r.passed:
            worst = EXIT_COUNTEREXAMPLE
    return worst


# --- repro recipes ------------------------------------------------------------

def _repro_first_table(args) -> int:
    expected = [7, 12, 19, 30, 43, 49, 53, 70, 89]
    recs = list(superchampion.enumerate_superchampions(89))
    got = [r.ell for r in recs]
    print(f"first superchampions: {got}")
    return EXIT_OK if got == expected else EXIT_COUNTEREXAMPLE


def _repro_equality(args) -> int:
    want = [1, 2, 3, 5, 6, 8, 10, 11, 15, 17, 18, 28, 41, 58, 77]
    got = landau.g_equals_h_scan(4230)
    print(f"g(n) = h(n) exactly at: {got}")
    return EXIT_OK if got == want else EXIT_COUNTEREXAMPLE


def _repro_d2243(args) -> int:
    d = sequences.gap_ratio(2243)
    print(f"d_2243 = {d!r}")
    return EXIT_OK if abs(d - 0.62066526568) < 1e-9 else EXIT_COUNTEREXAMPLE


def _repro_xi_profile(args) -> int:
    prof = superchampion.xi_profile((10 ** 10 + 19, 0))
    print(f"J = {mp.nstr(prof.J, 8)}")
    for j in (2, 3, 4, 5, 29):
        print(f"xi_{j} = {mp.nstr(prof.xi_at(j), 10)}")
    return EXIT_OK if mp.nstr(prof.J, 7) == "29.16533" else EXIT_COUNTEREXAMPLE


def _repro_liinv1(args) -> int:
    v = logint.li_inv(1)
    print(f"li_inv(1) = {mp.nstr(v, 12)}")
    return EXIT_OK if str(v).startswith("1.96") else EXIT_COUNTEREXAMPLE


def _repro_pi2_witness(args) -> int:
    below = bounds.check_effective_bounds("pi2maj", [60169], allow_below=True)[0]
    above = bounds.check_effective_bounds("pi2maj", [60173])[0]
    print(f"pi2 upper bound at 60169: {'PASS' if below.passed else 'FAIL'} "
          f"(witness); at 60173: {'PASS' if above.passed else 'FAIL'}")
    return EXIT_OK if (not below.passed and above.passed) else EXIT_COUNTEREXAMPLE


def _repro_minhn(args) -> int:
    suite = verify.suite_catalog()["minhn"]
    cert = verify.ok_rec(suite, 2, 398898277)
    print(f"largest n with log h(n) < Phi_1/8(n): {cert.largest_fail}")
    return EXIT_OK if cert.largest_fail == 373623862 else EXIT_COUNTEREXAMPLE


RECIPES = {
    "first-table": _repro_first_table,
    "equality-set": _repro_equality,
    "d2243": _repro_d2243,
    "xi-profile": _repro_xi_profile,
    "liinv1": _repro_liinv1,
    "pi2-witness": _repro_pi2_witness,
    "minhn": _repro_minhn,
}

HANDLERS = {
    "g": cmd_g, "h": cmd_h, "li": cmd_li, "liinv": cmd_liinv,
    "enum": cmd_enum, "cache-build": cmd_cache_build, "excess": cmd_excess,
    "sequences": cmd_sequences, "verify": cmd_verify,
    "check-bounds": cmd_check_bounds,
    "repro": lambda args: RECIPES[args.recipe](args),
}


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else 0
    if not args.verb:
        ap.print_help()
        return EXIT_USAGE
    try:
        return HANDLERS[args.verb](args)
    except (CapacityError, ResourceError) as e:
        print(f"resource error: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except LandauError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
