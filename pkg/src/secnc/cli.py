"""``secnc`` command line.

Exit codes: 0 success, 1 infeasible request or negative verdict, 2 bad input,
3 internal defect (a construction produced a code that fails verification).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import code as code_mod
from . import erasure, regions, schemes, separation
from .gf import DEFAULT_Q, FieldTooSmall
from .netgraph import GraphFormatError, ValidationError, load_graph, min_cut, mincut_profile

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_DEFECT = 0, 1, 2, 3

NEGATIVE = (schemes.NoSecureRate, schemes.TargetInfeasible, schemes.InfeasibleTarget,
            schemes.ZeroSecureRate, schemes.RateTooHigh)
DEFECTS = (schemes.ConstructionFailed, separation.InternalError)
INPUT = (GraphFormatError, ValidationError, erasure.DegenerateParams, FileNotFoundError,
         code_mod.TooLarge, code_mod.SearchSpaceTooLarge, schemes.TooLarge, regions.DimensionTooHigh,
         FieldTooSmall, json.JSONDecodeError, KeyError, ValueError)


class UsageError(Exception):
    pass


def _fmt(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _ints(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(t) for t in text.replace(",", " ").split())
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None
    return vals


def _rationals(text: str) -> tuple[Fraction, ...]:
    try:
        return tuple(Fraction(t) for t in text.replace(",", " ").split())
    except ValueError:
        raise UsageError(f"expected comma-separated rationals, got {text!r}") from None


def _seed(args) -> int:
    env = os.environ.get("SECNC_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"SECNC_SEED must be an integer, got {env!r}") from None
    return args.seed


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


# ---------------------------------------------------------------------------
# commands


def cmd_mincut(args) -> int:
    net = load_graph(args.graph)
    subset = _ints(args.subset) if args.subset is not None else tuple(range(1, net.m + 1))
    if not subset:
        raise UsageError("subset must name at least one destination")
    print(min_cut(net, subset))
    return EXIT_OK


def _region_payload(region: regions.RateRegion) -> dict:
    out = region.to_dict()
    out["text"] = regions.describe(region)
    if region.m <= regions.MAX_CORNER_DIM:
        out["corners"] = [[_fmt(x) for x in pt] for pt in regions.corner_points(region)]
    return out


def cmd_region(args) -> int:
    net = load_graph(args.graph)
    profile = mincut_profile(net)
    if args.which == "star":
        star = regions.star_mincuts(profile)
        payload = {"m": star.m,
                   "star": [{"subset": sorted(a), "value": v}
                            for a, v in sorted(star.values.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))],
                   "separable": regions.is_separable_profile(star)}
        if args.format == "csv":
            lines = ["subset,value"] + [f"\"{regions.format_subset(a)}\",{v}"
                                        for a, v in sorted(star.values.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))]
            _emit(args, "\n".join(lines) + "\n")
        else:
            _emit(args, _json(payload))
        return EXIT_OK
    if args.which == "unsecure":
        region = regions.unsecure_region(profile)
    elif args.which == "secure-outer":
        region = regions.secure_outer_bound(profile, args.k)
    else:
        smallest = min(profile[{i}] for i in range(1, net.m + 1))
        region = regions.two_phase_region(regions.unsecure_region(profile), args.k, smallest)
    if args.format == "csv":
        _emit(args, regions.corners_csv(region))
    else:
        _emit(args, _json(_region_payload(region)))
    empty = all(c == 0 for c in region.constraints.values())
    return EXIT_NEGATIVE if empty else EXIT_OK


def _scheme_output(args, code, net, report, achieved, transcript) -> int:
    payload = {
        "achieved": [_fmt(x) for x in achieved],
        "code": code.to_dict() if code is not None else None,
        "report": report.lines(net) if report is not None else [],
        "transcript": transcript,
    }
    _emit(args, _json(payload))
    if report is not None and not report.ok:
        return EXIT_DEFECT
    return EXIT_OK


def cmd_scheme(args) -> int:
    rng = np.random.default_rng(_seed(args))
    if args.scheme == "two-dest":
        net = load_graph(args.input)
        res = schemes.two_dest_scheme(net, args.k, args.corner, rng, args.q)
        rep = code_mod.verify(res.code, net, args.k)
        return _scheme_output(args, res.code, net, rep, res.achieved, res.transcript)
    if args.scheme == "combination":
        cnet = schemes.parse_combination(Path(args.input).read_text())
        if args.target is None:
            raise UsageError("combination needs --target")
        res = schemes.combination_scheme(cnet, args.k, _ints(args.target), rng, args.q)
        rep = code_mod.verify(res.code, res.network, args.k)
        return _scheme_output(args, res.code, res.network, rep, _ints(args.target), res.transcript)
    net = load_graph(args.input)
    if args.target is None:
        raise UsageError("two-phase needs --target")
    sched = schemes.two_phase_scheme(net, args.k, _rationals(args.target), rng, args.q)
    rounds = []
    ok = True
    for c in sched.key_rounds:
        rep = code_mod.VerificationReport(
            code_mod.check_local(c, net),
            {i: schemes.multicast_decodes_everywhere(c, net, [i]) for i in range(1, net.m + 1)},
            code_mod.check_secrecy(c, net, args.k))
        ok &= rep.ok
        rounds.append({"phase": "key", "report": rep.lines(net)})
    for c in sched.message_rounds:
        rep = code_mod.verify(c, sched.expanded, sched.T * args.k, key_side_info=True)
        ok &= rep.ok
        rounds.append({"phase": "message", "report": rep.lines(sched.expanded)})
    payload = {
        "achieved": [_fmt(x) for x in sched.achieved],
        "T": sched.T, "M": sched.M, "k": sched.k,
        "keys_generated": sched.keys_generated, "keys_consumed": sched.keys_consumed,
        "rounds": rounds,
        "codes": [c.to_dict() for c in (*sched.key_rounds, *sched.message_rounds)],
        "transcript": sched.transcript,
    }
    _emit(args, _json(payload))
    return EXIT_OK if ok else EXIT_DEFECT


def cmd_verify(args) -> int:
    net = load_graph(args.graph)
    c = code_mod.load_code(args.code)
    rep = code_mod.verify(c, net, args.k, key_side_info=args.key_side_info)
    lines = rep.lines(net)
    if c.q ** c.width <= code_mod.BRUTE_FORCE_LIMIT:
        oracle = code_mod.brute_force_secrecy(c, net, args.k)
        rep.oracle = oracle
        lines = rep.lines(net)
    else:
        lines.append(f"oracle: skipped (q^width = {c.q}^{c.width} exceeds {code_mod.BRUTE_FORCE_LIMIT})")
    _emit(args, "\n".join(lines) + "\n")
    if rep.oracle is not None and rep.oracle != rep.secrecy.secure:
        return EXIT_DEFECT
    return EXIT_OK if rep.ok else EXIT_NEGATIVE


def cmd_search(args) -> int:
    net = load_graph(args.graph)
    res = code_mod.search_no_code(net, _ints(args.target), args.k, args.q, args.r_max)
    payload = {"verdict": res.verdict, "explored": res.explored,
               "code": res.code.to_dict() if res.code is not None else None}
    _emit(args, _json(payload))
    return EXIT_OK if res.found else EXIT_NEGATIVE


def cmd_erasure(args) -> int:
    params = erasure.load_params(args.params)
    reg = erasure.region(args.variant, params, args.sweep)
    _emit(args, reg.to_csv(args.decimals))
    return EXIT_OK if any(p.r1 or p.r2 for p in reg.points) else EXIT_NEGATIVE


def cmd_butterfly(args) -> int:
    caps = _rationals(args.capacities)
    if len(caps) == 1:
        caps = caps * 7
    if len(caps) != 7:
        raise UsageError("give one capacity for all seven links or seven capacities")
    uns, sec = regions.butterfly_regions(caps, args.variant)
    lines = ["unsecure:"] + [f"  {s}" for s in regions.describe(uns)]
    lines.append(f"  symmetric R <= {_fmt(uns.symmetric_rate())}")
    if sec is None:
        lines.append("secure: empty")
    else:
        lines += ["secure:"] + [f"  {s}" for s in regions.describe(sec)]
        lines.append(f"  symmetric R <= {_fmt(sec.symmetric_rate())}")
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK if sec is not None else EXIT_NEGATIVE


def cmd_separate(args) -> int:
    net = load_graph(args.graph)
    part = separation.separate_two_dest(net)
    _emit(args, _json(part.to_dict()))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="secnc", description="Secure multi-destination network coding toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, graph=True, out=True):
        if graph:
            sp.add_argument("graph", help="graph file (node/edge/source/dest lines)")
        if out:
            sp.add_argument("-o", "--out", help="write output here instead of stdout")

    sp = sub.add_parser("mincut", help="print M_A for a destination subset")
    common(sp, out=False)
    sp.add_argument("--subset", help="comma-separated destination indices (default: all)")
    sp.set_defaults(func=cmd_mincut)

    sp = sub.add_parser("region", help="rate region as constraints (JSON) or corner points (CSV)",
                        description="CSV columns: R1..Rm, one corner point per row (exact rationals); "
                                    "for 'star': subset,value.")
    common(sp)
    sp.add_argument("--which", choices=("secure-outer", "unsecure", "two-phase", "star"), default="secure-outer")
    sp.add_argument("-k", type=int, default=0, help="wiretap budget")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.set_defaults(func=cmd_region)

    sp = sub.add_parser("scheme", help="construct and verify a secure code")
    sp.add_argument("scheme", choices=("two-dest", "combination", "two-phase"))
    sp.add_argument("input", help="graph file, or a combination spec ('t 6', 'dest 1 2 4') for 'combination'")
    sp.add_argument("-k", type=int, required=True, help="wiretap budget")
    sp.add_argument("--corner", choices=schemes.CORNERS, default="alpha1", help="two-dest corner")
    sp.add_argument("--target", help="rate tuple, e.g. 1,1,1 (combination) or 2,1 / 3/2,1 (two-phase)")
    sp.add_argument("-q", type=int, default=DEFAULT_Q, help="field size (prime)")
    sp.add_argument("--seed", type=int, default=0, help="RNG seed (SECNC_SEED overrides)")
    sp.add_argument("-o", "--out")
    sp.set_defaults(func=cmd_scheme)

    sp = sub.add_parser("verify", help="check a code file for local computability, decodability and secrecy")
    common(sp)
    sp.add_argument("code", help="code JSON")
    sp.add_argument("-k", type=int, required=True)
    sp.add_argument("--key-side-info", action="store_true", help="destinations know every key")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("search", help="exhaustive search for a scalar linear secure code (tiny graphs)")
    common(sp)
    sp.add_argument("--target", required=True)
    sp.add_argument("-k", type=int, required=True)
    sp.add_argument("-q", type=int, default=3)
    sp.add_argument("--r-max", type=int, default=2)
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("erasure", help="boundary of an erasure-network secure region",
                        description="CSV columns: R1,R2,k1..kn,e (n = 3 for y/ry, 5 for x); one row per "
                                    "swept R1 value with the largest R2 and a witness for the auxiliaries.")
    sp.add_argument("variant", choices=erasure.VARIANTS)
    sp.add_argument("params", help="file of 'param delta1 0.2' / 'param delta1E 0.05' / 'param D0 0.4' lines")
    sp.add_argument("--sweep", type=int, default=erasure.DEFAULT_SWEEP)
    sp.add_argument("--decimals", type=int, help="print decimals instead of exact fractions")
    sp.add_argument("-o", "--out")
    sp.set_defaults(func=cmd_erasure)

    sp = sub.add_parser("butterfly", help="unsecure and secure regions of a butterfly variant (one wiretapped edge)")
    sp.add_argument("variant", choices=regions.BUTTERFLY_VARIANTS)
    sp.add_argument("capacities", help="c1..c7 comma-separated, or one value for all")
    sp.add_argument("-o", "--out")
    sp.set_defaults(func=cmd_butterfly)

    sp = sub.add_parser("separate", help="split a two-destination graph into private and shared parts (JSON)")
    common(sp)
    sp.set_defaults(func=cmd_separate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NEGATIVE as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    except DEFECTS as exc:
        print(f"internal defect: {exc}", file=sys.stderr)
        return EXIT_DEFECT
    except INPUT as exc:
        print(f"input error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
