"""Command-line front end.

Exit status is 0 on success, 1 when a fooling-set verification finds a
failure and 2 for usage or input errors.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from .ballots import ProfileError, parse_profile, serialize_profile, single_peaked_violation
from .elicitation import run_ppr, run_sp_ppr, run_stv_ppr, transcript_bound_check
from .fooling import (
    FoolingSpec,
    FoolingSpecError,
    RuleSpec,
    asymptotic_estimate,
    canonical_fooling_profile,
    fooling_cardinality,
    log_cardinality,
    verify_fooling_set,
)
from .rules import (
    AvgConfig,
    DECLARE_SMALLEST,
    ELIMINATE_LARGEST,
    STRICT,
    WEAK,
    StvConfig,
    TieBreak,
    irv_average_tally,
    irv_tally,
    stv_tally,
)

OUTPUT_FORMAT = "irv-commlab/1"

# exact |F| is skipped above this many significant voters
EXACT_COUNT_MAX_N = 200_000


class UsageError(Exception):
    pass


def _tiebreak(text: str) -> TieBreak:
    if text in ("lower", "lower-index-wins"):
        return TieBreak()
    if text in ("higher", "higher-index-wins"):
        return TieBreak("higher-index-wins")
    try:
        return TieBreak.explicit([int(c) for c in text.split(",")])
    except ValueError as err:
        raise UsageError(f"bad --tiebreak {text!r}: {err}")


def _load(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise UsageError(str(err))
    return parse_profile(text)


def _emit(args, pairs: list[tuple[str, object]], human: str):
    if args.format == "structured":
        print(f"format: {OUTPUT_FORMAT}")
        for key, value in pairs:
            print(f"{key}: {value}")
    else:
        print(human)


def _fmt_scores(scores) -> str:
    return " ".join(f"{c}={s}" for c, s in scores.items())


def cmd_tally(args) -> int:
    p = _load(args.profile)
    tb = _tiebreak(args.tiebreak)
    if args.rule == "irv":
        winner, trace = irv_tally(p, tb, majority_stop=args.majority_stop)
    elif args.rule == "irv-average":
        winner, trace = irv_average_tally(p, AvgConfig(args.variant, args.exception), tb)
    else:
        if not 1 <= args.k < p.m:
            raise UsageError(f"-k must satisfy 1 <= k < m = {p.m}")
        _, trace = stv_tally(p, StvConfig(args.k), tb)
    winners = " ".join(str(w) for w in trace.winners)
    label = "winners" if args.rule == "stv" else "winner"
    _emit(args, [("rule", args.rule), ("m", p.m), ("n", p.n), (label, winners)],
          f"{label}: {winners}")
    if args.trace:
        for i, r in enumerate(trace.rounds, start=1):
            print(f"round {i}: {r.event} {','.join(map(str, r.candidates))} | {_fmt_scores(r.scores)}")
    return 0


def cmd_protocol(args) -> int:
    p = _load(args.profile)
    tb = _tiebreak(args.tiebreak)
    axis = [int(c) for c in args.axis.split(",")] if args.axis else None
    if args.sp:
        for v, r in enumerate(p.voters):
            bad = single_peaked_violation(r, axis)
            if bad is not None:
                raise UsageError(f"voter {v} is not single-peaked: {bad[1]} ranked below {bad[0]} and {bad[2]}")
        _, t = run_sp_ppr(p, axis, tb)
    elif args.k is not None:
        if not 1 <= args.k < p.m:
            raise UsageError(f"-k must satisfy 1 <= k < m = {p.m}")
        _, t = run_stv_ppr(p, StvConfig(args.k), tb)
    else:
        _, t = run_ppr(p, tb)
    winners = " ".join(str(w) for w in t.winners)
    label = "winners" if args.k is not None else "winner"
    pairs = [("protocol", t.protocol), ("m", p.m), ("n", p.n), (label, winners),
             ("total_bits", t.total_bits)]
    if args.check_bounds:
        pairs.append(("bounds_ok", str(transcript_bound_check(t, p.m, p.n)).lower()))
    human = f"{label}: {winners}, bits: {t.total_bits}"
    if args.check_bounds:
        human += f", bounds: {'ok' if pairs[-1][1] == 'true' else 'VIOLATED'}"
    _emit(args, pairs, human)
    if args.transcript:
        sys.stdout.write(t.to_text())
    return 0


def _spec(args) -> FoolingSpec:
    return FoolingSpec(args.family, args.m, args.ell, args.k, args.tiebreak_voters)


def cmd_fooling(args) -> int:
    spec = _spec(args)
    if args.action == "emit":
        text = serialize_profile(canonical_fooling_profile(spec), grouped=not args.ungrouped)
        if args.output:
            Path(args.output).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        return 0
    if args.action == "count":
        exact = fooling_cardinality(spec) if spec.n <= EXACT_COUNT_MAX_N else None
        pv = log_cardinality(spec, per_voter=True)
        finite, leading = asymptotic_estimate(spec, per_voter=True)
        ln = pv * spec.n if spec.log_n() < 700 else None
        ln_text = f"{ln:.10g}" if ln is not None else "overflow"
        pairs = [("family", spec.family), ("m", spec.m), ("ell", spec.ell), ("k", spec.k),
                 ("n", spec.n if spec.log_n() < 700 else "overflow"),
                 ("cardinality", exact if exact is not None else "skipped"),
                 ("ln_cardinality", ln_text), ("ln_cardinality_per_voter", f"{pv:.12g}"),
                 ("finite_sum_per_voter", f"{finite:.12g}"),
                 ("leading_term_per_voter", f"{leading:.12g}")]
        shown = exact if exact is not None else "(too large to expand)"
        _emit(args, pairs, f"|F| = {shown}, ln = {ln_text}")
        return 0
    rule = RuleSpec(args.rule, _tiebreak(args.tiebreak), k=args.k,
                    variant=args.variant, exception=args.exception)
    if args.rule == "stv" and spec.family != "stv":
        raise UsageError("--rule stv needs --family stv")
    mode = "exhaustive" if args.exhaustive else "sampled"
    report = verify_fooling_set(spec, rule, mode, samples=args.samples, seed=args.seed,
                                ceiling=args.ceiling, exhaustive_mixes=args.all_mixes,
                                workers=args.workers)
    if args.format == "structured":
        sys.stdout.write(report.to_text(timing=not args.no_timing))
    else:
        print(f"{report.profiles_checked} profiles, {report.pairs_checked} pairs, "
              f"{len(report.failures)} failures")
        for f in report.failures[:20]:
            print(f"  {f}")
    return 0 if report.ok else 1


def _big(log_value: float) -> str:
    """Render ``exp(log_value)`` without overflowing."""
    if log_value < 700:
        return f"{math.exp(log_value):.10g}"
    e10 = log_value / math.log(10)
    exp = math.floor(e10)
    return f"{10 ** (e10 - exp):.10g}e{exp}"


def cmd_asymptotics(args) -> int:
    ms = [int(x) for x in args.ms.split(",")]
    print("m,n,ln_F,finite_sum,leading_term,ratio_exact_to_leading,ratio_finite_to_leading")
    for m in ms:
        spec = FoolingSpec(args.family, m, args.ell, args.k)
        log_n = spec.log_n()
        pv = log_cardinality(spec, per_voter=True)
        finite, leading = asymptotic_estimate(spec, per_voter=True)
        cells = [m, _big(log_n)] + [_big(log_n + math.log(x)) if x > 0 else "0"
                                    for x in (pv, finite, leading)]
        cells += [f"{pv / leading:.12g}", f"{finite / leading:.12g}"]
        print(",".join(str(c) for c in cells))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="irv-commlab", description=__doc__.splitlines()[0])
    parser.add_argument("--format", choices=("human", "structured"), default="human")
    sub = parser.add_subparsers(dest="command", required=True)

    def rule_options(p):
        p.add_argument("--tiebreak", default="lower",
                       help="lower, higher, or an explicit priority list like 2,0,1")
        p.add_argument("--variant", choices=(STRICT, WEAK), default=STRICT)
        p.add_argument("--exception", choices=(DECLARE_SMALLEST, ELIMINATE_LARGEST),
                       default=ELIMINATE_LARGEST)

    t = sub.add_parser("tally", help="run a voting rule on a profile file")
    t.add_argument("profile")
    t.add_argument("--rule", choices=("irv", "irv-average", "stv"), default="irv")
    t.add_argument("-k", type=int, default=1, help="seats (stv)")
    t.add_argument("--majority-stop", action="store_true")
    t.add_argument("--trace", action="store_true")
    rule_options(t)
    t.set_defaults(func=cmd_tally)

    pr = sub.add_parser("protocol", help="simulate an elicitation protocol")
    pr.add_argument("profile")
    pr.add_argument("--sp", action="store_true", help="single-peaked protocol")
    pr.add_argument("--axis", help="comma-separated axis (default identity)")
    pr.add_argument("-k", type=int, default=None, help="run STV-PPR with k seats")
    pr.add_argument("--transcript", action="store_true")
    pr.add_argument("--check-bounds", action="store_true")
    pr.add_argument("--tiebreak", default="lower")
    pr.set_defaults(func=cmd_protocol)

    f = sub.add_parser("fooling", help="build, count or verify fooling sets")
    f.add_argument("action", choices=("emit", "count", "verify"))
    f.add_argument("--family", choices=("irv", "sp", "stv"), default="irv")
    f.add_argument("-m", type=int, required=True)
    f.add_argument("-l", "--ell", type=int, default=1)
    f.add_argument("-k", type=int, default=1)
    f.add_argument("--tiebreak-voters", action="store_true")
    f.add_argument("-o", "--output")
    f.add_argument("--ungrouped", action="store_true")
    f.add_argument("--rule", choices=("irv", "irv-average", "stv"), default=None)
    f.add_argument("--exhaustive", action="store_true")
    f.add_argument("--samples", type=int, default=500)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--ceiling", type=int, default=20_000)
    f.add_argument("--all-mixes", action="store_true",
                   help="fall back to every subset of differing voters")
    f.add_argument("--workers", type=int, default=None)
    f.add_argument("--no-timing", action="store_true")
    rule_options(f)
    f.set_defaults(func=cmd_fooling)

    a = sub.add_parser("asymptotics", help="CSV table of exact and estimated ln|F|")
    a.add_argument("--family", choices=("irv", "sp", "stv"), default="irv")
    a.add_argument("--ms", default=",".join(str(2**e) for e in range(3, 13)))
    a.add_argument("-l", "--ell", type=int, default=1)
    a.add_argument("-k", type=int, default=1)
    a.set_defaults(func=cmd_asymptotics)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "rule", "") is None:
        args.rule = "stv" if args.family == "stv" else "irv"
    try:
        return args.func(args)
    except (UsageError, ProfileError, FoolingSpecError) as err:
        print(f"irv-commlab: error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
