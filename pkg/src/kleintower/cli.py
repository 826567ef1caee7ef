"""Command-line front end.

    kleintower classify
    kleintower tower --case II.1 --format dot
    kleintower tower --gen 12 --gen 34
    kleintower verify --case II.2 --prime 11 --points 0,1,2,3,4,5,6,7
    kleintower fuzz --trials 80 --prime 31 --seed 7

Exit status: 0 success, 1 failed check, 2 usage or parameter error.
The default --format can be set with KLEINTOWER_FORMAT.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__, render
from .errors import ConsistencyError, KleinTowerError, ParameterError
from .f2sym import (
    CaseType,
    KleinSubgroup,
    canonical_subgroup,
    classification_census,
)
from .tower import build_tower, prym_decomposition
from .verify import BranchAssignment, random_branch, verify_config

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
FORMAT_ENV = "KLEINTOWER_FORMAT"
FORMATS = ("text", "json", "dot")

EXPECTED_CENSUS = {"I1": 56, "I2": 280, "II1": 105, "II2": 210,
                   "isotropic": 315, "non_isotropic": 336, "total": 651}


class UsageError(KleinTowerError):
    pass


def _parse_gen(text: str) -> tuple:
    digits = text.replace(",", "").replace(" ", "")
    if not digits.isdigit():
        raise ParameterError(f"generator {text!r} is not a list of indices 1..8")
    idx = tuple(int(c) for c in digits)
    if len(set(idx)) != len(idx):
        raise ParameterError(f"generator {text!r} repeats an index")
    return idx


def _parse_points(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ParameterError(f"cannot parse branch points {text!r}") from None


def _parse_perturb(text: str) -> tuple:
    try:
        route, node, k, delta = text.split(":")
        return (route, node, int(k)), int(delta)
    except ValueError:
        raise ParameterError(f"perturbation {text!r} is not ROUTE:NODE:K:DELTA") from None


def _subgroup(args) -> KleinSubgroup:
    if args.gen:
        if args.case:
            raise UsageError("give either --case or --gen, not both")
        if len(args.gen) != 2:
            raise UsageError("--gen must be given exactly twice")
        return KleinSubgroup.from_subsets(*(_parse_gen(g) for g in args.gen))
    return canonical_subgroup(CaseType.parse(args.case or "II.2"))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default=None,
                        help=f"output format (default: ${FORMAT_ENV} or text)")
    common.add_argument("--output", "-o", help="write to this file instead of standard output")
    common.add_argument("--timing", action="store_true",
                        help="include wall-clock timings (output is then no longer reproducible)")

    subject = argparse.ArgumentParser(add_help=False)
    subject.add_argument("--case", help="I.1, I.2, II.1 or II.2 (canonical generators)")
    subject.add_argument("--gen", action="append", metavar="SUBSET",
                         help="generator as indices, e.g. 12 or 1,3,4,5; give twice")

    arith = argparse.ArgumentParser(add_help=False)
    arith.add_argument("--prime", "-p", type=int, default=11)
    arith.add_argument("--seed", type=int, default=0)
    arith.add_argument("--depth", type=int, default=3, help="largest exponent k of q = p^k (1..3)")
    arith.add_argument("--perturb", action="append", default=[], help=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="kleintower", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("classify", parents=[common], help="census of the 651 Klein subgroups")
    sub.add_parser("tower", parents=[common, subject], help="the 16-node quotient tower")
    v = sub.add_parser("verify", parents=[common, subject, arith], help="point-count checks for one instance")
    v.add_argument("--points", help="eight distinct residues mod p, comma separated")
    f = sub.add_parser("fuzz", parents=[common, arith], help="seeded instances over all four cases")
    f.add_argument("--trials", type=int, default=20)
    return parser


def cmd_classify(args, fmt: str) -> tuple:
    report = classification_census()
    ok = report.as_dict() == EXPECTED_CENSUS
    if fmt == "json":
        doc = render.envelope("classify", {}, render.census_dict(report), ok)
        return render.to_json(doc), ok
    return render.census_text(report, EXPECTED_CENSUS), ok


def cmd_tower(args, fmt: str) -> tuple:
    k = _subgroup(args)
    tower = build_tower(k)
    prym = prym_decomposition(k, tower)
    if fmt == "dot":
        return render.tower_dot(tower), True
    if fmt == "json":
        inputs = {"case": args.case, "gen": args.gen}
        return render.to_json(render.envelope("tower", inputs, render.tower_dict(tower, prym), True)), True
    return render.tower_text(tower, prym), True


def _perturbations(args) -> dict:
    return dict(_parse_perturb(s) for s in args.perturb)


def cmd_verify(args, fmt: str) -> tuple:
    k = _subgroup(args)
    if args.points:
        b = BranchAssignment(args.prime, _parse_points(args.points))
    else:
        b = random_branch(args.prime, args.seed)
    report = verify_config(k, b, depth=args.depth, perturb=_perturbations(args))
    if fmt == "json":
        inputs = {"case": args.case, "gen": args.gen, "prime": args.prime, "points": args.points,
                  "seed": None if args.points else args.seed, "depth": args.depth}
        doc = render.envelope("verify", inputs, render.report_dict(report, args.timing), report.passed)
        return render.to_json(doc), report.passed
    return render.report_text(report, args.timing), report.passed


def fuzz_seeds(seed: int, trials: int) -> list:
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(trials)]


def cmd_fuzz(args, fmt: str) -> tuple:
    if args.trials < 1:
        raise ParameterError("--trials must be positive")
    cases = list(CaseType)
    perturb = _perturbations(args)
    towers = {c: build_tower(canonical_subgroup(c)) for c in cases}
    runs = []
    for i, s in enumerate(fuzz_seeds(args.seed, args.trials)):
        c = cases[i % len(cases)]
        b = random_branch(args.prime, s)
        runs.append((s, verify_config(towers[c].klein, b, depth=args.depth, perturb=perturb, tower=towers[c])))
    ok = all(r.passed for _, r in runs)
    if fmt == "json":
        inputs = {"prime": args.prime, "seed": args.seed, "trials": args.trials, "depth": args.depth}
        return render.to_json(render.envelope("fuzz", inputs, render.fuzz_dict(runs, args.timing), ok)), ok
    return render.fuzz_text(runs, args.timing), ok


COMMANDS = {"classify": cmd_classify, "tower": cmd_tower, "verify": cmd_verify, "fuzz": cmd_fuzz}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    fmt = args.format or os.environ.get(FORMAT_ENV, "text")
    try:
        if fmt not in FORMATS:
            raise UsageError(f"${FORMAT_ENV}={fmt!r} is not one of {', '.join(FORMATS)}")
        if fmt == "dot" and args.command != "tower":
            raise UsageError("DOT output is only available for the tower command")
        text, ok = COMMANDS[args.command](args, fmt)
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except ConsistencyError as exc:
        print(f"kleintower: internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (KleinTowerError, OSError) as exc:
        print(f"kleintower: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
