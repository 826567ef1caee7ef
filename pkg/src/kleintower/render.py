"""Text, JSON and DOT renderings of censuses, towers and verification reports.

Everything here is a pure function of its input: no clocks, no hashes of
unordered containers, so identical input gives byte-identical output.
"""

from __future__ import annotations

import json

from . import __version__
from .f2sym import CaseType, ClassificationReport, subset_of
from .tower import PrymSummary, TowerDiagram, _subgroup_word
from .verify import Check, VerificationReport

TOOL = "kleintower"


def _fmt_tuple(t) -> str:
    return "(" + ",".join(map(str, t)) + ")" if t is not None else "-"


def _fmt_mask(mask) -> str:
    return "{" + ",".join(map(str, subset_of(mask))) + "}" if mask is not None else "-"


def _exact(v):
    """Integers become decimal strings; containers are converted element-wise."""
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, int):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_exact(x) for x in v]
    return str(v)


def envelope(command: str, inputs: dict, results, passed: bool) -> dict:
    return {"tool": TOOL, "version": __version__, "command": command,
            "input": inputs, "results": results, "pass": passed}


def to_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# -- classify

def census_dict(report: ClassificationReport) -> dict:
    return report.as_dict()


def census_text(report: ClassificationReport, expected: dict) -> str:
    got = report.as_dict()
    lines = ["case   count  expected", "-----  -----  --------"]
    for c in CaseType:
        lines.append(f"{c.value:<5}  {got[c.key]:>5}  {expected[c.key]:>8}")
    for key in ("isotropic", "non_isotropic", "total"):
        lines.append(f"{key:<13}  {got[key]:>5}  {expected[key]:>5}")
    diff = [f"{k}: got {got[k]}, expected {v}" for k, v in expected.items() if got[k] != v]
    lines.append("census matches" if not diff else "MISMATCH\n" + "\n".join(diff))
    return "\n".join(lines) + "\n"


# -- tower

def _node_dict(tower: TowerDiagram, n) -> dict:
    return {
        "name": n.name,
        "alias": n.alias,
        "subgroup": _subgroup_word(n.deck_subgroup, tower.words),
        "order": n.order,
        "genus": n.genus,
        "degree_over_line": n.deg_over_line,
        "defining_subset": list(subset_of(n.defining_subset)) if n.defining_subset is not None else None,
        "starred": n.starred,
        "kernel_order": n.kernel_order,
        "polarization": list(n.polarization) if n.polarization is not None else None,
        "hyperelliptic": n.hyperelliptic,
    }


def prym_dict(prym: PrymSummary) -> dict:
    return {
        "components": [
            {"node": c.node.name, "display": c.node.display, "dim": c.dim,
             "polarization": list(c.polarization), "exact": c.exact, "kernel_order": c.kernel_order}
            for c in prym.components
        ],
        "h_polarization": list(prym.h_polarization),
        "prym_polarization": list(prym.prym_polarization),
        "isogeny_predictions": {k: list(v) for k, v in prym.isogeny_predictions.items()},
        "moduli_signature": list(prym.moduli_signature),
        "moduli_dimension": prym.moduli_dimension,
    }


def tower_dict(tower: TowerDiagram, prym: PrymSummary) -> dict:
    names = [n.name for n in tower.nodes]
    return {
        "case": tower.case.value,
        "klein": str(tower.klein),
        "subsets": {"eta": list(subset_of(tower.triple.s_eta)), "xi": list(subset_of(tower.triple.s_xi))},
        "lifts": {w: {"flip": list(tower.words[w].as_tuple()), "fixed_points": f}
                  for w, f in tower.lift_fixed_points().items()},
        "nodes": [_node_dict(tower, n) for n in tower.nodes],
        "edges": [[names[i], names[j]] for i, j in tower.edges],
        "prym": prym_dict(prym),
    }


def tower_text(tower: TowerDiagram, prym: PrymSummary) -> str:
    out = [f"case {tower.case.value}  subgroup {tower.klein}  subsets {tower.triple}", ""]
    out.append("lift   flip     fixed points")
    for w, f in tower.lift_fixed_points().items():
        out.append(f"{w:<6} {_fmt_tuple(tower.words[w].as_tuple()):<8} {f}")
    out.append("")
    header = f"{'node':<9} {'alias':<6} {'subgroup':<20} {'g':>2} {'deg':>3} {'subset':<18} {'*':<1} {'ker':>3} {'polarization':<20} hyp"
    out += [header, "-" * len(header)]
    for n in tower.nodes:
        hyp = {True: "yes", False: "no", None: "?"}[n.hyperelliptic]
        out.append(
            f"{n.name:<9} {n.alias or '':<6} {_subgroup_word(n.deck_subgroup, tower.words) or '1':<20} "
            f"{n.genus:>2} {n.deg_over_line:>3} {_fmt_mask(n.defining_subset):<18} {'*' if n.starred else ' '} "
            f"{n.kernel_order:>3} {_fmt_tuple(n.polarization):<20} {hyp}"
        )
    out.append("")
    out.append("Prym components:")
    for c in prym.components:
        out.append("  " + c.describe())
    out.append(f"H polarization {_fmt_tuple(prym.h_polarization)}; Prym polarization {_fmt_tuple(prym.prym_polarization)}")
    out.append("isogeny factors of the double quotients:")
    for k, v in prym.isogeny_predictions.items():
        out.append(f"  J{k} ~ " + (" x ".join(f"J{x}" for x in v) or "0"))
    out.append(f"moduli signature {_fmt_tuple(prym.moduli_signature)}, dimension {prym.moduli_dimension}")
    return "\n".join(out) + "\n"


def tower_dot(tower: TowerDiagram) -> str:
    """Lattice diagram: one rank per quotient level, edges from cover to quotient."""
    lines = ["digraph tower {", "\trankdir=TB;", '\tnode [shape=box, fontname="Helvetica"];']
    for order in (1, 2, 4, 8):
        lines.append("\t{")
        lines.append("\t\trank = same;")
        for i, n in enumerate(tower.nodes):
            if n.order != order:
                continue
            name = n.display + ("*" if n.starred else "")
            label = f"{name}/{n.genus}/{_fmt_tuple(n.polarization)}"
            lines.append(f'\t\tn{i} [label="{label}"];')
        lines.append("\t}")
    for i, j in tower.edges:
        lines.append(f"\tn{i} -> n{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- verify / fuzz

def _check_dict(c: Check) -> dict:
    return {"name": c.name, "expected": _exact(c.expected), "actual": _exact(c.actual), "pass": c.passed}


def report_dict(r: VerificationReport, timing: bool = False) -> dict:
    d = {
        "case": r.case,
        "klein": r.klein,
        "p": r.p,
        "points": list(r.points),
        "depth": r.depth,
        "checks": [_check_dict(c) for c in r.checks],
        "counts": [{"node": c.node, "route": c.route, "q": str(c.q), "count": str(c.count)} for c in r.counts],
        "l_polynomials": {k: [str(x) for x in v.coeffs] for k, v in r.l_polynomials.items()},
        "summary": {"checks": len(r.checks), "failures": len(r.failures())},
    }
    if timing:
        d["elapsed_seconds"] = round(r.elapsed, 3)
    return d


def report_text(r: VerificationReport, timing: bool = False) -> str:
    out = [f"case {r.case}  subgroup {r.klein}  p = {r.p}  points {list(r.points)}  depth {r.depth}", ""]
    for c in r.checks:
        mark = "ok  " if c.passed else "FAIL"
        line = f"{mark} {c.name}"
        if not c.passed:
            line += f"  expected {c.expected}, got {c.actual}"
        out.append(line)
    out.append("")
    out.append("L-polynomials:")
    for k, v in r.l_polynomials.items():
        out.append(f"  {k}: {v}")
    fails = len(r.failures())
    out.append(f"{len(r.checks) - fails}/{len(r.checks)} checks passed")
    if timing:
        out.append(f"elapsed {r.elapsed:.3f} s")
    return "\n".join(out) + "\n"


def fuzz_dict(instances: list, timing: bool = False) -> dict:
    rows = []
    for seed, r in instances:
        row = {"seed": str(seed), "case": r.case, "p": r.p, "points": list(r.points),
               "checks": len(r.checks), "failed": [c.name for c in r.failures()]}
        if timing:
            row["elapsed_seconds"] = round(r.elapsed, 3)
        rows.append(row)
    return {
        "instances": len(instances),
        "passed_instances": sum(1 for _, r in instances if r.passed),
        "checks": sum(len(r.checks) for _, r in instances),
        "failures": sum(len(r.failures()) for _, r in instances),
        "runs": rows,
    }


def fuzz_text(instances: list, timing: bool = False) -> str:
    out = []
    for seed, r in instances:
        status = "pass" if r.passed else "FAIL " + ", ".join(c.name for c in r.failures())
        line = f"{r.case:<5} p={r.p:<5} seed={seed:<10} {len(r.checks):>4} checks  {status}"
        if timing:
            line += f"  {r.elapsed:.3f} s"
        out.append(line)
    d = fuzz_dict(instances)
    out.append(f"{d['passed_instances']}/{d['instances']} instances pass; "
               f"{d['checks'] - d['failures']}/{d['checks']} checks pass")
    return "\n".join(out) + "\n"
