"""Acceptance criteria 1-8, each at its stated tolerance.

Each test prints one `criterion N: PASS|FAIL` line; the lines are repeated
in the terminal summary of the pytest run.
"""

import os
import subprocess
import sys
import time
from collections import Counter

from kleintower.cli import main
from kleintower.f2sym import CaseType, canonical_subgroup, classification_census, enumerate_klein_subgroups, is_isotropic
from kleintower.tower import build_tower, prym_decomposition, quotient_genus, span, tower_for
from kleintower.verify import (
    ROUTE_TOP,
    BranchAssignment,
    CountEngine,
    count_double_cover,
    l_from_counts,
    random_branch,
    verify_config,
)
from goldens import F5_COUNTS, F5_L, II2_QUAD_COUNTS, II2_TOP_COUNTS
from oracles import naive_double_cover, naive_l_coefficients, naive_top


def test_criterion_1_census(criterion):
    start = time.perf_counter()
    got = classification_census().as_dict()
    elapsed = time.perf_counter() - start
    expected = {"I1": 56, "I2": 280, "II1": 105, "II2": 210, "isotropic": 315, "non_isotropic": 336, "total": 651}
    ok = got == expected and elapsed < 1.0
    criterion(1, "census exactness", ok, f"{got}, {elapsed:.2f} s")
    assert ok


def test_criterion_2_fixed_points(criterion):
    start = time.perf_counter()
    expected = {
        CaseType.I1: [20, 4, 4, 4],
        CaseType.I2: [12, 12, 4, 4],
        CaseType.II1: [8, 8, 8, 8],
        CaseType.II2: [16, 8, 8, 0],
    }
    got = {c: sorted(tower_for(c).lift_fixed_points().values(), reverse=True) for c in CaseType}
    elapsed = time.perf_counter() - start
    ok = got == expected and all(sum(v) == 32 for v in got.values()) and elapsed < 1.0
    criterion(2, "fixed-point tables", ok, f"{elapsed:.2f} s")
    assert ok


def test_criterion_3_genus_rows(criterion):
    start = time.perf_counter()
    problems = []

    def row(case):
        return {n.genus for n in tower_for(case).nodes if n.name not in ("H", "P1")}

    if row(CaseType.I2) != {9, 5, 4, 2, 1, 0}:
        problems.append("I.2 row")
    if row(CaseType.II1) != {9, 5, 3, 1}:
        problems.append("II.1 row")
    if row(CaseType.II2) != {9, 5, 3, 2, 1, 0}:
        problems.append("II.2 row")
    if sorted((n.genus for n in tower_for(CaseType.I1).quadratic_nodes()), reverse=True) != [3, 2, 2, 2, 0, 0, 0]:
        problems.append("I.1 quadratic genera")
    for k in enumerate_klein_subgroups():
        t = build_tower(k)
        if sum(n.genus for n in t.quadratic_nodes()) != 9:
            problems.append(f"{k}: quadratic genera")
        for g, fix in t.fixed_points.items():
            if g.is_lift and 4 * quotient_genus(span([g]), t.triple) != 20 - fix:
                problems.append(f"{k}: Riemann-Hurwitz at {g}")
    elapsed = time.perf_counter() - start
    ok = not problems and elapsed < 5.0
    criterion(3, "genus rows and 651-subgroup sweep", ok, f"{len(problems)} problems, {elapsed:.2f} s")
    assert ok, problems[:5]


def test_criterion_4_decomposition_metadata(criterion):
    problems = []
    pol_counts = Counter()
    for k in enumerate_klein_subgroups():
        t = build_tower(k)
        prym = prym_decomposition(k, t)
        if sum(c.dim for c in prym.components) != 6:
            problems.append(f"{k}: dimensions")
        pol_counts[(is_isotropic(k), prym.prym_polarization)] += 1
    if pol_counts != {(True, (1, 1, 1, 2, 2, 4)): 315, (False, (1, 1, 1, 1, 4, 4)): 336}:
        problems.append(f"polarizations {dict(pol_counts)}")
    ii2 = tower_for(CaseType.II2)
    if not (ii2.by_name("D_σ").starred and ii2.by_name("D_τ").starred and ii2.h_node.starred):
        problems.append("II.2 star flags")
    if tower_for(CaseType.I2).by_name("H'").starred:
        problems.append("I.2 H' starred")
    ok = not problems
    criterion(4, "decomposition metadata", ok, f"{len(problems)} problems")
    assert ok, problems


def test_criterion_5_arithmetic_identity_suite(criterion):
    start = time.perf_counter()
    towers = {c: build_tower(canonical_subgroup(c)) for c in CaseType}
    instances = checks = 0
    failed = []
    for p in (11, 31):
        for seed in range(20):
            for case, tower in towers.items():
                b = random_branch(p, 1000 * p + seed)
                r = verify_config(tower.klein, b, depth=3, tower=tower)
                instances += 1
                checks += len(r.checks)
                failed += [f"{case.value}/p={p}/seed={seed}: {c.name}" for c in r.failures()]
                names = {c.name.split("/")[0] for c in r.checks}
                required = {"top-identity", "two-route", "trace", "l-product", "functional-equation", "weil"}
                if not required <= names:
                    failed.append(f"{case.value}/p={p}/seed={seed}: missing {required - names}")
    elapsed = time.perf_counter() - start
    ok = not failed and instances == 160
    criterion(5, "arithmetic identity suite", ok and elapsed < 60,
              f"{instances} instances, {checks} checks, {len(failed)} failures, {elapsed:.1f} s")
    assert ok, failed[:5]
    assert elapsed < 60


def test_criterion_6_oracle_pins(criterion):
    problems = []
    if tuple(naive_double_cover([0, 1, 2, 3], 5, k) for k in (1, 2)) != F5_COUNTS:
        problems.append("oracle F5 counts")
    if tuple(naive_l_coefficients(5, F5_COUNTS[:1])) != F5_L:
        problems.append("oracle F5 L")
    if tuple(count_double_cover([0, 1, 2, 3], 5, k) for k in (1, 2)) != F5_COUNTS:
        problems.append("engine F5 counts")
    if l_from_counts(5, F5_COUNTS[:1]).coeffs != F5_L:
        problems.append("engine F5 L")
    b = BranchAssignment(11, tuple(range(8)))
    tower = tower_for(CaseType.II2)
    eng = CountEngine(b, tower.triple)
    if tuple(naive_top(b.points, (1, 2), (3, 4), 11, k) for k in (1, 2, 3)) != II2_TOP_COUNTS:
        problems.append("oracle II.2 top")
    if tuple(eng.top(k) for k in (1, 2, 3)) != II2_TOP_COUNTS:
        problems.append("engine II.2 top")
    for subset, counts in II2_QUAD_COUNTS.items():
        roots = [b.points[i - 1] for i in subset]
        ks = range(1, len(counts) + 1)
        if tuple(naive_double_cover(roots, 11, k) for k in ks) != counts:
            problems.append(f"oracle {subset}")
        if tuple(count_double_cover(roots, 11, k) for k in ks) != counts:
            problems.append(f"engine {subset}")
    if not verify_config(tower.klein, b).passed:
        problems.append("II.2 F11 instance checks")
    ok = not problems
    criterion(6, "oracle pins", ok, ", ".join(problems) or "F5 and F11 II.2 fixtures matched")
    assert ok, problems


def test_criterion_7_negative_control(criterion, capsys):
    tower = tower_for(CaseType.II2)
    b = BranchAssignment(11, tuple(range(8)))
    clean = verify_config(tower.klein, b)
    bumped = verify_config(tower.klein, b, perturb={(ROUTE_TOP, "C~", 1): 1})
    flipped = sorted(c.name for c in bumped.failures())
    code = main(["verify", "--case", "II.2", "--prime", "11", "--points", "0,1,2,3,4,5,6,7",
                 "--perturb", "top-fiber:C~:1:1"])
    capsys.readouterr()
    ok = clean.passed and flipped == ["top-identity/q=p^1", "trace/q=p^1"] and code == 1
    criterion(7, "negative control", ok, f"flipped {flipped}, exit {code}")
    assert ok


COMMANDS = [
    ["classify"],
    ["classify", "--format", "json"],
    ["tower", "--case", "I.1"],
    ["tower", "--case", "II.1", "--format", "dot"],
    ["tower", "--gen", "12", "--gen", "34", "--format", "json"],
    ["verify", "--case", "II.2", "--prime", "11", "--points", "0,1,2,3,4,5,6,7", "--format", "json"],
    ["verify", "--case", "I.2", "--prime", "31", "--seed", "5"],
    ["fuzz", "--trials", "8", "--prime", "31", "--seed", "7", "--format", "json"],
    ["tower", "--gen", "12", "--gen", "12"],
]


def test_criterion_8_determinism(criterion):
    mismatched = []
    for argv in COMMANDS:
        outs = []
        for hashseed in ("1", "2"):
            env = dict(os.environ, PYTHONHASHSEED=hashseed)
            env.pop("KLEINTOWER_FORMAT", None)
            proc = subprocess.run([sys.executable, "-m", "kleintower", *argv], capture_output=True, env=env)
            outs.append((proc.returncode, proc.stdout, proc.stderr))
        if outs[0] != outs[1]:
            mismatched.append(" ".join(argv))
    ok = not mismatched
    criterion(8, "determinism", ok, f"{len(COMMANDS)} commands run twice under different hash seeds")
    assert ok, mismatched
