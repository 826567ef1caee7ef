from collections import Counter

import pytest

from kleintower.errors import InvalidSubsetError, NotACurveError
from kleintower.f2sym import CaseType, canonical_subgroup, enumerate_klein_subgroups, is_isotropic
from kleintower.tower import (
    DECK_GROUP,
    IDENTITY,
    IOTA,
    MODULI_SIGNATURES,
    SIGMA,
    TAU,
    Deck,
    all_subgroups,
    annihilator,
    build_tower,
    character_subsets,
    fixed_point_table,
    genus_quadratic,
    hyperelliptic_flag,
    jacobian_intersection,
    lift_generators,
    prym_decomposition,
    quotient_genus,
    span,
    tower_for,
)

FIXED = {
    CaseType.I1: [20, 4, 4, 4],
    CaseType.I2: [12, 12, 4, 4],
    CaseType.II1: [8, 8, 8, 8],
    CaseType.II2: [16, 8, 8, 0],
}


@pytest.fixture(scope="module")
def all_towers():
    return [build_tower(k) for k in enumerate_klein_subgroups()]


def test_deck_group_structure():
    assert len(DECK_GROUP) == 8
    assert SIGMA * TAU == Deck(1, 1, 0)
    assert all(g * g == IDENTITY for g in DECK_GROUP)
    subs = all_subgroups()
    assert Counter(len(s) for s in subs) == {1: 1, 2: 7, 4: 7, 8: 1}
    for s in subs:
        assert len(annihilator(s)) == 8 // len(s) - 1


def test_genus_quadratic():
    assert genus_quadratic({1, 2}) == 0
    assert genus_quadratic(range(1, 9)) == 3
    assert genus_quadratic({1, 2, 3, 4, 5, 6}) == 2
    with pytest.raises(NotACurveError):
        genus_quadratic(set())
    with pytest.raises(InvalidSubsetError):
        genus_quadratic({1, 2, 3})


def test_hyperelliptic_flag_by_class_size():
    assert hyperelliptic_flag({3, 4, 5, 6, 7, 8})
    assert not hyperelliptic_flag({1, 2, 3, 4})


@pytest.mark.parametrize("case", list(CaseType))
def test_fixed_point_tables(case):
    t = tower_for(case)
    fix = t.lift_fixed_points()
    assert list(fix.values()) == FIXED[case]
    assert sum(fix.values()) == 32
    assert all(n == 0 for g, n in t.fixed_points.items() if not g.is_lift)


def test_genus_rows():
    def row(case):
        t = tower_for(case)
        return {n.genus for n in t.nodes if n.name not in ("H", "P1")}

    assert row(CaseType.I2) == {9, 5, 4, 2, 1, 0}
    assert row(CaseType.II1) == {9, 5, 3, 1}
    assert row(CaseType.II2) == {9, 5, 3, 2, 1, 0}
    quads = sorted((n.genus for n in tower_for(CaseType.I1).quadratic_nodes()), reverse=True)
    assert quads == [3, 2, 2, 2, 0, 0, 0]


def test_tower_shape():
    t = tower_for(CaseType.II2)
    assert len(t.nodes) == 16
    assert len(t.edges) == 35
    assert t.top.genus == 9 and t.h_node.genus == 3 and t.nodes[-1].genus == 0
    assert [len(t.level(o)) for o in (1, 2, 4, 8)] == [1, 7, 7, 1]


def test_every_subgroup_genus_bookkeeping(all_towers):
    for t in all_towers:
        assert sum(n.genus for n in t.quadratic_nodes()) == 9
        for g, fix in t.fixed_points.items():
            if g.is_lift:
                assert 4 * quotient_genus(span([g]), t.triple) == 20 - fix
        subs = character_subsets(t.triple)
        assert len(set(subs.values())) == 7


def test_prym_metadata_all_subgroups(all_towers):
    counts = Counter()
    for t in all_towers:
        prym = prym_decomposition(t.klein, t)
        assert sum(c.dim for c in prym.components) == 6
        iso = is_isotropic(t.klein)
        expected = (1, 1, 1, 2, 2, 4) if iso else (1, 1, 1, 1, 4, 4)
        assert prym.prym_polarization == expected
        assert prym.moduli_dimension == 5
        counts[iso] += 1
        for name, factors in prym.isogeny_predictions.items():
            assert sum(t.by_name(f).genus for f in factors) == t.by_name(name).genus
    assert counts == {True: 315, False: 336}


def test_star_flags():
    t = tower_for(CaseType.II2)
    assert t.by_name("D_σ").starred and t.by_name("D_τ").starred
    assert t.h_node.starred
    assert not tower_for(CaseType.I2).by_name("H'").starred


def test_ii2_components():
    prym = prym_decomposition(canonical_subgroup(CaseType.II2))
    desc = sorted(c.describe() for c in prym.components)
    assert desc == [
        "JD_σ* dim 2 type divides (4,4), kernel order 2",
        "JD_τ* dim 2 type divides (4,4), kernel order 2",
        "JE_j dim 1 type (2)",
        "JF dim 1 type (4)",
    ]
    assert prym.h_polarization == (2, 2, 4)


def test_unstarred_polarization_is_uniform():
    t = tower_for(CaseType.II1)
    for n in t.quadratic_nodes():
        if n is not t.h_node and n.genus:
            assert n.polarization == (4,) * n.genus


@pytest.mark.parametrize("case", list(CaseType))
def test_moduli_signature(case):
    prym = prym_decomposition(canonical_subgroup(case))
    assert prym.moduli_signature == MODULI_SIGNATURES[case]
    assert sum(prym.moduli_signature) == 8
    assert prym.moduli_dimension == 5


def test_intersection_uses_relabelled_lifts():
    t = tower_for(CaseType.II1)
    assert jacobian_intersection(t, t.node_of("j"), t.node_of("jσ")).alias == "E"
    # with the raw flip vectors iota and iota*sigma the join is the F-node,
    # because the lift labels swap the roles of sigma and tau in this case
    assert t.node(span((IOTA, IOTA * SIGMA))).alias == "F"


def test_lift_labels_are_ordered_by_fixed_points(all_towers):
    for t in all_towers:
        fix = [t.fixed_points[t.words[w]] for w in ("j", "jσ", "jτ", "jστ")]
        assert fix[0] == max(fix)
        assert t.words["jσ"] * t.words["jτ"] == t.words["jστ"] * t.words["j"]


def test_hyperelliptic_flags():
    assert tower_for(CaseType.I1).top.hyperelliptic is True
    assert tower_for(CaseType.II1).top.hyperelliptic is False
    for case in CaseType:
        t = tower_for(case)
        for n in t.nodes:
            if n.genus < 2:
                assert n.hyperelliptic is False
            if n.genus == 2 or n.deg_over_line == 2 and n.genus >= 2:
                assert n.hyperelliptic is True


def test_fixed_point_table_matches_branch_count():
    t = lift_generators(canonical_subgroup(CaseType.I1))
    fix = fixed_point_table(t)
    assert sum(fix.values()) == 32
    assert fix[IDENTITY] == 0
