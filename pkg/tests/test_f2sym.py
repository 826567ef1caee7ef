from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kleintower.errors import ConsistencyError, InvalidSubsetError, ParameterError
from kleintower.f2sym import (
    CANONICAL_GENERATORS,
    ZERO,
    CaseType,
    KleinSubgroup,
    TwoTorsion,
    canonical_rep,
    canonical_subgroup,
    classification_census,
    classify_subgroup,
    enumerate_klein_subgroups,
    enumerate_two_torsion,
    is_isotropic,
    mask_of,
    tt_add,
    weil_pairing,
)

even_subsets = st.sets(st.integers(1, 8)).filter(lambda s: len(s) % 2 == 0)
classes = st.sampled_from(enumerate_two_torsion())


def test_canonical_rep_prefers_smaller_side():
    assert canonical_rep({3, 4, 5, 6, 7, 8}).rep == (1, 2)
    assert canonical_rep(range(1, 9)) == ZERO


def test_size_four_tie_break_is_lexicographic():
    assert canonical_rep({5, 6, 7, 8}).rep == (1, 2, 3, 4)
    assert canonical_rep({2, 3, 4, 5}).rep == (1, 6, 7, 8)


def test_odd_subset_rejected():
    with pytest.raises(InvalidSubsetError):
        canonical_rep({1, 2, 3})
    with pytest.raises(InvalidSubsetError):
        canonical_rep({9, 1})


def test_non_canonical_mask_rejected():
    with pytest.raises(InvalidSubsetError):
        TwoTorsion(mask_of({3, 4, 5, 6, 7, 8}))


def test_str_and_repr():
    a = canonical_rep({2, 1})
    assert str(a) == "{1,2}"
    assert repr(a) == "TwoTorsion({1,2})"


def test_two_torsion_count():
    elems = enumerate_two_torsion()
    assert len(elems) == 64 == len(set(elems))
    assert elems[0] == ZERO


@given(even_subsets, even_subsets)
def test_addition_is_symmetric_difference(s, t):
    assert canonical_rep(s) + canonical_rep(t) == canonical_rep(s ^ t)


@given(classes, classes, classes)
def test_group_axioms(a, b, c):
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    assert a + ZERO == a
    assert a + a == ZERO


@given(classes, classes, classes)
def test_weil_pairing_is_bilinear_alternating(a, b, c):
    assert weil_pairing(a, a) == 0
    assert weil_pairing(a, b) == weil_pairing(b, a)
    assert weil_pairing(tt_add(a, b), c) == weil_pairing(a, c) ^ weil_pairing(b, c)


def test_weil_pairing_is_nondegenerate():
    elems = enumerate_two_torsion()
    for a in elems[1:]:
        assert any(weil_pairing(a, b) for b in elems)


def test_pairing_independent_of_representative():
    for s in combinations(range(1, 9), 2):
        for t in combinations(range(1, 9), 4):
            comp = set(range(1, 9)) - set(t)
            assert len(set(s) & set(t)) % 2 == len(set(s) & comp) % 2


def test_klein_subgroup_validation():
    a, b = canonical_rep({1, 2}), canonical_rep({3, 4})
    with pytest.raises(ParameterError):
        KleinSubgroup.generated_by(a, a)
    with pytest.raises(ParameterError):
        KleinSubgroup.generated_by(a, ZERO)
    with pytest.raises(ParameterError):
        KleinSubgroup(frozenset({a, b, canonical_rep({1, 3})}))
    k = KleinSubgroup.generated_by(a, b)
    assert str(k) == "<{1,2},{3,4}>"
    assert KleinSubgroup.from_subsets((3, 4), (1, 2, 3, 4)) == k


def test_subgroup_enumeration_is_complete_and_distinct():
    subs = enumerate_klein_subgroups()
    assert len(subs) == 651 == len({k.elems for k in subs})
    # each pair of distinct nonzero classes lies in exactly one subgroup
    pairs = set()
    for k in subs:
        for a, b in combinations(k.sorted_elems(), 2):
            pairs.add(frozenset((a, b)))
    assert len(pairs) == 63 * 62 // 2


def test_census():
    d = classification_census().as_dict()
    assert d == {"I1": 56, "I2": 280, "II1": 105, "II2": 210,
                 "isotropic": 315, "non_isotropic": 336, "total": 651}


def test_isotropy_matches_case():
    for k in enumerate_klein_subgroups():
        assert is_isotropic(k) == classify_subgroup(k).isotropic


@pytest.mark.parametrize("case", list(CaseType))
def test_canonical_generators_classify(case):
    assert classify_subgroup(canonical_subgroup(case)) is case
    assert len(CANONICAL_GENERATORS[case]) == 2


def test_case_parse():
    assert CaseType.parse("II.1") is CaseType.II1
    assert CaseType.parse("ii2") is CaseType.II2
    assert CaseType.parse("I_2") is CaseType.I2
    with pytest.raises(ParameterError):
        CaseType.parse("III")


def test_classify_rejects_impossible_pattern():
    # a hand-built object bypassing validation cannot sneak through classification
    k = canonical_subgroup(CaseType.I1)
    fake = object.__new__(KleinSubgroup)
    object.__setattr__(fake, "elems", frozenset({canonical_rep({1, 2, 3, 4})}) | set(list(k.elems)[:2]))
    with pytest.raises(ConsistencyError):
        classify_subgroup(fake)
