"""2-torsion of a genus-3 hyperelliptic Jacobian in the Weierstrass-subset model.

A 2-torsion class is an even subset S of I = {1..8} taken modulo
complementation; the group law is symmetric difference and the Weil pairing
is |S ∩ T| mod 2. Subsets are stored as 8-bit masks, bit i-1 for index i.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable

from .errors import ConsistencyError, InvalidSubsetError, ParameterError

N_POINTS = 8
INDICES = tuple(range(1, N_POINTS + 1))
FULL_MASK = (1 << N_POINTS) - 1


def mask_of(subset: Iterable[int]) -> int:
    m = 0
    for i in subset:
        if not 1 <= i <= N_POINTS:
            raise InvalidSubsetError(f"index {i} outside 1..{N_POINTS}")
        m |= 1 << (i - 1)
    return m


def subset_of(mask: int) -> tuple[int, ...]:
    return tuple(i for i in INDICES if mask >> (i - 1) & 1)


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def _lex_key(mask: int) -> tuple[int, tuple[int, ...]]:
    return popcount(mask), subset_of(mask)


def canonical_mask(mask: int) -> int:
    """Canonical representative of an even subset modulo complement."""
    if popcount(mask) % 2:
        raise InvalidSubsetError(f"odd subset {set(subset_of(mask))} is not a 2-torsion class")
    comp = FULL_MASK ^ mask
    return min(mask, comp, key=_lex_key)


@dataclass(frozen=True, order=False)
class TwoTorsion:
    """A 2-torsion class, held by its canonical mask (size <= 4)."""

    mask: int

    def __post_init__(self):
        if canonical_mask(self.mask) != self.mask:
            raise InvalidSubsetError(f"{set(subset_of(self.mask))} is not canonical; use canonical_rep")

    @property
    def rep(self) -> tuple[int, ...]:
        return subset_of(self.mask)

    @property
    def size(self) -> int:
        return popcount(self.mask)

    def is_zero(self) -> bool:
        return self.mask == 0

    def sort_key(self):
        return _lex_key(self.mask)

    def __add__(self, other: TwoTorsion) -> TwoTorsion:
        return tt_add(self, other)

    def __str__(self):
        return "{" + ",".join(map(str, self.rep)) + "}"

    def __repr__(self):
        return f"TwoTorsion({self})"


ZERO = TwoTorsion(0)


def canonical_rep(raw: Iterable[int]) -> TwoTorsion:
    return TwoTorsion(canonical_mask(mask_of(raw)))


def tt_add(a: TwoTorsion, b: TwoTorsion) -> TwoTorsion:
    return TwoTorsion(canonical_mask(a.mask ^ b.mask))


def weil_pairing(a: TwoTorsion, b: TwoTorsion) -> int:
    return popcount(a.mask & b.mask) & 1


class CaseType(enum.Enum):
    I1 = "I.1"
    I2 = "I.2"
    II1 = "II.1"
    II2 = "II.2"

    @property
    def isotropic(self) -> bool:
        return self in (CaseType.II1, CaseType.II2)

    @property
    def key(self) -> str:
        return self.name

    @classmethod
    def parse(cls, text: str) -> CaseType:
        norm = text.strip().upper().replace(".", "").replace("_", "")
        try:
            return cls[norm]
        except KeyError:
            raise ParameterError(f"unknown case {text!r}; expected one of I.1, I.2, II.1, II.2") from None


# representative-size multiset -> case
_PATTERNS = {
    (2, 2, 2): CaseType.I1,
    (2, 4, 4): CaseType.I2,
    (4, 4, 4): CaseType.II1,
    (2, 2, 4): CaseType.II2,
}


@dataclass(frozen=True)
class KleinSubgroup:
    """Order-4 subgroup of JH[2], stored as its three nonzero elements."""

    elems: frozenset

    def __post_init__(self):
        es = self.elems
        if len(es) != 3 or any(e.is_zero() for e in es):
            raise ParameterError("a Klein subgroup needs exactly three distinct nonzero classes")
        a, b, c = es
        if a + b != c:
            raise ParameterError(f"{a}, {b}, {c} are not closed under addition")

    @classmethod
    def generated_by(cls, eta: TwoTorsion, xi: TwoTorsion) -> KleinSubgroup:
        if eta.is_zero() or xi.is_zero() or eta == xi:
            raise ParameterError(f"{eta} and {xi} do not generate a Klein subgroup")
        return cls(frozenset((eta, xi, eta + xi)))

    @classmethod
    def from_subsets(cls, s1: Iterable[int], s2: Iterable[int]) -> KleinSubgroup:
        return cls.generated_by(canonical_rep(s1), canonical_rep(s2))

    def sorted_elems(self) -> tuple[TwoTorsion, TwoTorsion, TwoTorsion]:
        return tuple(sorted(self.elems, key=TwoTorsion.sort_key))

    def __iter__(self):
        return iter(self.sorted_elems())

    def __str__(self):
        a, b, _ = self.sorted_elems()
        return f"<{a},{b}>"


@lru_cache(maxsize=None)
def enumerate_two_torsion() -> tuple[TwoTorsion, ...]:
    """All 64 classes: zero, then the 28 pairs, then the 35 quadruples containing 1."""
    out = [ZERO]
    out += [canonical_rep(s) for s in combinations(INDICES, 2)]
    out += [canonical_rep(s) for s in combinations(INDICES, 4) if s[0] == 1]
    return tuple(out)


@lru_cache(maxsize=None)
def enumerate_klein_subgroups() -> tuple[KleinSubgroup, ...]:
    nonzero = enumerate_two_torsion()[1:]
    seen = set()
    out = []
    for a, b in combinations(nonzero, 2):
        k = KleinSubgroup.generated_by(a, b)
        if k.elems not in seen:
            seen.add(k.elems)
            out.append(k)
    return tuple(out)


def is_isotropic(k: KleinSubgroup) -> bool:
    return all(weil_pairing(a, b) == 0 for a, b in combinations(k.elems, 2))


def classify_subgroup(k: KleinSubgroup) -> CaseType:
    sizes = tuple(sorted(e.size for e in k.elems))
    case = _PATTERNS.get(sizes)
    if case is None:
        raise ConsistencyError(f"{k}: representative sizes {sizes} match no known case")
    if case.isotropic != is_isotropic(k):
        raise ConsistencyError(f"{k}: isotropy disagrees with size pattern {sizes}")
    return case


@dataclass(frozen=True)
class ClassificationReport:
    tallies: dict
    isotropic: int
    non_isotropic: int
    total: int

    def as_dict(self) -> dict:
        d = {c.key: self.tallies[c] for c in CaseType}
        d.update(isotropic=self.isotropic, non_isotropic=self.non_isotropic, total=self.total)
        return d


def classification_census() -> ClassificationReport:
    subgroups = enumerate_klein_subgroups()
    tallies = Counter(classify_subgroup(k) for k in subgroups)
    iso = sum(n for c, n in tallies.items() if c.isotropic)
    total = len(subgroups)
    if sum(tallies.values()) != total:
        raise ConsistencyError("census tallies do not add up")
    return ClassificationReport({c: tallies.get(c, 0) for c in CaseType}, iso, total - iso, total)


# canonical generators for each case, one per component
CANONICAL_GENERATORS = {
    CaseType.I1: ((1, 2), (1, 3)),
    CaseType.I2: ((1, 2), (1, 3, 4, 5)),
    CaseType.II1: ((1, 2, 3, 4), (1, 2, 5, 6)),
    CaseType.II2: ((1, 2), (3, 4)),
}


def canonical_subgroup(case: CaseType) -> KleinSubgroup:
    return KleinSubgroup.from_subsets(*CANONICAL_GENERATORS[case])
