"""The (Z/2)^3 covering tower above P^1 attached to a Klein subgroup.

Choosing subsets s_eta, s_xi of the branch indices, the top curve has
function field k(x, sqrt f_eta, sqrt f_xi, sqrt f_I), where f_S is the monic
polynomial with roots u_i, i in S. A deck element is a flip vector (a, b, c)
acting by sign changes on the three square roots; sigma = (1,0,0) and
tau = (0,1,0) generate the étale deck group over H = y^2 = f_I, and the
coset of iota = (0,0,1) is the set of lifts of the hyperelliptic involution.

A character (a, b, c) of the deck group corresponds to the double cover
y^2 = f_T of P^1 with T = a*s_eta ^ b*s_xi ^ c*I (symmetric differences),
and the quotient by a subgroup K has Jacobian isogenous to the product of
the Jacobians of the double covers whose characters kill K.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from itertools import product
from typing import Iterable

from .errors import ConsistencyError, InvalidSubsetError, NotACurveError
from .f2sym import (
    FULL_MASK,
    CaseType,
    KleinSubgroup,
    canonical_mask,
    canonical_subgroup,
    classify_subgroup,
    popcount,
    subset_of,
)

TOP_GENUS = 9
BASE_GENUS = 3
PRYM_DIM = TOP_GENUS - BASE_GENUS


@dataclass(frozen=True, order=True)
class Deck:
    a: int
    b: int
    c: int

    def __mul__(self, other: Deck) -> Deck:
        return Deck(self.a ^ other.a, self.b ^ other.b, self.c ^ other.c)

    @property
    def is_lift(self) -> bool:
        return self.c == 1

    @property
    def signs(self) -> tuple[int, int, int]:
        return (1 - 2 * self.a, 1 - 2 * self.b, 1 - 2 * self.c)

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)

    def __str__(self):
        return f"({self.a},{self.b},{self.c})"


IDENTITY = Deck(0, 0, 0)
SIGMA = Deck(1, 0, 0)
TAU = Deck(0, 1, 0)
IOTA = Deck(0, 0, 1)
DECK_GROUP = tuple(Deck(*v) for v in product((0, 1), repeat=3))
CHARACTERS = DECK_GROUP[1:]  # nonzero characters, same coordinates as flips


def pairing(chi: Deck, g: Deck) -> int:
    return (chi.a & g.a) ^ (chi.b & g.b) ^ (chi.c & g.c)


def span(gens: Iterable[Deck]) -> frozenset:
    group = {IDENTITY}
    for g in gens:
        group |= {h * g for h in group}
    return frozenset(group)


@lru_cache(maxsize=None)
def all_subgroups() -> tuple[frozenset, ...]:
    """The 16 subgroups of the deck group, ordered by size then elements."""
    seen = {span(gs) for gs in product(DECK_GROUP, repeat=3)}
    return tuple(sorted(seen, key=lambda s: (len(s), sorted(s))))


def annihilator(subgroup: frozenset) -> tuple[Deck, ...]:
    """Nonzero characters trivial on the subgroup."""
    return tuple(chi for chi in CHARACTERS if all(pairing(chi, g) == 0 for g in subgroup))


def genus_quadratic(subset) -> int:
    mask = subset if isinstance(subset, int) else _mask(subset)
    n = popcount(mask)
    if n == 0:
        raise NotACurveError("y^2 = 1 is not a curve")
    if n % 2:
        raise InvalidSubsetError("odd branch set")
    return n // 2 - 1


def _mask(subset: Iterable[int]) -> int:
    m = 0
    for i in subset:
        m |= 1 << (i - 1)
    return m


def hyperelliptic_flag(subset) -> bool:
    """Whether the étale double cover of H defined by this class is hyperelliptic."""
    mask = subset if isinstance(subset, int) else _mask(subset)
    return popcount(canonical_mask(mask)) == 2


@dataclass(frozen=True)
class SubsetTriple:
    """Actual branch subsets (masks) for eta and xi; the third is I."""

    s_eta: int
    s_xi: int

    @property
    def s_sum(self) -> int:
        return self.s_eta ^ self.s_xi

    def subset(self, chi: Deck) -> int:
        return (self.s_eta if chi.a else 0) ^ (self.s_xi if chi.b else 0) ^ (FULL_MASK if chi.c else 0)

    def __str__(self):
        return f"({fmt_subset(self.s_eta)}, {fmt_subset(self.s_xi)})"


def fmt_subset(mask: int) -> str:
    return "{" + ",".join(map(str, subset_of(mask))) + "}"


def lift_generators(k: KleinSubgroup) -> SubsetTriple:
    eta, xi, _ = k.sorted_elems()
    return SubsetTriple(eta.mask, xi.mask)


def character_subsets(t: SubsetTriple) -> dict:
    out = {chi: t.subset(chi) for chi in CHARACTERS}
    if len(set(out.values())) != 7 or 0 in out.values():
        raise ConsistencyError(f"{t}: character subsets are not distinct and nonempty")
    return out


def fixed_point_table(t: SubsetTriple) -> dict:
    """Number of fixed points of every deck element on the top curve.

    The inertia group above u_i is generated by the flip of exactly those
    square roots that vanish at u_i; each such fibre has 4 points.
    """
    table = {g: 0 for g in DECK_GROUP}
    for i in range(8):
        g = Deck(t.s_eta >> i & 1, t.s_xi >> i & 1, 1)
        table[g] += 4
    return table


def quotient_genus(subgroup: frozenset, t: SubsetTriple) -> int:
    g = sum(genus_quadratic(t.subset(chi)) for chi in annihilator(subgroup))
    # Riemann-Hurwitz for the Galois cover top -> top/K
    fix = fixed_point_table(t)
    ram = sum(fix[h] for h in subgroup if h != IDENTITY)
    num = 2 * TOP_GENUS - 2 - ram
    den = 2 * len(subgroup)
    if num % den or num // den + 1 != g:
        raise ConsistencyError(f"character genus {g} disagrees with Riemann-Hurwitz for {sorted(subgroup)}")
    return g


def inertia_kernel_order(subgroup: frozenset, t: SubsetTriple) -> int:
    """Order of ker(JY -> J(top)) for Y = top/K: |K / <elements with fixed points>|."""
    fix = fixed_point_table(t)
    inert = span(h for h in subgroup if fix[h] > 0)
    return len(subgroup) // len(inert)


# Classical names of order-4 quotients, as generator words in (sigma, tau, j)
# after the lifts are labelled by the convention in `label_lifts`.
_ALIASES = {
    CaseType.I1: {"C_{σ,jτ}": ("σ", "jτ"), "C_{στ,jτ}": ("στ", "jτ"), "C_{τ,jστ}": ("τ", "jστ")},
    CaseType.I2: {"H'": ("σ", "jτ"), "E": ("j", "τ"), "E'": ("j", "στ"), "F": ("jσ", "τ"), "F'": ("jσ", "στ")},
    CaseType.II1: {
        "E": ("j", "jσ"), "F": ("j", "jτ"), "G": ("j", "jστ"),
        "E'": ("jτ", "jστ"), "F'": ("jσ", "jστ"), "G'": ("jσ", "jτ"),
    },
    CaseType.II2: {"D_σ": ("σ", "jτ"), "D_τ": ("τ", "jσ"), "F": ("στ", "jσ"), "E": ("στ", "j")},
}

# moduli of branch configurations: sizes of the marked point blocks
MODULI_SIGNATURES = {
    CaseType.I1: (3, 5),
    CaseType.I2: (2, 3, 3),
    CaseType.II1: (2, 2, 2, 2),
    CaseType.II2: (2, 2, 4),
}

WORDS = ("1", "σ", "τ", "στ", "j", "jσ", "jτ", "jστ")


def label_lifts(fix: dict) -> dict:
    """Assign j, jσ, jτ, jστ to the four lifts.

    Lifts are sorted by descending fixed-point count, ties by flip vector;
    sigma and tau are then j*jσ and j*jτ. Any ordering of the lift coset is
    consistent with the group law, since the sum of three distinct lifts is
    the fourth.
    """
    lifts = sorted((g for g in DECK_GROUP if g.is_lift), key=lambda g: (-fix[g], g.as_tuple()))
    j, js, jt, jst = lifts
    s, t = j * js, j * jt
    words = {"1": IDENTITY, "σ": s, "τ": t, "στ": s * t, "j": j, "jσ": js, "jτ": jt, "jστ": jst}
    if words["jστ"] != j * s * t:
        raise ConsistencyError("lift labels are inconsistent with the group law")
    return words


@dataclass(frozen=True)
class CurveNode:
    deck_subgroup: frozenset
    name: str
    genus: int
    deg_over_line: int
    defining_subset: int | None
    starred: bool
    kernel_order: int
    polarization: tuple | None = None
    alias: str | None = None
    hyperelliptic: bool | None = None

    @property
    def display(self) -> str:
        return self.alias or self.name

    @property
    def order(self) -> int:
        return len(self.deck_subgroup)


@dataclass
class TowerDiagram:
    klein: KleinSubgroup
    case: CaseType
    triple: SubsetTriple
    nodes: tuple
    edges: tuple  # (upper index, lower index)
    fixed_points: dict
    words: dict
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._index = {n.deck_subgroup: n for n in self.nodes}

    def node(self, subgroup) -> CurveNode:
        return self._index[frozenset(subgroup)]

    def node_of(self, *words: str) -> CurveNode:
        return self.node(span(self.words[w] for w in words))

    def by_name(self, name: str) -> CurveNode:
        for n in self.nodes:
            if name in (n.name, n.alias):
                return n
        raise KeyError(name)

    @property
    def top(self) -> CurveNode:
        return self.nodes[0]

    @property
    def h_node(self) -> CurveNode:
        return self.node(span((SIGMA, TAU)))

    def level(self, order: int) -> list:
        return [n for n in self.nodes if n.order == order]

    def quadratic_nodes(self) -> list:
        return self.level(4)

    def lift_fixed_points(self) -> dict:
        return {w: self.fixed_points[self.words[w]] for w in ("j", "jσ", "jτ", "jστ")}

    def word_of(self, g: Deck) -> str:
        for w, h in self.words.items():
            if h == g:
                return w
        raise KeyError(g)


def _lex(mask: int):
    return popcount(mask), subset_of(mask)


def _subgroup_word(sub: frozenset, words: dict) -> str:
    inv = {g: w for w, g in words.items()}
    return ",".join(inv[g] for g in sorted(sub, key=lambda g: WORDS.index(inv[g])) if g != IDENTITY)


def _h_polarization(isotropic: bool) -> tuple:
    # JH/G with G of order 4: (1,1,2)*2 if G isotropic for 2Θ, (1,4,4) otherwise
    return (2, 2, 4) if isotropic else (1, 4, 4)


def build_tower(k: KleinSubgroup) -> TowerDiagram:
    case = classify_subgroup(k)
    t = lift_generators(k)
    fix = fixed_point_table(t)
    words = label_lifts(fix)
    inv = {g: w for w, g in words.items()}
    subs = character_subsets(t)
    h_sub = span((SIGMA, TAU))
    aliases = {span(words[w] for w in ws): name for name, ws in _ALIASES[case].items()}
    genera = {s: quotient_genus(s, t) for s in all_subgroups()}

    def starred(sub):
        n = len(sub)
        if n == 1 or genera[sub] == 0:
            return False
        halves = [s for s in all_subgroups() if len(s) * 2 == n and s <= sub]
        return any(genera[s] == 2 * genera[sub] - 1 for s in halves)

    order2 = sorted((s for s in all_subgroups() if len(s) == 2), key=lambda s: WORDS.index(inv[max(s)]))
    order4 = sorted((s for s in all_subgroups() if len(s) == 4),
                    key=lambda s: (s != h_sub, _lex(subs[annihilator(s)[0]])))
    ordered = [frozenset({IDENTITY})] + order2 + order4 + [frozenset(DECK_GROUP)]

    nodes = []
    for sub in ordered:
        g = genera[sub]
        st = starred(sub)
        kord = inertia_kernel_order(sub, t)
        if g > 0 and st != (kord > 1):
            raise ConsistencyError(f"star flag disagrees with inertia kernel for {_subgroup_word(sub, words)}")
        n = len(sub)
        defining = None
        alias = None
        if n == 1:
            name = "C~"
        elif n == 2:
            (elem,) = sub - {IDENTITY}
            name = "C_" + inv[elem]
            if not elem.is_lift:
                (chi,) = [c for c in annihilator(sub) if not c.c]
                cls = canonical_mask(subs[chi])
                alias = {t.s_eta: "C_η", t.s_xi: "C_ξ"}.get(cls, "C_η+ξ")
            elif case is CaseType.II2 and elem == words["j"]:
                alias = "E_j"
        elif n == 4:
            (chi,) = annihilator(sub)
            defining = subs[chi]
            name = "H" if sub == h_sub else "Y" + "".join(map(str, subset_of(defining)))
            alias = aliases.get(sub)
            if defining != t.subset(chi) or g != genus_quadratic(defining):
                raise ConsistencyError("quadratic node genus mismatch")
        else:
            name = "P1"

        if sub == h_sub:
            pol = _h_polarization(case.isotropic)
        elif n == 1:
            pol = (1,) * g
        elif g > 0 and not st:
            pol = (n,) * g
        else:
            pol = None

        nodes.append(CurveNode(
            deck_subgroup=sub, name=name, genus=g, deg_over_line=8 // n,
            defining_subset=defining, starred=st, kernel_order=kord,
            polarization=pol, alias=alias,
        ))

    edges = tuple(
        (i, j)
        for i, up in enumerate(nodes)
        for j, lo in enumerate(nodes)
        if up.deck_subgroup < lo.deck_subgroup and len(lo.deck_subgroup) == 2 * len(up.deck_subgroup)
    )
    tower = TowerDiagram(k, case, t, tuple(nodes), edges, fix, words)
    _assign_hyperelliptic(tower)
    return tower


def _assign_hyperelliptic(tower: TowerDiagram):
    nodes = list(tower.nodes)
    for idx, n in enumerate(nodes):
        below = [tower.nodes[j] for i, j in tower.edges if i == idx]
        if n.genus < 2:
            flag = False
        elif n.order == 1:
            flag = tower.case is CaseType.I1
        elif n.order == 2 and n.alias in ("C_η", "C_ξ", "C_η+ξ"):
            (chi,) = [c for c in annihilator(n.deck_subgroup) if not c.c]
            flag = hyperelliptic_flag(tower.triple.subset(chi))
            if flag != any(b.genus == 0 for b in below):
                raise ConsistencyError(f"{n.name}: class criterion disagrees with the quotient lattice")
        elif n.genus == 2 or n.deg_over_line == 2 or any(b.genus == 0 for b in below):
            flag = True
        else:
            flag = None  # not decided by the lattice
        nodes[idx] = replace(n, hyperelliptic=flag)
    tower.nodes = tuple(nodes)
    tower.__post_init__()


def jacobian_intersection(tower: TowerDiagram, n1: CurveNode, n2: CurveNode) -> CurveNode:
    """Common quotient: the node of the subgroup generated by both deck groups."""
    return tower.node(span(n1.deck_subgroup | n2.deck_subgroup))


@dataclass(frozen=True)
class PrymComponent:
    node: CurveNode
    dim: int
    polarization: tuple
    exact: bool
    kernel_order: int

    @property
    def starred(self) -> bool:
        return self.kernel_order > 1

    def describe(self) -> str:
        pol = ",".join(map(str, self.polarization))
        star = "*" if self.starred else ""
        if self.exact:
            return f"J{self.node.display}{star} dim {self.dim} type ({pol})"
        return f"J{self.node.display}{star} dim {self.dim} type divides ({pol}), kernel order {self.kernel_order}"


@dataclass(frozen=True)
class PrymSummary:
    components: tuple
    h_polarization: tuple
    prym_polarization: tuple
    isogeny_predictions: dict  # order-2 node name -> tuple of quadratic node names
    moduli_signature: tuple
    moduli_dimension: int


def _embedded_representative(tower: TowerDiagram, node: CurveNode) -> CurveNode:
    """For a starred elliptic node, the étale elliptic cover with the same image."""
    while node.starred and node.genus == 1:
        idx = tower.nodes.index(node)
        ups = [tower.nodes[i] for i, j in tower.edges if j == idx]
        ups = [u for u in ups if u.genus == 1]
        if not ups:
            break
        node = ups[0]
    return node


def prym_decomposition(k: KleinSubgroup, tower: TowerDiagram | None = None) -> PrymSummary:
    tower = tower or build_tower(k)
    h = tower.h_node
    comps = []
    for n in tower.quadratic_nodes():
        if n is h or n.genus == 0:
            continue
        rep = _embedded_representative(tower, n)
        if rep.starred:
            comps.append(PrymComponent(rep, rep.genus, (rep.order,) * rep.genus, False, rep.kernel_order))
        else:
            comps.append(PrymComponent(rep, rep.genus, rep.polarization, True, 1))
    if sum(c.dim for c in comps) != PRYM_DIM:
        raise ConsistencyError("Prym component dimensions do not add up to 6")

    h_pol = _h_polarization(tower.case.isotropic)
    prym_pol = tuple(sorted((1,) * (PRYM_DIM - BASE_GENUS) + h_pol))

    preds = {}
    for n in tower.level(2):
        quads = [q for q in tower.quadratic_nodes() if n.deck_subgroup <= q.deck_subgroup and q.genus > 0]
        if sum(q.genus for q in quads) != n.genus:
            raise ConsistencyError(f"{n.name}: isogeny factors do not add up to its genus")
        preds[n.name] = tuple(q.name for q in quads)

    sig = MODULI_SIGNATURES[tower.case]
    return PrymSummary(tuple(comps), h_pol, prym_pol, preds, sig, sum(sig) - 3)


def tower_for(case_or_klein) -> TowerDiagram:
    if isinstance(case_or_klein, CaseType):
        return build_tower(canonical_subgroup(case_or_klein))
    return build_tower(case_or_klein)
