"""Point counts on every curve of the tower over F_q and the identities they
must satisfy.

Branch points u_1..u_8 lie in F_p. Counts over F_q, q = p^k, come from three
routes:

* quadratic-character: y^2 = f_T, N = q + 2 + sum_x chi(f_T(x));
* top-fiber: the normalised fibre product of the three square roots, with
  the fibres over branch points read off from ratios at the shared roots;
* quotient-burnside: #(top/K)(F_q) = |K|^-1 sum_{g in K} #{P : Frob P = g P}.

A fourth, character-predicted, count for top/K comes from the isogeny
decomposition into the double covers whose characters kill K.

All sums are exact integers. chi(f_T(x)) is evaluated as the product of
chi(x - u_i) over i in T, read from a precomputed character table of F_q.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Sequence

import numpy as np

from .errors import ConsistencyError, CountInconsistencyError, ParameterError
from .f2sym import FULL_MASK, KleinSubgroup
from .ffield import chi_table, is_prime, make_ext, poly_from_roots
from .tower import (
    IDENTITY,
    CurveNode,
    Deck,
    SubsetTriple,
    TowerDiagram,
    all_subgroups,
    annihilator,
    build_tower,
    lift_generators,
    _mask,
    genus_quadratic,
    prym_decomposition,
    quotient_genus,
)

MIN_PRIME = 11
MAX_EXPONENT = 4

ROUTE_QUADRATIC = "quadratic-character"
ROUTE_TOP = "top-fiber"
ROUTE_BURNSIDE = "quotient-burnside"
ROUTE_PREDICTED = "character-predicted"


@dataclass(frozen=True)
class BranchAssignment:
    p: int
    points: tuple  # residues of u_1..u_8

    def __post_init__(self):
        if not is_prime(self.p) or self.p < MIN_PRIME:
            raise ParameterError(f"branch points need a prime p >= {MIN_PRIME}, got {self.p}")
        pts = tuple(int(u) for u in self.points)
        if len(pts) != 8:
            raise ParameterError(f"need 8 branch points, got {len(pts)}")
        if any(not 0 <= u < self.p for u in pts):
            raise ParameterError(f"branch points must be residues in [0, {self.p})")
        if len(set(pts)) != 8:
            raise ParameterError(f"branch points {pts} are not distinct")
        object.__setattr__(self, "points", pts)

    def roots(self, mask: int) -> tuple:
        return tuple(u for i, u in enumerate(self.points) if mask >> i & 1)


def random_branch(p: int, seed: int) -> BranchAssignment:
    if not is_prime(p) or p < MIN_PRIME:
        raise ParameterError(f"random branch points need a prime p >= {MIN_PRIME}, got {p}")
    rng = np.random.default_rng(seed % 2**64)
    pts = []
    while len(pts) < 8:
        u = int(rng.integers(0, p))
        if u not in pts:
            pts.append(u)
    return BranchAssignment(p, tuple(pts))


def _exponent(p: int, q: int) -> int:
    k, r = 0, 1
    while r < q:
        r *= p
        k += 1
    if r != q or not 1 <= k <= MAX_EXPONENT:
        raise ParameterError(f"q = {q} is not p^k for p = {p}, 1 <= k <= {MAX_EXPONENT}")
    return k


def weil_ok(count: int, q: int, genus: int) -> bool:
    """|N - (q+1)| <= 2 g sqrt(q), compared exactly."""
    d = count - q - 1
    return d * d <= 4 * genus * genus * q


@dataclass(frozen=True)
class CurveCount:
    node: str
    q: int
    count: int
    route: str
    genus: int

    @property
    def weil_ok(self) -> bool:
        return weil_ok(self.count, self.q, self.genus)


def count_double_cover(roots: Sequence[int], p: int, k: int = 1) -> int:
    """#points of the smooth model of y^2 = prod(x - r) over F_{p^k}, even degree.

    Roots are residues in F_p; the two points at infinity are rational since
    the model is monic of even degree.
    """
    if len(roots) % 2 or not roots:
        raise ParameterError("need a nonempty even number of roots")
    ctx = make_ext(p, k)
    chi = chi_table(ctx)
    idx = np.arange(ctx.q, dtype=np.int64)
    low, high = idx % p, idx - idx % p
    val = np.ones(ctx.q, dtype=np.int8)
    for r in roots:
        val *= chi[(low - r) % p + high]
    return ctx.q + 2 + int(val.sum(dtype=np.int64))


class _Level:
    """Character data of one extension F_{p^k} for a fixed branch assignment."""

    def __init__(self, b: BranchAssignment, k: int):
        p = b.p
        self.ctx = ctx = make_ext(p, k)
        self.q = ctx.q
        self.chi = chi = chi_table(ctx)
        idx = np.arange(ctx.q, dtype=np.int64)
        low, high = idx % p, idx - idx % p
        self.lin = [chi[(low - u) % p + high] for u in b.points]
        self.generic = np.ones(ctx.q, dtype=bool)
        self.generic[list(b.points)] = False
        self._values: dict = {}
        self._sums: dict = {}

    def values(self, mask: int) -> np.ndarray:
        """chi(f_T(x)) for every x in F_q."""
        v = self._values.get(mask)
        if v is None:
            v = np.ones(self.q, dtype=np.int8)
            for i in range(8):
                if mask >> i & 1:
                    v = v * self.lin[i]
            self._values[mask] = v
        return v

    def generic_sum(self, masks: tuple) -> int:
        """sum over non-branch x of prod_{m in masks} chi(f_m(x))."""
        s = self._sums.get(masks)
        if s is None:
            v = np.ones(self.q, dtype=np.int8)
            for m in masks:
                v = v * self.values(m)
            s = int(v[self.generic].sum(dtype=np.int64))
            self._sums[masks] = s
        return s


class CountEngine:
    """Counts for one (branch assignment, subset triple); caches per extension."""

    def __init__(self, b: BranchAssignment, t: SubsetTriple):
        self.b = b
        self.t = t
        self._levels: dict = {}
        self._branch: dict = {}
        self._fp = make_ext(b.p, 1)
        self._polys = {m: poly_from_roots(self._fp, b.roots(m)) for m in (t.s_eta, t.s_xi, FULL_MASK)}

    def level(self, k: int) -> _Level:
        if not 1 <= k <= MAX_EXPONENT:
            raise ParameterError(f"extension degree {k} outside 1..{MAX_EXPONENT}")
        lv = self._levels.get(k)
        if lv is None:
            lv = self._levels[k] = _Level(self.b, k)
        return lv

    def quadratic(self, mask: int, k: int) -> int:
        lv = self.level(k)
        return lv.q + 2 + int(lv.values(mask).sum(dtype=np.int64))

    def _ratio_char(self, mask: int, j: int, chi: np.ndarray) -> int:
        """chi of [f_S/(x-u_j)](u_j) / [f_I/(x-u_j)](u_j), by synthetic division."""
        u = self._fp(self.b.points[j])
        num, rem1 = self._polys[mask].divide_linear(u)
        den, rem2 = self._polys[FULL_MASK].divide_linear(u)
        if not (rem1.is_zero() and rem2.is_zero()):
            raise ConsistencyError("u_j is not a root of the branch polynomials")
        r = num(u) / den(u)
        return int(chi[r.index])

    def branch_data(self, k: int) -> list:
        """Per branch point: (kind, chi_1, chi_2) with kind in {'ii','iii1','iii2','iv'}.

        chi_i is chi(z_i) for a root that does not vanish at u_j and chi(r_i)
        for one that does.
        """
        data = self._branch.get(k)
        if data is not None:
            return data
        chi = self.level(k).chi
        t = self.t
        data = []
        for j, u in enumerate(self.b.points):
            in1, in2 = t.s_eta >> j & 1, t.s_xi >> j & 1
            c1 = self._ratio_char(t.s_eta, j, chi) if in1 else int(chi[self._polys[t.s_eta](u).index])
            c2 = self._ratio_char(t.s_xi, j, chi) if in2 else int(chi[self._polys[t.s_xi](u).index])
            if c1 == 0 or c2 == 0:
                raise ConsistencyError("vanishing character at a branch fibre")
            kind = {(0, 0): "ii", (1, 0): "iii1", (0, 1): "iii2", (1, 1): "iv"}[(in1, in2)]
            data.append((kind, c1, c2))
        self._branch[k] = data
        return data

    def top(self, k: int) -> int:
        lv = self.level(k)
        t = self.t
        c1, c2, c3 = lv.values(t.s_eta), lv.values(t.s_xi), lv.values(FULL_MASK)
        g = lv.generic
        if ((c1 == 0) & (c3 != 0)).any() or ((c2 == 0) & (c3 != 0)).any():
            raise ConsistencyError("a partial square root vanishes where f_I does not")
        fib = (1 + c1[g].astype(np.int64)) * (1 + c2[g]) * (1 + c3[g])
        total = int(fib.sum())
        for _, a1, a2 in self.branch_data(k):
            total += (1 + a1) * (1 + a2)
        return total + 8

    def twisted(self, k: int, g: Deck) -> int:
        """#{P in top(F_q-bar) : Frob(P) = g(P)}."""
        lv = self.level(k)
        t = self.t
        e1, e2, e3 = g.signs
        masks = (t.s_eta, t.s_xi, FULL_MASK)
        total = 0
        for sel in range(8):
            chosen = tuple(masks[i] for i in range(3) if sel >> i & 1)
            sign = 1
            for i, e in enumerate((e1, e2, e3)):
                if sel >> i & 1:
                    sign *= e
            total += sign * lv.generic_sum(chosen)
        for kind, a1, a2 in self.branch_data(k):
            s1 = e1 * e3 if kind in ("iii1", "iv") else e1
            s2 = e2 * e3 if kind in ("iii2", "iv") else e2
            total += (1 + s1 * a1) * (1 + s2 * a2)
        total += (1 + e1) * (1 + e2) * (1 + e3)
        return total

    def quotient(self, subgroup: frozenset, k: int) -> int:
        s = sum(self.twisted(k, g) for g in subgroup)
        n = len(subgroup)
        if s % n:
            raise ConsistencyError(f"Burnside sum {s} is not divisible by |K| = {n}")
        return s // n

    def predicted(self, subgroup: frozenset, k: int) -> int:
        q1 = self.level(k).q + 1
        return q1 - sum(q1 - self.quadratic(self.t.subset(chi), k) for chi in annihilator(subgroup))


@lru_cache(maxsize=64)
def _engine(b: BranchAssignment, t: SubsetTriple) -> CountEngine:
    return CountEngine(b, t)


def count_quadratic(subset, b: BranchAssignment, q: int) -> CurveCount:
    mask = subset if isinstance(subset, int) else _mask(subset)
    k = _exponent(b.p, q)
    g = genus_quadratic(mask)
    n = count_double_cover(b.roots(mask), b.p, k)
    return CurveCount("Y" + "".join(str(i + 1) for i in range(8) if mask >> i & 1), q, n, ROUTE_QUADRATIC, g)


def count_top(b: BranchAssignment, t: SubsetTriple, q: int) -> CurveCount:
    k = _exponent(b.p, q)
    return CurveCount("C~", q, _engine(b, t).top(k), ROUTE_TOP, 9)


def count_quotient_direct(subgroup, b: BranchAssignment, t: SubsetTriple, q: int) -> CurveCount:
    subgroup = frozenset(subgroup)
    if subgroup not in all_subgroups():
        raise ParameterError("not a subgroup of the deck group")
    k = _exponent(b.p, q)
    g = quotient_genus(subgroup, t)
    return CurveCount(_subgroup_label(subgroup), q, _engine(b, t).quotient(subgroup, k), ROUTE_BURNSIDE, g)


def count_predicted(subgroup, b: BranchAssignment, t: SubsetTriple, q: int) -> CurveCount:
    subgroup = frozenset(subgroup)
    k = _exponent(b.p, q)
    g = quotient_genus(subgroup, t)
    return CurveCount(_subgroup_label(subgroup), q, _engine(b, t).predicted(subgroup, k), ROUTE_PREDICTED, g)


def _subgroup_label(subgroup: frozenset) -> str:
    return "<" + ",".join(str(g) for g in sorted(subgroup) if g != IDENTITY) + ">"


# -- L-polynomials

@dataclass(frozen=True)
class LPolynomial:
    p: int
    coeffs: tuple  # constant term first

    @property
    def genus(self) -> int:
        return (len(self.coeffs) - 1) // 2

    def __mul__(self, other: LPolynomial) -> LPolynomial:
        if self.p != other.p:
            raise ParameterError("L-polynomials over different fields")
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return LPolynomial(self.p, tuple(out))

    def functional_equation_ok(self) -> bool:
        g, c = self.genus, self.coeffs
        return len(c) == 2 * g + 1 and all(c[2 * g - i] == self.p ** (g - i) * c[i] for i in range(g + 1))

    def weil_ok(self) -> bool:
        """Coefficient bounds |c_i| <= C(2g, i) p^(i/2) and L(1) > 0."""
        g = self.genus
        bounds = all(c * c <= comb(2 * g, i) ** 2 * self.p ** i for i, c in enumerate(self.coeffs))
        return bounds and sum(self.coeffs) > 0

    def power_sums(self, n: int) -> list:
        """s_1..s_n of the inverse roots, by Newton's identities."""
        c = list(self.coeffs) + [0] * max(0, n + 1 - len(self.coeffs))
        s = []
        for k in range(1, n + 1):
            s.append(-k * c[k] - sum(s[i - 1] * c[k - i] for i in range(1, k)))
        return s

    def count(self, k: int) -> int:
        """Predicted #C(F_{p^k})."""
        return self.p ** k + 1 - self.power_sums(k)[-1]

    def __str__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if i == 0 else "T" if i == 1 else f"T^{i}"
            coef = "" if mono and c == 1 else "-" if mono and c == -1 else str(c)
            terms.append(coef + mono)
        return " + ".join(terms).replace("+ -", "- ") or "0"


def l_from_counts(p: int, counts: Sequence[int]) -> LPolynomial:
    """Weil polynomial of a genus-g curve from N_1..N_g (g = len(counts))."""
    g = len(counts)
    s = [p ** k + 1 - n for k, n in enumerate(counts, start=1)]
    c = [1]
    for k in range(1, g + 1):
        acc = -sum(s[i - 1] * c[k - i] for i in range(1, k + 1))
        if acc % k:
            raise CountInconsistencyError(f"coefficient c_{k} = {acc}/{k} is not an integer")
        c.append(acc // k)
    for i in range(g - 1, -1, -1):
        c.append(p ** (g - i) * c[i])
    lp = LPolynomial(p, tuple(c))
    if not lp.weil_ok():
        raise CountInconsistencyError(f"{lp} violates the Weil bounds")
    return lp


def l_polynomial(node: CurveNode, b: BranchAssignment, t: SubsetTriple) -> LPolynomial:
    if node.genus == 0:
        return LPolynomial(b.p, (1,))
    if node.genus > MAX_EXPONENT:
        raise ParameterError(f"{node.name} has genus {node.genus} > {MAX_EXPONENT}")
    eng = _engine(b, t)
    if node.deg_over_line == 2:
        counts = [eng.quadratic(node.defining_subset, k) for k in range(1, node.genus + 1)]
    else:
        counts = [eng.quotient(node.deck_subgroup, k) for k in range(1, node.genus + 1)]
    return l_from_counts(b.p, counts)


# -- the verification report

@dataclass(frozen=True)
class Check:
    name: str
    expected: object
    actual: object
    passed: bool


@dataclass
class VerificationReport:
    case: str
    klein: str
    p: int
    points: tuple
    depth: int
    checks: tuple
    counts: tuple
    l_polynomials: dict
    elapsed: float = field(default=0.0, compare=False)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]


class _Recorder:
    """Memoises counts per (route, node, k), applies test perturbations, and
    keeps a record of every count taken."""

    def __init__(self, p: int, perturb: dict | None):
        self.p = p
        self.perturb = dict(perturb or {})
        self.memo: dict = {}

    def __call__(self, route: str, node: CurveNode, k: int, compute) -> int:
        key = (route, node.name, k)
        if key not in self.memo:
            self.memo[key] = (compute() + self.perturb.get(key, 0), node.genus)
        return self.memo[key][0]

    def records(self) -> tuple:
        out = [CurveCount(name, self.p ** k, n, route, g) for (route, name, k), (n, g) in self.memo.items()]
        return tuple(sorted(out, key=lambda c: (c.route, c.node, c.q)))


def verify_config(
    k: KleinSubgroup,
    b: BranchAssignment,
    depth: int = 3,
    perturb: dict | None = None,
    tower: TowerDiagram | None = None,
) -> VerificationReport:
    """Run every arithmetic check for one Klein subgroup and branch assignment.

    `perturb` maps (route, node name, k) to an integer added to that count;
    it exists for negative-control tests.
    """
    start = time.perf_counter()
    if not 1 <= depth <= 3:
        raise ParameterError(f"depth {depth} outside 1..3")
    tower = tower or build_tower(k)
    t = tower.triple
    if t != lift_generators(k):
        raise ConsistencyError("tower was built for a different subgroup")
    eng = CountEngine(b, t)
    rec = _Recorder(b.p, perturb)
    p = b.p
    checks: list = []

    def add(name, expected, actual):
        checks.append(Check(name, expected, actual, expected == actual))

    def quad(node, e):
        return rec(ROUTE_QUADRATIC, node, e, lambda: eng.quadratic(node.defining_subset, e))

    def direct(node, e):
        if node.order == 1:
            return rec(ROUTE_TOP, node, e, lambda: eng.top(e))
        if node.deg_over_line == 2:
            return quad(node, e)
        return rec(ROUTE_BURNSIDE, node, e, lambda: eng.quotient(node.deck_subgroup, e))

    def burnside(node, e):
        return rec(ROUTE_BURNSIDE, node, e, lambda: eng.quotient(node.deck_subgroup, e))

    def predicted(node, e):
        return rec(ROUTE_PREDICTED, node, e, lambda: eng.predicted(node.deck_subgroup, e))

    quads = tower.quadratic_nodes()
    top = tower.top
    h = tower.h_node
    etale = [n for n in tower.level(2) if n.alias in ("C_η", "C_ξ", "C_η+ξ")]

    for e in range(1, depth + 1):
        q = p ** e
        tag = f"q=p^{e}"
        add(f"top-identity/{tag}", sum(quad(n, e) for n in quads) - 6 * (q + 1), direct(top, e))
        rhs = sum(burnside(n, e) for n in etale) - 2 * burnside(h, e)
        add(f"trace/{tag}", rhs, direct(top, e))

    proper = [n for n in tower.nodes if 1 < n.order < 8]
    for e in range(1, min(2, depth) + 1):
        for n in proper:
            add(f"two-route/{n.name}/q=p^{e}", predicted(n, e), burnside(n, e))

    prym = prym_decomposition(k, tower)
    lpolys: dict = {}
    quad_l: dict = {}

    def l_of(node, counter, extra: bool):
        """L from counts N_1..N_g; also checks N_{g+1} when that count is affordable."""
        g = node.genus
        counts = [counter(node, e) for e in range(1, g + 1)]
        try:
            lp = l_from_counts(p, counts)
        except CountInconsistencyError as exc:
            add(f"l-valid/{node.name}", "Weil polynomial", str(exc))
            return None
        add(f"l-valid/{node.name}", "Weil polynomial", "Weil polynomial")
        add(f"functional-equation/{node.name}", True, lp.functional_equation_ok())
        if extra:
            add(f"l-extension/{node.name}/q=p^{g + 1}", lp.count(g + 1), counter(node, g + 1))
        return lp

    kmax = max([depth] + [n.genus for n in tower.level(2) if n.genus <= MAX_EXPONENT])
    for n in quads:
        if n.genus == 0:
            quad_l[n.name] = LPolynomial(p, (1,))
            continue
        lp = l_of(n, quad, n.genus + 1 <= kmax)
        if lp is not None:
            quad_l[n.name] = lpolys[n.name] = lp
            add(f"genus/{n.name}", n.genus, lp.genus)

    for n in tower.level(2):
        if n.genus > MAX_EXPONENT:
            continue
        if n.genus == 0:
            lp = LPolynomial(p, (1,))
        else:
            lp = l_of(n, burnside, n.genus + 1 <= kmax)
            if lp is None:
                continue
        lpolys[n.name] = lp
        factors = prym.isogeny_predictions[n.name]
        if all(f in quad_l for f in factors):
            expected = LPolynomial(p, (1,))
            for f in factors:
                expected = expected * quad_l[f]
            add(f"l-product/{n.name}", list(expected.coeffs), list(lp.coeffs))
            add(f"genus/{n.name}", n.genus, expected.genus)

    for c in rec.records():
        add(f"weil/{c.route}/{c.node}/q=p^{_exponent(p, c.q)}", True, c.weil_ok)

    checks.sort(key=lambda c: c.name)
    names = [c.name for c in checks]
    if len(set(names)) != len(names):
        raise ConsistencyError("duplicate check names")
    return VerificationReport(
        case=tower.case.value,
        klein=str(k),
        p=p,
        points=b.points,
        depth=depth,
        checks=tuple(checks),
        counts=rec.records(),
        l_polynomials=dict(sorted(lpolys.items())),
        elapsed=time.perf_counter() - start,
    )
