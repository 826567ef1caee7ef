"""Exact arithmetic in F_p and F_{p^k} (k <= 4), univariate polynomials, and
the quadratic character.

An element of F_{p^k} is a tuple of k residues (power-basis coordinates,
low degree first). Its integer index sum(c_i * p^i) is the encoding used by
the vectorised tables, so index i < p is the prime-field element i.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .errors import ParameterError

MAX_PRIME = 1 << 15
MAX_DEGREE = 4


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


# -- polynomials over F_p as int lists, low degree first (modulus search only)

def _trim(a: list) -> list:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmul(a: Sequence[int], b: Sequence[int], p: int) -> list:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _pmod(a: Sequence[int], m: Sequence[int], p: int) -> list:
    a = list(a)
    inv = pow(m[-1], p - 2, p)
    dm = len(m) - 1
    while len(_trim(a)) > dm:
        c = a[-1] * inv % p
        shift = len(a) - 1 - dm
        for i, y in enumerate(m):
            a[shift + i] = (a[shift + i] - c * y) % p
    return a


def _pgcd(a: Sequence[int], b: Sequence[int], p: int) -> list:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _ppowmod(base: Sequence[int], e: int, m: Sequence[int], p: int) -> list:
    result = [1]
    base = _pmod(base, m, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), m, p)
        base = _pmod(_pmul(base, base, p), m, p)
        e >>= 1
    return result


def is_irreducible(f: Sequence[int], p: int) -> bool:
    """Monic f over F_p is irreducible iff gcd(f, x^(p^i) - x) = 1 for i <= deg f / 2."""
    k = len(f) - 1
    if k <= 0:
        return False
    x = [0, 1]
    xp = x
    for _ in range(k // 2):
        xp = _ppowmod(xp, p, f, p)
        diff = list(xp) + [0] * max(0, 2 - len(xp))
        diff[1] = (diff[1] - 1) % p
        if len(_pgcd(f, _trim(diff), p)) > 1:
            return False
    return True


# -- field contexts

@dataclass(frozen=True)
class FieldCtx:
    p: int
    k: int
    modulus: tuple  # monic, low degree first, length k + 1

    @property
    def q(self) -> int:
        return self.p ** self.k

    def __call__(self, value) -> FieldEl:
        return self.element(value)

    def element(self, value) -> FieldEl:
        if isinstance(value, FieldEl):
            return value
        if isinstance(value, int):
            return FieldEl(self, (value % self.p,) + (0,) * (self.k - 1))
        coeffs = tuple(int(c) % self.p for c in value)
        if len(coeffs) > self.k:
            raise ParameterError(f"{len(coeffs)} coordinates for a degree-{self.k} field")
        return FieldEl(self, coeffs + (0,) * (self.k - len(coeffs)))

    def from_index(self, n: int) -> FieldEl:
        return FieldEl(self, tuple((n // self.p ** i) % self.p for i in range(self.k)))

    @property
    def zero(self) -> FieldEl:
        return self.element(0)

    @property
    def one(self) -> FieldEl:
        return self.element(1)

    def elements(self):
        for n in range(self.q):
            yield self.from_index(n)

    def _mul(self, a: tuple, b: tuple) -> tuple:
        p, k = self.p, self.k
        prod = [0] * (2 * k - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        for d in range(2 * k - 2, k - 1, -1):
            c = prod[d] % p
            if c:
                for i in range(k + 1):
                    prod[d - k + i] -= c * self.modulus[i]
        return tuple(c % p for c in prod[:k])

    # vectorised arithmetic on arrays of coordinates, shape (n, k)

    def digits(self) -> np.ndarray:
        idx = np.arange(self.q, dtype=np.int64)
        return np.stack([(idx // self.p ** i) % self.p for i in range(self.k)], axis=1)

    def mul_arrays(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        p, k = self.p, self.k
        prod = np.zeros((a.shape[0], 2 * k - 1), dtype=np.int64)
        for i in range(k):
            for j in range(k):
                prod[:, i + j] += a[:, i] * b[:, j]
        prod %= p
        for d in range(2 * k - 2, k - 1, -1):
            c = prod[:, d].copy()
            for i in range(k + 1):
                prod[:, d - k + i] -= c * self.modulus[i]
            prod %= p
        return prod[:, :k]

    def index_array(self, a: np.ndarray) -> np.ndarray:
        weights = self.p ** np.arange(self.k, dtype=np.int64)
        return a @ weights


def make_ext(p: int, k: int) -> FieldCtx:
    if not isinstance(p, int) or p % 2 == 0 or not is_prime(p):
        raise ParameterError(f"p = {p} is not an odd prime")
    if p >= MAX_PRIME:
        raise ParameterError(f"p = {p} exceeds the supported bound {MAX_PRIME}")
    if not isinstance(k, int) or not 1 <= k <= MAX_DEGREE:
        raise ParameterError(f"extension degree {k} outside 1..{MAX_DEGREE}")
    return _make_ext(p, k)


@lru_cache(maxsize=None)
def _make_ext(p: int, k: int) -> FieldCtx:
    if k == 1:
        return FieldCtx(p, 1, (0, 1))
    for low in product(range(p), repeat=k):
        f = low + (1,)
        if low[0] and is_irreducible(f, p):
            return FieldCtx(p, k, f)
    raise AssertionError("no irreducible polynomial found")  # unreachable: one always exists


@dataclass(frozen=True)
class FieldEl:
    ctx: FieldCtx
    coeffs: tuple

    @property
    def index(self) -> int:
        p = self.ctx.p
        return sum(c * p ** i for i, c in enumerate(self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def _lift(self, other) -> FieldEl:
        if isinstance(other, FieldEl):
            if other.ctx != self.ctx:
                raise ParameterError("mixing elements of different fields")
            return other
        return self.ctx.element(other)

    def __add__(self, other):
        o = self._lift(other)
        p = self.ctx.p
        return FieldEl(self.ctx, tuple((x + y) % p for x, y in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        p = self.ctx.p
        return FieldEl(self.ctx, tuple(-x % p for x in self.coeffs))

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        return FieldEl(self.ctx, self.ctx._mul(self.coeffs, o.coeffs))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result, base = self.ctx.one, self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self) -> FieldEl:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return self ** (self.ctx.q - 2)

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ctx.element(other)
        return isinstance(other, FieldEl) and self.ctx == other.ctx and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ctx, self.coeffs))

    def __str__(self):
        if self.ctx.k == 1:
            return str(self.coeffs[0])
        terms = [f"{c}" if i == 0 else f"{c}*a^{i}" if i > 1 else f"{c}*a"
                 for i, c in enumerate(self.coeffs) if c]
        return " + ".join(reversed(terms)) or "0"

    __repr__ = __str__


def quad_char(z: FieldEl) -> int:
    """Euler's criterion: z^((q-1)/2) in {0, 1, -1}."""
    if z.is_zero():
        return 0
    r = z ** ((z.ctx.q - 1) // 2)
    if r == 1:
        return 1
    if r == -1:
        return -1
    raise AssertionError(f"{z}^((q-1)/2) = {r} is not +-1")  # unreachable in a field


@lru_cache(maxsize=None)
def chi_table(ctx: FieldCtx) -> np.ndarray:
    """Quadratic character of every element, indexed by element index (int8)."""
    d = ctx.digits()
    squares = ctx.index_array(ctx.mul_arrays(d, d))
    chi = np.full(ctx.q, -1, dtype=np.int8)
    chi[squares] = 1
    chi[0] = 0
    chi.setflags(write=False)
    return chi


# -- polynomials over a field context

@dataclass(frozen=True)
class Poly:
    ctx: FieldCtx
    coeffs: tuple  # FieldEl, low degree first, trailing zeros trimmed

    def __post_init__(self):
        cs = list(self.coeffs)
        while cs and cs[-1].is_zero():
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def of(cls, ctx: FieldCtx, coeffs: Iterable) -> Poly:
        return cls(ctx, tuple(ctx.element(c) for c in coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x) -> FieldEl:
        x = self.ctx.element(x)
        acc = self.ctx.zero
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __mul__(self, other: Poly) -> Poly:
        if not self.coeffs or not other.coeffs:
            return Poly(self.ctx, ())
        out = [self.ctx.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(self.ctx, tuple(out))

    def divide_linear(self, r) -> tuple[Poly, FieldEl]:
        """Synthetic division by (x - r): returns (quotient, remainder)."""
        r = self.ctx.element(r)
        if not self.coeffs:
            return self, self.ctx.zero
        quot = []
        acc = self.ctx.zero
        for c in reversed(self.coeffs):
            acc = acc * r + c
            quot.append(acc)
        rem = quot.pop()
        return Poly(self.ctx, tuple(reversed(quot))), rem

    def __eq__(self, other):
        return isinstance(other, Poly) and self.ctx == other.ctx and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ctx, self.coeffs))

    def __str__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            mono = "" if i == 0 else "x" if i == 1 else f"x^{i}"
            coef = str(c)
            if mono and coef == "1":
                terms.append(mono)
            elif mono:
                terms.append(f"({coef})*{mono}" if " " in coef else f"{coef}*{mono}")
            else:
                terms.append(coef)
        return " + ".join(reversed(terms)) or "0"


def poly_from_roots(ctx: FieldCtx, roots: Iterable) -> Poly:
    f = Poly(ctx, (ctx.one,))
    for r in roots:
        f = f * Poly(ctx, (-ctx.element(r), ctx.one))
    return f


def poly_eval(f: Poly, x) -> FieldEl:
    return f(x)
