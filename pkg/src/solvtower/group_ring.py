"""Sparse arithmetic in the group ring Z_n[G] of an enumerated group G."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .groups import AbelianGroup, EnumeratedGroup
from .residue import ResidueMatrix, ResidueScalar, solve_mod_n


class ContextMismatch(ValueError):
    """Ring elements from different (modulus, group) contexts were combined."""


@dataclass(frozen=True, eq=False)
class RingContext:
    modulus: int
    group: EnumeratedGroup

    def __post_init__(self):
        if self.modulus < 2:
            raise ValueError(f"modulus must be at least 2, got {self.modulus}")

    def __eq__(self, other):
        return (isinstance(other, RingContext) and self.modulus == other.modulus
                and self.group is other.group)

    def __hash__(self):
        return hash((self.modulus, id(self.group)))

    def zero(self) -> "RingElement":
        return RingElement(self, {})

    def one(self) -> "RingElement":
        return RingElement(self, {self.group.identity: 1})

    def monomial(self, g: int, coeff: int = 1) -> "RingElement":
        return RingElement(self, {int(g): coeff})

    def gen(self, i: int) -> "RingElement":
        """The monomial of generator i (0-based)."""
        return self.monomial(self.group.generators[i])

    def scalar(self, c: int) -> "RingElement":
        return RingElement(self, {self.group.identity: c})

    def from_dense(self, coeffs) -> "RingElement":
        return RingElement(self, {g: int(c) for g, c in enumerate(coeffs) if int(c) % self.modulus})


class RingElement:
    """Element of Z_n[G] stored as ``{element id: coefficient}`` with no zero coefficients."""

    __slots__ = ("ctx", "terms", "_hash")

    def __init__(self, ctx: RingContext, terms: Mapping[int, int]):
        n = ctx.modulus
        self.ctx = ctx
        self.terms = {int(g): c % n for g, c in terms.items() if c % n}
        self._hash = None

    @property
    def modulus(self) -> int:
        return self.ctx.modulus

    @property
    def group(self) -> EnumeratedGroup:
        return self.ctx.group

    def _check(self, other: "RingElement"):
        if not isinstance(other, RingElement):
            raise TypeError(f"expected RingElement, got {type(other).__name__}")
        if other.ctx != self.ctx:
            raise ContextMismatch("ring elements live in different group rings")

    def _lift(self, other) -> "RingElement":
        if isinstance(other, int):
            return self.ctx.scalar(other)
        if isinstance(other, ResidueScalar):
            if other.modulus != self.modulus:
                raise ContextMismatch(f"scalar mod {other.modulus} in Z_{self.modulus}[G]")
            return self.ctx.scalar(other.value)
        self._check(other)
        return other

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ctx.scalar(other)
        if not isinstance(other, RingElement):
            return NotImplemented
        return self.ctx == other.ctx and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ctx, tuple(sorted(self.terms.items()))))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for g, c in other.terms.items():
            out[g] = out.get(g, 0) + c
        return RingElement(self.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        return RingElement(self.ctx, {g: -c for g, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, ResidueScalar)):
            c = int(other)
            return RingElement(self.ctx, {g: c * v for g, v in self.terms.items()})
        self._check(other)
        return _convolve(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, ResidueScalar)):
            return self * other
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            inv = try_inverse(self)
            if inv is None:
                raise ValueError("element is not a unit")
            return inv ** (-k)
        acc, base = self.ctx.one(), self
        while k:
            if k & 1:
                acc = acc * base
            base = base * base
            k >>= 1
        return acc

    def left_translate(self, g: int) -> "RingElement":
        """g * self for a group element g."""
        mul = self.group.fast_multiply()
        return RingElement(self.ctx, {mul(g, h): c for h, c in self.terms.items()})

    def right_translate(self, g: int) -> "RingElement":
        """self * g for a group element g."""
        mul = self.group.fast_multiply()
        return RingElement(self.ctx, {mul(h, g): c for h, c in self.terms.items()})

    def dense(self) -> np.ndarray:
        out = np.zeros(self.group.order, dtype=np.int64)
        for g, c in self.terms.items():
            out[g] = c
        return out

    def coefficient(self, g: int) -> int:
        return self.terms.get(int(g), 0)

    def __repr__(self):
        return f"RingElement({render(self)!r}, n={self.modulus})"

    def __str__(self):
        return render(self)


def _convolve(a: RingElement, b: RingElement) -> RingElement:
    n = a.modulus
    group = a.group
    if len(a.terms) * len(b.terms) > 64 and group.order <= 4096:
        ga = np.fromiter(a.terms.keys(), dtype=np.int64, count=len(a.terms))
        ca = np.fromiter(a.terms.values(), dtype=np.int64, count=len(a.terms))
        gb = np.fromiter(b.terms.keys(), dtype=np.int64, count=len(b.terms))
        cb = np.fromiter(b.terms.values(), dtype=np.int64, count=len(b.terms))
        prod = group.table[ga[:, None], gb[None, :]].ravel()
        vals = (ca[:, None] * cb[None, :]).ravel() % n
        dense = np.bincount(prod, weights=vals, minlength=group.order).astype(np.int64) % n
        nz = np.flatnonzero(dense)
        return RingElement(a.ctx, dict(zip(nz.tolist(), dense[nz].tolist())))
    mul = group.fast_multiply()
    out: dict[int, int] = {}
    for g, c in a.terms.items():
        for h, d in b.terms.items():
            k = mul(g, h)
            out[k] = out.get(k, 0) + c * d
    return RingElement(a.ctx, out)


def render(a: RingElement) -> str:
    """Signed integer combination of monomials.

    For (Z_n)^m the monomials read ``x^i y^j`` (largest exponent tuple first,
    constant last); other groups use ``g#id``.  Coefficients are printed as
    representatives in (-n/2, n/2], except that a tied constant term
    (2c = n) next to other terms prints as ``-c``, so 1 - x reads the same
    for every n.
    """
    if not a.terms:
        return "0"
    group = a.group
    n = a.modulus
    if isinstance(group, AbelianGroup):
        items = sorted(a.terms.items(), key=lambda kv: group.vector(kv[0]), reverse=True)
        name = group.monomial_name
    else:
        items = sorted(a.terms.items())
        name = lambda g: f"g#{g}"  # noqa: E731
    out = []
    for g, c in items:
        mono = name(g)
        tied = 2 * c == n and mono == "1" and len(items) > 1
        c = c - n if 2 * c > n or tied else c
        if mono == "1":
            body = str(abs(c))
        elif abs(c) == 1:
            body = mono
        else:
            body = f"{abs(c)}{mono}"
        sign = "-" if c < 0 else "+"
        out.append((sign, body))
    first_sign, first = out[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, body in out[1:]:
        text += sign + body
    return text


def augmentation(a: RingElement) -> ResidueScalar:
    """Sum of all coefficients, as an element of Z_n."""
    return ResidueScalar(sum(a.terms.values()), a.modulus)


def as_trivial_unit(a: RingElement) -> Optional[tuple[int, int]]:
    """``(sign, g)`` when a = sign * g for a group element g, else None.

    A coefficient equal to both +1 and -1 (n = 2) reports sign +1.
    """
    if len(a.terms) != 1:
        return None
    ((g, c),) = a.terms.items()
    if c == 1:
        return 1, g
    if c == a.modulus - 1:
        return -1, g
    return None


def regular_matrix(b: RingElement) -> list[list[int]]:
    """Integer matrix M of x -> b*x on the basis of group elements: M[b_g*h, h] += b_g."""
    group = b.group
    N = group.order
    M = [[0] * N for _ in range(N)]
    mul = group.fast_multiply()
    for h in range(N):
        for g, c in b.terms.items():
            M[mul(g, h)][h] += c
    return M


def solve_left_system(coeffs: Sequence[RingElement], rhs: Sequence[RingElement]) -> Optional[RingElement]:
    """Some x with ``coeffs[k] * x == rhs[k]`` for every k, or None.

    One joint linear solve over Z_n on the stacked regular representations;
    the returned x is verified by substitution.
    """
    if len(coeffs) != len(rhs) or not coeffs:
        raise ValueError("need matching, non-empty coefficient and right-hand side lists")
    ctx = coeffs[0].ctx
    for e in list(coeffs) + list(rhs):
        if e.ctx != ctx:
            raise ContextMismatch("ring elements live in different group rings")
    rows: list[list[int]] = []
    b: list[int] = []
    for c, r in zip(coeffs, rhs):
        rows.extend(regular_matrix(c))
        b.extend(r.dense().tolist())
    sol = solve_mod_n(ResidueMatrix(rows, ctx.modulus, cols=ctx.group.order), b)
    if sol is None:
        return None
    x = ctx.from_dense(sol)
    for c, r in zip(coeffs, rhs):
        if c * x != r:
            raise AssertionError("linear solve returned a non-solution")
    return x


def try_divide(a: RingElement, b: RingElement) -> Optional[RingElement]:
    """Some x with ``b * x == a``, or None when no such x exists."""
    b._check(a)
    if not a:
        return a.ctx.zero()
    return solve_left_system([b], [a])


def try_inverse(a: RingElement) -> Optional[RingElement]:
    """Two-sided inverse of ``a`` or None."""
    one = a.ctx.one()
    if len(a.terms) == 1:
        ((g, c),) = a.terms.items()
        s = ResidueScalar(c, a.modulus)
        if not s.is_unit():
            return None
        u = a.ctx.monomial(a.group.invert(g), pow(c, -1, a.modulus))
    else:
        u = try_divide(one, a)
        if u is None:
            return None
    if a * u != one or u * a != one:
        raise AssertionError("inverse failed the substitution check")
    return u


def geometric_sum(ctx: RingContext, g: int, k: int) -> RingElement:
    """1 + g + ... + g^(k-1)."""
    if k < 0:
        raise ValueError("k must be non-negative")
    group = ctx.group
    out: dict[int, int] = {}
    cur = group.identity
    # g has finite order, so only one period needs walking
    period = []
    while True:
        period.append(cur)
        cur = group.multiply(cur, g)
        if cur == group.identity or len(period) >= k:
            break
    full, rest = divmod(k, len(period))
    for j, h in enumerate(period):
        out[h] = out.get(h, 0) + full + (1 if j < rest else 0)
    return RingElement(ctx, out)


def induced_ring_map(a: RingElement, target: RingContext, mapping) -> RingElement:
    """Image of ``a`` under Z_n[G] -> Z_n'[H] induced by a group map ``mapping`` (id -> id).

    Requires n' | n.
    """
    if a.modulus % target.modulus:
        raise ValueError(f"target modulus {target.modulus} does not divide {a.modulus}")
    out: dict[int, int] = {}
    for g, c in a.terms.items():
        h = int(mapping[g])
        out[h] = out.get(h, 0) + c
    return RingElement(target, out)


def random_element(ctx: RingContext, rng: np.random.Generator, density: float = 0.5,
                   max_terms: Optional[int] = None) -> RingElement:
    N = ctx.group.order
    k = rng.binomial(N, density) if max_terms is None else int(rng.integers(0, max_terms + 1))
    support = rng.choice(N, size=min(k, N), replace=False)
    coeffs = rng.integers(1, ctx.modulus, size=support.size)
    return RingElement(ctx, dict(zip(support.tolist(), coeffs.tolist())))

