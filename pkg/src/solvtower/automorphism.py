"""Endomorphisms of enumerated levels, IA/inner tests and the Aut'/GL'_2 comparison.

Most operations here assume the two-generator metabelian levels (2, 2, n),
whose elements are Magnus matrices (x^i y^j, a_1 t_x + a_2 t_y) over
Z_n[(Z_n)^2].
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .group_ring import RingElement, as_trivial_unit, render, try_inverse
from .groups import InvariantViolation
from .magnus import MagnusElement, MagnusGroup, image_membership
from .tower import TowerLevel, commutator_membership

DEFAULT_BUDGET = 2**22


@dataclass(eq=False)
class Endo:
    """Endomorphism of a level given by the images of its generators."""

    level: TowerLevel
    images: tuple[int, ...]
    _map: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        self.images = tuple(int(g) for g in self.images)
        if len(self.images) != self.level.m:
            raise ValueError(f"need {self.level.m} generator images, got {len(self.images)}")

    @property
    def key(self) -> tuple[int, ...]:
        return self.images

    def __eq__(self, other):
        return isinstance(other, Endo) and other.level is self.level and other.images == self.images

    def __hash__(self):
        return hash(self.images)

    def apply(self, g: int) -> int:
        if self._map is not None:
            return int(self._map[g])
        group = self.level.group
        return group.evaluate(group.word(int(g)), self.images)

    def materialize(self, check: bool = True) -> np.ndarray:
        """The full id -> id map, checked against the Cayley graph on first use."""
        if self._map is None:
            group = self.level.group
            mp = group.homomorphism_images(group, self.images)
            if check and not group.is_homomorphism(group, mp, self.images):
                raise InvariantViolation("generator images do not define a homomorphism")
            self._map = mp
        return self._map

    def __repr__(self):
        return f"Endo(images={self.images})"


def endo_from_images(level: TowerLevel, images: Sequence[int]) -> Endo:
    return Endo(level, tuple(images))


def identity_endo(level: TowerLevel) -> Endo:
    return Endo(level, level.group.generators)


def compose(e1: Endo, e2: Endo) -> Endo:
    """e1 after e2."""
    if e1.level is not e2.level:
        raise ValueError("endomorphisms of different levels")
    return Endo(e1.level, tuple(e1.apply(g) for g in e2.images))


def inner(level: TowerLevel, w: int) -> Endo:
    """Conjugation v -> w v w^-1."""
    g = level.group
    wi = g.invert(w)
    return Endo(level, tuple(g.multiply(g.multiply(w, x), wi) for x in g.generators))


def _require_rank2(level: TowerLevel):
    if level.m != 2:
        raise ValueError("defined for two generators only")


def alpha_lift(level: TowerLevel) -> Endo:
    """x -> xy, y -> y."""
    _require_rank2(level)
    g = level.group
    x, y = g.generators
    return Endo(level, (g.multiply(x, y), y))


def beta_lift(level: TowerLevel) -> Endo:
    """x -> x^-1, y -> y."""
    _require_rank2(level)
    g = level.group
    x, y = g.generators
    return Endo(level, (g.invert(x), y))


def gamma_lift(level: TowerLevel) -> Endo:
    """x -> y, y -> x."""
    _require_rank2(level)
    x, y = level.group.generators
    return Endo(level, (y, x))


def sigma_example(level: TowerLevel) -> Endo:
    """x -> y x y^-1, y -> x y x^-1."""
    if (level.m, level.r) != (2, 2):
        raise ValueError("the sigma example lives on level (2, 2, n)")
    g = level.group
    x, y = g.generators
    return Endo(level, (g.multiply(g.multiply(y, x), g.invert(y)),
                        g.multiply(g.multiply(x, y), g.invert(x))))


def is_automorphism(endo: Endo) -> bool:
    """Onto (hence bijective, the group being finite)."""
    group = endo.level.group
    return group.subgroup_closure(endo.images).size == group.order


def abelianized_matrix(endo: Endo) -> tuple[tuple[int, ...], ...]:
    """Rows are the images of the generators in (Z_{n^r})^m."""
    vecs = endo.level.ab_vectors
    return tuple(tuple(int(v) for v in vecs[g]) for g in endo.images)


def is_IA(endo: Endo) -> bool:
    m = endo.level.m
    ident = tuple(tuple(int(i == j) for j in range(m)) for i in range(m))
    return abelianized_matrix(endo) == ident


def determinant(endo: Endo) -> RingElement:
    """a_1 b_2 - a_2 b_1 for images (x^i y^j, a_1 t_x + a_2 t_y) and (x^k y^l, b_1 t_x + b_2 t_y)."""
    level = endo.level
    if (level.m, level.r) != (2, 2):
        raise ValueError("the determinant is defined on level (2, 2, n)")
    A = level.element(endo.images[0])
    B = level.element(endo.images[1])
    a1, a2 = A.module_part
    b1, b2 = B.module_part
    return a1 * b2 - a2 * b1


def conjugation_images(level: TowerLevel) -> np.ndarray:
    """Row w holds the images of the generators under conjugation by w."""
    g = level.group
    ids = np.arange(g.order)
    inv = g.inverses
    return np.stack([g.multiply_many(g.multiply_many(ids, x), inv) for x in g.generators], axis=1)


def is_inner_bruteforce(endo: Endo) -> Optional[int]:
    """Smallest w whose conjugation agrees with ``endo`` on the generators, or None."""
    level = endo.level
    if "conj" not in level._cache:
        level._cache["conj"] = conjugation_images(level)
    conj = level._cache["conj"]
    hit = np.flatnonzero(np.all(conj == np.array(endo.images), axis=1))
    return int(hit[0]) if hit.size else None


def ia_inner_test_constructive(endo: Endo) -> Optional[MagnusElement]:
    """Decide whether an IA endomorphism of level (2, 2, n) is inner, with a witness.

    Writes sigma(x*) = x* c_x and sigma(y*) = y* c_y with c_x, c_y in the
    commutator subgroup, reads off the determinant 1 + (1-y)p - (1-x)q and,
    when it is a monomial x^i y^j, returns (x^i y^j, q t_x - p t_y).
    """
    level = endo.level
    if (level.m, level.r) != (2, 2):
        raise ValueError("constructive inner test is defined on level (2, 2, n)")
    group: MagnusGroup = level.group
    ctx = group.ctx
    gx, gy = group.generators
    cx = group.multiply(group.invert(gx), endo.images[0])
    cy = group.multiply(group.invert(gy), endo.images[1])
    p1 = commutator_membership(level, cx)
    q1 = commutator_membership(level, cy)
    if p1 is None or q1 is None:
        raise InvariantViolation("endomorphism is not IA: x^-1 sigma(x) or y^-1 sigma(y) is not a commutator")
    one, x, y = ctx.one(), ctx.gen(0), ctx.gen(1)
    # x*(1, (1-y)p' t_x - (1-x)p' t_y) = (x, [1 + (1-y) x p'] t_x - (1-x) x p' t_y), so p = x p'
    p = x * p1
    q = y * q1
    d = one + (one - y) * p - (one - x) * q
    if d != determinant(endo):
        raise InvariantViolation("determinant from p, q disagrees with the direct determinant")
    unit = as_trivial_unit(d)
    if unit is None or unit[0] != 1:
        return None
    witness = MagnusElement(ctx, unit[1], [q, -p])
    if not image_membership(witness):
        raise InvariantViolation("constructed witness fails the membership criterion")
    w = group.id_of(witness)
    if w is None:
        raise InvariantViolation("constructed witness is not in the enumerated group")
    if inner(level, w).images != endo.images:
        raise InvariantViolation("conjugation by the witness does not reproduce the endomorphism")
    return witness


@dataclass(frozen=True)
class GLMatrix:
    """2x2 matrix (a b; c d) over Z_modulus."""

    a: int
    b: int
    c: int
    d: int
    modulus: int

    def __post_init__(self):
        q = self.modulus
        for name in "abcd":
            object.__setattr__(self, name, getattr(self, name) % q)

    @classmethod
    def from_rows(cls, rows, modulus: int) -> "GLMatrix":
        (a, b), (c, d) = rows
        return cls(a, b, c, d, modulus)

    def __matmul__(self, o: "GLMatrix") -> "GLMatrix":
        return GLMatrix(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                        self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d, self.modulus)

    def det(self) -> int:
        return (self.a * self.d - self.b * self.c) % self.modulus

    def rows(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return (self.a, self.b), (self.c, self.d)


def glprime(modulus: int) -> set[GLMatrix]:
    """Image of GL_2(Z) in GL_2(Z_modulus), as the closure of the three generator matrices."""
    if modulus < 2:
        raise ValueError("modulus must be at least 2")
    gens = [GLMatrix(1, 1, 0, 1, modulus), GLMatrix(-1, 0, 0, 1, modulus), GLMatrix(0, 1, 1, 0, modulus)]
    ident = GLMatrix(1, 0, 0, 1, modulus)
    seen = {ident}
    queue = deque([ident])
    while queue:
        g = queue.popleft()
        for s in gens:
            h = g @ s
            if h not in seen:
                seen.add(h)
                queue.append(h)
    return seen


@dataclass
class AutRecord:
    endo: Endo
    is_auto: bool
    abelianized: GLMatrix
    det_ring: Optional[RingElement]
    is_IA: bool
    is_inner: bool
    inner_witness: Optional[int]


@dataclass
class AutClosure:
    level: TowerLevel
    records: list[AutRecord]
    truncated: bool
    inner_keys: set

    @property
    def order(self) -> int:
        return len(self.records)

    def keys(self) -> set:
        return {rec.endo.key for rec in self.records}


def _record(endo: Endo, inner_keys: dict, with_det: bool) -> AutRecord:
    level = endo.level
    ab = GLMatrix.from_rows(abelianized_matrix(endo), level.exponent_modulus)
    ia = ab == GLMatrix(1, 0, 0, 1, level.exponent_modulus)
    w = inner_keys.get(endo.key)
    return AutRecord(
        endo=endo,
        is_auto=is_automorphism(endo),
        abelianized=ab,
        det_ring=determinant(endo) if with_det else None,
        is_IA=ia,
        is_inner=w is not None,
        inner_witness=w,
    )


def generate_aut_prime(level: TowerLevel, budget: int = DEFAULT_BUDGET, flags: bool = True) -> AutClosure:
    """Closure under composition of the alpha, beta, gamma lifts and all inner automorphisms.

    Records are discovered breadth-first and keyed by their pair of generator
    images.  Stops with ``truncated=True`` after ``budget`` records.
    """
    _require_rank2(level)
    group = level.group
    conj = conjugation_images(level)
    level._cache["conj"] = conj
    inner_keys: dict = {}
    for w in range(group.order):
        inner_keys.setdefault(tuple(int(v) for v in conj[w]), w)
    x, y = group.generators
    gens = [alpha_lift(level), beta_lift(level), gamma_lift(level), inner(level, x), inner(level, y)]
    maps = [e.materialize() for e in gens]
    start = identity_endo(level).key
    seen = {start}
    order = [start]
    queue = deque([start])
    truncated = False
    while queue and not truncated:
        a = queue.popleft()
        for mp in maps:
            b = (int(mp[a[0]]), int(mp[a[1]]))
            if b not in seen:
                if len(seen) >= budget:
                    truncated = True
                    break
                seen.add(b)
                order.append(b)
                queue.append(b)
    with_det = level.r == 2
    if flags:
        records = [_record(Endo(level, k), inner_keys, with_det) for k in order]
    else:
        records = [AutRecord(Endo(level, k), True, None, None, False, False, None) for k in order]
    return AutClosure(level, records, truncated, set(inner_keys))


def out_kernel_comparison(closure: AutClosure) -> dict:
    """Check that Aut' -> GL'_2(Z_{n^r}) is onto with kernel exactly Inn.

    Equivalently IA' = Inn; then |Out'| = |Aut'|/|Inn| equals |GL'_2(Z_{n^r})|.
    """
    level = closure.level
    q = level.exponent_modulus
    gl = glprime(q)
    report = {
        "level": [level.m, level.r, level.n],
        "aut_prime_order": closure.order,
        "inn_order": len(closure.inner_keys),
        "glprime_order": len(gl),
        "truncated": closure.truncated,
    }
    if closure.truncated:
        report.update(conclusive=False, ia_prime_equals_inn=None, out_prime_order=None)
        return report
    keys = closure.keys()
    images = {rec.abelianized for rec in closure.records}
    kernel = {rec.endo.key for rec in closure.records if rec.is_IA}
    inn_in = closure.inner_keys <= keys
    report.update(
        conclusive=True,
        inn_contained=inn_in,
        surjective=images == gl,
        ia_prime_equals_inn=kernel == closure.inner_keys,
        out_prime_order=closure.order // len(closure.inner_keys) if closure.order % len(closure.inner_keys) == 0 else None,
    )
    report["out_prime_equals_glprime"] = report["out_prime_order"] == len(gl)
    return report


def sigma_report(level: TowerLevel, brute_force_limit: int = 2**20) -> dict:
    """The sigma example at this level: onto, IA, inner (by both tests when affordable), determinant."""
    s = sigma_example(level)
    det = determinant(s)
    ctx = level.group.ctx
    ia = is_IA(s)
    out = {
        "level": [level.m, level.r, level.n],
        "is_auto": is_automorphism(s),
        "is_ia": ia,
        "det": render(det),
        "det_is_x_plus_y_minus_1": det == ctx.gen(0) + ctx.gen(1) - 1,
        "det_invertible": try_inverse(det) is not None,
    }
    constructive = ia_inner_test_constructive(s) if ia else None
    out["is_inner_constructive"] = constructive is not None if ia else False
    if level.order <= brute_force_limit:
        out["is_inner_bruteforce"] = is_inner_bruteforce(s) is not None
    out["is_inner"] = out["is_inner_constructive"]
    return out
