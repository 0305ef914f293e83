"""The finite quotients of the free solvable groups, built level by level.

Level 0 is the trivial group, level 1 is (Z_n)^m and level r >= 2 is the
group generated by the Magnus matrices (x_i, t_i) over Z_n[level r-1].
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Optional

import numpy as np

from .group_ring import RingContext, RingElement, solve_left_system
from .groups import (DEFAULT_CAP, AbelianGroup, EnumeratedGroup, GroupWord, InvariantViolation,
                     SizeCapError, make_abelian, make_trivial)
from .magnus import MagnusElement, MagnusGroup, evaluate_word
from .residue import smith_normal_form

log = logging.getLogger(__name__)

# refuse to even write down orders whose exponent is astronomically large
_MAX_EXPONENT_BITS = 2**24


def _order_steps(m: int, r: int, n: int):
    """Yield (level, order, previous order, exponent) for levels 0..r."""
    order = 1
    yield 0, 1, None, None
    for level in range(1, r + 1):
        exponent = order * (m - 1) + 1
        if exponent.bit_length() > 64 or exponent * max(n.bit_length(), 1) > _MAX_EXPONENT_BITS:
            raise OverflowError(f"order of level ({m}, {level}, {n}) = {order}*{n}^{exponent} is too large to expand")
        prev, order = order, order * n**exponent
        yield level, order, prev, exponent


def predicted_order(m: int, r: int, n: int) -> int:
    """Order of level (m, r, n) from the recursion |G(r+1)| = |G(r)| * n^(|G(r)|(m-1)+1)."""
    if m < 1 or r < 0 or n < 1:
        raise ValueError(f"bad parameters m={m}, r={r}, n={n}")
    order = 1
    for _, order, _, _ in _order_steps(m, r, n):
        pass
    return order


def predicted_order_expr(m: int, r: int, n: int) -> str:
    """The last recursion step written out, e.g. ``128*2^129`` for (2, 3, 2)."""
    prev = exp = None
    for _, _, prev, exp in _order_steps(m, r, n):
        pass
    if prev is None:
        return "1"
    return f"{prev}*{n}^{exp}"


@dataclass(eq=False)
class TowerLevel:
    m: int
    r: int
    n: int
    group: EnumeratedGroup
    base: Optional["TowerLevel"] = None
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def order(self) -> int:
        return self.group.order

    @property
    def exponent_modulus(self) -> int:
        """n^r, the exponent of the abelianization."""
        return self.n**self.r

    @property
    def is_magnus(self) -> bool:
        return isinstance(self.group, MagnusGroup)

    def generator_elements(self) -> list:
        """Magnus matrices (r >= 2) or unit vectors (r = 1) of the generators."""
        g = self.group
        if isinstance(g, MagnusGroup):
            return [g.element(k) for k in g.generators]
        if isinstance(g, AbelianGroup):
            return [g.vector(k) for k in g.generators]
        return list(g.generators)

    def element(self, k: int) -> MagnusElement:
        if not self.is_magnus:
            raise TypeError("only Magnus levels (r >= 2) have matrix elements")
        return self.group.element(k)

    @cached_property
    def ab_vectors(self) -> np.ndarray:
        """Exponent sums mod n^r of every element's word, verified to be a homomorphism."""
        g = self.group
        q = self.exponent_modulus
        out = np.zeros((g.order, self.m), dtype=np.int64)
        steps = np.zeros((2 * self.m, self.m), dtype=np.int64)
        for i in range(self.m):
            steps[2 * i, i] = 1
            steps[2 * i + 1, i] = -1
        for layer in g.layers()[1:]:
            out[layer] = (out[g.parent[layer]] + steps[g.letter[layer]]) % q
        cay = g.cayley
        for c in range(2 * self.m):
            if not np.array_equal(out[cay[:, c]], (out + steps[c]) % q):
                raise InvariantViolation("exponent sums are not a homomorphism to (Z_{n^r})^m")
        return out

    def __repr__(self):
        return f"TowerLevel(m={self.m}, r={self.r}, n={self.n}, order={self.order})"


@lru_cache(maxsize=32)
def _build(m: int, r: int, n: int, cap: int) -> TowerLevel:
    if r == 0:
        return TowerLevel(m, 0, n, make_trivial(m))
    if r == 1:
        return TowerLevel(m, 1, n, make_abelian(m, n))
    lower = _build(m, r - 1, n, cap)
    return TowerLevel(m, r, n, MagnusGroup(lower.group, n, cap=cap), base=lower)


def build_level(m: int, r: int, n: int, cap: int = DEFAULT_CAP) -> TowerLevel:
    """Level (m, r, n) as an enumerated group.

    Refuses, before enumerating anything, when the predicted order of this
    level or any level below exceeds ``cap``.
    """
    if m < 2 or r < 0 or n < 2:
        raise ValueError(f"need m >= 2, r >= 0, n >= 2 (got m={m}, r={r}, n={n})")
    if cap < 1:
        raise ValueError("cap must be positive")
    try:
        for level, order, prev, exp in _order_steps(m, r, n):
            if order > cap:
                expr = f"{prev}*{n}^{exp}"
                raise SizeCapError(
                    f"order of level ({m}, {level}, {n}) = {expr} exceeds the cap of {cap} elements",
                    bound=order, expr=expr)
    except OverflowError as exc:
        raise SizeCapError(str(exc)) from exc
    level = _build(m, r, n, cap)
    expected = predicted_order(m, r, n)
    if level.order != expected:
        raise InvariantViolation(f"enumerated {level.order} elements, recursion predicts {expected}")
    return level


def element_order(level: TowerLevel, element: int) -> int:
    """Least k >= 1 with element^k = 1, searched over divisors of the group order."""
    g = level.group
    order = g.order
    divisors = sorted({d for i in range(1, int(order**0.5) + 1) if order % i == 0 for d in (i, order // i)})
    for d in divisors:
        if g.power(element, d) == g.identity:
            return d
    raise InvariantViolation("element order does not divide the group order")


@dataclass
class Abelianization:
    modulus: int
    vectors: np.ndarray          # id -> exponent vector mod n^r
    derived_subgroup: np.ndarray  # sorted ids
    invariant_factors: list[int]

    def image(self, g: int) -> tuple[int, ...]:
        return tuple(int(v) for v in self.vectors[g])

    def matrix_of(self, images) -> list[list[int]]:
        """Rows: abelianized images of the generators."""
        return [list(self.image(int(g))) for g in images]


def derived_subgroup(level: TowerLevel) -> np.ndarray:
    """Normal closure of the commutators of the generators."""
    key = "derived"
    if key not in level._cache:
        g = level.group
        gens = g.generators
        comms = {g.commutator(a, b) for i, a in enumerate(gens) for b in gens[i + 1:]}
        comms.discard(g.identity)
        level._cache[key] = g.normal_closure(comms) if comms else np.array([g.identity])
    return level._cache[key]


def _relation_matrix(group: EnumeratedGroup, labels: np.ndarray) -> list[list[int]]:
    """Triangular relation basis of G/H (abelian) in the images of the generators.

    Row k reads b_k e_k - sum_{i<k} a_i e_i where b_k is the least positive
    power of generator k that lies in the span of the earlier ones.
    """
    m = group.rank
    ncos = int(labels.max()) + 1
    reps = np.zeros(ncos, dtype=np.int64)
    reps[labels[::-1]] = np.arange(group.order)[::-1]
    cay = group.cayley
    step = labels[cay[reps, 0::2]]  # coset label times generator i
    for c in range(ncos):
        for i in range(m):
            for j in range(m):
                if step[step[c, i], j] != step[step[c, j], i]:
                    raise InvariantViolation("quotient by the derived subgroup is not abelian")
    span = {0: (0,) * m}
    rows = []
    for k in range(m):
        cur, b = step[0, k], 1
        while cur not in span:
            cur, b = step[cur, k], b + 1
        a = span[cur]
        row = [-v for v in a]
        row[k] = b
        rows.append(row)
        new_span = dict(span)
        for lab, vec in span.items():
            x, e = lab, 0
            for e in range(1, b):
                x = step[x, k]
                vv = list(vec)
                vv[k] = e
                new_span.setdefault(x, tuple(vv))
        span = new_span
    return rows


def abelianization(level: TowerLevel) -> Abelianization:
    """Abelianization of an enumerated level, checked against (Z_{n^r})^m.

    The derived subgroup is computed as a normal closure; the quotient's
    invariant factors come from the Smith form of its relation matrix.  The
    exponent-sum map must have the derived subgroup as its kernel.
    """
    key = "abelianization"
    if key in level._cache:
        return level._cache[key]
    g = level.group
    q = level.exponent_modulus
    D = derived_subgroup(level)
    labels = g.coset_labels(D)
    rel = _relation_matrix(g, labels)
    _, S, _ = smith_normal_form(rel)
    factors = [S[i][i] for i in range(len(S)) if S[i][i] != 1]
    quotient = g.order // D.size
    if np.prod(factors, dtype=object) != quotient or g.order % D.size:
        raise InvariantViolation("invariant factors do not multiply to |G/G'|")
    if factors != [q] * level.m:
        raise InvariantViolation(f"abelianization has invariant factors {factors}, expected {[q] * level.m}")
    vecs = level.ab_vectors
    kernel = np.flatnonzero(~vecs.any(axis=1))
    if not np.array_equal(kernel, D):
        raise InvariantViolation("kernel of the abelianization map differs from the derived subgroup")
    result = Abelianization(q, vecs, D, factors)
    level._cache[key] = result
    return result


def _require_metabelian_rank2(level: TowerLevel):
    if level.m != 2 or level.r != 2:
        raise ValueError(f"operation defined for m = 2, r = 2 only (got m={level.m}, r={level.r})")


def commutator_membership(level: TowerLevel, element) -> Optional[RingElement]:
    """p with element = (1, (1-y)p t_x - (1-x)p t_y), or None if the element is not a commutator.

    ``element`` is an id or a MagnusElement.
    """
    _require_metabelian_rank2(level)
    A = level.element(element) if not isinstance(element, MagnusElement) else element
    ctx = level.group.ctx
    if A.base != ctx.group.identity:
        return None
    a1, a2 = A.module_part
    one, x, y = ctx.one(), ctx.gen(0), ctx.gen(1)
    return solve_left_system([one - y, x - one], [a1, a2])


def commutator_certificate_set(level: TowerLevel, limit: int = 2**20) -> np.ndarray:
    """Sorted ids of all (1, (1-y)p t_x - (1-x)p t_y) for every p in Z_n[(Z_n)^2]."""
    _require_metabelian_rank2(level)
    grp: MagnusGroup = level.group
    base, n, N = grp.base, grp.n, grp.base.order
    if n**N > limit:
        raise SizeCapError(f"{n}^{N} ring elements exceed the limit {limit}", bound=n**N)
    ps = (np.arange(n**N, dtype=np.int64)[:, None] // n ** np.arange(N)[None, :]) % n
    x, y = base.generators
    # (1-y)p and -(1-x)p = (x-1)p ; (g p)[h] = p[g^-1 h]
    yp = ps[:, base.table[base.invert(y)]]
    xp = ps[:, base.table[base.invert(x)]]
    coeffs = np.stack([(ps - yp) % n, (xp - ps) % n], axis=1).astype(grp.coeffs.dtype)
    ids = grp.ids_from_arrays(np.full(len(ps), base.identity), coeffs)
    if np.any(ids < 0):
        raise InvariantViolation("a commutator-form element is missing from the group")
    return np.unique(ids)


def all_commutators_subgroup(level: TowerLevel) -> np.ndarray:
    """Brute force: subgroup generated by [g, h] over all pairs of elements."""
    g = level.group
    ids = np.arange(g.order)
    inv = g.inverses
    comms = set()
    for a in range(g.order):
        c = g.multiply_many(g.multiply_many(a, ids), g.multiply_many(inv[a], inv))
        comms.update(np.unique(c).tolist())
    return g.subgroup_closure(comms)


@dataclass
class Projection:
    source: TowerLevel
    target: TowerLevel
    map: np.ndarray

    def __call__(self, g: int) -> int:
        return int(self.map[g])

    def kernel(self) -> np.ndarray:
        return np.flatnonzero(self.map == self.target.group.identity)


def make_projection(source: TowerLevel, target: TowerLevel) -> Projection:
    """Reduction from modulus nk to modulus n at the same depth, generator i to generator i."""
    if (source.m, source.r) != (target.m, target.r):
        raise ValueError("projection needs equal m and r")
    if source.n % target.n:
        raise ValueError(f"{target.n} does not divide {source.n}")
    images = target.group.generators
    mp = source.group.homomorphism_images(target.group, images)
    if not source.group.is_homomorphism(target.group, mp, images):
        raise InvariantViolation("projection is not a homomorphism")
    if np.unique(mp).size != target.order:
        raise InvariantViolation("projection is not surjective")
    return Projection(source, target, mp)


def base_projection(level: TowerLevel) -> Projection:
    """Projection onto the level below, forgetting the module part."""
    if level.base is None:
        raise ValueError("level has no base")
    lower = level.base
    if isinstance(level.group, MagnusGroup):
        mp = level.group.bases.copy()
    else:
        mp = np.zeros(level.order, dtype=np.int64)
    images = lower.group.generators
    if not level.group.is_homomorphism(lower.group, mp, images):
        raise InvariantViolation("base projection is not a homomorphism")
    return Projection(level, lower, mp)


def centralizer_of_generators(level: TowerLevel) -> list[int]:
    """Elements commuting with every generator.

    For each such z and generator j, checks that (1 - x_j) a_i(z) = 0 for every
    coordinate i != j, where a_i(z) are the module coefficients of z.
    """
    if level.r < 2:
        raise ValueError("needs a Magnus level (r >= 2)")
    g: MagnusGroup = level.group
    cen = g.centralizer(g.generators)
    ctx = g.ctx
    one = ctx.one()
    for z in cen:
        A = g.element(int(z))
        for j in range(level.m):
            xj = ctx.gen(j)
            for i, a in enumerate(A.module_part):
                if i != j and (one - xj) * a:
                    raise InvariantViolation(f"coefficient relation fails for element {z}")
    return [int(z) for z in cen]


def separate_element(word: GroupWord, r: int, p: int, k_max: int, m: int = 2,
                     cap: int = DEFAULT_CAP) -> Optional[int]:
    """Least k <= k_max with ``word`` non-trivial at level (m, r, p^k), or None.

    Words are evaluated as Magnus matrices over the enumerated level r-1, so
    only that level has to fit in the cap.
    """
    if r < 1:
        return None
    for k in range(1, k_max + 1):
        n = p**k
        if r == 1:
            if any(s % n for s in word.exponent_sums(m)):
                return k
            continue
        lower = build_level(m, r - 1, n, cap)
        if not evaluate_word(word, RingContext(n, lower.group), m).is_identity():
            return k
    return None


def level_report(level: TowerLevel) -> dict:
    """JSON-ready summary of a level."""
    out = {
        "m": level.m, "r": level.r, "n": level.n,
        "order": level.order,
        "predicted_order": predicted_order(level.m, level.r, level.n),
        "generator_orders": [element_order(level, g) for g in level.group.generators],
    }
    if level.r >= 1:
        ab = abelianization(level)
        out["abelianization"] = ab.invariant_factors
        out["derived_subgroup_order"] = int(ab.derived_subgroup.size)
    else:
        out["abelianization"] = []
        out["derived_subgroup_order"] = 1
    if level.order <= 2**21:
        out["center_order"] = int(level.group.centralizer(level.group.generators).size)
    return out
