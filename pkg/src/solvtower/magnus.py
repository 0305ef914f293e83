"""Magnus matrices (g, t; 0, 1) over Z_n[G] and groups generated by them.

An element is a pair ``(g, t)`` with g in a base group G and ``t`` a vector of
m ring elements, the coefficients of t_1, ..., t_m.  Multiplication follows
the formal matrix product ``(g, t)(h, s) = (gh, g.s + t)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .group_ring import RingContext, RingElement, render
from .groups import DEFAULT_CAP, EnumeratedGroup, GroupWord, InvariantViolation, SizeCapError


class MagnusElement:
    __slots__ = ("ctx", "base", "module_part", "_hash")

    def __init__(self, ctx: RingContext, base: int, module_part: Sequence[RingElement]):
        for a in module_part:
            if a.ctx != ctx:
                raise ValueError("module coefficients from a different group ring")
        self.ctx = ctx
        self.base = int(base)
        self.module_part = tuple(module_part)
        self._hash = None

    @classmethod
    def identity(cls, ctx: RingContext, m: int) -> "MagnusElement":
        return cls(ctx, ctx.group.identity, [ctx.zero()] * m)

    @classmethod
    def generator(cls, ctx: RingContext, m: int, i: int) -> "MagnusElement":
        """(g_i, t_i) for 0-based i."""
        part = [ctx.zero()] * m
        part[i] = ctx.one()
        return cls(ctx, ctx.group.generators[i], part)

    @property
    def m(self) -> int:
        return len(self.module_part)

    def __eq__(self, other):
        if not isinstance(other, MagnusElement):
            return NotImplemented
        return (self.ctx == other.ctx and self.base == other.base
                and self.module_part == other.module_part)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.base, self.module_part))
        return self._hash

    def __mul__(self, other: "MagnusElement") -> "MagnusElement":
        return magnus_mul(self, other)

    def inverse(self) -> "MagnusElement":
        return magnus_inv(self)

    def __pow__(self, k: int) -> "MagnusElement":
        return magnus_pow(self, k)

    def is_identity(self) -> bool:
        return self.base == self.ctx.group.identity and not any(self.module_part)

    def __repr__(self):
        return f"MagnusElement({self})"

    def __str__(self):
        group = self.ctx.group
        g = group.monomial_name(self.base) if hasattr(group, "monomial_name") else f"g#{self.base}"
        parts = [f"({render(a)})*t{i + 1}" for i, a in enumerate(self.module_part) if a]
        return f"({g} | {' + '.join(parts) or '0'})"


def magnus_mul(A: MagnusElement, B: MagnusElement) -> MagnusElement:
    """(g, t)(h, s) = (gh, g.s + t)."""
    if A.ctx != B.ctx or A.m != B.m:
        raise ValueError("Magnus elements over different rings")
    g = A.base
    part = [a + b.left_translate(g) for a, b in zip(A.module_part, B.module_part)]
    return MagnusElement(A.ctx, A.ctx.group.multiply(g, B.base), part)


def magnus_inv(A: MagnusElement) -> MagnusElement:
    """(g, t)^-1 = (g^-1, -g^-1.t)."""
    gi = A.ctx.group.invert(A.base)
    return MagnusElement(A.ctx, gi, [-(a.left_translate(gi)) for a in A.module_part])


def magnus_pow(A: MagnusElement, k: int) -> MagnusElement:
    if k < 0:
        A, k = magnus_inv(A), -k
    acc = MagnusElement.identity(A.ctx, A.m)
    base = A
    while k:
        if k & 1:
            acc = magnus_mul(acc, base)
        base = magnus_mul(base, base)
        k >>= 1
    return acc


def magnus_commutator(A: MagnusElement, B: MagnusElement) -> MagnusElement:
    """[A, B] = A B A^-1 B^-1."""
    return A * B * A.inverse() * B.inverse()


@dataclass(frozen=True)
class MembershipCertificate:
    """Both sides of 1 - g = sum a_i (1 - g_i)."""

    holds: bool
    lhs: RingElement
    rhs: RingElement

    def __bool__(self):
        return self.holds


def image_membership(A: MagnusElement, generator_images: Optional[Sequence[int]] = None) -> MembershipCertificate:
    """Decide whether (g, sum a_i t_i) lies in the group generated by the (g_i, t_i).

    The criterion is 1 - g = sum_i a_i (1 - g_i) in Z_n[G].
    """
    ctx = A.ctx
    gens = ctx.group.generators if generator_images is None else generator_images
    if len(gens) != A.m:
        raise ValueError("need one generator image per module coordinate")
    one = ctx.one()
    lhs = one - ctx.monomial(A.base)
    rhs = ctx.zero()
    for a, g in zip(A.module_part, gens):
        rhs = rhs + a * (one - ctx.monomial(g))
    return MembershipCertificate(lhs == rhs, lhs, rhs)


def evaluate_word(word: GroupWord, ctx: RingContext, m: int) -> MagnusElement:
    """Value of ``word`` at the Magnus generators (g_i, t_i) over ``ctx``."""
    gens = [MagnusElement.generator(ctx, m, i) for i in range(m)]
    invs = [g.inverse() for g in gens]
    acc = MagnusElement.identity(ctx, m)
    for i, e in word.letters:
        if i > m:
            raise ValueError(f"generator x{i} out of range for m={m}")
        acc = acc * (gens[i - 1] if e > 0 else invs[i - 1])
    return acc


class MagnusGroup(EnumeratedGroup):
    """The subgroup of Magnus matrices over (n, base) generated by the (g_i, t_i).

    Elements are stored as arrays: ``bases[k]`` (id in the base group) and
    ``coeffs[k]`` of shape (m, |base|) with entries in [0, n).  Enumeration is
    a layered breadth-first search whose discovery order equals the one of
    ``bfs_enumerate`` on the same generators.
    """

    def __init__(self, base: EnumeratedGroup, n: int, cap: int = DEFAULT_CAP):
        if n < 2:
            raise ValueError("modulus must be at least 2")
        self.base = base
        self.n = n
        self.m = base.rank
        self.ctx = RingContext(n, base)
        N = base.order
        self._N = N
        self._dtype = np.uint8 if n <= 256 else np.int64
        bound = N * n ** (self.m * N)
        self._object_keys = bound >= 2**63
        if self._object_keys:
            self._weights = np.array([n**j for j in range(self.m * N)], dtype=object)
        else:
            self._weights = n ** np.arange(self.m * N, dtype=np.int64)
        self._enumerate(cap)

    # keys ----------------------------------------------------------------
    def _keys(self, bases: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
        flat = coeffs.reshape(len(bases), -1)
        if self._object_keys:
            flat = flat.astype(object)
            return flat.dot(self._weights) * self._N + bases.astype(object)
        return flat.astype(np.int64) @ self._weights * self._N + bases

    def _lookup(self, keys: np.ndarray) -> np.ndarray:
        pos = np.searchsorted(self._sorted_keys, keys)
        pos = np.minimum(pos, len(self._sorted_keys) - 1)
        if not np.all(self._sorted_keys[pos] == keys):
            raise InvariantViolation("product left the enumerated group")
        return self._sorted_ids[pos]

    def _left_act(self, bases: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
        # (g.c)[h] = c[g^-1 h]
        idx = self.base.table[self.base.inverses[bases]]
        return np.take_along_axis(coeffs, idx[:, None, :], axis=2)

    # enumeration ---------------------------------------------------------
    def _enumerate(self, cap: int):
        base, n, m, N = self.base, self.n, self.m, self._N
        table = base.table
        letters = []  # (base id, coordinate, position of the +-1 entry, value)
        for i, g in enumerate(base.generators):
            gi = base.invert(g)
            letters.append((g, i, base.identity, 1))
            letters.append((gi, i, gi, n - 1))
        self._letters = letters
        bases = [np.array([base.identity], dtype=np.int64)]
        coeffs = [np.zeros((1, m, N), dtype=self._dtype)]
        parents = [np.zeros(1, dtype=np.int64)]
        codes = [np.zeros(1, dtype=np.int64)]
        depths = [np.zeros(1, dtype=np.int64)]
        known = self._keys(bases[0], coeffs[0])
        total = 1
        f_ids = np.zeros(1, dtype=np.int64)
        f_b, f_c = bases[0], coeffs[0]
        depth = 0
        L = len(letters)
        while f_ids.size:
            depth += 1
            F = f_ids.size
            cand_b = np.empty((F, L), dtype=np.int64)
            cand_c = np.repeat(f_c[:, None], L, axis=1)
            rows = np.arange(F)
            for c, (g, i, pos, val) in enumerate(letters):
                cand_b[:, c] = table[f_b, g]
                col = table[f_b, pos]
                cand_c[rows, c, i, col] = (cand_c[rows, c, i, col].astype(np.int64) + val) % n
            cand_b = cand_b.reshape(-1)
            cand_c = cand_c.reshape(F * L, m, N)
            keys = self._keys(cand_b, cand_c)
            uniq, first = np.unique(keys, return_index=True)
            pos = np.searchsorted(known, uniq)
            is_known = (pos < len(known)) & (known[np.minimum(pos, len(known) - 1)] == uniq)
            new = np.sort(first[~is_known])
            if new.size == 0:
                break
            total += new.size
            if total > cap:
                raise SizeCapError(f"Magnus group exceeds the cap of {cap} elements", bound=cap)
            new_ids = np.arange(total - new.size, total, dtype=np.int64)
            bases.append(cand_b[new])
            coeffs.append(cand_c[new])
            parents.append(f_ids[new // L])
            codes.append(new % L)
            depths.append(np.full(new.size, depth, dtype=np.int64))
            known = np.sort(np.concatenate([known, keys[new]]))
            f_ids, f_b, f_c = new_ids, cand_b[new], cand_c[new]
        self.bases = np.concatenate(bases)
        self.coeffs = np.concatenate(coeffs)
        self.parent = np.concatenate(parents)
        self.letter = np.concatenate(codes)
        self.depth = np.concatenate(depths)
        self.order = len(self.bases)
        all_keys = self._keys(self.bases, self.coeffs)
        self._sorted_ids = np.argsort(all_keys, kind="stable")
        self._sorted_keys = all_keys[self._sorted_ids]
        gens = []
        for i in range(m):
            c = np.zeros((1, m, N), dtype=self._dtype)
            c[0, i, base.identity] = 1
            gens.append(int(self._lookup(self._keys(np.array([base.generators[i]]), c))[0]))
        self.generators = tuple(gens)

    # group operations ----------------------------------------------------
    def multiply_many(self, a, b) -> np.ndarray:
        a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        shape = a.shape
        a, b = a.ravel(), b.ravel()
        ba = self.bases[a]
        prod_b = self.base.table[ba, self.bases[b]]
        prod_c = (self.coeffs[a].astype(np.int64) + self._left_act(ba, self.coeffs[b])) % self.n
        return self._lookup(self._keys(prod_b, prod_c)).reshape(shape)

    def invert_many(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        shape = a.shape
        a = a.ravel()
        bi = self.base.inverses[self.bases[a]]
        ci = (-self._left_act(bi, self.coeffs[a]).astype(np.int64)) % self.n
        return self._lookup(self._keys(bi, ci)).reshape(shape)

    def multiply(self, a: int, b: int) -> int:
        return int(self.multiply_many(np.array([a]), np.array([b]))[0])

    def invert(self, a: int) -> int:
        return int(self.invert_many(np.array([a]))[0])

    # conversion ----------------------------------------------------------
    def element(self, k: int) -> MagnusElement:
        ctx = self.ctx
        return MagnusElement(ctx, int(self.bases[k]), [ctx.from_dense(row) for row in self.coeffs[k]])

    def id_of(self, A: MagnusElement) -> Optional[int]:
        """Id of a Magnus element, or None if it is not in this group."""
        if A.ctx != self.ctx:
            raise ValueError("element over a different group ring")
        c = np.zeros((1, self.m, self._N), dtype=self._dtype)
        for i, a in enumerate(A.module_part):
            for g, v in a.terms.items():
                c[0, i, g] = v
        key = self._keys(np.array([A.base], dtype=np.int64), c)
        pos = int(np.searchsorted(self._sorted_keys, key)[0])
        if pos < self.order and self._sorted_keys[pos] == key[0]:
            return int(self._sorted_ids[pos])
        return None

    def ids_from_arrays(self, bases: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
        """Ids for stacked (base, coefficient) arrays; -1 where not a member."""
        keys = self._keys(np.asarray(bases, dtype=np.int64), coeffs)
        pos = np.minimum(np.searchsorted(self._sorted_keys, keys), self.order - 1)
        hit = self._sorted_keys[pos] == keys
        return np.where(hit, self._sorted_ids[pos], -1)

    def monomial_name(self, k: int) -> str:
        return str(self.element(k))

    # criteria ------------------------------------------------------------
    def membership_all(self) -> np.ndarray:
        """For every element, whether 1 - g == sum a_i (1 - g_i) holds (vectorised)."""
        N, n = self._N, self.n
        base = self.base
        lhs = np.zeros((self.order, N), dtype=np.int64)
        lhs[:, base.identity] += 1
        np.subtract.at(lhs, (np.arange(self.order), self.bases), 1)
        rhs = np.zeros((self.order, N), dtype=np.int64)
        for i, g in enumerate(base.generators):
            a = self.coeffs[:, i, :].astype(np.int64)
            # (a.g)[h] = a[h g^-1]
            shifted = a[:, base.table[:, base.invert(g)]]
            rhs += a - shifted
        return np.all((lhs - rhs) % n == 0, axis=1)

    @cached_property
    def base_projection(self) -> np.ndarray:
        return self.bases
