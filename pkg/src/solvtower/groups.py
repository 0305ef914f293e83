"""Finite groups with identified elements.

Every group here has dense integer element ids, the identity at id 0, a list
of generator ids and a spanning tree of the Cayley graph (``parent``,
``letter``, ``depth``) from which a word for every element can be read off.
Higher modules only ever refer to elements by id.
"""
from __future__ import annotations

import operator
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Hashable, Iterable, Optional, Sequence

import numpy as np

DEFAULT_CAP = 2**21
_TABLE_LIMIT = 4096


class SizeCapError(RuntimeError):
    """A group would exceed the element budget."""

    def __init__(self, message: str, bound: Optional[int] = None, expr: Optional[str] = None):
        super().__init__(message)
        self.bound = bound
        self.expr = expr


class InvariantViolation(AssertionError):
    """An internal consistency check failed; indicates a bug, not bad input."""


@dataclass(frozen=True)
class GroupWord:
    """A word in the generators; ``letters`` holds (index, sign) with 1-based indices."""

    letters: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        for i, e in self.letters:
            if i < 1 or e not in (1, -1):
                raise ValueError(f"bad letter {(i, e)}")

    @classmethod
    def parse(cls, text: str) -> "GroupWord":
        """Parse ``"x1 x2^-1 x1^3"``; ``"[w1,w2]"`` denotes the commutator w1 w2 w1^-1 w2^-1."""
        text = text.strip()
        if text.startswith("[") and text.endswith("]"):
            depth = 0
            for pos, ch in enumerate(text[1:-1], start=1):
                depth += ch == "["
                depth -= ch == "]"
                if ch == "," and depth == 0:
                    return cls.parse(text[1:pos]).commutator(cls.parse(text[pos + 1:-1]))
            raise ValueError(f"cannot parse {text!r}")
        letters = []
        for tok in text.replace("*", " ").split():
            if tok in ("e", "1"):
                continue
            mt = re.fullmatch(r"x(\d+)(?:\^\(?(-?\d+)\)?)?", tok)
            if not mt:
                raise ValueError(f"cannot parse token {tok!r}")
            i = int(mt.group(1))
            k = int(mt.group(2)) if mt.group(2) is not None else 1
            letters.extend([(i, 1 if k > 0 else -1)] * abs(k))
        return cls(tuple(letters))

    def __str__(self):
        if not self.letters:
            return "e"
        out = []
        for i, e in self.letters:
            out.append(f"x{i}" if e == 1 else f"x{i}^-1")
        return " ".join(out)

    def __len__(self):
        return len(self.letters)

    def __mul__(self, other: "GroupWord") -> "GroupWord":
        return GroupWord(self.letters + other.letters)

    def inverse(self) -> "GroupWord":
        return GroupWord(tuple((i, -e) for i, e in reversed(self.letters)))

    def commutator(self, other: "GroupWord") -> "GroupWord":
        return self * other * self.inverse() * other.inverse()

    def reduced(self) -> "GroupWord":
        out: list[tuple[int, int]] = []
        for i, e in self.letters:
            if out and out[-1] == (i, -e):
                out.pop()
            else:
                out.append((i, e))
        return GroupWord(tuple(out))

    def exponent_sums(self, m: int) -> list[int]:
        sums = [0] * m
        for i, e in self.letters:
            sums[i - 1] += e
        return sums


def _letter_code(i: int, sign: int) -> int:
    # Cayley column: 2i for x_{i+1}, 2i+1 for its inverse
    return 2 * i + (0 if sign > 0 else 1)


class EnumeratedGroup:
    """Base class: a finite group on ids ``0..order-1`` with identity 0.

    Subclasses provide ``multiply``, ``invert`` and the spanning-tree arrays
    ``parent``, ``letter`` (Cayley column used to reach the element) and
    ``depth``.  The vectorised ``multiply_many`` has a looping default.
    """

    identity = 0
    order: int
    generators: tuple[int, ...]
    parent: np.ndarray
    letter: np.ndarray
    depth: np.ndarray

    @property
    def identity_id(self) -> int:
        return self.identity

    @property
    def generator_ids(self) -> tuple[int, ...]:
        return self.generators

    @property
    def rank(self) -> int:
        return len(self.generators)

    def __len__(self):
        return self.order

    def multiply(self, a: int, b: int) -> int:
        raise NotImplementedError

    def invert(self, a: int) -> int:
        raise NotImplementedError

    def multiply_many(self, a, b) -> np.ndarray:
        a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        return np.fromiter((self.multiply(int(x), int(y)) for x, y in zip(a.ravel(), b.ravel())),
                           dtype=np.int64, count=a.size).reshape(a.shape)

    def invert_many(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        return np.fromiter((self.invert(int(x)) for x in a.ravel()), dtype=np.int64,
                           count=a.size).reshape(a.shape)

    @cached_property
    def inverses(self) -> np.ndarray:
        return self.invert_many(np.arange(self.order))

    @cached_property
    def table(self) -> np.ndarray:
        """Full multiplication table ``table[a, b] = a*b``; only for small groups."""
        if self.order > _TABLE_LIMIT:
            raise SizeCapError(f"multiplication table of a group of order {self.order} refused",
                               bound=self.order)
        ids = np.arange(self.order)
        return self.multiply_many(ids[:, None], ids[None, :])

    @cached_property
    def _mul_rows(self) -> Optional[list[list[int]]]:
        return self.table.tolist() if self.order <= _TABLE_LIMIT else None

    def fast_multiply(self) -> Callable[[int, int], int]:
        """A scalar multiply backed by the table when the group is small."""
        rows = self._mul_rows
        if rows is None:
            return self.multiply
        return lambda a, b: rows[a][b]

    @cached_property
    def letter_elements(self) -> np.ndarray:
        """Ids of x_1, x_1^-1, x_2, x_2^-1, ... in Cayley-column order."""
        out = []
        for g in self.generators:
            out.extend([g, self.invert(g)])
        return np.array(out, dtype=np.int64)

    @cached_property
    def cayley(self) -> np.ndarray:
        """``cayley[g, c]`` = g times the letter of column c."""
        ids = np.arange(self.order)
        return np.stack([self.multiply_many(ids, s) for s in self.letter_elements], axis=1)

    def word(self, g: int) -> GroupWord:
        letters = []
        g = int(g)
        while g != self.identity:
            c = int(self.letter[g])
            letters.append((c // 2 + 1, 1 if c % 2 == 0 else -1))
            g = int(self.parent[g])
        return GroupWord(tuple(reversed(letters)))

    @property
    def word_table(self) -> "WordTable":
        return WordTable(self)

    def evaluate(self, word: GroupWord, images: Optional[Sequence[int]] = None) -> int:
        """Value of ``word`` with generator i sent to ``images[i-1]`` (default: generator i)."""
        images = self.generators if images is None else images
        inv = [self.invert(int(g)) for g in images]
        acc = self.identity
        for i, e in word.letters:
            acc = self.multiply(acc, int(images[i - 1]) if e > 0 else inv[i - 1])
        return acc

    def power(self, g: int, k: int) -> int:
        if k < 0:
            g, k = self.invert(g), -k
        acc, base = self.identity, g
        while k:
            if k & 1:
                acc = self.multiply(acc, base)
            base = self.multiply(base, base)
            k >>= 1
        return acc

    def commutator(self, a: int, b: int) -> int:
        """[a, b] = a b a^-1 b^-1."""
        return self.multiply(self.multiply(a, b), self.multiply(self.invert(a), self.invert(b)))

    def layers(self) -> list[np.ndarray]:
        """Element ids grouped by spanning-tree depth (depth 0 first)."""
        order = np.argsort(self.depth, kind="stable")
        counts = np.bincount(self.depth)
        return np.split(order, np.cumsum(counts)[:-1])

    def homomorphism_images(self, target: "EnumeratedGroup", images: Sequence[int]) -> np.ndarray:
        """Map ``id -> target id`` of the homomorphism sending generator i to ``images[i]``.

        Words come from the spanning tree, so this only assumes the assignment
        extends to a homomorphism; callers verify that with ``is_homomorphism``.
        """
        letter_img = []
        for g in images:
            letter_img.extend([int(g), target.invert(int(g))])
        letter_img = np.array(letter_img, dtype=np.int64)
        out = np.zeros(self.order, dtype=np.int64)
        out[self.identity] = target.identity
        for layer in self.layers()[1:]:
            out[layer] = target.multiply_many(out[self.parent[layer]], letter_img[self.letter[layer]])
        return out

    def is_homomorphism(self, target: "EnumeratedGroup", mapping: np.ndarray, images: Sequence[int]) -> bool:
        """Exhaustive check of f(g x) == f(g) f(x) over every g and every generator letter x.

        This covers the whole Cayley graph, which implies the homomorphism
        property for all pairs by induction on word length.
        """
        letter_img = []
        for g in images:
            letter_img.extend([int(g), target.invert(int(g))])
        if int(mapping[self.identity]) != target.identity:
            return False
        cay = self.cayley
        for c, img in enumerate(letter_img):
            if not np.array_equal(mapping[cay[:, c]], target.multiply_many(mapping, img)):
                return False
        return True

    def subgroup_closure(self, gens: Iterable[int], cap: Optional[int] = None) -> np.ndarray:
        """Sorted ids of the subgroup generated by ``gens``."""
        gens = [int(g) for g in gens]
        steps = np.array(sorted(set(gens) | {self.invert(g) for g in gens}), dtype=np.int64)
        seen = np.zeros(self.order, dtype=bool)
        seen[self.identity] = True
        frontier = np.array([self.identity], dtype=np.int64)
        total = 1
        while frontier.size and steps.size:
            cand = self.multiply_many(frontier[:, None], steps[None, :]).ravel()
            cand = np.unique(cand)
            cand = cand[~seen[cand]]
            seen[cand] = True
            total += cand.size
            if cap is not None and total > cap:
                raise SizeCapError(f"subgroup closure exceeded {cap} elements", bound=cap)
            frontier = cand
        return np.flatnonzero(seen)

    def normal_closure(self, gens: Iterable[int]) -> np.ndarray:
        """Sorted ids of the smallest normal subgroup containing ``gens``."""
        gens = set(int(g) for g in gens)
        conj_by = [int(g) for g in self.letter_elements]
        while True:
            sub = self.subgroup_closure(gens)
            member = np.zeros(self.order, dtype=bool)
            member[sub] = True
            gl = np.array(sorted(gens), dtype=np.int64)
            extra = set()
            for x in conj_by:
                conj = self.multiply_many(self.multiply_many(self.invert(x), gl), x)
                extra.update(int(c) for c in conj[~member[conj]])
            if not extra:
                return sub
            gens |= extra

    def coset_labels(self, subgroup: np.ndarray) -> np.ndarray:
        """Label of the left coset g*H for every g (labels in order of first appearance)."""
        labels = np.full(self.order, -1, dtype=np.int64)
        subgroup = np.asarray(subgroup, dtype=np.int64)
        nxt = 0
        for g in range(self.order):
            if labels[g] < 0:
                labels[self.multiply_many(g, subgroup)] = nxt
                nxt += 1
        return labels

    def centralizer(self, elements: Iterable[int]) -> np.ndarray:
        ids = np.arange(self.order)
        keep = np.ones(self.order, dtype=bool)
        for x in elements:
            keep &= self.multiply_many(ids, int(x)) == self.multiply_many(int(x), ids)
        return np.flatnonzero(keep)

    def check_axioms(self, sample: Optional[int] = None, seed: int = 0) -> None:
        """Raise InvariantViolation unless identity, inverse, generation and word invariants hold.

        Exhaustive when ``sample`` is None; otherwise ``sample`` random elements.
        """
        if sample is None or sample >= self.order:
            ids = np.arange(self.order)
        else:
            ids = np.random.default_rng(seed).choice(self.order, size=sample, replace=False)
        e = self.identity
        if not (np.array_equal(self.multiply_many(e, ids), ids) and np.array_equal(self.multiply_many(ids, e), ids)):
            raise InvariantViolation("identity law fails")
        if not np.all(self.multiply_many(ids, self.invert_many(ids)) == e):
            raise InvariantViolation("inverse law fails")
        if self.subgroup_closure(self.generators).size != self.order:
            raise InvariantViolation("generators do not generate the group")
        for g in ids[: min(len(ids), 2000)]:
            if self.evaluate(self.word(int(g))) != int(g):
                raise InvariantViolation(f"word of element {g} does not evaluate to it")
        parents = self.parent[ids[ids != e]]
        if np.any(self.cayley[parents, self.letter[ids[ids != e]]] != ids[ids != e]):
            raise InvariantViolation("spanning tree is inconsistent with multiplication")


class WordTable:
    """Read-only mapping ``id -> GroupWord`` backed by the group's spanning tree."""

    def __init__(self, group: EnumeratedGroup):
        self._group = group

    def __getitem__(self, g: int) -> GroupWord:
        if not 0 <= g < self._group.order:
            raise KeyError(g)
        return self._group.word(g)

    def __len__(self):
        return self._group.order

    def __iter__(self):
        return iter(range(self._group.order))

    def items(self):
        for g in range(self._group.order):
            yield g, self._group.word(g)


class AbelianGroup(EnumeratedGroup):
    """(Z_n)^m with element id sum(c_i n^i) for the vector (c_1, ..., c_m)."""

    def __init__(self, m: int, n: int):
        if m < 1 or n < 1:
            raise ValueError(f"need m >= 1 and n >= 1, got m={m}, n={n}")
        self.m = m
        self.n = n
        self.order = n**m
        self.generators = tuple(n**i for i in range(m)) if n > 1 else (0,) * m
        vecs = self.vectors
        self.depth = vecs.sum(axis=1)
        self.parent = np.zeros(self.order, dtype=np.int64)
        self.letter = np.zeros(self.order, dtype=np.int64)
        nz = np.arange(1, self.order)
        # strip one copy of the highest nonzero coordinate
        top = m - 1 - np.argmax(vecs[nz, ::-1] > 0, axis=1)
        self.parent[nz] = nz - self._powers[top]
        self.letter[nz] = 2 * top

    @cached_property
    def _powers(self) -> np.ndarray:
        return self.n ** np.arange(self.m, dtype=np.int64)

    @cached_property
    def vectors(self) -> np.ndarray:
        ids = np.arange(self.order, dtype=np.int64)
        return (ids[:, None] // self._powers[None, :]) % self.n

    def vector(self, g: int) -> tuple[int, ...]:
        return tuple(int(v) for v in self.vectors[g])

    def element(self, vec: Sequence[int]) -> int:
        return int(sum((int(c) % self.n) * int(p) for c, p in zip(vec, self._powers)))

    def multiply_many(self, a, b) -> np.ndarray:
        a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        va = self.vectors[a]
        vb = self.vectors[b]
        return ((va + vb) % self.n) @ self._powers

    def invert_many(self, a) -> np.ndarray:
        return ((-self.vectors[np.asarray(a, dtype=np.int64)]) % self.n) @ self._powers

    def multiply(self, a: int, b: int) -> int:
        return int(self.multiply_many(a, b))

    def invert(self, a: int) -> int:
        return int(self.invert_many(a))

    def monomial_name(self, g: int) -> str:
        names = ("x", "y") if self.m == 2 else tuple(f"x{i + 1}" for i in range(self.m))
        parts = []
        for name, c in zip(names, self.vector(g)):
            if c == 1:
                parts.append(name)
            elif c:
                parts.append(f"{name}^{c}")
        return " ".join(parts) or "1"


def make_trivial(m: int = 2) -> AbelianGroup:
    """The one-element group, with all m generators equal to the identity."""
    return AbelianGroup(m, 1)


def make_abelian(m: int, n: int) -> AbelianGroup:
    """(Z_n)^m with generator i the i-th unit vector."""
    if m < 1 or n < 2:
        raise ValueError(f"need m >= 1 and n >= 2, got m={m}, n={n}")
    return AbelianGroup(m, n)


class ObjectGroup(EnumeratedGroup):
    """Group whose elements are explicit hashable objects, as produced by ``bfs_enumerate``."""

    def __init__(self, elements, index, cayley, parent, letter, depth, generators, multiply, invert):
        self.elements = elements
        self.index = index
        self.order = len(elements)
        self.parent = parent
        self.letter = letter
        self.depth = depth
        self.generators = generators
        self._cayley = cayley
        self._mul = multiply
        self._inv = invert

    @cached_property
    def cayley(self) -> np.ndarray:
        return self._cayley

    def multiply(self, a: int, b: int) -> int:
        return self.index[self._mul(self.elements[a], self.elements[b])]

    def invert(self, a: int) -> int:
        return self.index[self._inv(self.elements[a])]

    def id_of(self, element: Hashable) -> int:
        return self.index[element]


def bfs_enumerate(
    generators: Sequence[Hashable],
    cap: int = DEFAULT_CAP,
    multiply: Callable = operator.mul,
    invert: Optional[Callable] = None,
) -> ObjectGroup:
    """Enumerate the group generated by ``generators`` by breadth-first search.

    Elements are discovered by right multiplication with x_1, x_1^-1, x_2, ...
    in that order and numbered densely in discovery order, the identity first.
    Raises SizeCapError as soon as more than ``cap`` elements are found.
    """
    if cap < 1:
        raise ValueError("cap must be positive")
    if invert is None:
        invert = operator.methodcaller("inverse")
    gens = list(generators)
    steps = []
    for g in gens:
        steps.extend([g, invert(g)])
    identity = multiply(gens[0], invert(gens[0]))
    elements = [identity]
    index = {identity: 0}
    parent = [0]
    letter = [0]
    depth = [0]
    rows = []
    head = 0
    while head < len(elements):
        g = elements[head]
        row = []
        for c, s in enumerate(steps):
            h = multiply(g, s)
            j = index.get(h)
            if j is None:
                j = len(elements)
                if j >= cap:
                    raise SizeCapError(f"group exceeds the cap of {cap} elements", bound=cap)
                index[h] = j
                elements.append(h)
                parent.append(head)
                letter.append(c)
                depth.append(depth[head] + 1)
            row.append(j)
        rows.append(row)
        head += 1
    return ObjectGroup(
        elements,
        index,
        np.array(rows, dtype=np.int64).reshape(len(elements), len(steps)),
        np.array(parent, dtype=np.int64),
        np.array(letter, dtype=np.int64),
        np.array(depth, dtype=np.int64),
        tuple(index[g] for g in gens),
        multiply,
        invert,
    )
