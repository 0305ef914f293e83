"""Integers mod n and linear systems over Z_n.

Linear systems are diagonalised directly over Z_n by unimodular row and
column operations, which is correct for composite n as well.  The integer
Smith normal form is kept for relation matrices of finite abelian groups.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Optional, Sequence

import numpy as np
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_decomp


class ModulusMismatch(ValueError):
    """Raised when residues or matrices with different moduli are combined."""


@dataclass(frozen=True)
class ResidueScalar:
    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError(f"modulus must be positive, got {self.modulus}")
        object.__setattr__(self, "value", self.value % self.modulus)

    def _other(self, other) -> int:
        if isinstance(other, ResidueScalar):
            if other.modulus != self.modulus:
                raise ModulusMismatch(f"{self.modulus} != {other.modulus}")
            return other.value
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return v
        return ResidueScalar(self.value + v, self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return v
        return ResidueScalar(self.value - v, self.modulus)

    def __rsub__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return v
        return ResidueScalar(v - self.value, self.modulus)

    def __mul__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return v
        return ResidueScalar(self.value * v, self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return ResidueScalar(-self.value, self.modulus)

    def __int__(self):
        return self.value

    def is_unit(self) -> bool:
        return gcd(self.value, self.modulus) == 1

    def signed(self) -> int:
        """Representative in (-n/2, n/2]."""
        v = self.value
        return v - self.modulus if 2 * v > self.modulus else v


class ResidueMatrix:
    """Dense matrix over Z_n with entries stored as reduced Python ints."""

    __slots__ = ("rows", "cols", "modulus", "_entries")

    def __init__(self, entries: Sequence[Sequence[int]], modulus: int, cols: Optional[int] = None):
        if modulus < 1:
            raise ValueError(f"modulus must be positive, got {modulus}")
        rows = [tuple(int(v) % modulus for v in row) for row in entries]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(row) != cols for row in rows):
            raise ValueError("ragged matrix")
        self.rows = len(rows)
        self.cols = cols
        self.modulus = modulus
        self._entries = tuple(rows)

    @classmethod
    def identity(cls, size: int, modulus: int) -> "ResidueMatrix":
        return cls([[int(i == j) for j in range(size)] for i in range(size)], modulus)

    @classmethod
    def zeros(cls, rows: int, cols: int, modulus: int) -> "ResidueMatrix":
        return cls([[0] * cols for _ in range(rows)], modulus, cols=cols)

    def __getitem__(self, ij) -> ResidueScalar:
        i, j = ij
        return ResidueScalar(self._entries[i][j], self.modulus)

    def tolist(self) -> list[list[int]]:
        return [list(row) for row in self._entries]

    def __eq__(self, other):
        if not isinstance(other, ResidueMatrix):
            return NotImplemented
        return (self.modulus, self.cols, self._entries) == (other.modulus, other.cols, other._entries)

    def __hash__(self):
        return hash((self.modulus, self.cols, self._entries))

    def __repr__(self):
        return f"ResidueMatrix({self.tolist()}, modulus={self.modulus})"

    def apply(self, x: Sequence[int]) -> list[int]:
        """Matrix-vector product A.x mod n."""
        if len(x) != self.cols:
            raise ValueError(f"vector of length {len(x)} for {self.cols} columns")
        n = self.modulus
        return [sum(a * int(v) for a, v in zip(row, x)) % n for row in self._entries]

    def __matmul__(self, other: "ResidueMatrix") -> "ResidueMatrix":
        if other.modulus != self.modulus:
            raise ModulusMismatch(f"{self.modulus} != {other.modulus}")
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        cols = list(zip(*other._entries)) if other.rows else [()] * other.cols
        return ResidueMatrix(
            [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in self._entries],
            self.modulus,
            cols=other.cols,
        )


def smith_normal_form(A: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """Smith normal form of an integer matrix.

    Returns ``(U, D, V)`` with ``U @ A @ V == D``, U and V unimodular, D
    diagonal with non-negative entries and ``D[i][i]`` dividing ``D[i+1][i+1]``.
    """
    rows = len(A)
    cols = len(A[0]) if rows else 0
    if not any(int(v) for row in A for v in row):
        return ([[int(i == j) for j in range(rows)] for i in range(rows)], [[0] * cols for _ in range(rows)],
                [[int(i == j) for j in range(cols)] for i in range(cols)])
    D, U, V = smith_normal_decomp(Matrix([[int(v) for v in row] for row in A]), domain=ZZ)
    U = [[int(v) for v in U.row(i)] for i in range(rows)]
    D = [[int(v) for v in D.row(i)] for i in range(rows)]
    V = [[int(v) for v in V.row(i)] for i in range(cols)]
    for i in range(min(rows, cols)):
        if D[i][i] < 0:
            D[i] = [-v for v in D[i]]
            U[i] = [-v for v in U[i]]
    return U, D, V


def _unit_normalizer(p: int, n: int) -> int:
    """A unit u mod n with u*p == gcd(p, n) (mod n)."""
    g = gcd(p, n)
    ng = n // g
    u = pow(p // g % ng, -1, ng) if ng > 1 else 1
    while gcd(u, n) != 1:
        u += ng
    return u % n


def _diagonalize_mod(A: list[list[int]], b: list[int], n: int):
    """Reduce A.x = b over Z_n to a diagonal system by unimodular row and column operations.

    Returns ``(diag, c, V)`` with ``x = V @ y`` solving A.x = b whenever
    ``diag[i] * y[i] == c[i]`` for every i and the remaining entries of c
    vanish.  Entries stay below n throughout, unlike an SNF of the integer
    lift, whose intermediates can grow without bound.
    """
    M = np.array(A, dtype=np.int64).reshape(len(A), -1) % n
    c = np.array(b, dtype=np.int64) % n
    rows, cols = M.shape
    V = np.eye(cols, dtype=np.int64)

    def bezout(u: int, v: int):
        # s*u + t*v == g with g = gcd(u, v) over the integers
        s0, s1, t0, t1, a, bb = 1, 0, 0, 1, u, v
        while bb:
            q = a // bb
            a, bb = bb, a - q * bb
            s0, s1 = s1, s0 - q * s1
            t0, t1 = t1, t0 - q * t1
        return a, s0, t0

    diag = []
    for t in range(min(rows, cols)):
        sub = M[t:, t:]
        nz = np.argwhere(sub)
        if nz.size == 0:
            break
        weights = np.gcd(sub[nz[:, 0], nz[:, 1]], n)
        i, j = nz[int(np.argmin(weights))] + t
        M[[t, i]] = M[[i, t]]
        c[[t, i]] = c[[i, t]]
        M[:, [t, j]] = M[:, [j, t]]
        V[:, [t, j]] = V[:, [j, t]]
        while True:
            u = _unit_normalizer(int(M[t, t]), n)
            M[t] = M[t] * u % n
            c[t] = c[t] * u % n
            p = int(M[t, t])
            dirty = False
            for i in range(t + 1, rows):
                e = int(M[i, t])
                if not e:
                    continue
                if e % p == 0:
                    M[i] = (M[i] - (e // p) * M[t]) % n
                    c[i] = (c[i] - (e // p) * c[t]) % n
                else:
                    g, s1, s2 = bezout(p, e)
                    rt, ri = M[t].copy(), M[i].copy()
                    M[t] = (s1 * rt + s2 * ri) % n
                    M[i] = ((-e // g) * rt + (p // g) * ri) % n
                    ct, ci = int(c[t]), int(c[i])
                    c[t] = (s1 * ct + s2 * ci) % n
                    c[i] = ((-e // g) * ct + (p // g) * ci) % n
                    dirty = True
                    break
            if dirty:
                continue
            for j in range(t + 1, cols):
                e = int(M[t, j])
                if not e:
                    continue
                if e % p == 0:
                    M[:, j] = (M[:, j] - (e // p) * M[:, t]) % n
                    V[:, j] = (V[:, j] - (e // p) * V[:, t]) % n
                else:
                    g, s1, s2 = bezout(p, e)
                    for X in (M, V):
                        ct, cj = X[:, t].copy(), X[:, j].copy()
                        X[:, t] = (s1 * ct + s2 * cj) % n
                        X[:, j] = ((-e // g) * ct + (p // g) * cj) % n
                    dirty = True
                    break
            if not dirty:
                break
        diag.append(int(M[t, t]))
    return diag, c.tolist(), V


def solve_mod_n(A: ResidueMatrix, b: Sequence[int | ResidueScalar]) -> Optional[list[int]]:
    """Some x with A.x == b (mod n), or None if the system is inconsistent.

    Which solution is returned is unspecified.
    """
    n = A.modulus
    for v in b:
        if isinstance(v, ResidueScalar) and v.modulus != n:
            raise ModulusMismatch(f"{v.modulus} != {n}")
    if len(b) != A.rows:
        raise ValueError(f"right-hand side of length {len(b)} for {A.rows} rows")
    rhs = [int(v) % n for v in b]
    diag, c, V = _diagonalize_mod(A.tolist(), rhs, n)
    if any(c[len(diag):]):
        return None
    y = [0] * A.cols
    for i, d in enumerate(diag):
        g = gcd(d, n)
        if c[i] % g:
            return None
        # d*y == c (mod n)  <=>  (d/g)*y == c/g (mod n/g)
        ng = n // g
        y[i] = (c[i] // g) * pow(d // g % ng, -1, ng) % ng if ng > 1 else 0
    x = [int(v) for v in (V @ np.array(y, dtype=np.int64)) % n]
    if A.apply(x) != rhs:
        raise AssertionError("solve_mod_n produced a non-solution")
    return x
