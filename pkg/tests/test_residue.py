import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from solvtower.residue import ModulusMismatch, ResidueMatrix, ResidueScalar, smith_normal_form, solve_mod_n


def _det(M):
    # exact integer determinant by cofactor expansion; matrices here are at most 4x4
    if not M:
        return 1
    return sum((-1) ** j * M[0][j] * _det([row[:j] + row[j + 1:] for row in M[1:]]) for j in range(len(M)))


def _matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def test_scalar_reduces_and_rejects_mixed_moduli():
    a = ResidueScalar(7, 5)
    assert a.value == 2
    assert (a + 4).value == 1
    assert (a * a).value == 4
    assert (-a).value == 3
    assert ResidueScalar(-1, 6).signed() == -1
    with pytest.raises(ModulusMismatch):
        a + ResidueScalar(1, 4)
    assert ResidueScalar(5, 6).is_unit() and not ResidueScalar(4, 6).is_unit()


def test_matrix_entries_share_modulus():
    M = ResidueMatrix([[5, -1], [2, 3]], 4)
    assert M.tolist() == [[1, 3], [2, 3]]
    assert M[0, 1] == ResidueScalar(3, 4)
    assert (M @ ResidueMatrix.identity(2, 4)) == M
    with pytest.raises(ModulusMismatch):
        M @ ResidueMatrix.identity(2, 5)


def test_solve_identity():
    assert solve_mod_n(ResidueMatrix.identity(3, 4), [1, 2, 3]) == [1, 2, 3]


def test_solve_unsolvable_scalar():
    assert solve_mod_n(ResidueMatrix([[2]], 4), [1]) is None


def test_solve_two_solutions_scalar():
    brute = [x for x in range(4) if 2 * x % 4 == 2]
    assert brute == [1, 3]
    assert solve_mod_n(ResidueMatrix([[2]], 4), [2])[0] in brute


def test_solve_rejects_foreign_residue():
    with pytest.raises(ModulusMismatch):
        solve_mod_n(ResidueMatrix([[1]], 4), [ResidueScalar(1, 3)])


@pytest.mark.parametrize("A,diag", [
    ([[2, 0], [0, 3]], [1, 6]),
    ([[0, 0], [0, 0]], [0, 0]),
    ([[1, 0, 0], [0, 1, 0], [0, 0, 1]], [1, 1, 1]),
    ([[2, 4, 4], [-6, 6, 12], [10, -4, -16]], [2, 6, 12]),
])
def test_smith_examples(A, diag):
    U, D, V = smith_normal_form(A)
    assert _matmul(_matmul(U, A), V) == D
    assert [D[i][i] for i in range(len(diag))] == diag
    if not any(any(row) for row in A):
        assert U == V == [[int(i == j) for j in range(len(A))] for i in range(len(A))]


@settings(max_examples=150)
@given(st.integers(1, 4).flatmap(lambda r: st.integers(1, 4).flatmap(
    lambda c: st.lists(st.lists(st.integers(-30, 30), min_size=c, max_size=c), min_size=r, max_size=r))))
def test_smith_postconditions(A):
    U, D, V = smith_normal_form(A)
    assert _matmul(_matmul(U, A), V) == D
    assert abs(_det(U)) == 1 and abs(_det(V)) == 1
    rows, cols = len(A), len(A[0])
    diag = [D[i][i] for i in range(min(rows, cols))]
    assert all(D[i][j] == 0 for i in range(rows) for j in range(cols) if i != j)
    assert all(d >= 0 for d in diag)
    for a, b in zip(diag, diag[1:]):
        assert (b == 0) if a == 0 else (b % a == 0)


def _exhaustive(A, b, n):
    cols = len(A[0])
    return [x for x in itertools.product(range(n), repeat=cols)
            if all(sum(a * v for a, v in zip(row, x)) % n == bi % n for row, bi in zip(A, b))]


@settings(max_examples=300)
@given(st.integers(2, 6), st.integers(1, 4), st.integers(1, 4), st.data())
def test_solve_matches_exhaustive_search(n, rows, cols, data):
    A = data.draw(st.lists(st.lists(st.integers(0, n - 1), min_size=cols, max_size=cols),
                           min_size=rows, max_size=rows))
    b = data.draw(st.lists(st.integers(0, n - 1), min_size=rows, max_size=rows))
    brute = _exhaustive(A, b, n)
    x = solve_mod_n(ResidueMatrix(A, n), b)
    if brute:
        assert x is not None and tuple(x) in brute
    else:
        assert x is None


def test_solve_consistent_systems_random():
    # construct b = A x0 so a solution is guaranteed
    rng = np.random.default_rng(3)
    for _ in range(200):
        n = int(rng.integers(2, 13))
        r, c = rng.integers(1, 7, size=2)
        A = rng.integers(0, n, size=(r, c)).tolist()
        x0 = rng.integers(0, n, size=c).tolist()
        b = ResidueMatrix(A, n).apply(x0)
        x = solve_mod_n(ResidueMatrix(A, n), b)
        assert x is not None and ResidueMatrix(A, n).apply(x) == b
