import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from solvtower.groups import (GroupWord, InvariantViolation, SizeCapError, bfs_enumerate, make_abelian,
                              make_trivial)
from solvtower.magnus import MagnusElement


class Perm(tuple):
    """Permutation in image form, composed left to right like the BFS expects."""

    def __mul__(self, other):
        return Perm(other[i] for i in self)

    def inverse(self):
        out = [0] * len(self)
        for i, j in enumerate(self):
            out[j] = i
        return Perm(out)


def test_trivial_group():
    g = make_trivial()
    assert g.order == 1
    assert g.multiply(0, 0) == 0 and g.invert(0) == 0
    assert g.generator_ids == (g.identity_id, g.identity_id)
    g.check_axioms()


@pytest.mark.parametrize("m,n", [(1, 5), (2, 2), (2, 6), (3, 3)])
def test_abelian_group(m, n):
    g = make_abelian(m, n)
    assert g.order == n**m
    assert g.identity_id == 0 and g.vector(0) == (0,) * m
    for i, x in enumerate(g.generators):
        assert g.vector(x) == tuple(int(j == i) for j in range(m))
        assert g.power(x, n) == 0 and all(g.power(x, k) for k in range(1, n))
    g.check_axioms()
    # componentwise addition against an explicit vector oracle
    for a, b in itertools.product(range(g.order), repeat=2):
        assert g.vector(g.multiply(a, b)) == tuple((u + v) % n for u, v in zip(g.vector(a), g.vector(b)))


def test_make_abelian_rejects_bad_parameters():
    with pytest.raises(ValueError):
        make_abelian(2, 1)


def test_bfs_klein_four():
    a, b = Perm((1, 0, 2, 3)), Perm((0, 1, 3, 2))
    g = bfs_enumerate([a, b])
    assert g.order == 4
    g.check_axioms()


def test_bfs_symmetric_group():
    g = bfs_enumerate([Perm((1, 2, 3, 0)), Perm((1, 0, 2, 3))])
    assert g.order == 24
    g.check_axioms()
    assert g.elements[0] == Perm(range(4))
    for k in range(g.order):
        assert g.id_of(g.elements[k]) == k


def test_bfs_cap_error():
    with pytest.raises(SizeCapError) as info:
        bfs_enumerate([Perm((1, 2, 3, 0)), Perm((1, 0, 2, 3))], cap=10)
    assert info.value.bound == 10


def test_bfs_matches_magnus_group(lvl222):
    ctx = lvl222.group.ctx
    gens = [MagnusElement.generator(ctx, 2, i) for i in range(2)]
    g = bfs_enumerate(gens)
    assert g.order == lvl222.order == 128
    # the vectorised enumeration uses the same discovery order
    for k in range(g.order):
        assert g.elements[k] == lvl222.element(k)
    assert np.array_equal(g.depth, lvl222.group.depth)


def test_bfs_word_table_is_shortest(lvl222):
    g = lvl222.group
    assert all(len(g.word(k)) == g.depth[k] for k in range(g.order))
    # BFS depth equals word-length distance in the Cayley graph
    dist = {0: 0}
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for y in g.cayley[x]:
                if int(y) not in dist:
                    dist[int(y)] = dist[x] + 1
                    nxt.append(int(y))
        frontier = nxt
    assert [dist[k] for k in range(g.order)] == g.depth.tolist()


def test_word_table_evaluates_to_itself(lvl222):
    g = lvl222.group
    table = g.word_table
    assert len(table) == g.order
    assert all(g.evaluate(w) == k for k, w in table.items())


def test_axioms_sampled_on_large_level(lvl223):
    lvl223.group.check_axioms(sample=3000, seed=1)


def test_axioms_detect_broken_group():
    g = make_abelian(2, 3)
    g.multiply_many = lambda a, b: np.zeros(np.broadcast(np.asarray(a), np.asarray(b)).shape, dtype=np.int64)
    with pytest.raises(InvariantViolation):
        g.check_axioms()


def test_word_parse_and_render():
    w = GroupWord.parse("x1 x2^-1 x1^2")
    assert w.letters == ((1, 1), (2, -1), (1, 1), (1, 1))
    assert str(w) == "x1 x2^-1 x1 x1"
    assert str(GroupWord()) == "e"
    c = GroupWord.parse("[x1,x2]")
    assert str(c) == "x1 x2 x1^-1 x2^-1"
    assert GroupWord.parse("[[x1,x2],x1]") == c.commutator(GroupWord.parse("x1"))
    with pytest.raises(ValueError):
        GroupWord.parse("y1")
    with pytest.raises(ValueError):
        GroupWord(((0, 1),))


letters = st.lists(st.tuples(st.integers(1, 2), st.sampled_from([1, -1])), max_size=12)


@given(letters)
def test_word_inverse_reduces_to_empty(ls):
    w = GroupWord(tuple(ls))
    assert (w * w.inverse()).reduced() == GroupWord()
    assert str(GroupWord.parse(str(w))) == str(w)


@given(letters, letters)
def test_evaluate_is_multiplicative(lvl222, a, b):
    g = lvl222.group
    u, v = GroupWord(tuple(a)), GroupWord(tuple(b))
    assert g.evaluate(u * v) == g.multiply(g.evaluate(u), g.evaluate(v))
    assert g.evaluate(u.inverse()) == g.invert(g.evaluate(u))


def test_subgroup_and_centralizer_helpers(lvl222):
    g = lvl222.group
    x, y = g.generators
    assert g.subgroup_closure([x]).size == 4
    assert g.subgroup_closure([x, y]).size == 128
    z = g.centralizer([x, y])
    brute = [k for k in range(g.order) if all(g.multiply(k, s) == g.multiply(s, k) for s in (x, y))]
    assert z.tolist() == brute
    n = g.normal_closure([g.commutator(x, y)])
    assert all(g.multiply(g.multiply(s, int(k)), g.invert(s)) in set(n.tolist()) for k in n for s in (x, y))
