import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import reduce_fox
from solvtower.groups import GroupWord, SizeCapError
from solvtower.tower import (abelianization, all_commutators_subgroup, base_projection, build_level,
                             centralizer_of_generators, commutator_certificate_set, commutator_membership,
                             derived_subgroup, element_order, level_report, make_projection, predicted_order,
                             predicted_order_expr, separate_element)


def recursion(m, r, n):
    order = 1
    for _ in range(r):
        order = order * n ** (order * (m - 1) + 1)
    return order


@pytest.mark.parametrize("m,r,n,expected", [
    (2, 0, 5, 1), (2, 1, 2, 4), (3, 1, 2, 8), (2, 2, 2, 128), (2, 2, 3, 531441), (3, 2, 2, 2**20),
])
def test_predicted_order_examples(m, r, n, expected):
    assert predicted_order(m, r, n) == expected == recursion(m, r, n)


def test_predicted_order_level_three():
    assert predicted_order(2, 3, 2) == 128 * 2**129
    assert predicted_order_expr(2, 3, 2) == "128*2^129"
    assert predicted_order_expr(2, 0, 2) == "1"


@given(st.integers(2, 4), st.integers(0, 1), st.integers(2, 5))
def test_predicted_order_recursion(m, r, n):
    assert predicted_order(m, r + 1, n) == predicted_order(m, r, n) * n ** (predicted_order(m, r, n) * (m - 1) + 1)


def test_predicted_order_refuses_to_expand_huge_orders():
    with pytest.raises(OverflowError):
        predicted_order(2, 3, 4)
    with pytest.raises(SizeCapError):
        build_level(2, 3, 4)


def test_refusal_names_predicted_order():
    with pytest.raises(SizeCapError) as info:
        build_level(2, 3, 2)
    assert info.value.expr == "128*2^129"
    assert info.value.bound == 128 * 2**129
    with pytest.raises(SizeCapError):
        build_level(2, 2, 3, cap=1000)


def test_bad_parameters():
    for args in [(1, 1, 2), (2, -1, 2), (2, 1, 1)]:
        with pytest.raises(ValueError):
            build_level(*args)


@pytest.mark.parametrize("m,r,n", [(2, 0, 3), (2, 1, 2), (2, 1, 7), (3, 1, 3), (2, 2, 2)])
def test_small_levels(m, r, n):
    level = build_level(m, r, n)
    assert level.order == recursion(m, r, n)
    level.group.check_axioms()
    expected = n**r if r else 1
    assert [element_order(level, g) for g in level.group.generators] == [expected] * m


def test_generators_project_to_generators(lvl222, lvl223):
    for level in (lvl222, lvl223):
        proj = base_projection(level)
        assert [proj(g) for g in level.group.generators] == list(level.base.group.generators)
        assert proj.kernel().size == level.order // level.base.order


def test_element_orders(lvl222):
    g = lvl222.group
    assert element_order(lvl222, g.identity) == 1
    orders = [element_order(lvl222, k) for k in range(g.order)]
    assert all(g.order % o == 0 for o in orders)
    # oracle: repeated multiplication
    for k in range(0, g.order, 9):
        acc, steps = k, 1
        while acc != g.identity:
            acc, steps = g.multiply(acc, k), steps + 1
        assert orders[k] == steps


def test_generator_orders_level_three_nine(lvl223):
    assert [element_order(lvl223, g) for g in lvl223.group.generators] == [9, 9]


def test_abelianization_base_level():
    level = build_level(2, 1, 5)
    ab = abelianization(level)
    assert ab.invariant_factors == [5, 5]
    assert all(ab.image(k) == level.group.vector(k) for k in range(level.order))


def test_abelianization_level_two(lvl222):
    ab = abelianization(lvl222)
    assert ab.invariant_factors == [4, 4]
    assert ab.derived_subgroup.size == 128 // 16
    x, y = lvl222.group.generators
    assert ab.image(lvl222.group.multiply(x, y)) == (1, 1)
    assert np.array_equal(ab.derived_subgroup, all_commutators_subgroup(lvl222))


def test_commutator_membership_examples(lvl222):
    g = lvl222.group
    ctx = g.ctx
    one, x, y = ctx.one(), ctx.gen(0), ctx.gen(1)
    p0 = commutator_membership(lvl222, g.identity)
    assert p0 is not None and (one - y) * p0 == 0 and (x - one) * p0 == 0
    c = g.commutator(*g.generators)
    p = commutator_membership(lvl222, c)
    assert p is not None
    # p is determined up to the common annihilator of 1-y and 1-x; p = 1 works
    assert (one - y) * p == one - y and (x - one) * p == x - one
    assert commutator_membership(lvl222, g.generators[0]) is None


def test_commutator_membership_rejects_shape():
    with pytest.raises(ValueError):
        commutator_membership(build_level(2, 1, 2), 0)


@pytest.mark.parametrize("fixture", ["lvl222", "lvl223"])
def test_commutator_certificates_equal_derived_subgroup(fixture, request):
    level = request.getfixturevalue(fixture)
    assert np.array_equal(commutator_certificate_set(level), derived_subgroup(level))


def test_commutator_membership_elementwise(lvl222):
    D = set(derived_subgroup(lvl222).tolist())
    for k in range(lvl222.order):
        assert (commutator_membership(lvl222, k) is not None) == (k in D)


def test_projection_examples():
    src, dst = build_level(2, 1, 4), build_level(2, 1, 2)
    proj = make_projection(src, dst)
    for k in range(src.order):
        assert dst.group.vector(proj(k)) == tuple(v % 2 for v in src.group.vector(k))
    assert proj.kernel().size == 4
    with pytest.raises(ValueError):
        make_projection(build_level(2, 1, 3), dst)


def test_identity_projection(lvl223):
    proj = make_projection(lvl223, lvl223)
    assert np.array_equal(proj.map, np.arange(lvl223.order))


def test_projection_composite_modulus():
    proj = make_projection(build_level(3, 1, 6), build_level(3, 1, 3))
    assert proj.kernel().size == 8


def test_centralizer_of_generators(lvl222):
    g = lvl222.group
    z = centralizer_of_generators(lvl222)
    assert g.identity in z
    ids = np.arange(g.order)
    center = [k for k in range(g.order) if np.array_equal(g.multiply_many(k, ids), g.multiply_many(ids, k))]
    assert z == center


def test_centralizer_needs_magnus_level():
    with pytest.raises(ValueError):
        centralizer_of_generators(build_level(2, 1, 3))


def test_separation_examples():
    assert separate_element(GroupWord.parse("x1"), 2, 2, 2) == 1
    assert separate_element(GroupWord.parse("x1"), 2, 3, 2) == 1
    assert separate_element(GroupWord.parse("[x1,x2]"), 2, 2, 1) == 1
    assert separate_element(GroupWord.parse("x1 x1^-1"), 2, 2, 2) is None
    # x1^2 dies at (2, 1, 2) but survives at (2, 1, 4)
    assert separate_element(GroupWord.parse("x1^2"), 1, 2, 2) == 2


words = st.lists(st.tuples(st.integers(1, 2), st.sampled_from([1, -1])), max_size=10)


@settings(max_examples=40)
@given(words, st.sampled_from([2, 3]))
def test_separation_matches_fox_oracle(letters, p):
    w = GroupWord(tuple(letters))
    expected = None
    for k in (1, 2):
        exps, derivs = reduce_fox(letters, 2, p**k)
        if any(exps) or any(derivs):
            expected = k
            break
    assert separate_element(w, 2, p, 2) == expected


def test_level_report(lvl222):
    rep = level_report(lvl222)
    assert rep == {"m": 2, "r": 2, "n": 2, "order": 128, "predicted_order": 128, "generator_orders": [4, 4],
                   "abelianization": [4, 4], "derived_subgroup_order": 8, "center_order": 4}


def test_level_report_trivial():
    rep = level_report(build_level(2, 0, 5))
    assert rep["order"] == 1 and rep["abelianization"] == [] and rep["generator_orders"] == [1, 1]
