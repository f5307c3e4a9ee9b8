import numpy as np
import pytest
from sympy.combinatorics import Permutation, PermutationGroup

from permgroup import (CosetSpace, GroupError, Perm, PermGroup, centralizer_of_frobenius, contains, coset_space,
                       frobenius_auto, order, psl2, psl2_order, rep, subgroup_gen, transporter_exists)


def sympy_order(group):
    return PermutationGroup([Permutation(g.image.tolist()) for g in group.generators]).order()


def test_perm_product_applies_left_first():
    a = Perm.from_cycles(3, [[0, 1]])
    b = Perm.from_cycles(3, [[1, 2]])
    assert (a * b)(0) == 2
    assert (a * b).inverse() == b * a
    assert (a * b).order() == 3
    assert (a * b) ** 3 == Perm.identity(3)


def test_not_a_permutation():
    with pytest.raises(GroupError):
        Perm([0, 0, 1])


def test_symmetric_group_order():
    n = 7
    cycle = Perm([(i + 1) % n for i in range(n)])
    swap = Perm.from_cycles(n, [[0, 1]])
    G = PermGroup([cycle, swap])
    assert G.order() == 5040
    assert G.contains(Perm.from_cycles(n, [[2, 5, 6]]))


def test_alternating_group_membership():
    G = PermGroup([Perm.from_cycles(5, [[0, 1, 2]]), Perm.from_cycles(5, [[0, 1, 2, 3, 4]])])
    assert G.order() == 60
    assert not G.contains(Perm.from_cycles(5, [[0, 1]]))
    assert G.orbit(3) == [0, 1, 2, 3, 4]


@pytest.mark.parametrize("Q", [2, 3, 4, 5, 7, 8, 9, 16, 25, 27])
def test_psl2_order_matches_sympy(Q):
    G = psl2(Q)
    assert G.order() == psl2_order(Q)
    assert sympy_order(G) == psl2_order(Q)
    assert G.elements().size == psl2_order(Q)


@pytest.mark.parametrize("Q,count", [(3, 3), (5, 15), (7, 21), (8, 63), (9, 45)])
def test_involution_counts(Q, count):
    assert psl2(Q).involutions().size == count


def test_key_product_matches_permutation_product():
    G = psl2(8)
    keys = G.elements()
    rng = np.random.default_rng(0)
    x, y = rng.choice(keys, 20), rng.choice(keys, 20)
    prods = G.mul(x, y)
    for a, b, c in zip(x, y, prods):
        assert G.perm_of(int(c)) == G.perm_of(int(a)) * G.perm_of(int(b))
    assert (G.mul(x, G.inv(x)) == G.identity_key).all()


def test_key_layout():
    G = psl2(5)
    assert G.identity_key == G.keys(1, 0, 0, 1)
    assert G.matrix(G.key_of(2, 4, 0, 3)) == (1, 2, 0, 4)


def test_invalid_q():
    with pytest.raises(GroupError):
        psl2(6)
    with pytest.raises(GroupError):
        psl2(1024)


def test_frobenius_auto():
    G = psl2(8)
    alpha = frobenius_auto(8, 2, group=G)
    assert alpha.order() == 3
    assert alpha.verify()
    assert not alpha.is_inner()
    assert alpha.fixed_subgroup().size == 6
    with pytest.raises(GroupError):
        frobenius_auto(8, 3, group=G)


def test_apply_key_matches_permutation_conjugation():
    G = psl2(8)
    alpha = frobenius_auto(8, 2, group=G)
    for key in G.elements()[:25]:
        image = int(alpha.apply_key(np.array([key]))[0])
        assert G.perm_of(image) == alpha.apply(G.perm_of(int(key)))


def test_coset_space():
    G = psl2(8)
    t = int(G.involutions()[0])
    H = G.closure([t])
    assert H.size == 2
    cs = CosetSpace(G, H)
    assert cs.count() == 252
    assert cs.all_reps().size == 252


def test_coset_space_rejects_non_subgroup():
    G = psl2(8)
    invs = G.involutions()
    with pytest.raises(GroupError):
        CosetSpace(G, [G.identity_key, int(invs[0]), int(invs[1])])


def test_transporter_identity():
    G = psl2(8)
    invs = G.involutions()
    r, s = int(invs[0]), int(invs[1])
    assert transporter_exists(G, r, r, s)


def test_transporter_requires_involutions():
    G = psl2(8)
    with pytest.raises(GroupError):
        transporter_exists(G, G.identity_key, int(G.involutions()[0]), int(G.involutions()[1]))


def test_centralizer_of_frobenius():
    G = psl2(8)
    keys, powers = centralizer_of_frobenius(G, 2)
    assert keys.size == 6
    assert powers == [0, 1, 2]


def test_functional_wrappers():
    S3 = subgroup_gen([Perm.from_cycles(3, [[0, 1]]), Perm.from_cycles(3, [[1, 2]])])
    assert order(S3) == 6
    assert contains(S3, Perm.from_cycles(3, [[0, 2, 1]]))
    with pytest.raises(GroupError):
        contains(S3, Perm.identity(4))


def test_psl2_on_five_points():
    G = psl2(4)
    assert G.degree == 5
    assert order(G) == 60


def test_rep_constant_on_cosets():
    G = psl2(8)
    cs = coset_space(G, G.closure([int(G.involutions()[0])]))
    x = G.elements()
    base = cs.rep(x)
    for h in cs.H:
        assert (cs.rep(G.mul(np.full(x.size, h), x)) == base).all()
    assert rep(cs, int(x[5])) == int(base[5])


def test_cosets_of_fixed_subfield_subgroup():
    G = psl2(8)
    H = frobenius_auto(8, 2, group=G).fixed_subgroup()
    cs = coset_space(G, H)
    assert cs.count() == 84
    assert cs.all_reps().size == 84
