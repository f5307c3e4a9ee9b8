import numpy as np
import pytest
from sympy import factorint, isprime

from finfield import (MAX_FIELD_ORDER, FieldError, IRREDUCIBLE_POLYNOMIALS, ff_add, ff_inv, ff_make, ff_mul, ff_neg,
                      ff_nullspace, ff_pow, ff_sub, field_of_order, frobenius, split_order)


@pytest.mark.parametrize("order", [2, 3, 4, 5, 7, 8, 9, 16, 25, 27, 64, 125])
def test_field_axioms(order):
    F = field_of_order(order)
    N = F.order
    codes = np.arange(N)
    assert (F.add[0] == codes).all()
    assert (F.mul[1] == codes).all()
    assert (F.add == F.add.T).all()
    assert (F.mul == F.mul.T).all()
    assert (F.add[codes, F.neg] == 0).all()
    assert (F.mul[codes[1:], F.inv[1:]] == 1).all()
    # multiplicative group is closed: no zero divisors
    assert (F.mul[1:, 1:] != 0).all()


@pytest.mark.parametrize("order", [8, 27, 64])
def test_distributive(order):
    F = field_of_order(order)
    a, b, c = np.meshgrid(np.arange(F.order), np.arange(F.order), np.arange(F.order), indexing="ij")
    left = F.mul[a, F.add[b, c]]
    right = F.add[F.mul[a, b], F.mul[a, c]]
    assert (left == right).all()


def test_generator_is_primitive_in_gf8():
    F = ff_make(2, 3)
    x = F.generator_code
    powers = {F.power(x, k) for k in range(7)}
    assert powers == set(range(1, 8))


def test_frobenius_fixes_prime_subfield():
    F = ff_make(2, 6)
    fixed = F.subfield_codes(4)
    assert len(fixed) == 4
    assert set(F.subfield_codes(2).tolist()) == {0, 1}


def test_frobenius_is_automorphism():
    F = ff_make(3, 3)
    for a in range(F.order):
        for b in range(F.order):
            x, y = F.element(a), F.element(b)
            assert frobenius(ff_mul(x, y), 3) == ff_mul(frobenius(x, 3), frobenius(y, 3))
    assert frobenius(F.element(5), 27) == F.element(5)


def test_element_ops():
    F = ff_make(5, 1)
    two, three = F.element(2), F.element(3)
    assert ff_add(two, three) == F.zero
    assert ff_sub(two, three) == F.element(4)
    assert ff_mul(two, three) == F.one
    assert ff_neg(two) == three
    assert ff_inv(two) == three
    assert ff_pow(two, 4) == F.one


def test_divide_by_zero():
    F = ff_make(2, 2)
    with pytest.raises(FieldError):
        ff_inv(F.zero)


def test_mixed_fields_rejected():
    with pytest.raises(FieldError):
        ff_add(ff_make(2, 2).one, ff_make(2, 3).one)


def test_nullspace_gf2():
    F = ff_make(2, 1)
    assert ff_nullspace(F, [[1, 1, 0], [0, 1, 1]]) == [(1, 1, 1)]


def test_nullspace_full_rank_is_empty():
    F = ff_make(3, 1)
    assert ff_nullspace(F, [[1, 0], [0, 1]]) == []


@pytest.mark.parametrize("order,expected", [(8, (2, 3)), (9, (3, 2)), (125, (5, 3)), (7, (7, 1))])
def test_split_order(order, expected):
    assert split_order(order) == expected


@pytest.mark.parametrize("order", [1, 6, 12, 100])
def test_split_order_rejects(order):
    with pytest.raises(FieldError):
        split_order(order)


def test_unsupported_extension():
    with pytest.raises(FieldError):
        ff_make(11, 3)
    with pytest.raises(FieldError):
        ff_make(4, 1)


def test_polynomial_table_covers_cube_fields():
    for q in (2, 3, 4, 5, 7, 9):
        p, n = split_order(q)
        assert (p, 3 * n) in IRREDUCIBLE_POLYNOMIALS


EXTENSION_ORDERS = [q for q in range(4, MAX_FIELD_ORDER + 1) if len(factorint(q)) == 1 and not isprime(q)]


def test_polynomial_table_covers_every_extension():
    assert set(IRREDUCIBLE_POLYNOMIALS) == {split_order(q) for q in EXTENSION_ORDERS}


@pytest.mark.parametrize("order", EXTENSION_ORDERS)
def test_every_extension_field_builds(order):
    F = field_of_order(order)
    assert F.order == order
    nonzero = np.arange(1, order)
    assert (F.mul[1:, 1:] != 0).all()
    assert (F.mul[nonzero, F.inv[1:]] == 1).all()
    assert F.power(F.generator_code, order - 1) == 1


def test_coeff_roundtrip():
    F = ff_make(3, 2)
    for code in range(F.order):
        assert F.code_of(F.coeffs_of(code)) == code
