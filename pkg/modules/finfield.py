#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""Exact arithmetic in the small finite fields GF(p^n).

Elements are encoded as integer codes ``c_0 + c_1 p + ... + c_{n-1} p^(n-1)``
where ``c_i`` is the coefficient of ``x^i`` in the residue class modulo the
field polynomial. Code 0 is zero and code 1 is one. Every FieldSpec carries
full numpy operation tables so the enumeration code in the other modules can
do field arithmetic by fancy indexing.
"""

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from sympy import factorint, isprime

MAX_FIELD_ORDER = 1024

# Monic irreducible polynomials, coefficients listed from x^0 up to x^n.
IRREDUCIBLE_POLYNOMIALS = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 0, 0, 0, 1),
    (2, 7): (1, 1, 0, 0, 0, 0, 0, 1),
    (2, 8): (1, 0, 1, 1, 1, 0, 0, 0, 1),
    (2, 9): (1, 0, 0, 0, 1, 0, 0, 0, 0, 1),
    (2, 10): (1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (3, 4): (2, 0, 0, 2, 1),
    (3, 5): (1, 2, 0, 0, 0, 1),
    (3, 6): (2, 1, 0, 0, 0, 0, 1),
    (5, 2): (2, 4, 1),
    (5, 3): (3, 3, 0, 1),
    (5, 4): (2, 4, 4, 0, 1),
    (7, 2): (3, 6, 1),
    (7, 3): (4, 0, 6, 1),
    (11, 2): (2, 7, 1),
    (13, 2): (2, 12, 1),
    (17, 2): (3, 16, 1),
    (19, 2): (2, 18, 1),
    (23, 2): (5, 21, 1),
    (29, 2): (2, 24, 1),
    (31, 2): (3, 29, 1),
}

_ROW_CHUNK = 128


class FieldError(ValueError):
    """Invalid field construction or arithmetic (division by zero, mixed fields)."""


# ----------------------------
# Polynomial helpers over GF(p)
# ----------------------------
def _poly_rem(num, den, p):
    """Remainder of ``num`` modulo the monic ``den`` (coefficient lists, low to high)."""
    rem = [c % p for c in num]
    deg = len(den) - 1
    while len(rem) - 1 >= deg:
        lead = rem[-1]
        if lead:
            shift = len(rem) - 1 - deg
            for i, c in enumerate(den):
                rem[shift + i] = (rem[shift + i] - lead * c) % p
        rem.pop()
    return rem


def _is_irreducible(poly, p):
    """Trial division by every monic polynomial of degree at most n/2."""
    n = len(poly) - 1
    for d in range(1, n // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            if not any(_poly_rem(poly, list(tail) + [1], p)):
                return False
    return True


def polynomial_text(poly):
    terms = []
    for i in range(len(poly) - 1, -1, -1):
        c = poly[i]
        if not c:
            continue
        mono = "1" if i == 0 else ("x" if i == 1 else f"x^{i}")
        if i == 0:
            terms.append(str(c))
        else:
            terms.append(mono if c == 1 else f"{c}{mono}")
    return " + ".join(terms)


# ----------------------------
# Field specification
# ----------------------------
class FieldSpec:
    """GF(p^n) with precomputed add/neg/mul/inv/Frobenius tables.

    Instances are shared through :func:`ff_make`'s cache and are never
    mutated after construction; all tables are read-only numpy arrays.
    """

    def __init__(self, p, n, irreducible):
        self.p = p
        self.n = n
        self.irreducible = tuple(irreducible)
        self.order = p ** n
        N = self.order

        self._powers = p ** np.arange(n, dtype=np.int64)
        codes = np.arange(N, dtype=np.int64)
        self.digits = (codes[:, None] // self._powers[None, :]) % p

        # x^i reduced modulo the polynomial, for i < 2n - 1
        low = -np.array(self.irreducible[:n], dtype=np.int64) % p
        xpow = np.zeros((2 * n - 1, n), dtype=np.int64)
        xpow[0, 0] = 1
        for i in range(1, 2 * n - 1):
            top = xpow[i - 1, n - 1]
            xpow[i, 1:] = xpow[i - 1, :-1]
            xpow[i, 0] = 0
            xpow[i] = (xpow[i] + top * low) % p
        # columns[i][a] = digits of a * x^i
        columns = [(self.digits @ xpow[i:i + n]) % p for i in range(n)]

        add = np.empty((N, N), dtype=np.int32)
        mul = np.empty((N, N), dtype=np.int32)
        for start in range(0, N, _ROW_CHUNK):
            rows = slice(start, min(start + _ROW_CHUNK, N))
            a = self.digits[rows]
            add[rows] = ((a[:, None, :] + self.digits[None, :, :]) % p) @ self._powers
            acc = np.zeros((a.shape[0], N, n), dtype=np.int64)
            for i in range(n):
                acc += columns[i][rows][:, None, :] * self.digits[None, :, i, None]
            mul[rows] = (acc % p) @ self._powers
        neg = (((-self.digits) % p) @ self._powers).astype(np.int32)

        inv = np.zeros(N, dtype=np.int32)
        inv[1:] = np.argmax(mul[1:] == 1, axis=1)

        self.add = add
        self.mul = mul
        self.neg = neg
        self.inv = inv
        self.sub = add[:, neg]

        # frob[m][a] = a^(p^m)
        frob1 = self._power_table(p)
        frob = [np.arange(N, dtype=np.int32)]
        for _ in range(1, n):
            frob.append(frob1[frob[-1]])
        self.frob = tuple(frob)

        squares = np.zeros(N, dtype=bool)
        squares[mul[codes, codes]] = True
        squares[0] = False
        self.nonzero_squares = squares

        for table in (self.digits, self.add, self.mul, self.neg, self.inv, self.sub,
                      self.nonzero_squares, *self.frob):
            table.flags.writeable = False

    def _power_table(self, e):
        result = np.ones(self.order, dtype=np.int32)
        result[0] = 0 if e > 0 else 1
        base = np.arange(self.order, dtype=np.int32)
        while e:
            if e & 1:
                result = self.mul[result, base]
            base = self.mul[base, base]
            e >>= 1
        return result

    def power(self, code, e):
        """code ** e by square-and-multiply on the tables."""
        result, base = 1, int(code)
        if e < 0:
            if base == 0:
                raise FieldError("division by zero")
            base, e = int(self.inv[base]), -e
        while e:
            if e & 1:
                result = int(self.mul[result, base])
            base = int(self.mul[base, base])
            e >>= 1
        return result

    @property
    def generator_code(self):
        """Code of the residue class of x."""
        if self.n > 1:
            return self.p
        return int(-self.irreducible[0] % self.p)

    def code_of(self, coeffs):
        if len(coeffs) != self.n:
            raise FieldError(f"expected {self.n} coefficients, got {len(coeffs)}")
        return int(sum((int(c) % self.p) * self.p ** i for i, c in enumerate(coeffs)))

    def coeffs_of(self, code):
        return tuple(int(c) for c in self.digits[code])

    def element(self, value):
        if isinstance(value, (tuple, list)):
            return FieldElem(self, self.code_of(value))
        value = int(value)
        if not 0 <= value < self.order:
            raise FieldError(f"code {value} outside GF({self.order})")
        return FieldElem(self, value)

    @property
    def zero(self):
        return FieldElem(self, 0)

    @property
    def one(self):
        return FieldElem(self, 1)

    def elements(self):
        return [FieldElem(self, c) for c in range(self.order)]

    def subfield_codes(self, r):
        """Codes fixed by x -> x^r."""
        table = frobenius_table(self, r)
        return np.flatnonzero(table == np.arange(self.order))

    def __repr__(self):
        return f"FieldSpec(GF({self.p}^{self.n}) mod {polynomial_text(self.irreducible)})"


@dataclass(frozen=True)
class FieldElem:
    spec: FieldSpec
    code: int

    @property
    def coeffs(self):
        return self.spec.coeffs_of(self.code)

    def is_zero(self):
        return self.code == 0

    def __int__(self):
        return self.code

    def __repr__(self):
        return f"GF({self.spec.order})<{self.code}>"


# ----------------------------
# Construction
# ----------------------------
@lru_cache(maxsize=None)
def ff_make(p, n):
    """Return the cached FieldSpec for GF(p^n).

    Args:
        p: prime characteristic.
        n: positive extension degree.

    Returns:
        FieldSpec built from the fixed polynomial table; prime fields use x + 1.
    """
    if not isinstance(p, int) or not isprime(p):
        raise FieldError(f"characteristic {p} is not prime")
    if n < 1:
        raise FieldError(f"unsupported field: {p}^{n}")
    if n == 1 and p <= MAX_FIELD_ORDER:
        poly = (1, 1)
    elif (p, n) in IRREDUCIBLE_POLYNOMIALS:
        poly = IRREDUCIBLE_POLYNOMIALS[(p, n)]
    else:
        raise FieldError(f"unsupported field: {p}^{n}")

    if poly[-1] != 1 or not _is_irreducible(poly, p):
        raise FieldError(f"table polynomial {polynomial_text(poly)} is not irreducible over GF({p})")

    spec = FieldSpec(p, n, poly)
    x = spec.generator_code
    if spec.power(x, spec.order - 1) != 1:
        raise FieldError(f"x has order not dividing {spec.order - 1} in GF({p}^{n})")
    logging.debug(f"Built GF({p}^{n}) with {polynomial_text(poly)}")
    return spec


def split_order(order):
    """Split a prime power into (p, n)."""
    if not isinstance(order, int) or order < 2:
        raise FieldError(f"invalid field order: {order}")
    factors = factorint(order)
    if len(factors) != 1:
        raise FieldError(f"{order} is not a prime power")
    (p, n), = factors.items()
    return int(p), int(n)


def field_of_order(order):
    p, n = split_order(order)
    return ff_make(p, n)


# ----------------------------
# Element operations
# ----------------------------
def _same_field(x, y):
    if x.spec is not y.spec:
        raise FieldError(f"field mismatch: GF({x.spec.order}) vs GF({y.spec.order})")
    return x.spec


def ff_add(x, y):
    F = _same_field(x, y)
    return FieldElem(F, int(F.add[x.code, y.code]))


def ff_sub(x, y):
    F = _same_field(x, y)
    return FieldElem(F, int(F.sub[x.code, y.code]))


def ff_mul(x, y):
    F = _same_field(x, y)
    return FieldElem(F, int(F.mul[x.code, y.code]))


def ff_neg(x):
    return FieldElem(x.spec, int(x.spec.neg[x.code]))


def ff_inv(x):
    if x.code == 0:
        raise FieldError("division by zero")
    return FieldElem(x.spec, int(x.spec.inv[x.code]))


def ff_pow(x, e):
    return FieldElem(x.spec, x.spec.power(x.code, e))


def _frobenius_exponent(spec, r):
    m, rest = 0, r
    while rest > 1 and rest % spec.p == 0:
        rest //= spec.p
        m += 1
    if rest != 1 or m > spec.n:
        raise FieldError(f"frobenius power {r} is not p^m with p={spec.p}, m<={spec.n}")
    return m


def frobenius_table(spec, r):
    """Lookup table of x -> x^r for r a power of the characteristic."""
    return spec.frob[_frobenius_exponent(spec, r) % spec.n]


def frobenius(x, r):
    """Return x^r, a field automorphism when r = p^m."""
    return FieldElem(x.spec, int(frobenius_table(x.spec, r)[x.code]))


# ----------------------------
# Linear algebra
# ----------------------------
def ff_nullspace(spec, rows):
    """Basis (list of code tuples) of the right null space of a small matrix."""
    m = [[int(v) for v in row] for row in rows]
    if not m:
        return []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        s = int(spec.inv[m[r][c]])
        m[r] = [int(spec.mul[s, v]) for v in m[r]]
        for i in range(len(m)):
            f = m[i][c]
            if i != r and f:
                m[i] = [int(spec.sub[m[i][k], spec.mul[f, m[r][k]]]) for k in range(ncols)]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    basis = []
    for free in (c for c in range(ncols) if c not in pivots):
        v = [0] * ncols
        v[free] = 1
        for i, pc in enumerate(pivots):
            v[pc] = int(spec.neg[m[i][free]])
        basis.append(tuple(v))
    return basis


def supported_orders():
    orders = {p ** n for (p, n) in IRREDUCIBLE_POLYNOMIALS}
    return sorted(orders)
