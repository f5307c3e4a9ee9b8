#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""Points, lines and planes of PG(6,q) and PG(7,q) around the D4 quadric.

Coordinates are integer field codes (see finfield). The scalar API works on
ProjPoint / PlueckerLine values; the ``*_rows`` helpers do the same work on
numpy arrays of coordinate rows and are what the enumeration code uses.

Conventions:
    Q  : X0X4 + X1X5 + X2X6 + X3X7 = 0 in PG(7,q)
    Q' : X0X4 + X1X5 + X2X6 - X3^2 = 0 in PG(6,q)  (Q cut by X3 + X7 = 0)
    Grassmann coordinates X_ij = x_i y_j - x_j y_i, stored for i < j.
"""

import itertools
import logging
from dataclasses import dataclass

import numpy as np

from finfield import FieldElem

PAIRS = tuple(itertools.combinations(range(7), 2))
PAIR_INDEX = {pair: k for k, pair in enumerate(PAIRS)}


class GeometryError(ValueError):
    """Wrong ambient dimension, degenerate spans or corrupted models."""


# ----------------------------
# Row helpers (vectorized)
# ----------------------------
def normalize_rows(F, rows):
    """Scale each nonzero row so its first nonzero coordinate is 1."""
    rows = np.asarray(rows)
    nz = rows != 0
    if not nz.any(axis=-1).all():
        raise GeometryError("zero vector is not a projective point")
    lead = np.take_along_axis(rows, np.argmax(nz, axis=-1)[..., None], axis=-1)
    return F.mul[F.inv[lead], rows]


def row_keys(rows, q):
    """Integer key of each coordinate row (base-q positional, first coordinate most significant)."""
    rows = np.asarray(rows, dtype=np.int64)
    weights = q ** np.arange(rows.shape[-1] - 1, -1, -1, dtype=np.int64)
    return rows @ weights


def enumerate_points(F, dim):
    """All points of PG(dim-1, q), normalized and sorted lexicographically."""
    q = F.order
    blocks = []
    for lead in range(dim):
        free = dim - lead - 1
        tail = np.indices((q,) * free).reshape(free, -1).T if free else np.zeros((1, 0), dtype=np.int64)
        block = np.zeros((tail.shape[0], dim), dtype=np.int64)
        block[:, lead] = 1
        block[:, lead + 1:] = tail
        blocks.append(block)
    pts = np.concatenate(blocks)
    order = np.argsort(row_keys(pts, q), kind="stable")
    return pts[order]


def _dot(F, X, Y, pairs):
    """Sum of X_i * Y_j over the given index pairs (broadcasting)."""
    total = None
    for i, j in pairs:
        term = F.mul[X[..., i], Y[..., j]]
        total = term if total is None else F.add[total, term]
    return total


def quadric_rows(F, X):
    return _dot(F, X, X, ((0, 4), (1, 5), (2, 6), (3, 7)))


def parabolic_rows(F, X):
    return F.sub[_dot(F, X, X, ((0, 4), (1, 5), (2, 6))), F.mul[X[..., 3], X[..., 3]]]


def polar_rows(F, X, Y):
    """Polar form of Q': Q'(X+Y) - Q'(X) - Q'(Y)."""
    s = _dot(F, X, Y, ((0, 4), (4, 0), (1, 5), (5, 1), (2, 6), (6, 2)))
    two_x3y3 = F.mul[F.add[1, 1], F.mul[X[..., 3], Y[..., 3]]]
    return F.sub[s, two_x3y3]


def _det2(F, X, Y, i, j):
    return F.sub[F.mul[X[..., i], Y[..., j]], F.mul[X[..., j], Y[..., i]]]


def trilinear_kernel_rows(F, X, Y):
    """Coefficient vector of Z -> T(X, Y, Z), shape (..., 8)."""
    m, a, s = F.mul, F.add, F.sub
    c = [None] * 8
    c[0] = a[a[_det2(F, X, Y, 1, 2), m[X[..., 3], Y[..., 4]]], m[Y[..., 7], X[..., 4]]]
    c[1] = a[s[0, _det2(F, X, Y, 0, 2)], a[m[X[..., 3], Y[..., 5]], m[Y[..., 7], X[..., 5]]]]
    c[2] = a[a[_det2(F, X, Y, 0, 1), m[X[..., 3], Y[..., 6]]], m[Y[..., 7], X[..., 6]]]
    c[4] = a[a[_det2(F, X, Y, 5, 6), m[X[..., 7], Y[..., 0]]], m[Y[..., 3], X[..., 0]]]
    c[5] = a[s[0, _det2(F, X, Y, 4, 6)], a[m[X[..., 7], Y[..., 1]], m[Y[..., 3], X[..., 1]]]]
    c[6] = a[a[_det2(F, X, Y, 4, 5), m[X[..., 7], Y[..., 2]]], m[Y[..., 3], X[..., 2]]]
    c[3] = s[_dot(F, Y, X, ((0, 4), (1, 5), (2, 6))), m[X[..., 3], Y[..., 3]]]
    c[7] = s[_dot(F, X, Y, ((0, 4), (1, 5), (2, 6))), m[X[..., 7], Y[..., 7]]]
    return np.stack(np.broadcast_arrays(*c), axis=-1)


def trilinear_rows(F, X, Y, Z):
    kernel = trilinear_kernel_rows(F, X, Y)
    return _dot(F, kernel, Z, tuple((k, k) for k in range(8)))


def pluecker_rows(F, A, B):
    """Grassmann coordinates X_ij (i < j) of the lines A_k B_k, shape (..., 21)."""
    return np.stack([_det2(F, A, B, i, j) for i, j in PAIRS], axis=-1)


def grassmann_absolute_rows(F, gr):
    """Six linear relations characterizing absolute lines on Q'."""
    def g(i, j):
        return gr[..., PAIR_INDEX[(i, j)]]

    neg = F.neg
    return ((g(1, 2) == g(3, 4))            # X12 = X34
            & (g(4, 5) == g(2, 3))          # X54 = X32
            & (neg[g(0, 2)] == g(3, 5))     # X20 = X35
            & (g(5, 6) == g(0, 3))          # X65 = X30
            & (g(0, 1) == g(3, 6))          # X01 = X36
            & (g(4, 6) == neg[g(1, 3)]))    # X46 = X31


def embed_parabolic_rows(F, X):
    """PG(6,q) -> hyperplane X3 + X7 = 0 of PG(7,q)."""
    X = np.asarray(X)
    return np.concatenate([X, F.neg[X[..., 3:4]]], axis=-1)


def span_rows(F, basis):
    """All normalized points spanned by the rows of ``basis`` (unique, sorted)."""
    basis = np.asarray(basis)
    k = basis.shape[0]
    coeffs = enumerate_points(F, k)
    acc = np.zeros((coeffs.shape[0], basis.shape[1]), dtype=np.int64)
    for i in range(k):
        acc = F.add[acc, F.mul[coeffs[:, i, None], basis[i][None, :]]]
    if (acc == 0).all(axis=1).any():
        raise GeometryError("spanning points are linearly dependent")
    pts = normalize_rows(F, acc)
    keys, first = np.unique(row_keys(pts, F.order), return_index=True)
    return pts[first]


# ----------------------------
# Value types
# ----------------------------
@dataclass(frozen=True)
class ProjPoint:
    spec: object
    coords: tuple

    @classmethod
    def of(cls, spec, coords):
        vec = np.array([int(c) for c in coords], dtype=np.int64)
        return cls(spec, tuple(int(c) for c in normalize_rows(spec, vec)))

    @property
    def dim(self):
        return len(self.coords)

    def vector(self):
        return np.array(self.coords, dtype=np.int64)

    def __repr__(self):
        return f"P{self.coords}"


@dataclass(frozen=True)
class PlueckerLine:
    spec: object
    basis: tuple
    gr: tuple

    @property
    def dim(self):
        return self.basis[0].dim

    def entry(self, i, j):
        """X_ij with X_ji = -X_ij resolved on read."""
        if i == j:
            return 0
        if i < j:
            return self.gr[PAIRS_BY_DIM[self.dim][(i, j)]]
        return int(self.spec.neg[self.gr[PAIRS_BY_DIM[self.dim][(j, i)]]])


@dataclass(frozen=True)
class PlaneSpan:
    spec: object
    spanning: tuple
    points: tuple


PAIRS_BY_DIM = {d: {pair: k for k, pair in enumerate(itertools.combinations(range(d), 2))}
                for d in (7, 8)}


def unit_point(spec, i, dim=7):
    coords = [0] * dim
    coords[i] = 1
    return ProjPoint(spec, tuple(coords))


def _require_dim(P, dim):
    if P.dim != dim:
        raise GeometryError(f"expected a point of PG({dim - 1},q), got dimension {P.dim}")


# ----------------------------
# Scalar operations
# ----------------------------
def quadric_value(P):
    _require_dim(P, 8)
    return FieldElem(P.spec, int(quadric_rows(P.spec, P.vector())))


def parabolic_value(P):
    _require_dim(P, 7)
    return FieldElem(P.spec, int(parabolic_rows(P.spec, P.vector())))


def trilinear(X, Y, Z):
    for P in (X, Y, Z):
        _require_dim(P, 8)
    return FieldElem(X.spec, int(trilinear_rows(X.spec, X.vector(), Y.vector(), Z.vector())))


def trilinear_kernel(X, Y):
    _require_dim(X, 8)
    _require_dim(Y, 8)
    return tuple(int(c) for c in trilinear_kernel_rows(X.spec, X.vector(), Y.vector()))


def _canonical_gr(F, gr):
    return tuple(int(c) for c in normalize_rows(F, np.asarray(gr)))


def _gr_of(F, P, R):
    dim = P.dim
    pairs = itertools.combinations(range(dim), 2)
    return [int(F.sub[F.mul[P.coords[i], R.coords[j]], F.mul[P.coords[j], R.coords[i]]]) for i, j in pairs]


def _line_point_rows(F, A, B):
    lam = np.arange(F.order)
    rows = F.add[B[None, :], F.mul[lam[:, None], A[None, :]]]
    pts = np.concatenate([A[None, :], normalize_rows(F, rows)])
    order = np.argsort(row_keys(pts, F.order))
    return pts[order]


def line_through(P, R):
    """Canonical line PR: basis = two smallest points, gr scaled to first nonzero 1."""
    if P.dim != R.dim:
        raise GeometryError("points live in different ambient spaces")
    if P == R:
        raise GeometryError("a line needs two distinct points")
    F = P.spec
    rows = _line_point_rows(F, P.vector(), R.vector())
    basis = (ProjPoint(F, tuple(int(c) for c in rows[0])), ProjPoint(F, tuple(int(c) for c in rows[1])))
    return PlueckerLine(F, basis, _canonical_gr(F, _gr_of(F, P, R)))


def line_points(l):
    F = l.spec
    rows = _line_point_rows(F, l.basis[0].vector(), l.basis[1].vector())
    return tuple(ProjPoint(F, tuple(int(c) for c in r)) for r in rows)


def line_on_parabolic(l):
    if l.dim != 7:
        raise GeometryError("line_on_parabolic needs a line of PG(6,q)")
    return all(parabolic_value(P).is_zero() for P in line_points(l))


def grassmann_absolute(l):
    """True iff the line on Q' satisfies the six absolute-line relations."""
    if not line_on_parabolic(l):
        raise GeometryError(f"line {l.basis} does not lie on the parabolic quadric")
    return bool(grassmann_absolute_rows(l.spec, np.asarray(l.gr)))


def plane_span(P, R, S):
    F = P.spec
    basis = np.stack([P.vector(), R.vector(), S.vector()])
    pts = span_rows(F, basis)
    if pts.shape[0] != F.order ** 2 + F.order + 1:
        raise GeometryError("spanning points are collinear")
    return PlaneSpan(F, (P, R, S), tuple(ProjPoint(F, tuple(int(c) for c in r)) for r in pts))


# ----------------------------
# Validation of the trilinear form
# ----------------------------
def quadric_points(F):
    pts = enumerate_points(F, 8)
    return pts[quadric_rows(F, pts) == 0]


def kernel_relation(F, pts, chunk=256):
    """Boolean matrix R[i, j] = T(pts_i, pts_j, .) vanishes identically."""
    n = pts.shape[0]
    rel = np.zeros((n, n), dtype=bool)
    for start in range(0, n, chunk):
        X = pts[start:start + chunk, None, :]
        kern = trilinear_kernel_rows(F, X, pts[None, :, :])
        rel[start:start + chunk] = ~kern.any(axis=-1)
    return rel


def validate_trilinear_form(F):
    """Every point of Q is incident, via T, with q^3+q^2+q+1 points of Q.

    The relation T(X, Y, .) = 0 is only invariant under cyclic shifts of the
    arguments, so rows and columns are counted separately. The diagonal must
    be the (q^6-1)/(q-1) points of the hyperplane section.

    Returns a report dict; ``ok`` is False if the form is wrong.
    """
    q = F.order
    expected = q ** 3 + q ** 2 + q + 1
    pts = quadric_points(F)
    rel = kernel_relation(F, pts)
    report = {
        "q": q,
        "quadric_points": int(pts.shape[0]),
        "expected_per_point": expected,
        "counts": sorted(set(int(c) for c in rel.sum(axis=1))),
        "column_counts": sorted(set(int(c) for c in rel.sum(axis=0))),
        "diagonal": int(np.diagonal(rel).sum()),
        "symmetric": bool((rel == rel.T).all()),
    }
    report["ok"] = (report["counts"] == [expected] and report["column_counts"] == [expected]
                    and report["diagonal"] == (q ** 6 - 1) // (q - 1))
    if not report["ok"]:
        logging.error(f"Trilinear form validation failed for q={q}: {report}")
    return report


def self_kernel_report(F):
    """Which points X of Q have T(X, X, .) identically zero.

    Compared against the hyperplane section X3 + X7 = 0.
    """
    pts = quadric_points(F)
    kern = trilinear_kernel_rows(F, pts, pts)
    self_zero = ~kern.any(axis=-1)
    on_hyperplane = F.add[pts[:, 3], pts[:, 7]] == 0
    report = {
        "q": F.order,
        "quadric_points": int(pts.shape[0]),
        "self_incident": int(self_zero.sum()),
        "hyperplane_section": int(on_hyperplane.sum()),
        "coincide": bool((self_zero == on_hyperplane).all()),
    }
    logging.info(f"Self-incident points for q={F.order}: {report['self_incident']} "
                 f"(hyperplane section {report['hyperplane_section']}, coincide={report['coincide']})")
    return report


def all_or_one_counts(F, points, line_rows):
    """For P off a line l (both on Q'), count points R of l with PR on Q'.

    Args:
        points: (m, 7) coordinate rows of points P.
        line_rows: (m, q+1, 7) coordinate rows of the points of each line l.

    Returns:
        (m,) array; each entry is 1 or q+1 on a quadric.
    """
    B = polar_rows(F, points[:, None, :], line_rows)
    return (B == 0).sum(axis=1)
