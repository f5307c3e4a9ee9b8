#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""Permutation groups and the groups L2(Q) = PSL(2,Q).

Two views of L2(Q) are kept in step:

* permutations of the projective line GF(Q) u {inf} (point Q is inf), used
  for stabilizer chains (order, membership, generation);
* normalized 2x2 matrices packed into int64 keys, used for every vectorized
  scan over group elements (cosets, absolute elements, centralizers).

Products are read left to right: ``x * y`` applies x first. A matrix M acts
on row vectors, (u:v) -> (u:v)M, so matrix products and permutation products
agree.
"""

import logging
from dataclasses import dataclass
from math import gcd

import numpy as np

from finfield import ff_nullspace, field_of_order, split_order

SCAN_CHUNK = 262_144
MAX_COSET_SUBGROUP = 1500


class GroupError(ValueError):
    """Invalid group input (degrees, non-involutions, non-subgroups, bad orders)."""


# ----------------------------
# Permutations
# ----------------------------
class Perm:
    """Bijection of 0..N-1 stored as an image array."""

    __slots__ = ("image",)

    def __init__(self, image):
        arr = np.asarray(image, dtype=np.int64)
        if arr.ndim != 1 or not np.array_equal(np.sort(arr), np.arange(arr.size)):
            raise GroupError("image array is not a permutation")
        arr.flags.writeable = False
        self.image = arr

    @classmethod
    def identity(cls, n):
        return cls(np.arange(n))

    @classmethod
    def from_cycles(cls, n, cycles):
        img = np.arange(n)
        for cyc in cycles:
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                img[a] = b
        return cls(img)

    @property
    def degree(self):
        return self.image.size

    def __call__(self, x):
        return int(self.image[x])

    def __mul__(self, other):
        if self.degree != other.degree:
            raise GroupError(f"degree mismatch: {self.degree} vs {other.degree}")
        return Perm(other.image[self.image])

    def inverse(self):
        inv = np.empty_like(self.image)
        inv[self.image] = np.arange(self.degree)
        return Perm(inv)

    def __pow__(self, e):
        result, base = Perm.identity(self.degree), (self if e >= 0 else self.inverse())
        e = abs(e)
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def is_identity(self):
        return bool((self.image == np.arange(self.degree)).all())

    def order(self):
        k, p = 1, self
        while not p.is_identity():
            p = p * self
            k += 1
        return k

    def __eq__(self, other):
        return isinstance(other, Perm) and np.array_equal(self.image, other.image)

    def __hash__(self):
        return hash(self.image.tobytes())

    def __repr__(self):
        return f"Perm({self.image.tolist()})"


# ----------------------------
# Stabilizer chains
# ----------------------------
class _Level:
    __slots__ = ("base", "gens", "trans", "inv", "checked")

    def __init__(self, base):
        self.base = base
        self.gens = []
        self.trans = {}
        self.inv = {}
        self.checked = set()


class PermGroup:
    """Permutation group with a deterministic Schreier-Sims stabilizer chain.

    The chain is built on first use and reused afterwards.
    """

    def __init__(self, generators, degree=None):
        arrays = []
        for g in generators:
            arr = g.image if isinstance(g, Perm) else np.asarray(g, dtype=np.int64)
            arrays.append(arr)
        if degree is None:
            if not arrays:
                raise GroupError("degree needed for a group without generators")
            degree = arrays[0].size
        for arr in arrays:
            if arr.size != degree:
                raise GroupError(f"generator of degree {arr.size} in a group of degree {degree}")
        self.degree = degree
        self.generators = tuple(Perm(a) for a in arrays)
        self._levels = None
        self._identity = np.arange(degree)

    # -- chain construction
    def _extend_orbit(self, level):
        frontier = list(level.trans)
        while frontier:
            pt = frontier.pop()
            t = level.trans[pt]
            for s in level.gens:
                img = int(s[pt])
                if img not in level.trans:
                    u = s[t]
                    level.trans[img] = u
                    inv = np.empty_like(u)
                    inv[u] = self._identity
                    level.inv[img] = inv
                    frontier.append(img)

    def _new_level(self, levels, perm):
        moved = np.flatnonzero(perm != self._identity)
        level = _Level(int(moved[0]))
        level.trans[level.base] = self._identity.copy()
        level.inv[level.base] = self._identity.copy()
        levels.append(level)
        return level

    def _sift(self, levels, h, start):
        for k in range(start, len(levels)):
            p = int(h[levels[k].base])
            if p not in levels[k].trans:
                return h, k
            h = levels[k].inv[p][h]
        return h, len(levels)

    def _check_level(self, levels, i):
        level = levels[i]
        for pt in list(level.trans):
            for gi, s in enumerate(level.gens):
                if (pt, gi) in level.checked:
                    continue
                level.checked.add((pt, gi))
                img = int(s[pt])
                h = level.inv[img][s[level.trans[pt]]]
                residue, drop = self._sift(levels, h, i + 1)
                if not np.array_equal(residue, self._identity):
                    return residue, drop
        return None

    def _chain(self):
        if self._levels is not None:
            return self._levels
        levels = []
        gens = [g.image for g in self.generators if not g.is_identity()]
        if gens:
            first = self._new_level(levels, gens[0])
            first.gens.extend(gens)
            self._extend_orbit(first)
            i = 0
            while i >= 0:
                found = self._check_level(levels, i)
                if found is None:
                    i -= 1
                    continue
                residue, drop = found
                if drop == len(levels):
                    self._new_level(levels, residue)
                for j in range(i + 1, drop + 1):
                    levels[j].gens.append(residue)
                    self._extend_orbit(levels[j])
                i = drop
        self._levels = levels
        return levels

    # -- queries
    def order(self):
        size = 1
        for level in self._chain():
            size *= len(level.trans)
        return size

    def base(self):
        return [level.base for level in self._chain()]

    def contains(self, x):
        arr = x.image if isinstance(x, Perm) else np.asarray(x, dtype=np.int64)
        if arr.size != self.degree:
            raise GroupError(f"degree mismatch: {arr.size} vs {self.degree}")
        levels = self._chain()
        residue, drop = self._sift(levels, arr, 0)
        return drop == len(levels) and np.array_equal(residue, self._identity)

    def orbit(self, point):
        seen = {point}
        frontier = [point]
        while frontier:
            x = frontier.pop()
            for g in self.generators:
                y = g(x)
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
        return sorted(seen)


def subgroup_gen(elems, degree=None):
    return PermGroup(list(elems), degree=degree)


def order(group):
    return group.order()


def contains(group, x):
    return group.contains(x)


# ----------------------------
# L2(Q) as normalized matrices
# ----------------------------
def psl2_order(Q):
    return Q * (Q * Q - 1) // gcd(2, Q - 1)


class PSL2Group(PermGroup):
    """L2(Q) acting on the Q+1 points of the projective line.

    Elements of PGL(2,Q) are normalized so that a = 1, or a = 0 and b = 1;
    the key of [[a, b], [c, d]] is ((a Q + b) Q + c) Q + d.
    """

    def __init__(self, Q):
        p, n = split_order(Q)
        self.Q = Q
        self.p = p
        self.e = n
        self.F = field_of_order(Q)
        gens = self._generator_matrices()
        self.generator_keys = tuple(int(k) for k in gens)
        super().__init__([self.perm_of(k) for k in self.generator_keys], degree=Q + 1)
        self._elements = None

    # -- matrix plumbing
    def keys(self, a, b, c, d):
        Q = self.Q
        return ((np.asarray(a, dtype=np.int64) * Q + b) * Q + c) * Q + d

    def unpack(self, keys):
        keys = np.asarray(keys, dtype=np.int64)
        Q = self.Q
        return keys // Q ** 3, (keys // Q ** 2) % Q, (keys // Q) % Q, keys % Q

    def normalize(self, a, b, c, d):
        F = self.F
        a, b, c, d = (np.asarray(x, dtype=np.int64) for x in (a, b, c, d))
        s = np.where(a != 0, F.inv[a], F.inv[b])
        return self.keys(F.mul[s, a], F.mul[s, b], F.mul[s, c], F.mul[s, d])

    def mul(self, x, y):
        """Key of the product x y (x applied first)."""
        F = self.F
        a1, b1, c1, d1 = self.unpack(x)
        a2, b2, c2, d2 = self.unpack(y)
        return self.normalize(F.add[F.mul[a1, a2], F.mul[b1, c2]], F.add[F.mul[a1, b2], F.mul[b1, d2]],
                              F.add[F.mul[c1, a2], F.mul[d1, c2]], F.add[F.mul[c1, b2], F.mul[d1, d2]])

    def inv(self, x):
        a, b, c, d = self.unpack(x)
        F = self.F
        return self.normalize(d, F.neg[b], F.neg[c], a)

    def frob(self, x, j=1):
        """Entrywise x -> x^(p^j)."""
        t = self.F.frob[j % self.e]
        a, b, c, d = self.unpack(x)
        return self.keys(t[a], t[b], t[c], t[d])

    def det(self, x):
        a, b, c, d = self.unpack(x)
        return self.F.sub[self.F.mul[a, d], self.F.mul[b, c]]

    def trace(self, x):
        a, b, c, d = self.unpack(x)
        return self.F.add[a, d]

    def conj(self, x, g):
        """g^-1 x g."""
        return self.mul(self.mul(self.inv(g), x), g)

    def in_psl(self, x):
        det = self.det(x)
        if self.p == 2:
            return det != 0
        return self.F.nonzero_squares[det]

    @property
    def identity_key(self):
        return int(self.keys(1, 0, 0, 1))

    def matrix(self, key):
        return tuple(int(v) for v in self.unpack(key))

    def key_of(self, a, b, c, d):
        return int(self.normalize(a, b, c, d))

    # -- element enumeration
    def iter_pgl(self, chunk=SCAN_CHUNK):
        """All keys of PGL(2,Q) in chunks."""
        Q = self.Q
        F = self.F
        span = np.arange(Q, dtype=np.int64)
        step = max(1, chunk // (Q * Q))
        for b0 in range(0, Q, step):
            b, c, d = np.meshgrid(span[b0:b0 + step], span, span, indexing="ij")
            b, c, d = b.ravel(), c.ravel(), d.ravel()
            ok = F.sub[d, F.mul[b, c]] != 0
            yield self.keys(1, b[ok], c[ok], d[ok])
        c, d = np.meshgrid(span[1:], span, indexing="ij")
        yield self.keys(0, 1, c.ravel(), d.ravel())

    def iter_elements(self, chunk=SCAN_CHUNK):
        for keys in self.iter_pgl(chunk):
            yield keys[self.in_psl(keys)]

    def elements(self):
        if self._elements is None:
            self._elements = np.sort(np.concatenate(list(self.iter_elements())))
            self._elements.flags.writeable = False
        return self._elements

    def involutions(self):
        """All involutions: trace 0, not the identity."""
        F = self.F
        Q = self.Q
        span = np.arange(Q, dtype=np.int64)
        b, c = np.meshgrid(span, span, indexing="ij")
        b, c = b.ravel(), c.ravel()
        minus_one = int(F.neg[1])
        ok = F.sub[minus_one, F.mul[b, c]] != 0
        keys = [self.keys(1, b[ok], c[ok], minus_one)]
        keys.append(self.keys(0, 1, span[1:], 0))
        keys = np.concatenate(keys)
        keys = keys[self.in_psl(keys) & (keys != self.identity_key)]
        return np.sort(keys)

    # -- permutation view
    def perm_images(self, keys):
        """Rows of images on the projective line, one per key."""
        Q, F = self.Q, self.F
        a, b, c, d = (np.asarray(v)[:, None] for v in self.unpack(np.atleast_1d(keys)))
        x = np.arange(Q)[None, :]
        num = F.add[F.mul[x, a], c]
        den = F.add[F.mul[x, b], d]
        fin = np.where(den != 0, F.mul[num, F.inv[den]], Q)
        inf = np.where(b[:, 0] != 0, F.mul[a[:, 0], F.inv[b[:, 0]]], Q)
        return np.concatenate([fin, inf[:, None]], axis=1)

    def perm_of(self, key):
        return Perm(self.perm_images(np.array([key]))[0])

    def _generator_matrices(self):
        F, Q = self.F, self.Q
        gens = set()
        # unitriangular matrices over an additive basis
        for i in range(self.e):
            gens.add(self.key_of(1, 0, self.p ** i, 1))
        # a generator of the diagonal torus
        omega = next((w for w in range(2, Q) if _multiplicative_order(F, w) == Q - 1), None)
        if omega is not None:
            gens.add(self.key_of(omega, 0, 0, int(F.inv[omega])))
        gens.add(self.key_of(0, 1, int(F.neg[1]), 0))
        return sorted(gens)

    def subgroup(self, keys):
        """PermGroup generated by the given element keys."""
        return PermGroup([self.perm_of(int(k)) for k in np.atleast_1d(keys)], degree=self.Q + 1)

    def closure(self, keys, limit=100_000):
        """All element keys of the subgroup generated by ``keys`` (small subgroups only)."""
        gens = np.unique(np.atleast_1d(np.asarray(keys, dtype=np.int64)))
        elems = np.array([self.identity_key], dtype=np.int64)
        frontier = elems
        while frontier.size:
            prods = np.unique(self.mul(np.repeat(frontier, gens.size), np.tile(gens, frontier.size)))
            frontier = np.setdiff1d(prods, elems)
            elems = np.union1d(elems, frontier)
            if elems.size > limit:
                raise GroupError(f"subgroup closure exceeded {limit} elements")
        return elems


def _multiplicative_order(F, w):
    k, x = 1, w
    while x != 1:
        x = int(F.mul[x, w])
        k += 1
    return k


def psl2(Q):
    """L2(Q) with its permutation and matrix views."""
    if Q > 729:
        raise GroupError(f"invalid Q={Q}: larger than 729")
    try:
        return PSL2Group(Q)
    except ValueError as e:
        raise GroupError(f"invalid Q={Q}: {e}") from e


# ----------------------------
# Frobenius automorphism
# ----------------------------
@dataclass(frozen=True)
class GroupAuto:
    """A permutation f of the projective line normalizing G; acts by g -> f^-1 g f."""

    group: PSL2Group
    perm: Perm
    power: int

    def apply(self, g):
        return self.perm.inverse() * g * self.perm

    def apply_key(self, keys, times=1):
        j = (times * _log_p(self.group, self.power)) % self.group.e
        return self.group.frob(keys, j)

    def order(self):
        return self.perm.order()

    def verify(self):
        """Conjugation maps every generator of G into G."""
        return all(self.group.contains(self.apply(g)) for g in self.group.generators)

    def fixed_subgroup(self):
        """Keys of the elements of G commuting with the automorphism."""
        G = self.group
        keys = G.elements()
        return keys[G.frob(keys, _log_p(G, self.power)) == keys]

    def is_inner(self):
        """True iff some g in G induces the same automorphism."""
        G = self.group
        gens = np.array(G.generator_keys)
        targets = self.apply_key(gens)
        for chunk in G.iter_elements():
            hit = np.ones(chunk.size, dtype=bool)
            for s, t in zip(gens, targets):
                hit &= G.conj(np.full(chunk.size, s), chunk) == t
            if hit.any():
                return True
        return False


def _log_p(G, r):
    m = 0
    while r > 1:
        r //= G.p
        m += 1
    return m


def frobenius_auto(Q, r, group=None):
    """x -> x^r on GF(Q) u {inf}, with Q = r^3."""
    if r ** 3 != Q:
        raise GroupError(f"Q={Q} is not the cube of r={r}")
    G = group if group is not None else psl2(Q)
    table = G.F.frob[_log_p(G, r) % G.e]
    image = np.concatenate([np.asarray(table, dtype=np.int64), [Q]])
    return GroupAuto(G, Perm(image), r)


# ----------------------------
# Cosets
# ----------------------------
class CosetSpace:
    """Right cosets H x of a small subgroup H given by its element keys."""

    def __init__(self, G, H):
        self.G = G
        self.H = np.unique(np.asarray(H, dtype=np.int64))
        if self.H.size > MAX_COSET_SUBGROUP:
            raise GroupError(f"subgroup too large for coset tables: {self.H.size}")
        if G.identity_key not in set(self.H.tolist()):
            raise GroupError("subgroup does not contain the identity")
        prods = G.mul(np.repeat(self.H, self.H.size), np.tile(self.H, self.H.size))
        if not np.isin(prods, self.H).all():
            raise GroupError("element list is not closed under multiplication")

    def rep(self, x):
        """Smallest key of H x, vectorized over x."""
        x = np.asarray(x, dtype=np.int64)
        best = None
        for h in self.H:
            k = self.G.mul(np.full(x.shape, h), x)
            best = k if best is None else np.minimum(best, k)
        return best

    def count(self):
        return psl2_order(self.G.Q) // self.H.size

    def all_reps(self):
        return np.unique(self.rep(self.G.elements()))


def coset_space(G, H):
    return CosetSpace(G, H)


def rep(cs, x):
    return int(cs.rep(np.array([x]))[0])


# ----------------------------
# Automorphisms swapping a pair of involutions
# ----------------------------
def _conjugators(G, sigma, rho):
    """Keys of all M in PGL(2,Q) with M sigma M^-1 = rho (projectively)."""
    F = G.F
    s = G.matrix(sigma)
    r = G.matrix(rho)
    # M sigma = lam rho M with lam^2 = det(sigma) / det(rho)
    target = int(F.mul[G.det(sigma), F.inv[G.det(rho)]])
    lams = [lam for lam in range(1, G.Q) if int(F.mul[lam, lam]) == target]
    found = set()
    for lam in lams:
        lr = [int(F.mul[lam, v]) for v in r]
        rows = []
        # unknown M = [[m0, m1], [m2, m3]]; entries of M s - lam r M
        for i in range(2):
            for j in range(2):
                row = [0, 0, 0, 0]
                for k in range(2):
                    row[2 * i + k] = int(F.add[row[2 * i + k], s[2 * k + j]])
                    row[2 * k + j] = int(F.sub[row[2 * k + j], lr[2 * i + k]])
                rows.append(row)
        basis = ff_nullspace(F, rows)
        if not basis:
            continue
        coeffs = np.indices((G.Q,) * len(basis)).reshape(len(basis), -1).T
        vecs = np.zeros((coeffs.shape[0], 4), dtype=np.int64)
        for t, vec in enumerate(basis):
            vecs = F.add[vecs, F.mul[coeffs[:, t, None], np.asarray(vec)[None, :]]]
        m0, m1, m2, m3 = vecs.T
        ok = F.sub[F.mul[m0, m3], F.mul[m1, m2]] != 0
        if ok.any():
            found.update(G.normalize(m0[ok], m1[ok], m2[ok], m3[ok]).tolist())
    return np.array(sorted(found), dtype=np.int64)


def _require_involution(G, x, name):
    if x == G.identity_key or int(G.mul(np.array([x]), np.array([x]))[0]) != G.identity_key:
        raise GroupError(f"{name} is not an involution")


def transporter_exists(G, rho0, rho2, rho1):
    """Is there an automorphism of L2(Q) swapping rho0, rho2 and fixing rho1?

    Aut(L2(Q)) is realized as PGamma L(2,Q): pairs (M, j) acting by
    x -> M phi_j(x) M^-1 with phi_j the j-th power of the prime Frobenius.
    """
    for name, x in (("rho0", rho0), ("rho1", rho1), ("rho2", rho2)):
        _require_involution(G, int(x), name)
    for j in range(G.e):
        fr = [int(G.frob(np.array([x]), j)[0]) for x in (rho0, rho2, rho1)]
        cands = _conjugators(G, fr[2], int(rho1))
        if not cands.size:
            continue
        # M phi_j(x) M^-1 = conj(phi_j(x), M^-1)
        minv = G.inv(cands)
        a = G.conj(np.full(cands.size, fr[0]), minv) == rho2
        b = G.conj(np.full(cands.size, fr[1]), minv) == rho0
        if (a & b).any():
            logging.debug(f"Swapping automorphism found with Frobenius power {j}")
            return True
    return False


def centralizer_of_frobenius(G, r):
    """PGL(2,q) x Gal(GF(Q)/GF(p)) as (keys, field powers), q = r."""
    F = G.F
    sub = np.asarray(F.subfield_codes(r), dtype=np.int64)
    b, c, d = (v.ravel() for v in np.meshgrid(sub, sub, sub, indexing="ij"))
    ok = F.sub[d, F.mul[b, c]] != 0
    keys = [G.keys(1, b[ok], c[ok], d[ok])]
    c, d = (v.ravel() for v in np.meshgrid(sub[sub != 0], sub, indexing="ij"))
    keys.append(G.keys(0, 1, c, d))
    return np.sort(np.concatenate(keys)), list(range(G.e))
