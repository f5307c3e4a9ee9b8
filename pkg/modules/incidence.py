#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""Typed incidence systems, flags, residues and absolute geometries.

An incidence system is a set of elements 0..n-1, a type for each element
(an index into ``type_names``) and a symmetric incidence relation between
elements of distinct types. The relation is kept as a scipy CSR matrix so the
rank-2 parameters can be read off with breadth-first sweeps.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from graphtools import bfs_profile

MAX_FLAG_ELEMENTS = 100_000


class IncidenceError(ValueError):
    """Invalid incidence data: same-type incidences, non-flags, bad correlations."""


# ----------------------------
# Incidence systems
# ----------------------------
class IncidenceSystem:
    def __init__(self, types, pairs, type_names=None, labels=None, origin=None):
        self.types = np.asarray(types, dtype=np.int64).reshape(-1)
        n = self.types.size
        if type_names is None:
            type_names = tuple(str(t) for t in range(int(self.types.max()) + 1 if n else 0))
        self.type_names = tuple(type_names)
        if n and (self.types.min() < 0 or self.types.max() >= len(self.type_names)):
            raise IncidenceError("element type outside the type set")
        pairs = np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2)
        if pairs.size:
            if pairs.min() < 0 or pairs.max() >= n:
                raise IncidenceError("incidence pair refers to a missing element")
            same = self.types[pairs[:, 0]] == self.types[pairs[:, 1]]
            if same.any():
                a, b = pairs[np.argmax(same)]
                raise IncidenceError(f"elements {a} and {b} are incident but share type "
                                     f"{self.type_names[self.types[a]]}")
        rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
        cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
        mat = sparse.csr_matrix((np.ones(rows.size, dtype=np.int8), (rows, cols)), shape=(n, n))
        mat.sum_duplicates()
        mat.data[:] = 1
        self.matrix = mat
        self.labels = list(labels) if labels is not None else list(range(n))
        self.origin = np.asarray(origin if origin is not None else np.arange(n), dtype=np.int64)
        self._neighbours = None

    @property
    def n(self):
        return self.types.size

    @property
    def rank(self):
        return len(self.type_names)

    def neighbours(self, x):
        if self._neighbours is None:
            m = self.matrix
            self._neighbours = [frozenset(m.indices[m.indptr[v]:m.indptr[v + 1]].tolist())
                                for v in range(self.n)]
        return self._neighbours[x]

    def incident(self, x, y):
        return y in self.neighbours(x)

    def elements_of_type(self, t):
        return np.flatnonzero(self.types == t)

    def pairs(self):
        """Incident pairs (i, j), i < j, sorted."""
        coo = sparse.triu(self.matrix, k=1).tocoo()
        order = np.lexsort((coo.col, coo.row))
        return np.stack([coo.row[order], coo.col[order]], axis=1).astype(np.int64)

    def common(self, elements):
        """Elements incident to every element of ``elements`` (all elements if empty)."""
        elements = list(elements)
        if not elements:
            return set(range(self.n))
        out = set(self.neighbours(elements[0]))
        for x in elements[1:]:
            out &= self.neighbours(x)
        return out

    def is_flag(self, elements):
        elements = list(elements)
        if len(set(self.types[elements].tolist())) != len(elements):
            return False
        return all(self.incident(a, b) for i, a in enumerate(elements) for b in elements[i + 1:])

    def __repr__(self):
        counts = ", ".join(f"{name}:{int((self.types == t).sum())}" for t, name in enumerate(self.type_names))
        return f"IncidenceSystem({counts}; {self.matrix.nnz // 2} incidences)"


@dataclass(frozen=True)
class Flag:
    elements: tuple
    types: frozenset


def make_flag(s, elements):
    elements = tuple(sorted(int(x) for x in elements))
    if not s.is_flag(elements):
        raise IncidenceError(f"elements {list(elements)} do not form a flag")
    return Flag(elements, frozenset(int(s.types[x]) for x in elements))


def _as_flag(s, F):
    return F if isinstance(F, Flag) else make_flag(s, F)


def iter_flags(s):
    """Every nonempty flag once, as an increasing tuple of elements."""
    stack = [((x,), s.neighbours(x)) for x in range(s.n - 1, -1, -1)]
    while stack:
        flag, cand = stack.pop()
        yield flag
        last = flag[-1]
        for y in sorted((c for c in cand if c > last), reverse=True):
            stack.append((flag + (y,), cand & s.neighbours(y)))


def chambers(s, limit=None):
    """Chambers in canonical order, at most ``limit`` of them."""
    found = 0
    for flag in iter_flags(s):
        if len(flag) == s.rank:
            yield make_flag(s, flag)
            found += 1
            if limit is not None and found >= limit:
                return


def is_geometry(s):
    """Every maximal flag is a chamber."""
    if s.n > MAX_FLAG_ELEMENTS:
        raise IncidenceError(f"flag search refused: {s.n} elements > {MAX_FLAG_ELEMENTS}")
    if s.n == 0:
        return s.rank == 0
    for flag in iter_flags(s):
        if len(flag) < s.rank and not s.common(flag):
            logging.debug(f"Maximal flag {flag} of {s!r} is not a chamber")
            return False
    return True


def residue(s, F):
    """Induced system on the elements incident to every element of F."""
    F = _as_flag(s, F)
    keep = np.array(sorted(s.common(F.elements) - set(F.elements)), dtype=np.int64)
    kept_types = [t for t in range(s.rank) if t not in F.types]
    type_map = {t: k for k, t in enumerate(kept_types)}
    names = [s.type_names[t] for t in kept_types]
    if not keep.size:
        return IncidenceSystem([], [], type_names=names)
    coo = sparse.triu(s.matrix[keep][:, keep], k=1).tocoo()
    return IncidenceSystem(
        [type_map[int(s.types[x])] for x in keep],
        zip(coo.row.tolist(), coo.col.tolist()),
        type_names=names,
        labels=[s.labels[x] for x in keep],
        origin=s.origin[keep],
    )


# ----------------------------
# Rank-2 parameters
# ----------------------------
@dataclass(frozen=True)
class Rank2Params:
    """(d_P, g, d_L) with math.inf for unbounded values.

    For a disconnected system the diameters are the maxima over components and
    g the minimum; ``components`` keeps the per-component triples.
    """

    d_P: float
    g: float
    d_L: float
    connected: bool = True
    components: tuple = field(default=(), compare=False)
    exact: bool = field(default=True, compare=False)

    def as_tuple(self):
        return (self.d_P, self.g, self.d_L)

    def to_dict(self):
        return {
            "d_P": self.d_P,
            "g": self.g,
            "d_L": self.d_L,
            "connected": self.connected,
            "components": [list(c) for c in self.components],
            "exact": self.exact,
        }


def rank2_params(s, point_type=0, sample=None):
    """(d_P, g, d_L) of a rank-2 system from breadth-first sweeps of its incidence graph.

    With ``sample`` only that many evenly spaced sources of each type are swept
    per component; the result is then exact only for flag-transitive systems
    and is marked ``exact=False``.
    """
    if s.rank != 2:
        raise IncidenceError(f"rank2_params needs a rank-2 system, got rank {s.rank}")
    _, labels = csgraph.connected_components(s.matrix, directed=False)
    per_component = []
    for lab in np.unique(labels):
        comp = np.flatnonzero(labels == lab)
        sub = s.matrix[comp][:, comp]
        is_point = s.types[comp] == point_type
        sources = None
        if sample is not None:
            sources = np.concatenate([_spread(np.flatnonzero(is_point), sample),
                                      _spread(np.flatnonzero(~is_point), sample)])
            is_point = is_point[sources]
        prof = bfs_profile(sub, sources=sources)
        ecc = prof["eccentricity"]
        d_P = int(ecc[is_point].max()) if is_point.any() else 0
        d_L = int(ecc[~is_point].max()) if (~is_point).any() else 0
        g = prof["girth"] // 2 if math.isfinite(prof["girth"]) else math.inf
        per_component.append((d_P, g, d_L))
    if not per_component:
        return Rank2Params(0, math.inf, 0, True, ())
    comps = tuple(per_component)
    params = Rank2Params(
        max(c[0] for c in comps),
        min(c[1] for c in comps),
        max(c[2] for c in comps),
        len(comps) == 1,
        comps,
        sample is None,
    )
    if not params.connected:
        logging.info(f"Rank-2 system has {len(comps)} components; reporting max diameters and min gonality")
    return params


def _spread(ids, size):
    if ids.size <= size:
        return ids
    return ids[np.linspace(0, ids.size - 1, size).astype(np.int64)]


def graph_to_rank2(g):
    """Vertices become points, edges become lines on their two endpoints."""
    edges = g.edges()
    pairs = []
    for k, (u, v) in enumerate(edges):
        pairs.append((u, g.n + k))
        pairs.append((v, g.n + k))
    types = [0] * g.n + [1] * len(edges)
    labels = list(range(g.n)) + [tuple(e) for e in edges]
    return IncidenceSystem(types, pairs, type_names=("P", "L"), labels=labels)


def residue_parameters(s, samples=8):
    """rank2_params of the rank-2 residues of the first ``samples`` chambers, keyed by type pair."""
    if s.rank <= 2:
        raise IncidenceError(f"residue_parameters needs rank > 2, got rank {s.rank}")
    found = {}
    for chamber in chambers(s, limit=samples):
        by_type = {int(s.types[x]): x for x in chamber.elements}
        for i in range(s.rank):
            for j in range(i + 1, s.rank):
                cotype = [by_type[t] for t in range(s.rank) if t not in (i, j)]
                res = residue(s, cotype)
                params = rank2_params(res).as_tuple()
                key = f"{s.type_names[i]}-{s.type_names[j]}"
                found.setdefault(key, set()).add(params)
    return {k: sorted(v) for k, v in sorted(found.items())}


# ----------------------------
# Correlations and absolute geometries
# ----------------------------
@dataclass(frozen=True)
class Correlation:
    perm: tuple
    type_perm: tuple

    def __call__(self, x):
        return self.perm[x]

    def power(self, k):
        perm = np.asarray(self.perm)
        tperm = np.asarray(self.type_perm)
        out, tout = np.arange(perm.size), np.arange(tperm.size)
        for _ in range(k):
            out, tout = perm[out], tperm[tout]
        return Correlation(tuple(int(x) for x in out), tuple(int(t) for t in tout))


def correlation(s, perm):
    """Validate an element permutation as a correlation of ``s``."""
    perm = np.asarray(perm, dtype=np.int64)
    if perm.shape != (s.n,) or not np.array_equal(np.sort(perm), np.arange(s.n)):
        raise IncidenceError("correlation is not a permutation of the elements")
    type_perm = {}
    for x in range(s.n):
        t, u = int(s.types[x]), int(s.types[perm[x]])
        if type_perm.setdefault(t, u) != u:
            raise IncidenceError(f"correlation sends type {s.type_names[t]} to two types")
    if len(set(type_perm.values())) != len(type_perm):
        raise IncidenceError("correlation does not permute the types")
    pairs = s.pairs()
    if pairs.size:
        mapped = s.matrix[perm[pairs[:, 0]], perm[pairs[:, 1]]]
        if not np.asarray(mapped).all():
            raise IncidenceError("correlation does not preserve incidence")
    tperm = [type_perm.get(t, t) for t in range(s.rank)]
    return Correlation(tuple(int(x) for x in perm), tuple(tperm))


def _orbits(perm):
    perm = np.asarray(perm)
    seen = np.zeros(perm.size, dtype=bool)
    out = []
    for x in range(perm.size):
        if seen[x]:
            continue
        orbit = [x]
        seen[x] = True
        y = int(perm[x])
        while y != x:
            orbit.append(y)
            seen[y] = True
            y = int(perm[y])
        out.append(tuple(sorted(orbit)))
    return out


def absolute_geometry(s, phi):
    """Geometry of the minimal nonempty phi-invariant flags.

    A minimal invariant flag is a single phi-orbit of elements that is itself a
    flag; its type is the orbit of the permutation induced on types. Two such
    flags are incident iff their union is a flag.
    """
    if not isinstance(phi, Correlation):
        phi = correlation(s, phi)
    elif len(phi.perm) != s.n:
        raise IncidenceError("correlation acts on a different system")
    flag_orbits = [o for o in _orbits(phi.perm) if s.is_flag(o)]
    realized = sorted({frozenset(int(s.types[x]) for x in o) for o in flag_orbits}, key=min)
    type_index = {k: i for i, k in enumerate(realized)}
    type_names = ["+".join(s.type_names[t] for t in sorted(k)) for k in realized]
    owner = {}
    for i, o in enumerate(flag_orbits):
        for x in o:
            owner[x] = i
    pairs = set()
    for i, o in enumerate(flag_orbits):
        cand = {owner[y] for y in s.neighbours(o[0]) if y in owner}
        for j in cand:
            if j > i and all(s.incident(a, b) for a in o for b in flag_orbits[j]):
                pairs.add((i, j))
    types = [type_index[frozenset(int(s.types[x]) for x in o)] for o in flag_orbits]
    logging.info(f"Absolute geometry: {len(flag_orbits)} invariant flags, {len(pairs)} incidences")
    return IncidenceSystem(types, sorted(pairs), type_names=type_names,
                           labels=[tuple(s.labels[x] for x in o) for o in flag_orbits])
