#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""Graph invariants for the small graphs produced by the pipelines.

Distances come from scipy's csgraph breadth-first searches, run in chunks of
sources so large incidence graphs never need a full distance matrix. The
automorphism group order is computed by equitable partition refinement with
individualization and orbit pruning (graphs up to MAX_AUT_VERTICES).
"""

import logging
import math
from dataclasses import dataclass, field

import networkx as nx
import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from permgroup import PermGroup

MAX_AUT_VERTICES = 400
CELLS_BUDGET = 2_000_000


class GraphError(ValueError):
    """Malformed graphs, refused sizes or non-automorphism input."""


# ----------------------------
# Graph type
# ----------------------------
class SimpleGraph:
    """Undirected loop-free graph on vertices 0..n-1 with sorted adjacency."""

    def __init__(self, n, edges=()):
        adj = [set() for _ in range(n)]
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) outside 0..{n - 1}")
            if u == v:
                raise GraphError(f"loop at vertex {u}")
            adj[u].add(v)
            adj[v].add(u)
        self.n = n
        self.adjacency = tuple(tuple(sorted(s)) for s in adj)

    def edges(self):
        return [(u, v) for u in range(self.n) for v in self.adjacency[u] if u < v]

    @property
    def edge_count(self):
        return sum(len(a) for a in self.adjacency) // 2

    def to_csr(self):
        e = self.edges()
        if not e:
            return sparse.csr_matrix((self.n, self.n), dtype=np.int8)
        u, v = np.array(e).T
        data = np.ones(2 * len(e), dtype=np.int8)
        return sparse.csr_matrix((data, (np.concatenate([u, v]), np.concatenate([v, u]))),
                                 shape=(self.n, self.n))

    def to_dense(self):
        A = np.zeros((self.n, self.n), dtype=np.int32)
        for u, v in self.edges():
            A[u, v] = A[v, u] = 1
        return A

    def to_networkx(self):
        G = nx.Graph()
        G.add_nodes_from(range(self.n))
        G.add_edges_from(self.edges())
        return G

    def relabel(self, perm):
        """Graph with vertex v renamed perm[v]."""
        return SimpleGraph(self.n, [(perm[u], perm[v]) for u, v in self.edges()])

    def __eq__(self, other):
        return isinstance(other, SimpleGraph) and self.n == other.n and self.adjacency == other.adjacency

    def __hash__(self):
        return hash((self.n, self.adjacency))

    def __repr__(self):
        return f"SimpleGraph({self.n}v, {self.edge_count}e)"


# ----------------------------
# Breadth-first metrics
# ----------------------------
def _chunk_size(matrix):
    directed_edges = max(int(matrix.nnz), 1)
    return int(max(1, min(256, CELLS_BUDGET // directed_edges)))


def bfs_profile(matrix, sources=None, chunk=None):
    """Eccentricities of ``sources`` and the exact girth of a graph.

    Girth detection per BFS row: an edge between two vertices at equal
    distance d closes a cycle of length at most 2d+1; a vertex at distance d
    with two predecessors closes one of length at most 2d. Over all sources
    the minimum is the girth.

    Args:
        matrix: symmetric scipy sparse adjacency matrix.
        sources: vertex indices (default all). Girth is exact only over all sources.
        chunk: sources per BFS batch.

    Returns:
        dict with "eccentricity" (array aligned with sources) and "girth".
    """
    matrix = sparse.csr_matrix(matrix)
    n = matrix.shape[0]
    sources = np.arange(n) if sources is None else np.asarray(sources)
    chunk = chunk or _chunk_size(matrix)
    ev = matrix.indices
    eu = np.repeat(np.arange(n), np.diff(matrix.indptr))
    head = sparse.csr_matrix((np.ones(len(ev), dtype=np.int32), (ev, np.arange(len(ev)))),
                             shape=(n, len(ev)))
    ecc = np.zeros(len(sources), dtype=np.int64)
    girth = math.inf
    for start in range(0, len(sources), chunk):
        idx = sources[start:start + chunk]
        dist = csgraph.shortest_path(matrix, method="D", unweighted=True, indices=idx)
        dist = np.atleast_2d(dist)
        ecc[start:start + len(idx)] = np.where(np.isfinite(dist), dist, -1).max(axis=1)
        if not len(ev):
            continue
        du = dist[:, eu]
        dv = dist[:, ev]
        reach = np.isfinite(dv)
        same = (du == dv) & reach
        if same.any():
            girth = min(girth, int(2 * du[same].min() + 1))
        pred = ((du + 1) == dv) & reach
        counts = np.asarray(head @ pred.T.astype(np.int32)).T
        hit = counts >= 2
        if hit.any():
            girth = min(girth, int(2 * dist[hit].min()))
    return {"eccentricity": ecc, "girth": girth}


def components(g):
    """Connected components as sorted vertex lists, ordered by smallest vertex."""
    if g.n == 0:
        return []
    _, labels = csgraph.connected_components(g.to_csr(), directed=False)
    groups = {}
    for v, lab in enumerate(labels):
        groups.setdefault(int(lab), []).append(v)
    return sorted(groups.values(), key=lambda c: c[0])


def degrees(g):
    return [len(a) for a in g.adjacency]


def girth(g):
    if g.n == 0:
        return math.inf
    return bfs_profile(g.to_csr())["girth"]


def component_metrics(g):
    """Per-component vertex/edge counts, diameter and girth."""
    out = []
    csr = g.to_csr()
    for comp in components(g):
        sub = csr[comp][:, comp]
        prof = bfs_profile(sub)
        out.append({
            "vertices": len(comp),
            "edges": int(sub.nnz // 2),
            "diameter": int(prof["eccentricity"].max()) if len(comp) else 0,
            "girth": prof["girth"],
        })
    return out


def diameter(g):
    """Largest component diameter; see is_connected for the disconnected flag."""
    metrics = component_metrics(g)
    return max((m["diameter"] for m in metrics), default=0)


def is_connected(g):
    return len(components(g)) <= 1


def is_regular(g):
    return len(set(degrees(g))) <= 1


def has_perfect_matching(g):
    matching = nx.max_weight_matching(g.to_networkx(), maxcardinality=True)
    return 2 * len(matching) == g.n


def component_shapes(g):
    """Multiset of component shapes, e.g. {"K2": 15, "C5": 12}."""
    shapes = {}
    for comp, m in zip(components(g), component_metrics(g)):
        v, e = m["vertices"], m["edges"]
        if v == 1:
            name = "K1"
        elif v == 2 and e == 1:
            name = "K2"
        elif e == v and all(len(g.adjacency[x]) == 2 for x in comp):
            name = f"C{v}"
        elif e == v - 1 and max(len(g.adjacency[x]) for x in comp) <= 2:
            name = f"P{v}"
        else:
            name = f"({v}v,{e}e)"
        shapes[name] = shapes.get(name, 0) + 1
    return dict(sorted(shapes.items()))


def graph_metrics(g):
    """JSON-ready invariants of a graph."""
    degs = degrees(g)
    comps = component_metrics(g)
    return {
        "vertices": g.n,
        "edges": g.edge_count,
        "degrees": sorted(set(degs)),
        "regular": len(set(degs)) <= 1,
        "girth": girth(g),
        "diameter": max((m["diameter"] for m in comps), default=0),
        "connected": len(comps) <= 1,
        "components": len(comps),
        "component_diameters": sorted(m["diameter"] for m in comps),
        "component_shapes": component_shapes(g),
    }


# ----------------------------
# Automorphisms
# ----------------------------
@dataclass
class AutReport:
    order: int
    generators: list = field(default_factory=list)

    def to_dict(self):
        return {"order": self.order, "generators": len(self.generators)}


def _refine(A, cells):
    """Coarsest equitable refinement of an ordered partition.

    Subcells are ordered by their neighbour-count signature, so the result is
    the same (cell by cell) for isomorphic inputs.
    """
    n = A.shape[0]
    while True:
        ind = np.zeros((n, len(cells)), dtype=np.int32)
        for i, c in enumerate(cells):
            ind[c, i] = 1
        counts = A @ ind
        new = []
        for c in cells:
            if len(c) == 1:
                new.append(c)
                continue
            sig = {}
            for v in c:
                sig.setdefault(counts[v].tobytes(), []).append(v)
            for key in sorted(sig, key=lambda k: tuple(np.frombuffer(k, dtype=np.int32))):
                new.append(sig[key])
        if len(new) == len(cells):
            return new
        cells = new


def _individualize(A, cells, v):
    out = []
    for c in cells:
        if v in c:
            out.append([v])
            rest = [w for w in c if w != v]
            if rest:
                out.append(rest)
        else:
            out.append(c)
    return _refine(A, out)


def _target_cell(cells):
    best = None
    for i, c in enumerate(cells):
        if len(c) > 1 and (best is None or len(c) < len(cells[best])):
            best = i
    return best


def _is_automorphism(A, perm):
    p = np.asarray(perm)
    return bool((A[np.ix_(p, p)] == A).all())


def _find_mapping(A, left, right):
    """Automorphism sending the left partition onto the right one, or None."""
    if [len(c) for c in left] != [len(c) for c in right]:
        return None
    t = _target_cell(left)
    if t is None:
        perm = np.empty(A.shape[0], dtype=np.int64)
        for lc, rc in zip(left, right):
            perm[lc[0]] = rc[0]
        return perm if _is_automorphism(A, perm) else None
    a = left[t][0]
    sub_left = _individualize(A, left, a)
    for b in right[t]:
        found = _find_mapping(A, sub_left, _individualize(A, right, b))
        if found is not None:
            return found
    return None


def _orbit(v, gens):
    orbit = {v}
    frontier = [v]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = int(g[x])
            if y not in orbit:
                orbit.add(y)
                frontier.append(y)
    return orbit


def _stabilizer_order(A, cells, gens):
    t = _target_cell(cells)
    if t is None:
        return 1
    target = cells[t]
    v = target[0]
    left = _individualize(A, cells, v)
    below = _stabilizer_order(A, left, gens)
    orbit = _orbit(v, gens)
    for w in target[1:]:
        if w in orbit:
            continue
        g = _find_mapping(A, left, _individualize(A, cells, w))
        if g is not None:
            gens.append(g)
            orbit = _orbit(v, gens)
    return len(orbit) * below


def aut_order(g):
    """Order and generators of Aut(g).

    Raises:
        GraphError: if the graph has more than MAX_AUT_VERTICES vertices.
    """
    if g.n > MAX_AUT_VERTICES:
        raise GraphError(f"automorphism search refused: {g.n} vertices > {MAX_AUT_VERTICES}")
    if g.n == 0:
        return AutReport(1, [])
    A = g.to_dense()
    gens = []
    order = _stabilizer_order(A, _refine(A, [list(range(g.n))]), gens)
    for gen in gens:
        if not _is_automorphism(A, gen):
            raise GraphError("automorphism search produced a non-automorphism")
    if gens:
        chain_order = PermGroup(gens, degree=g.n).order()
        if chain_order != order:
            raise GraphError(f"generator group order {chain_order} differs from search order {order}")
    logging.debug(f"Aut order {order} for {g!r} with {len(gens)} generators")
    return AutReport(order, [tuple(int(x) for x in gen) for gen in gens])


def orbits_under(g, perms, arcs=False):
    """Orbit partition of vertices (or arcs) under the group generated by ``perms``.

    Raises:
        GraphError: if some permutation is not an automorphism of g.
    """
    A = g.to_dense()
    perms = [np.asarray(p, dtype=np.int64) for p in perms]
    for p in perms:
        if p.shape != (g.n,) or sorted(p.tolist()) != list(range(g.n)) or not _is_automorphism(A, p):
            raise GraphError("input permutation is not an automorphism of the graph")
    if arcs:
        items = [(u, v) for u in range(g.n) for v in g.adjacency[u]]

        def act(item, p):
            return (int(p[item[0]]), int(p[item[1]]))
    else:
        items = list(range(g.n))

        def act(item, p):
            return int(p[item])

    index = {item: i for i, item in enumerate(items)}
    parent = list(range(len(items)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for p in perms:
        for item in items:
            a, b = find(index[item]), find(index[act(item, p)])
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups = {}
    for item in items:
        groups.setdefault(find(index[item]), []).append(item)
    return sorted((sorted(v) for v in groups.values()), key=lambda c: c[0])
