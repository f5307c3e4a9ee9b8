#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""Class III maps of L2(q^3) with a Frobenius triality.

Pipeline:
    1. find_triples: involutions (rho0, rho1, rho2) with alpha = (x -> x^q)
       cycling rho0 -> rho2 -> rho0 rho2, fixing rho1, generating G and
       admitting no duality; one triple per class under the centralizer of alpha.
    2. build_delta: the coset geometry on G0 = <rho0, rho1>, G1 = <rho0, rho2>,
       G2 = <rho1, rho2>, G3 = <rho1, rho0 rho2> (vertex, edge, face, petrie).
    3. absolute_delta / moving_absolute_delta: absolute vertices are the
       cosets G0 x with alpha(x) x^-1 in G2 G0; an edge G1 y is fixed iff
       alpha(y) y^-1 in G1.

Cosets are right cosets G_i x and are named by their smallest element key.
G_i x meets G_j y iff x y^-1 lies in the product set G_i G_j.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property

import networkx as nx
import numpy as np

from graphtools import (GraphError, SimpleGraph, aut_order, component_shapes, graph_metrics,
                        has_perfect_matching, orbits_under)
from incidence import IncidenceSystem, correlation, graph_to_rank2, rank2_params
from permgroup import (SCAN_CHUNK, CosetSpace, GroupError, centralizer_of_frobenius, frobenius_auto,
                       psl2, psl2_order, transporter_exists)

SUPPORTED_Q = (2, 3, 4, 5)
LARGE_Q = (7, 9)
DEFAULT_MAX_GROUP_ORDER = 1_000_000
EXPLICIT_DELTA_MAX_ORDER = 10_000
TYPE_NAMES = ("vertex", "edge", "face", "petrie")
# alpha(G0) = G2, alpha(G1) = G1, alpha(G2) = G3, alpha(G3) = G0
ALPHA_TYPES = (2, 1, 3, 0)


class Class3Error(ValueError):
    """Unsupported q, resource refusals and broken coset data."""


# ----------------------------
# Admissible triples
# ----------------------------
@dataclass(frozen=True)
class AdmissibleTriple:
    q: int
    index: int
    rho0: int
    rho1: int
    rho2: int
    alpha: object = field(compare=False, repr=False)

    def to_dict(self, G):
        return {
            "index": self.index,
            "rho0": [list(G.matrix(self.rho0)[:2]), list(G.matrix(self.rho0)[2:])],
            "rho1": [list(G.matrix(self.rho1)[:2]), list(G.matrix(self.rho1)[2:])],
            "rho2": [list(G.matrix(self.rho2)[:2]), list(G.matrix(self.rho2)[2:])],
        }


def check_supported(q, allow_large, max_group_order):
    allowed = SUPPORTED_Q + (LARGE_Q if allow_large else ())
    if q not in allowed:
        raise Class3Error(f"unsupported q={q}: expected one of {list(allowed)}")
    size = psl2_order(q ** 3)
    if size > max_group_order and not allow_large:
        raise Class3Error(f"|L2({q ** 3})| = {size} exceeds the group order cap {max_group_order}")


def _one(x):
    return np.array([x], dtype=np.int64)


def _lookup(sorted_keys, values):
    """Positions of values in a sorted key array and a mask of the ones present."""
    values = np.asarray(values)
    pos = np.searchsorted(sorted_keys, values)
    hit = pos < sorted_keys.size
    hit[hit] = sorted_keys[pos[hit]] == values[hit]
    return pos, hit


def check_conditions(G, alpha, rho0, rho1):
    """The five admissibility conditions for (rho0, rho1, alpha(rho0))."""
    rho2 = int(alpha.apply_key(_one(rho0))[0])
    prod = int(G.mul(_one(rho0), _one(rho2))[0])
    return {
        "cycles": int(alpha.apply_key(_one(rho2))[0]) == prod and int(alpha.apply_key(_one(prod))[0]) == rho0,
        "fixes_rho1": int(alpha.apply_key(_one(rho1))[0]) == rho1,
        "commute": prod == int(G.mul(_one(rho2), _one(rho0))[0]) and rho0 != rho2,
        "generates": G.subgroup([rho0, rho1, rho2]).order() == psl2_order(G.Q),
        "no_duality": not transporter_exists(G, rho0, rho2, rho1),
    }


def _canonical_pairs(G, r0, r1, conj_keys):
    """Lexicographically smallest image of each pair (r0[k], r1[k]) under the centralizer."""
    best0 = best1 = None
    for j in range(G.e):
        f0, f1 = G.frob(r0, j), G.frob(r1, j)
        for c in conj_keys:
            c_arr = np.full(f0.shape, c)
            k0, k1 = G.conj(f0, c_arr), G.conj(f1, c_arr)
            if best0 is None:
                best0, best1 = k0, k1
            else:
                better = (k0 < best0) | ((k0 == best0) & (k1 < best1))
                best0 = np.where(better, k0, best0)
                best1 = np.where(better, k1, best1)
    return best0, best1


def find_triples(q, allow_large=False, max_group_order=DEFAULT_MAX_GROUP_ORDER):
    """One admissible triple per class, in canonical order (possibly none)."""
    check_supported(q, allow_large, max_group_order)
    Q = q ** 3
    G = psl2(Q)
    alpha = frobenius_auto(Q, q, G)
    if alpha.order() != 3:
        raise Class3Error(f"Frobenius x -> x^{q} has order {alpha.order()} on GF({Q})")
    invs = G.involutions()
    a1 = alpha.apply_key(invs)
    a2 = alpha.apply_key(invs, 2)
    commute = G.mul(invs, a1) == G.mul(a1, invs)
    rho0s = invs[(invs != a1) & commute & (a2 == G.mul(invs, a1))]
    rho1s = invs[a1 == invs]
    logging.info(f"q={q}: {invs.size} involutions, {rho0s.size} rho0 candidates, {rho1s.size} rho1 candidates")
    if not rho0s.size or not rho1s.size:
        return []

    r0 = np.repeat(rho0s, rho1s.size)
    r1 = np.tile(rho1s, rho0s.size)
    conj_keys, _ = centralizer_of_frobenius(G, q)
    c0, c1 = _canonical_pairs(G, r0, r1, conj_keys)
    classes = sorted(set(zip(c0.tolist(), c1.tolist())))
    logging.info(f"q={q}: {r0.size} candidate pairs in {len(classes)} centralizer classes")

    triples = []
    for rho0, rho1 in classes:
        cond = check_conditions(G, alpha, rho0, rho1)
        if not all(cond.values()):
            logging.debug(f"q={q}: pair ({rho0}, {rho1}) rejected: {cond}")
            continue
        rho2 = int(alpha.apply_key(_one(rho0))[0])
        triples.append(AdmissibleTriple(q, len(triples), rho0, rho1, rho2, alpha))
    logging.info(f"q={q}: {len(triples)} admissible triple classes")
    return triples


# ----------------------------
# The coset geometry
# ----------------------------
class DeltaGeometry:
    """Coset geometry of G on its four parabolic subgroups."""

    def __init__(self, triple, group=None, chunk=None):
        self.q = triple.q
        self.triple = triple
        self.alpha = triple.alpha
        self.G = group if group is not None else self.alpha.group
        self.chunk = chunk
        G = self.G
        r0, r1, r2 = triple.rho0, triple.rho1, triple.rho2
        r02 = int(G.mul(_one(r0), _one(r2))[0])
        try:
            self.subgroups = tuple(G.closure(gens) for gens in ([r0, r1], [r0, r2], [r1, r2], [r1, r02]))
            self.cosets = tuple(CosetSpace(G, H) for H in self.subgroups)
        except GroupError as e:
            raise Class3Error(f"parabolic subgroup construction failed for q={self.q}: {e}") from e
        if self.subgroups[1].size != 4:
            raise Class3Error(f"edge stabilizer has order {self.subgroups[1].size}, expected 4")
        for i, j in enumerate(ALPHA_TYPES):
            if not np.array_equal(np.sort(self.alpha.apply_key(self.subgroups[i])), self.subgroups[j]):
                raise Class3Error(f"alpha does not map G{i} onto G{j}")
        self.products = {}
        for i in range(4):
            for j in range(4):
                Hi, Hj = self.subgroups[i], self.subgroups[j]
                self.products[(i, j)] = np.unique(G.mul(np.repeat(Hi, Hj.size), np.tile(Hj, Hi.size)))
        logging.info(f"Delta for q={self.q}, triple {triple.index}: subgroup orders "
                     f"{[int(H.size) for H in self.subgroups]}")

    def orders(self):
        return [int(H.size) for H in self.subgroups]

    def coset_counts(self):
        return [cs.count() for cs in self.cosets]

    def rep(self, t, x):
        return self.cosets[t].rep(x)

    def incident(self, i, x, j, y):
        """G_i x meets G_j y, vectorized over x and y."""
        z = self.G.mul(np.asarray(x), self.G.inv(np.asarray(y)))
        return np.isin(z, self.products[(i, j)])

    def incident_reps(self, i, x, j):
        """Sorted representatives of the type-j cosets meeting G_i x."""
        H = self.subgroups[i]
        return np.unique(self.rep(j, self.G.mul(H, np.full(H.size, x))))

    def other_end(self, t):
        """An element of G1 outside G_t; G_t h y is the second type-t coset on the edge G1 y."""
        return int(np.setdiff1d(self.subgroups[1], self.subgroups[t])[0])

    # -- absolute elements by a streaming scan over G
    @cached_property
    def _scan(self):
        G, alpha = self.G, self.alpha
        found = {t: [] for t in (0, 2, 3)}
        fixed = []
        for x in G.iter_elements(self.chunk or SCAN_CHUNK):
            ax = alpha.apply_key(x)
            inv_ax = G.inv(ax)
            for t in found:
                hit = np.isin(G.mul(x, inv_ax), self.products[(t, ALPHA_TYPES[t])])
                if hit.any():
                    found[t].append(np.unique(self.rep(t, x[hit])))
            hit = np.isin(G.mul(ax, G.inv(x)), self.subgroups[1])
            if hit.any():
                fixed.append(np.unique(self.rep(1, x[hit])))
        out = {t: np.unique(np.concatenate(v)) if v else np.array([], dtype=np.int64) for t, v in found.items()}
        out[1] = np.unique(np.concatenate(fixed)) if fixed else np.array([], dtype=np.int64)
        return out

    def absolute_reps(self, t):
        """Representatives of the absolute cosets of type t (t = 1: the alpha-fixed edges)."""
        return self._scan[t]

    def is_fixed_edge(self, y):
        y = np.asarray(y)
        return np.isin(self.G.mul(self.alpha.apply_key(y), self.G.inv(y)), self.subgroups[1])

    # -- explicit incidence system (small groups)
    @cached_property
    def _elements(self):
        if psl2_order(self.G.Q) > EXPLICIT_DELTA_MAX_ORDER:
            raise Class3Error(f"explicit coset geometry refused for |G| = {psl2_order(self.G.Q)}")
        return [cs.all_reps() for cs in self.cosets]

    def element_index(self, t, keys):
        offsets = np.cumsum([0] + [r.size for r in self._elements])
        return offsets[t] + np.searchsorted(self._elements[t], keys)

    def to_incidence_system(self):
        reps = self._elements
        types = np.concatenate([np.full(r.size, t) for t, r in enumerate(reps)])
        pairs = []
        for i in range(4):
            for j in range(i + 1, 4):
                H = self.subgroups[i]
                for x in reps[i]:
                    ys = np.unique(self.rep(j, self.G.mul(H, np.full(H.size, x))))
                    a = self.element_index(i, np.full(ys.size, x))
                    b = self.element_index(j, ys)
                    pairs.append(np.stack([a, b], axis=1))
        labels = [(TYPE_NAMES[t], int(k)) for t, r in enumerate(reps) for k in r]
        return IncidenceSystem(types, np.concatenate(pairs), type_names=TYPE_NAMES, labels=labels)

    def triality(self, system=None):
        """alpha as a correlation of the explicit coset geometry: G_i x -> G_alpha(i) alpha(x)."""
        system = system if system is not None else self.to_incidence_system()
        perm = np.empty(system.n, dtype=np.int64)
        for t, r in enumerate(self._elements):
            images = self.rep(ALPHA_TYPES[t], self.alpha.apply_key(r))
            perm[self.element_index(t, r)] = self.element_index(ALPHA_TYPES[t], images)
        return correlation(system, perm)


def build_delta(q, t, chunk=None):
    if t.q != q:
        raise Class3Error(f"triple belongs to q={t.q}, not q={q}")
    return DeltaGeometry(t, chunk=chunk)


# ----------------------------
# Absolute geometries
# ----------------------------
def absolute_delta(d):
    """Absolute vertex flags {v, alpha v, alpha^2 v} and alpha-fixed edges."""
    verts = d.absolute_reps(0)
    edges = d.absolute_reps(1)
    h = d.other_end(0)
    ends = np.stack([d.rep(0, edges), d.rep(0, d.G.mul(np.full(edges.size, h), edges))], axis=1)
    pos, found = _lookup(verts, ends)
    pairs = [(int(pos[k, s]), verts.size + k) for k in range(edges.size) for s in range(2) if found[k, s]]
    system = IncidenceSystem(
        [0] * verts.size + [1] * edges.size, pairs,
        type_names=("+".join(TYPE_NAMES[t] for t in (0, 2, 3)), TYPE_NAMES[1]),
        labels=[int(v) for v in verts] + [int(e) for e in edges],
    )
    logging.info(f"Absolute geometry for q={d.q}: {verts.size} absolute vertices, {edges.size} fixed edges")
    return system


def rank2_as_graph(system):
    """Simple graph of a rank-2 system whose lines all carry two points."""
    n_points = int((system.types == 0).sum())
    edges = []
    for line in range(n_points, system.n):
        ends = sorted(system.neighbours(line))
        if len(ends) != 2:
            raise Class3Error(f"line {line} carries {len(ends)} points")
        edges.append(tuple(ends))
    return SimpleGraph(n_points, edges)


def fixed_subgroup(d):
    """Keys of L2(q), the elements of G commuting with alpha."""
    keys, _ = centralizer_of_frobenius(d.G, d.q)
    return keys[d.G.in_psl(keys)]


def absolute_structure(d, system=None):
    system = system if system is not None else absolute_delta(d)
    g = rank2_as_graph(system)
    shapes = component_shapes(g)
    return {
        "vertices": g.n,
        "fixed_edges": g.edge_count,
        "fixed_subgroup_order": int(fixed_subgroup(d).size),
        "shapes": shapes,
        "paths": shapes.get("P3", 0),
    }


@dataclass
class MovingGraph:
    q: int
    triple_index: int
    point_type: int
    vertex_keys: np.ndarray
    edge_keys: np.ndarray
    graph: SimpleGraph
    parallel_edges: int = 0

    @property
    def n(self):
        return self.graph.n

    def edges(self):
        return self.graph.edges()


def moving_absolute_delta(d, point_type=0):
    """Moving edges with both endpoints absolute; vertices = absolute cosets on some such edge."""
    if point_type == 1:
        raise Class3Error("edges are the lines of the moving absolute geometry, not its points")
    G = d.G
    absolute = d.absolute_reps(point_type)
    H = d.subgroups[point_type]
    h = d.other_end(point_type)
    v = np.repeat(absolute, H.size)
    y = G.mul(np.tile(H, absolute.size), v)
    w = d.rep(point_type, G.mul(np.full(y.size, h), y))
    _, both = _lookup(absolute, w)
    both &= w != v
    moving = both & ~d.is_fixed_edge(y)
    e = d.rep(1, y[moving])
    a, b = v[moving], w[moving]
    edge_keys, first = np.unique(e, return_index=True)
    ends = np.sort(np.stack([a[first], b[first]], axis=1), axis=1)
    keys = np.unique(ends)
    idx = np.searchsorted(keys, ends)
    pairs = {tuple(int(c) for c in row) for row in idx}
    parallel = edge_keys.size - len(pairs)
    if parallel:
        logging.warning(f"q={d.q}: {parallel} moving edges join an already joined vertex pair")
    graph = SimpleGraph(keys.size, sorted(pairs))
    logging.info(f"Moving absolute geometry for q={d.q}, triple {d.triple.index}, point type "
                 f"{TYPE_NAMES[point_type]}: {graph.n} vertices, {graph.edge_count} edges")
    return MovingGraph(d.q, d.triple.index, point_type, keys, edge_keys, graph, parallel)


def point_type_isomorphism(d, base=None, image=None):
    """The map G0 x -> G2 alpha(x) between the graphs built on vertices and on faces."""
    base = base if base is not None else moving_absolute_delta(d, 0)
    image = image if image is not None else moving_absolute_delta(d, 2)
    mapped = d.rep(2, d.alpha.apply_key(base.vertex_keys))
    pos, hit = _lookup(image.vertex_keys, mapped)
    valid = base.n == image.n and bool(hit.all())
    if valid:
        valid = base.graph.relabel(pos.tolist()) == image.graph
    iso = nx.is_isomorphic(base.graph.to_networkx(), image.graph.to_networkx())
    return {"ok": bool(valid and iso), "explicit_map": bool(valid), "networkx_isomorphic": bool(iso)}


def absolute_vertex_check(d):
    """Single incidence test v * alpha(v) against the three pairwise incidences of v, alpha v, alpha^2 v."""
    G, alpha = d.G, d.alpha
    mismatches = 0
    checked = 0
    for x in G.iter_elements():
        ax = alpha.apply_key(x)
        aax = alpha.apply_key(x, 2)
        single = d.incident(0, x, 2, ax)
        full = single & d.incident(2, ax, 3, aax) & d.incident(0, x, 3, aax)
        mismatches += int((single != full).sum())
        checked += x.size
    return {"ok": mismatches == 0, "checked": checked, "mismatches": mismatches}


def _vertex_action(d, mg, L):
    """Permutations of the graph's vertices induced by right multiplication with elements of L."""
    G = d.G
    perms = []
    for l in L:
        img = d.rep(mg.point_type, G.mul(mg.vertex_keys, np.full(mg.n, l)))
        pos, hit = _lookup(mg.vertex_keys, img)
        if not hit.all():
            raise Class3Error("fixed subgroup does not act on the moving absolute geometry")
        perms.append(pos)
    return perms


def transitivity_report(d, g):
    """Vertex and arc orbits of the alpha-fixed subgroup acting by right multiplication."""
    L = fixed_subgroup(d)
    perms = _vertex_action(d, g, L)
    try:
        vertex_orbits = orbits_under(g.graph, perms)
        arc_orbits = orbits_under(g.graph, perms, arcs=True)
    except GraphError as e:
        raise Class3Error(f"fixed subgroup action is not by automorphisms: {e}") from e
    return {
        "group_order": int(L.size),
        "vertex_orbits": len(vertex_orbits),
        "arc_orbits": len(arc_orbits),
        "vertex_transitive": len(vertex_orbits) == 1,
        "arc_transitive": len(arc_orbits) == 1 and g.graph.edge_count > 0,
    }


def moving_graph_report(d, mg):
    """Invariants of a moving absolute graph as a JSON-ready dict."""
    metrics = graph_metrics(mg.graph)
    metrics["parallel_edges"] = mg.parallel_edges
    metrics["rank2"] = list(rank2_params(graph_to_rank2(mg.graph)).as_tuple()) if mg.n else []
    try:
        metrics["aut_order"] = aut_order(mg.graph).order
    except GraphError as e:
        logging.info(f"Skipping automorphism group: {e}")
        metrics["aut_order"] = None
    metrics.update(transitivity_report(d, mg))
    metrics["perfect_matching"] = has_perfect_matching(mg.graph) if mg.n else False
    return metrics


def run_class3(q, allow_large=False, max_group_order=DEFAULT_MAX_GROUP_ORDER, triple_index=None, chunk=None,
               triples=None):
    """Triples, absolute geometry and moving graph per class; the payload the CLI serializes.

    ``triples`` skips the search when the caller already ran find_triples.
    """
    if triples is None:
        triples = find_triples(q, allow_large=allow_large, max_group_order=max_group_order)
    if triple_index is not None:
        if not 0 <= triple_index < len(triples):
            raise Class3Error(f"triple index {triple_index} out of range: {len(triples)} classes")
        triples = [triples[triple_index]]
    classes = []
    for t in triples:
        d = build_delta(q, t, chunk=chunk)
        mg = moving_absolute_delta(d)
        classes.append({
            "triple": t.to_dict(d.G),
            "subgroup_orders": d.orders(),
            "absolute": absolute_structure(d),
            "moving": moving_graph_report(d, mg),
            "single_check": absolute_vertex_check(d),
            "graph": mg,
        })
    return {"q": q, "triple_classes": len(triples), "classes": classes}
