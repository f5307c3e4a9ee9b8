#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""Split Cayley hexagon and the moving absolute geometry of a type (I_id) triality.

All points of the parabolic quadric Q' in PG(6,q) are absolute. A line of Q'
is absolute when its Grassmann coordinates satisfy the six linear relations of
``projgeom.grassmann_absolute_rows``; every other line of Q' is moving.

Elements of the two rank-2 systems are numbered points first (0..N-1, in
lexicographic coordinate order) and lines after them (in the order of
``HexModel.absolute_lines`` / ``HexModel.moving_lines``).
"""

import itertools
import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from finfield import field_of_order
from incidence import IncidenceSystem, rank2_params
from projgeom import (GeometryError, PlaneSpan, ProjPoint, enumerate_points, normalize_rows,
                      parabolic_rows, pluecker_rows, polar_rows, row_keys, span_rows,
                      grassmann_absolute_rows, validate_trilinear_form)

SUPPORTED_Q = (2, 3, 4)
LARGE_Q = (5,)
PAIR_SCAN_CELLS = 2_000_000


# ----------------------------
# Closed forms
# ----------------------------
def closed_form_counts(k, f):
    """(points, lines, points per line, lines per point) of the moving absolute geometry.

    f = k for the G2(k) case and f = k^3 for the 3D4(k) case.
    """
    if f != k and f != k ** 3:
        raise GeometryError(f"invalid (k, f) = ({k}, {f}): need f = k or f = k^3")
    points = (k * k * f * f + k * f + 1) * (f + 1)
    return points, points * f * f, k + 1, (k + 1) * f * f


# ----------------------------
# Model
# ----------------------------
@dataclass(eq=False)
class HexModel:
    """Points and lines of Q' with the absolute/moving partition.

    Attributes:
        points: (N, 7) normalized coordinate rows, sorted.
        lines: (L, q+1) sorted point indices of every line of Q'.
        absolute: (L,) True for absolute lines.
    """

    q: int
    spec: object
    points: np.ndarray
    point_keys: np.ndarray
    lines: np.ndarray
    line_gr: np.ndarray
    line_keys: np.ndarray
    absolute: np.ndarray

    @property
    def n_points(self):
        return self.points.shape[0]

    @cached_property
    def absolute_lines(self):
        return np.flatnonzero(self.absolute)

    @cached_property
    def moving_lines(self):
        return np.flatnonzero(~self.absolute)

    @cached_property
    def incidence(self):
        """Point-line incidence as a CSR matrix of shape (N, L)."""
        L, width = self.lines.shape
        return sparse.csr_matrix(
            (np.ones(L * width, dtype=np.int32), (self.lines.ravel(), np.repeat(np.arange(L), width))),
            shape=(self.n_points, L))

    def lines_at(self, p, absolute=True):
        m = self.incidence
        ids = m.indices[m.indptr[p]:m.indptr[p + 1]]
        return np.sort(ids[self.absolute[ids] == absolute])

    @cached_property
    def _line_lookup(self):
        order = np.argsort(self.line_keys)
        return self.line_keys[order], order

    def point_index(self, coords):
        vec = normalize_rows(self.spec, np.asarray(coords, dtype=np.int64))
        key = int(row_keys(vec, self.q))
        pos = int(np.searchsorted(self.point_keys, key))
        if pos >= self.n_points or self.point_keys[pos] != key:
            raise GeometryError(f"point {tuple(int(c) for c in coords)} is not on the parabolic quadric")
        return pos

    def lines_through_pairs(self, ia, ib):
        """Line id of each point pair (ia[k], ib[k]), or -1 if the pair spans no line of Q'."""
        ia, ib = np.atleast_1d(ia), np.atleast_1d(ib)
        gr = pluecker_rows(self.spec, self.points[ia], self.points[ib])
        out = np.full(ia.shape, -1, dtype=np.int64)
        ok = gr.any(axis=-1)
        if not ok.any():
            return out
        keys = row_keys(normalize_rows(self.spec, gr[ok]), self.q)
        sorted_keys, order = self._line_lookup
        pos = np.minimum(np.searchsorted(sorted_keys, keys), sorted_keys.size - 1)
        hit = sorted_keys[pos] == keys
        found = np.full(keys.shape, -1, dtype=np.int64)
        found[hit] = order[pos[hit]]
        out[ok] = found
        return out

    def line_id(self, P, R):
        a = self.point_index(P.coords if isinstance(P, ProjPoint) else P)
        b = self.point_index(R.coords if isinstance(R, ProjPoint) else R)
        lid = int(self.lines_through_pairs(np.array([a]), np.array([b]))[0])
        if a == b or lid < 0:
            raise GeometryError(f"points {a} and {b} do not span a line of the parabolic quadric")
        return lid

    def collinearity(self, absolute):
        """Dense (N, N) matrix of line ids joining two points, -1 where none of the given class."""
        key = "_collinear_abs" if absolute else "_collinear_mov"
        if key not in self.__dict__:
            lid = np.full((self.n_points, self.n_points), -1, dtype=np.int32)
            ids = self.absolute_lines if absolute else self.moving_lines
            rows = self.lines[ids]
            for i, j in itertools.combinations(range(rows.shape[1]), 2):
                lid[rows[:, i], rows[:, j]] = ids
                lid[rows[:, j], rows[:, i]] = ids
            self.__dict__[key] = lid
        return self.__dict__[key]

    @cached_property
    def absolute_distances(self):
        """Point distances in the collinearity graph of the classical absolute (int8)."""
        adj = sparse.csr_matrix(self.collinearity(True) >= 0)
        n = self.n_points
        dist = np.empty((n, n), dtype=np.int8)
        step = max(1, PAIR_SCAN_CELLS // n)
        for start in range(0, n, step):
            block = csgraph.shortest_path(adj, method="D", unweighted=True, directed=False,
                                          indices=np.arange(start, min(n, start + step)))
            dist[start:start + step] = np.where(np.isfinite(block), block, -1)
        return dist

    @cached_property
    def absolute_system(self):
        return _rank2_system(self, self.absolute_lines)

    @cached_property
    def moving_system(self):
        return _rank2_system(self, self.moving_lines)


def _rank2_system(m, line_ids):
    n = m.n_points
    width = m.lines.shape[1]
    pts = m.lines[line_ids].ravel()
    nodes = n + np.repeat(np.arange(line_ids.size), width)
    return IncidenceSystem(
        [0] * n + [1] * line_ids.size,
        np.stack([pts, nodes], axis=1),
        type_names=("P", "L"),
        labels=[tuple(int(c) for c in row) for row in m.points]
        + [tuple(int(p) for p in m.lines[l]) for l in line_ids],
    )


def _enumerate_lines(F, pts, point_keys):
    """Every line of Q' as (L, q+1) sorted point indices, in lexicographic order."""
    q = F.order
    n = pts.shape[0]
    step = max(1, PAIR_SCAN_CELLS // n)
    all_keys, all_a, all_b = [], [], []
    for start in range(0, n, step):
        block = pts[start:start + step]
        B = polar_rows(F, block[:, None, :], pts[None, :, :])
        ia, ib = np.nonzero(B == 0)
        ia = ia + start
        keep = ib > ia
        ia, ib = ia[keep], ib[keep]
        keys = row_keys(normalize_rows(F, pluecker_rows(F, pts[ia], pts[ib])), q)
        keys, first = np.unique(keys, return_index=True)
        all_keys.append(keys)
        all_a.append(ia[first])
        all_b.append(ib[first])
    keys = np.concatenate(all_keys)
    _, first = np.unique(keys, return_index=True)
    A = pts[np.concatenate(all_a)[first]]
    Bv = pts[np.concatenate(all_b)[first]]
    lam = np.arange(q)
    rows = normalize_rows(F, F.add[Bv[:, None, :], F.mul[lam[None, :, None], A[:, None, :]]])
    line_pts = np.concatenate([A[:, None, :], rows], axis=1)
    line_keys = row_keys(line_pts, q)
    idx = np.searchsorted(point_keys, line_keys)
    if (idx >= n).any() or not (point_keys[np.minimum(idx, n - 1)] == line_keys).all():
        raise GeometryError("a line of the parabolic quadric leaves the quadric")
    idx = np.sort(idx, axis=1)
    return idx[np.lexsort(idx.T[::-1])]


def build_hex_model(q, allow_large=False):
    """Enumerate Q' and split its lines into absolute and moving lines.

    Raises:
        GeometryError: unsupported q, or counts differing from the closed forms.
    """
    allowed = SUPPORTED_Q + (LARGE_Q if allow_large else ())
    if q not in allowed:
        raise GeometryError(f"unsupported q={q}: expected one of {list(allowed)}")
    logging.info(f"Building hexagon model for q={q}")
    F = field_of_order(q)
    if q == 2 and not validate_trilinear_form(F)["ok"]:
        raise GeometryError("trilinear form validation failed for q=2")
    pts = enumerate_points(F, 7)
    pts = pts[parabolic_rows(F, pts) == 0]
    point_keys = row_keys(pts, q)
    lines = _enumerate_lines(F, pts, point_keys)
    gr = normalize_rows(F, pluecker_rows(F, pts[lines[:, 0]], pts[lines[:, 1]]))
    absolute = np.asarray(grassmann_absolute_rows(F, gr), dtype=bool)
    model = HexModel(q, F, pts, point_keys, lines, gr, row_keys(gr, q), absolute)

    n_points, n_moving, _, _ = closed_form_counts(q, q)
    n_abs = int(absolute.sum())
    logging.info(f"q={q}: {pts.shape[0]} points, {lines.shape[0]} lines on Q' "
                 f"({n_abs} absolute, {lines.shape[0] - n_abs} moving)")
    if pts.shape[0] != n_points or lines.shape[0] - n_abs != n_moving:
        raise GeometryError(f"model corruption for q={q}: {pts.shape[0]} points and "
                            f"{lines.shape[0] - n_abs} moving lines, expected {n_points} and {n_moving}")
    return model


def classical_absolute(m):
    return m.absolute_system


def moving_absolute(m):
    return m.moving_system


def _moving_node(m, line):
    pos = int(np.searchsorted(m.moving_lines, line))
    if pos >= m.moving_lines.size or m.moving_lines[pos] != line:
        raise GeometryError(f"line {line} is not a moving line")
    return m.n_points + pos


# ----------------------------
# Special planes
# ----------------------------
@dataclass(frozen=True)
class SpecialPlane:
    apex: int
    plane: PlaneSpan
    point_ids: tuple
    absolute_lines: tuple
    moving_lines: tuple


def special_planes(m):
    """One plane per absolute point, spanned by two absolute lines through it."""
    F, q = m.spec, m.q
    apexes, spans, plane_pts = [], [], []
    for p in range(m.n_points):
        through = m.lines_at(p, absolute=True)
        if through.size < 2:
            raise GeometryError(f"point {p} lies on {through.size} absolute lines")
        others = [next(int(x) for x in m.lines[l] if x != p) for l in through[:2]]
        basis = m.points[[p] + others]
        rows = span_rows(F, basis)
        keys = row_keys(rows, q)
        idx = np.searchsorted(m.point_keys, keys)
        if rows.shape[0] != q * q + q + 1 or (idx >= m.n_points).any() \
                or not (m.point_keys[np.minimum(idx, m.n_points - 1)] == keys).all():
            raise GeometryError(f"special plane at point {p} is degenerate or leaves the quadric")
        apexes.append(p)
        spans.append((p, *others))
        plane_pts.append(np.sort(idx))

    # plane-by-line counts of shared points; full lines have q+1
    n = len(apexes)
    width = q * q + q + 1
    indicator = sparse.csr_matrix(
        (np.ones(n * width, dtype=np.int32), (np.repeat(np.arange(n), width), np.concatenate(plane_pts))),
        shape=(n, m.n_points))
    shared = (indicator @ m.incidence).tocoo()
    full = shared.data == q + 1
    plane_of, line_of = shared.row[full], shared.col[full]

    planes = []
    for k, p in enumerate(apexes):
        inside = np.sort(line_of[plane_of == k])
        pts = plane_pts[k]
        planes.append(SpecialPlane(
            apex=p,
            plane=PlaneSpan(F, tuple(ProjPoint(F, tuple(int(c) for c in m.points[i])) for i in spans[k]),
                            tuple(ProjPoint(F, tuple(int(c) for c in m.points[i])) for i in pts)),
            point_ids=tuple(int(i) for i in pts),
            absolute_lines=tuple(int(l) for l in inside if m.absolute[l]),
            moving_lines=tuple(int(l) for l in inside if not m.absolute[l]),
        ))
    logging.info(f"q={q}: {len(planes)} special planes")
    return planes


def special_plane_report(m, planes=None):
    planes = special_planes(m) if planes is None else planes
    q = m.q
    violations = []
    counts = np.zeros(m.lines.shape[0], dtype=np.int64)
    for sp in planes:
        through = set(m.lines_at(sp.apex, absolute=True).tolist())
        if not through <= set(sp.absolute_lines):
            violations.append({"apex": sp.apex, "problem": "absolute line through apex outside plane"})
        if len(sp.moving_lines) != q * q:
            violations.append({"apex": sp.apex, "problem": f"{len(sp.moving_lines)} moving lines"})
        counts[list(sp.moving_lines)] += 1
    per_line = counts[m.moving_lines]
    if (per_line != 1).any():
        violations.append({"problem": "moving lines not in exactly one plane",
                           "lines": m.moving_lines[per_line != 1][:10].tolist()})
    return {
        "ok": not violations,
        "planes": len(planes),
        "fiber_sizes": sorted({len(sp.moving_lines) for sp in planes}),
        "covered": int((per_line == 1).sum()),
        "violations": violations,
    }


# ----------------------------
# Apartments of the classical absolute
# ----------------------------
def _canonical_cycle(cyc):
    n = len(cyc)
    variants = []
    for seq in (list(cyc), list(reversed(cyc))):
        for r in range(n):
            variants.append(tuple(seq[r:] + seq[:r]))
    return min(variants)


def absolute_hexagons(m, limit=None):
    """Ordinary hexagons of absolute points and lines, as canonical point 6-cycles.

    Found from each opposite pair (x, y), x < y, and each pair of absolute
    lines through x. With ``limit`` the scan stops after that many hexagons.
    """
    lid = m.collinearity(True)
    dist = m.absolute_distances
    found = set()
    for x in range(m.n_points):
        opposite = np.flatnonzero(dist[x] == 3)
        for y in opposite[opposite > x]:
            paths = []
            for line in m.lines_at(x, absolute=True):
                a = next(int(p) for p in m.lines[line] if p != x and dist[p, y] == 2)
                nb = np.flatnonzero(lid[a] >= 0)
                b = int(nb[dist[nb, y] == 1][0])
                paths.append((a, b))
            for (a1, b1), (a2, b2) in itertools.combinations(paths, 2):
                found.add(_canonical_cycle((x, a1, b1, int(y), b2, a2)))
                if limit is not None and len(found) >= limit:
                    return sorted(found)
    return sorted(found)


def check_opposite_vertices(m, trials=None):
    """Opposite chords of absolute hexagons leave Q'; distance-2 chords are moving lines."""
    if trials is None and m.q > 2:
        trials = 200
    hexagons = absolute_hexagons(m, limit=trials)
    violations = []
    for h in hexagons:
        h = np.asarray(h)
        opp_a, opp_b = h[:3], h[3:]
        B = polar_rows(m.spec, m.points[opp_a], m.points[opp_b])
        if (B == 0).any():
            violations.append({"hexagon": h.tolist(), "problem": "opposite chord on Q'"})
        near = m.lines_through_pairs(h, np.roll(h, -2))
        if (near < 0).any() or m.absolute[near[near >= 0]].any():
            violations.append({"hexagon": h.tolist(), "problem": "distance-2 chord is not a moving line"})
    if violations:
        logging.error(f"q={m.q}: {len(violations)} opposite-vertex violations")
    return {"ok": not violations, "hexagons": len(hexagons), "violations": violations}


# ----------------------------
# Distances in the moving absolute geometry
# ----------------------------
def line_distance(m, l1, l2):
    """Distance between two moving lines in the incidence graph of the moving absolute geometry."""
    a, b = _moving_node(m, l1), _moving_node(m, l2)
    dist = csgraph.shortest_path(m.moving_system.matrix, method="D", unweighted=True,
                                 directed=False, indices=[a])
    return float(dist[0, b])


def distance_witness(m):
    """Distance between (e5 e6) and (e1 e2); 6 for the moving absolute geometry."""
    e = np.eye(7, dtype=np.int64)
    l1 = m.line_id(e[5], e[6])
    l2 = m.line_id(e[1], e[2])
    d = line_distance(m, l1, l2)
    return {"ok": d == 6, "lines": [l1, l2], "distance": d}


def partition_report(m):
    """(q+1)(q^4+q^2+1) absolute lines with q+1 through each point; the other lines of Q' are moving."""
    q = m.q
    n_abs = int(m.absolute.sum())
    n_mov = int(m.lines.shape[0]) - n_abs
    per_point = np.asarray(m.incidence @ m.absolute.astype(np.int32)).ravel()
    _, expected_mov, _, _ = closed_form_counts(q, q)
    expected_abs = (q + 1) * (q ** 4 + q ** 2 + 1)
    degrees = sorted(set(per_point.tolist()))
    return {
        "ok": n_abs == expected_abs and n_mov == expected_mov and degrees == [q + 1],
        "absolute": n_abs,
        "moving": n_mov,
        "expected": [expected_abs, expected_mov],
        "absolute_per_point": degrees,
    }


def _sample(ids, size):
    ids = np.asarray(ids)
    if size is None or ids.size <= size:
        return ids
    return ids[np.linspace(0, ids.size - 1, size).astype(np.int64)]


def counting_bound_check(m, sample=None):
    """Moving lines within distance 4 of a moving line stay below 1 + (k+1)(C-1) + k(k+1)(C-1)^2.

    The farthest line distance is the maximum over every checked line.
    """
    k = f = m.q
    C = (k + 1) * f * f
    bound = 1 + (k + 1) * (C - 1) + k * (k + 1) * (C - 1) ** 2
    if sample is None and m.q > 2:
        sample = 100
    chosen = _sample(m.moving_lines, sample)
    nodes = np.array([_moving_node(m, l) for l in chosen])
    mat = m.moving_system.matrix
    n = m.n_points
    counts, farthest = [], []
    for start in range(0, nodes.size, 64):
        dist = csgraph.shortest_path(mat, method="D", unweighted=True, directed=False,
                                     indices=nodes[start:start + 64])
        to_lines = dist[:, n:]
        counts.extend((to_lines <= 4).sum(axis=1).tolist())
        farthest.extend(np.where(np.isfinite(to_lines), to_lines, -1).max(axis=1).tolist())
    max_line_distance = float(max(farthest))
    counts = np.asarray(counts)
    violations = chosen[counts > bound].tolist()
    return {
        "ok": not violations and max_line_distance >= 6,
        "bound": bound,
        "checked": int(chosen.size),
        "max_count": int(counts.max()),
        "total_lines": int(m.moving_lines.size),
        "max_line_distance": max_line_distance,
        "violations": violations,
    }


def regularity_report(m, sample=None):
    """Constant degrees and a constant distance distribution from each point."""
    s = m.moving_system
    deg = np.diff(s.matrix.indptr)
    point_deg = sorted(set(deg[:m.n_points].tolist()))
    line_deg = sorted(set(deg[m.n_points:].tolist()))
    if sample is None and m.q > 2:
        sample = 50
    sources = _sample(np.arange(m.n_points), sample)
    profiles = set()
    for start in range(0, sources.size, 32):
        dist = csgraph.shortest_path(s.matrix, method="D", unweighted=True, directed=False,
                                     indices=sources[start:start + 32])
        for row in dist:
            values, counts = np.unique(row[np.isfinite(row)].astype(np.int64), return_counts=True)
            profiles.add(tuple(zip(values.tolist(), counts.tolist())))
    return {
        "ok": len(point_deg) == 1 and len(line_deg) == 1 and len(profiles) == 1,
        "point_degrees": point_deg,
        "line_degrees": line_deg,
        "points_checked": int(sources.size),
        "distance_profiles": len(profiles),
        "profile": [list(p) for p in sorted(profiles)[0]] if profiles else [],
    }


def triangle_witness(m):
    """Every point lies on a triangle of moving lines (three distinct lines)."""
    lid = m.collinearity(False)
    missing = []
    for p in range(m.n_points):
        nb = np.flatnonzero(lid[p] >= 0)
        sub = lid[np.ix_(nb, nb)]
        through_p = lid[p, nb]
        if not ((sub >= 0) & (sub != through_p[:, None])).any():
            missing.append(p)
    return {"ok": not missing, "points": m.n_points, "missing": missing[:10]}


def incident_vertices_check(m, sample=None):
    """For an absolute line l and P1 != P2 on l, some P off l has PP1 and PP2 moving."""
    lid = m.collinearity(False)
    if sample is None and m.q > 2:
        sample = 50
    failures = []
    checked = 0
    for line in _sample(m.absolute_lines, sample):
        on_line = m.lines[line]
        off = np.ones(m.n_points, dtype=bool)
        off[on_line] = False
        for p1, p2 in itertools.combinations(on_line, 2):
            checked += 1
            if not ((lid[p1] >= 0) & (lid[p2] >= 0) & off).any():
                failures.append([int(line), int(p1), int(p2)])
    return {"ok": not failures, "pairs_checked": checked, "failures": failures[:10]}


def summarize_rank2(m, system, sample=None):
    params = rank2_params(system, sample=sample)
    deg = np.diff(system.matrix.indptr)
    return {
        "points": m.n_points,
        "lines": system.n - m.n_points,
        "lines_per_point": sorted(set(deg[:m.n_points].tolist())),
        "points_per_line": sorted(set(deg[m.n_points:].tolist())),
        "params": params,
    }


def lemma_checks(m, trials=None, sample=None, moving=None, absolute=None):
    """Every lemma check of the model as name -> report.

    ``moving`` and ``absolute`` are summarize_rank2 results when already computed.
    """
    k, f = m.q, m.q
    points, lines, per_line, per_point = closed_form_counts(k, f)
    moving = moving or summarize_rank2(m, m.moving_system, sample=sample)
    absolute = absolute or summarize_rank2(m, m.absolute_system, sample=sample)
    checks = {
        "counts": {
            "ok": (moving["points"], moving["lines"], moving["points_per_line"], moving["lines_per_point"])
            == (points, lines, [per_line], [per_point]),
            "expected": [points, lines, per_line, per_point],
            "found": [moving["points"], moving["lines"], moving["points_per_line"], moving["lines_per_point"]],
        },
        "partition": partition_report(m),
        "moving_params": {"ok": moving["params"].as_tuple() == (5, 3, 6),
                          "found": list(moving["params"].as_tuple())},
        "absolute_params": {"ok": absolute["params"].as_tuple() == (6, 6, 6)
                            and absolute["lines_per_point"] == [k + 1] and absolute["points_per_line"] == [f + 1],
                            "found": list(absolute["params"].as_tuple())},
        "special_planes": special_plane_report(m),
        "opposite_vertices": check_opposite_vertices(m, trials=trials),
        "counting_bound": counting_bound_check(m),
        "distance_6": distance_witness(m),
        "triangles": triangle_witness(m),
        "incident_vertices": incident_vertices_check(m),
        "regularity": regularity_report(m),
    }
    failed = [name for name, rep in checks.items() if not rep["ok"]]
    if failed:
        logging.warning(f"q={m.q}: lemma checks failed: {', '.join(failed)}")
    else:
        logging.info(f"q={m.q}: all {len(checks)} lemma checks passed")
    return checks
