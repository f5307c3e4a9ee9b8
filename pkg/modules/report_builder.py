import os
import json
import math
import logging

import numpy as np

from graphtools import SimpleGraph
from incidence import IncidenceSystem

PUBLISHED_PATH = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
                              "data", "published_examples.json")


class ReportError(ValueError):
    pass


def _fmt(v, nd=2, default="–"):
    try:
        if v is None:
            return default
        if isinstance(v, bool):
            return "yes" if v else "no"
        if isinstance(v, float):
            if v != v:  # NaN
                return default
            if math.isinf(v):
                return "inf"
            if v.is_integer():
                return str(int(v))
            return f"{v:.{nd}f}"
        if isinstance(v, (list, tuple)):
            return "[" + ", ".join(_fmt(x, nd, default) for x in v) + "]"
        return str(v)
    except Exception:
        return default


def format_params(params):
    """(d_P, g, d_L) as "(5,3,6)"."""
    return "(" + ",".join(_fmt(float(x)) for x in params) + ")"


def _json_safe(obj):
    """Plain JSON types; infinity becomes the string "inf"."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return int(v) if v.is_integer() else v
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, np.ndarray):
        return [_json_safe(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [_json_safe(v) for v in obj]
        return sorted(items) if isinstance(obj, (set, frozenset)) else items
    if hasattr(obj, "to_dict"):
        return _json_safe(obj.to_dict())
    return str(obj)


def _from_json(obj):
    """Lists back to tuples, "inf" back to math.inf."""
    if obj == "inf":
        return math.inf
    if isinstance(obj, list):
        return tuple(_from_json(v) for v in obj)
    return obj


# ----------------------------
# Serialization
# ----------------------------
def _as_graph(obj):
    graph = getattr(obj, "graph", obj)
    if not isinstance(graph, SimpleGraph):
        raise ReportError(f"cannot serialize {type(obj).__name__} as a graph")
    return graph


def _encode(payload, fmt, dot_lines):
    if fmt == "json":
        return (json.dumps(_json_safe(payload), sort_keys=True, indent=2) + "\n").encode("utf-8")
    if fmt == "dot":
        return ("\n".join(dot_lines) + "\n").encode("utf-8")
    if fmt == "summary":
        head = {k: payload[k] for k in ("type", "q") if k in payload}
        return render_summary({**head, **(payload.get("metrics") or {})}).encode("utf-8")
    raise ReportError(f"unknown format: {fmt}")


def _graph_payload(obj, q, kind, metrics):
    g = _as_graph(obj)
    payload = {
        "type": kind,
        "q": q,
        "vertices": list(range(g.n)),
        "edges": [list(e) for e in g.edges()],
        "metrics": metrics or {},
    }
    keys = getattr(obj, "vertex_keys", None)
    if keys is not None:
        payload["labels"] = [int(k) for k in keys]
    return payload


def _graph_dot(obj, name):
    g = _as_graph(obj)
    dot = [f'graph "{name}" {{']
    dot += [f"  {v};" for v in range(g.n)]
    dot += [f"  {a} -- {b};" for a, b in g.edges()]
    dot.append("}")
    return dot


def serialize_graph(obj, fmt="json", q=None, kind="graph", metrics=None):
    """A SimpleGraph (or anything with a ``.graph``) as json, dot or summary bytes."""
    name = f"{kind}_q{q}" if q is not None else kind
    return _encode(_graph_payload(obj, q, kind, metrics), fmt, _graph_dot(obj, name))


def serialize_graphs(graphs, fmt="json", q=None, kind="graph", header=None):
    """Several (graph, metrics) pairs in one artifact, numbered in the given order.

    json nests the single-graph payloads under "graphs"; dot emits one graph block each.
    """
    header = header or {}
    if fmt == "json":
        payload = {"type": kind, "q": q, "summary": header,
                   "graphs": [_graph_payload(g, q, kind, m) for g, m in graphs]}
        return (json.dumps(_json_safe(payload), sort_keys=True, indent=2) + "\n").encode("utf-8")
    if fmt == "dot":
        dot = []
        for i, (g, _) in enumerate(graphs):
            dot += _graph_dot(g, f"{kind}_q{q}_{i}" if q is not None else f"{kind}_{i}")
        return ("\n".join(dot) + "\n").encode("utf-8") if dot else b""
    if fmt == "summary":
        block = {"type": kind, "q": q, **header}
        for i, (_, m) in enumerate(graphs):
            block[f"class{i}"] = m or {}
        return render_summary(block).encode("utf-8")
    raise ReportError(f"unknown format: {fmt}")


def serialize_incidence(system, fmt="json", q=None, kind="incidence", metrics=None):
    """An IncidenceSystem; rank-2 systems also list the points of every line."""
    pairs = system.pairs()
    payload = {
        "type": kind,
        "q": q,
        "types": [int(t) for t in system.types],
        "type_names": list(system.type_names),
        "vertices": list(range(system.n)),
        "edges": pairs.tolist(),
        "labels": system.labels,
        "metrics": metrics or {},
    }
    if system.rank == 2:
        payload["lines"] = [sorted(system.neighbours(int(x))) for x in system.elements_of_type(1)]
    name = f"{kind}_q{q}" if q is not None else kind
    dot = [f'graph "{name}" {{']
    dot += [f'  {v} [type="{system.type_names[t]}"];' for v, t in enumerate(system.types.tolist())]
    dot += [f"  {a} -- {b};" for a, b in pairs.tolist()]
    dot.append("}")
    return _encode(payload, fmt, dot)


def _load(data):
    try:
        return json.loads(data.decode("utf-8") if isinstance(data, bytes) else data)
    except ValueError as e:
        raise ReportError(f"not a JSON artifact: {e}") from e


def deserialize_graph(data):
    payload = _load(data)
    return SimpleGraph(len(payload["vertices"]), [tuple(e) for e in payload["edges"]])


def deserialize_incidence(data):
    payload = _load(data)
    labels = [_from_json(x) for x in payload["labels"]]
    return IncidenceSystem(payload["types"], [tuple(e) for e in payload["edges"]],
                           type_names=tuple(payload["type_names"]), labels=labels)


def write_artifact(data, path=None):
    """Write bytes to ``path``, or return them for stdout when path is None."""
    if path is None:
        return data
    try:
        folder = os.path.dirname(os.path.abspath(path))
        os.makedirs(folder, exist_ok=True)
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as e:
        raise ReportError(f"cannot write {path}: {e}") from e
    logging.info(f"Wrote {len(data)} bytes to {path}")
    return data


# ----------------------------
# Summary
# ----------------------------
def _flatten(prefix, value, out):
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    else:
        out.append((prefix, value))


def render_summary(block):
    """Line-oriented ``key: value`` text; nested dicts become dotted keys."""
    rows = []
    _flatten("", block, rows)
    return "".join(f"{k}: {_fmt(_json_safe(v) if not isinstance(v, str) else v)}\n" for k, v in rows)


# ----------------------------
# Published examples
# ----------------------------
def load_published(path=None):
    path = path or PUBLISHED_PATH
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)["claims"]
    except (OSError, ValueError, KeyError, TypeError) as e:
        raise ReportError(f"cannot read published examples from {path}: {e}") from e


def _diff(expect, facts):
    out = []
    for key, value in expect.items():
        found = _json_safe(facts.get(key))
        if found != value:
            out.append({"field": key, "expected": value, "found": found})
    return out


def compare_with_published(command, q, results, path=None, partial=False):
    """Check run results against the published claims for (command, q).

    Args:
        results: {"run": {...facts}, "classes": [{...facts}, ...]}.
        partial: only some triple classes were computed; missing classes are soft.

    Returns:
        {"ok": bool, "claims": [{"id", "status", "severity", "diff"}...]}, where
        status is match, mismatch or not-found and ok ignores soft entries.
    """
    run = results.get("run", {})
    classes = results.get("classes", [])
    out = []
    for claim in load_published(path):
        if claim["command"] != command or claim["q"] != q:
            continue
        severity = claim.get("severity", "hard")
        if claim.get("scope", "run") == "run":
            target = run
            diff = _diff(claim.get("expect", {}), run)
            status = "match" if not diff else "mismatch"
        else:
            target = next((c for c in classes if not _diff(claim.get("expect", {}), c)), None)
            diff = [] if target is not None else [{"field": "class", "expected": claim.get("expect"),
                                                   "found": None}]
            status = "match" if target is not None else "not-found"
            if target is None and partial:
                severity = "soft"
        out.append({"id": claim["id"], "status": status, "severity": severity, "diff": diff})

        # Soft fields are checked against the matched object only.
        soft = claim.get("soft", {})
        if soft:
            if target is None:
                out.append({"id": f"{claim['id']}:soft", "status": "not-found", "severity": "soft", "diff": []})
            else:
                soft_diff = _diff(soft, target)
                out.append({"id": f"{claim['id']}:soft", "status": "match" if not soft_diff else "mismatch",
                            "severity": "soft", "diff": soft_diff})

    for c in out:
        if c["status"] == "match":
            continue
        if c["severity"] == "soft":
            logging.warning(f"Published claim {c['id']} for {command} q={q}: {c['status']} {c['diff']}")
        else:
            logging.error(f"Published claim {c['id']} for {command} q={q}: {c['status']} {c['diff']}")
    return {"ok": all(c["status"] == "match" or c["severity"] == "soft" for c in out), "claims": out}
