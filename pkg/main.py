#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import os, sys, argparse
import math
import logging

import networkx as nx

logging.basicConfig(level=logging.INFO)

BASE_DIR = os.path.dirname(os.path.abspath(__file__))
MODULE_DIR = os.path.join(BASE_DIR, "modules")
if os.path.isdir(MODULE_DIR) and MODULE_DIR not in sys.path:
    sys.path.append(MODULE_DIR)

# ---- Load env (locally). TRIALITY_* knobs may also come from the shell. ----
try:
    from loadenv import load_env
    load_env()
except Exception as e:
    logging.error(f"Failed to load environment variables: {str(e)}")

from loadenv import ConfigError, build_config
from projgeom import self_kernel_report
from hexagon import LARGE_Q as HEX_LARGE_Q, SUPPORTED_Q as HEX_SUPPORTED_Q
from hexagon import build_hex_model, lemma_checks, summarize_rank2
from class3 import Class3Error, check_supported, find_triples, run_class3
from report_builder import (ReportError, compare_with_published, format_params, serialize_graphs,
                            serialize_incidence, write_artifact)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

LARGE_SAMPLE = 200


def _emit(data, path):
    if path:
        write_artifact(data, path)
    else:
        sys.stdout.write(data.decode("utf-8"))


# ----------------------------
# hexagon
# ----------------------------
def cmd_hexagon(cfg):
    """Build the q-model, run every lemma check, emit the chosen rank-2 system.

    Returns:
        (exit code, artifact bytes, summary dict).
    """
    q = cfg.q
    allowed = HEX_SUPPORTED_Q + (HEX_LARGE_Q if cfg.allow_large else ())
    if q not in allowed:
        raise ConfigError(f"unsupported q={q} for hexagon: expected one of {list(allowed)}")

    m = build_hex_model(q, allow_large=cfg.allow_large)
    sample = LARGE_SAMPLE if q in HEX_LARGE_Q else None
    moving = summarize_rank2(m, m.moving_system, sample=sample)
    absolute = summarize_rank2(m, m.absolute_system, sample=sample)

    try:
        checks = lemma_checks(m, sample=sample, moving=moving, absolute=absolute)
    except Exception as e:
        logging.error(f"Lemma checks for q={q} failed: {str(e)}")
        checks = {"lemma_checks": {"ok": False, "error": str(e)}}

    try:
        self_kernel = self_kernel_report(m.spec)
    except Exception as e:
        logging.error(f"Self-incidence experiment for q={q} failed: {str(e)}")
        self_kernel = {"error": str(e)}

    chosen = moving if cfg.mode == "moving" else absolute
    system = m.moving_system if cfg.mode == "moving" else m.absolute_system
    facts = {
        "points": moving["points"],
        "lines": moving["lines"],
        "points_per_line": moving["points_per_line"],
        "lines_per_point": moving["lines_per_point"],
        "moving_params": list(moving["params"].as_tuple()),
        "absolute_params": list(absolute["params"].as_tuple()),
        "witness_distance": checks.get("distance_6", {}).get("distance"),
    }
    published = compare_with_published("hexagon", q, {"run": facts})
    ok = all(rep.get("ok") for rep in checks.values()) and published["ok"]

    params = chosen["params"]
    summary = {
        "result": f"{chosen['points']} points, {chosen['lines']} lines, {format_params(params.as_tuple())}",
        "mode": cfg.mode,
        "points": chosen["points"],
        "lines": chosen["lines"],
        "points_per_line": chosen["points_per_line"],
        "lines_per_point": chosen["lines_per_point"],
        "params": format_params(params.as_tuple()),
        "params_exact": params.exact,
        "checks": {name: "pass" if rep.get("ok") else "fail" for name, rep in checks.items()},
        "published": {c["id"]: c["status"] for c in published["claims"]},
        "ok": ok,
    }
    logging.info(f"hexagon q={q} {cfg.mode}: {summary['result']}")

    if cfg.output_format == "summary":
        metrics = summary
    else:
        metrics = {"summary": summary, "checks": checks, "published": published,
                   "self_kernel": self_kernel, "rank2": params}
    data = serialize_incidence(system, cfg.output_format, q=q, kind=f"hexagon_{cfg.mode}", metrics=metrics)
    return (EXIT_OK if ok else EXIT_CHECK_FAILED), data, summary


# ----------------------------
# class3
# ----------------------------
def _is_prism(g):
    return g.n == 6 and nx.is_isomorphic(g.to_networkx(), nx.circular_ladder_graph(3))


def _describe(facts):
    if facts["prism"]:
        return f"prism ({facts['vertices']}v, {facts['edges']}e)"
    text = f"{facts['vertices']}v, {facts['edges']}e"
    if facts["regular"] and facts["vertices"]:
        text += f", {facts['degrees'][0]}-regular"
    girth = "inf" if facts["girth"] == math.inf else facts["girth"]
    return text + f", girth {girth}, diam {facts['diameter']}"


def cmd_class3(cfg):
    """Find admissible triples, build both absolute geometries per class, emit the moving graphs.

    Returns:
        (exit code, artifact bytes, summary dict).
    """
    q = cfg.q
    try:
        check_supported(q, cfg.allow_large, cfg.max_group_order)
    except Class3Error as e:
        raise ConfigError(str(e)) from e

    triples = find_triples(q, allow_large=cfg.allow_large, max_group_order=cfg.max_group_order)
    index = None if cfg.triple == "all" else cfg.triple
    if index is not None and index >= len(triples):
        raise ConfigError(f"triple index {index} out of range: {len(triples)} classes for q={q}")

    result = run_class3(q, allow_large=cfg.allow_large, max_group_order=cfg.max_group_order,
                        triple_index=index, chunk=cfg.scan_chunk, triples=triples)

    graphs, class_facts = [], []
    for c in result["classes"]:
        mg = c["graph"]
        facts = dict(c["moving"])
        facts.update({
            "triple": c["triple"]["index"],
            "absolute_paths": c["absolute"]["paths"],
            "fixed_edges": c["absolute"]["fixed_edges"],
            "absolute_shapes": c["absolute"]["shapes"],
            "single_check": c["single_check"]["ok"],
            "prism": _is_prism(mg.graph),
        })
        class_facts.append(facts)
        graphs.append((mg, facts))

    published = compare_with_published("class3", q, {"run": {"triple_classes": len(triples)},
                                                     "classes": class_facts},
                                       partial=index is not None)
    single_ok = all(f["single_check"] for f in class_facts)
    ok = published["ok"] and single_ok

    n = len(triples)
    if not n:
        headline = "none found"
    else:
        paths = "/".join(str(p) for p in sorted({f["absolute_paths"] for f in class_facts}))
        noun = "class" if n == 1 else "classes"
        headline = f"{n} triple {noun}; absolute: {paths} paths; moving: " + "; ".join(
            _describe(f) for f in class_facts)
    summary = {
        "result": headline,
        "triple_classes": n,
        "published": {c["id"]: c["status"] for c in published["claims"]},
        "ok": ok,
    }
    logging.info(f"class3 q={q}: {headline}")
    data = serialize_graphs(graphs, cfg.output_format, q=q, kind="class3_moving", header=summary)
    return (EXIT_OK if ok else EXIT_CHECK_FAILED), data, summary


# ----------------------------
# CLI
# ----------------------------
def build_parser():
    parser = argparse.ArgumentParser(description="Absolute geometries of trialities")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true", help="Debug logging")
    verbosity.add_argument("--quiet", action="store_true", help="Warnings and errors only")
    sub = parser.add_subparsers(dest="command", required=True)

    hexp = sub.add_parser("hexagon", help="Classical and moving absolute geometry of the split Cayley hexagon")
    hexp.add_argument("--q", type=int, required=True, help="Field order (2, 3, 4; 5 with --large)")
    hexp.add_argument("--mode", choices=["absolute", "moving"], default="moving")

    c3 = sub.add_parser("class3", help="Absolute geometries of Class III map geometries over L2(q^3)")
    c3.add_argument("--q", type=int, required=True, help="Base field order (2, 3, 4, 5; 7, 9 with --large)")
    c3.add_argument("--triple", default="all", help="Triple class index or 'all'")

    for p in (hexp, c3):
        p.add_argument("--format", choices=["json", "dot", "summary"], default="summary")
        p.add_argument("--output", default=None, help="Write the artifact here instead of stdout")
        p.add_argument("--large", action="store_true", help="Allow the resource-heavy field orders")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    elif args.quiet:
        logging.getLogger().setLevel(logging.WARNING)

    try:
        cfg = build_config(args)
        command = cmd_hexagon if cfg.command == "hexagon" else cmd_class3
        code, data, _ = command(cfg)
    except ConfigError as e:
        logging.error(f"Usage error: {str(e)}")
        sys.stderr.write(f"error: {e}\n")
        return EXIT_USAGE
    except Exception as e:
        logging.error(f"{args.command} q={args.q} failed: {str(e)}")
        return EXIT_CHECK_FAILED

    try:
        _emit(data, cfg.output)
    except ReportError as e:
        logging.error(str(e))
        return EXIT_CHECK_FAILED
    return code


if __name__ == "__main__":
    sys.exit(main())
