"""Command-line front end.

Subcommands: plan, verify, graph-mass, graph-export, heatmap, classify,
report.  Every number printed is an exact rational string unless explicitly
labeled a decimal estimate; all artifacts are deterministic functions of
(config, seed).  Exit codes: 0 ok, 2 usage, 3 verification failure,
4 resource limit.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import doubling, graph, measure, render, schedule
from .errors import (FatgraphError, ResourceLimitError, UsageError,
                     VerificationError)
from .grid import cell_containing
from .kernels import get_backend
from .rat import parse_rat, rat_str

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VERIFY = 3
EXIT_RESOURCE = 4


def _parse_stages(text: str):
    parts = [s.strip() for s in text.split(",") if s.strip()]
    try:
        values = [int(s) for s in parts]
    except ValueError as exc:
        raise UsageError(f"bad stage list {text!r}") from exc
    if not values or len(values) % 2:
        raise UsageError(
            f"stages must be an even-length list m1,n1,m2,n2,...: {text!r}")
    return list(zip(values[::2], values[1::2]))


def _params_from_args(args) -> schedule.Params:
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            return schedule.params_from_json(fh.read())
    return schedule.validate(args.p, _parse_stages(args.stages))


def _emit(doc, out_path=None) -> None:
    payload = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


def _add_common(sub) -> None:
    sub.add_argument("--p", default="1/2", help="base weight p as num/den")
    sub.add_argument("--stages", default="3,3",
                     help="stage lengths m1,n1,m2,n2,...")
    sub.add_argument("--config", help="JSON config path (overrides --p/--stages)")
    sub.add_argument("--workers", type=int, default=1,
                     help="sweep chunking hint; output is worker-independent")
    sub.add_argument("--backend", choices=("python", "compiled"),
                     help="force a sweep backend")
    sub.add_argument("--out", help="write the artifact here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fatgraph", description=__doc__)
    sp = ap.add_subparsers(dest="command", required=True)

    plan = sp.add_parser("plan", help="pick parameters for a target epsilon")
    plan.add_argument("--epsilon", required=True, help="target slack, rational")
    plan.add_argument("--stages", type=int, required=True,
                      help="number of stages to plan")
    plan.add_argument("--out")

    verify = sp.add_parser("verify", help="exhaustive doubling verification")
    verify.add_argument("--depth", type=int, required=True)
    verify.add_argument("--sample", nargs=2, type=int, metavar=("TRIALS", "SEED"),
                        help="add the random-square decimal estimate")
    _add_common(verify)

    gm = sp.add_parser("graph-mass", help="exact kept-graph mass and bounds")
    gm.add_argument("--k", type=int, required=True)
    _add_common(gm)

    ge = sp.add_parser("graph-export", help="CSV of graph enclosures")
    ge.add_argument("--k", type=int, required=True)
    ge.add_argument("--resolution", type=int, default=256)
    ge.add_argument("--per-rect", action="store_true",
                    help="one row per kept rectangle instead of per sample")
    _add_common(ge)

    hm = sp.add_parser("heatmap", help="density heatmap as PGM/PPM")
    hm.add_argument("--depth", type=int, required=True)
    hm.add_argument("--pixels", type=int, required=True)
    hm.add_argument("--overlay-k", type=int,
                    help="overlay kept level-k rectangles (P6 output)")
    _add_common(hm)

    cl = sp.add_parser("classify", help="region class and weight word of a point")
    cl.add_argument("--x", required=True)
    cl.add_argument("--y", required=True)
    cl.add_argument("--level", type=int, required=True)
    _add_common(cl)

    rp = sp.add_parser("report", help="aggregate verification report")
    rp.add_argument("--depth", type=int, required=True)
    rp.add_argument("--epsilon", help="optional target for the bound total")
    _add_common(rp)
    return ap


def _cmd_plan(args) -> int:
    params = schedule.plan_schedule(args.epsilon, args.stages)
    _emit(params.to_json_dict(), args.out)
    return EXIT_OK


def _cmd_verify(args) -> int:
    params = _params_from_args(args)
    be = get_backend(args.backend)
    sample = tuple(args.sample) if args.sample else None
    rep = doubling.verify_lemma(args.depth, params, backend=be,
                                workers=args.workers, sample=sample)
    _emit(rep.to_json_dict(), args.out)
    return EXIT_OK if rep.ok else EXIT_VERIFY


def _cmd_graph_mass(args) -> int:
    params = _params_from_args(args)
    ledger = graph.bounds(params)
    doc = {
        "k": args.k,
        "mu_S": rat_str(graph.mu_S(args.k, params)),
        "bounds": ledger.to_json_dict(),
    }
    _emit(doc, args.out)
    return EXIT_OK


def _cmd_graph_export(args) -> int:
    params = _params_from_args(args)
    lines = []
    if args.per_rect:
        lines.append("x_lo,x_hi,y_lo,y_hi")
        for xl, xh, yl, yh in graph.chosen_rects(args.k, params):
            lines.append(",".join(map(rat_str, (xl, xh, yl, yh))))
    else:
        lines.append("x,y_lo,y_hi,y_mid")
        for s in graph.sample_graph(args.k, args.resolution, params):
            lines.append(",".join(map(rat_str, (s.x, s.lo, s.hi, s.mid))))
    payload = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)
    return EXIT_OK


def _cmd_heatmap(args) -> int:
    params = _params_from_args(args)
    be = get_backend(args.backend)
    spec = render.HeatmapSpec(depth=args.depth, pixels=args.pixels,
                              overlay_k=args.overlay_k)
    data = render.render_heatmap(spec, params, backend=be)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
    return EXIT_OK


def _cmd_classify(args) -> int:
    from .construction import locate, weight_word

    params = _params_from_args(args)
    cell = cell_containing(parse_rat(args.x), parse_rat(args.y), args.level)
    k = 0
    while (k < params.K
           and cell.level >= params.M[k] + params.stages[k][0]):
        k += 1
    region = locate(cell, k, params)
    doc = {
        "cell": [cell.level, cell.col, cell.row],
        "classified_against_level": k,
        "kind": region.kind,
        "in_all_bands": region.in_all_bands,
        "weights": [rat_str(w.value) for w in weight_word(cell, params)],
    }
    if region.kind == "left_over":
        doc["left_over_level"] = region.left_over_level
    else:
        r = region.crect
        doc["crect"] = {
            "level": r.level, "col": r.col, "half": r.half,
            "bounds": [rat_str(v) for v in
                       (r.bounds.l, r.bounds.r, r.bounds.b, r.bounds.t)],
        }
    _emit(doc, args.out)
    return EXIT_OK


def _cmd_report(args) -> int:
    params = _params_from_args(args)
    be = get_backend(args.backend)
    rep = doubling.verify_lemma(args.depth, params, backend=be,
                                workers=args.workers)
    ledger = graph.bounds(params)
    mu_last = graph.mu_S(params.K, params)
    flags = {
        "total_mass_one": rep.measure.total_mass == 1,
        "conservation": rep.measure.violations == 0,
        "constant_density": rep.c1,
        "edge_ratio_at_most_q_over_p": rep.c3_epsilon <= params.q / params.p,
        "edge_divergence_at_most_one": rep.edge_divergence <= 1,
        "corner_ratio_within_composed_bound":
            rep.corner_ratio <= rep.corner_bound,
        "corner_divergence_at_most_two": rep.corner_divergence <= 2,
        "graph_mass_above_bound": mu_last >= ledger.total,
    }
    epsilon = parse_rat(args.epsilon) if args.epsilon else None
    if epsilon is not None:
        flags["bound_total_above_target"] = ledger.total > 1 - epsilon
    doc = {
        "params": params.to_json_dict(),
        "depth": args.depth,
        "epsilon_target": rat_str(epsilon) if epsilon is not None else None,
        "doubling": rep.to_json_dict(),
        "bounds": ledger.to_json_dict(),
        "graph_mass": {"k": params.K, "mu_S": rat_str(mu_last)},
        "flags": flags,
        "pass": all(flags.values()),
    }
    _emit(doc, args.out)
    return EXIT_OK if doc["pass"] else EXIT_VERIFY


_COMMANDS = {
    "plan": _cmd_plan,
    "verify": _cmd_verify,
    "graph-mass": _cmd_graph_mass,
    "graph-export": _cmd_graph_export,
    "heatmap": _cmd_heatmap,
    "classify": _cmd_classify,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except FatgraphError as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, ResourceLimitError):
            err["hint"] = ("lower --depth or raise FATGRAPH_EXHAUSTIVE_LIMIT "
                           "for exhaustive sweeps")
            code = EXIT_RESOURCE
        elif isinstance(exc, VerificationError):
            code = EXIT_VERIFY
        else:
            code = EXIT_USAGE
        sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
        return code


if __name__ == "__main__":
    sys.exit(main())
