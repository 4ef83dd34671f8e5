"""Command-line surface tying the construction, verification and
execution pieces together.

Subcommands: vertex build|enumerate, check invariance|certificates|
optimal|rho, glue, dual, diagram art, run, experiment.  Matrices,
diagrams and certificate sets travel as JSON with rationals as "p/q"
strings; traces land as CSV.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import algorithms, diagrams, duality, gluing, lab, qcert, vertex
from .core import rat_str


def _load_json(path: str) -> dict:
    return json.loads(Path(path).read_text())


def _emit(data: dict, out: str | None) -> None:
    text = json.dumps(data, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _load_h(path: str) -> qcert.HMatrix:
    return qcert.HMatrix.from_json(_load_json(path))


def _diagram_from_args(args) -> diagrams.ArcDiagram:
    if getattr(args, "pattern", None):
        d = diagrams.ArcDiagram.of(int(k) for k in args.pattern.split(","))
        if not diagrams.validate(d):
            raise SystemExit(f"invalid pattern {args.pattern}")
        return d
    return diagrams.ArcDiagram.from_json(_load_json(args.diagram))


def _cmd_vertex_build(args) -> None:
    d = _diagram_from_args(args)
    h = vertex.vertex_from_diagram(d)
    cs = qcert.certificates(h)
    _emit({"h": h.to_json(), "certificates": cs.to_json()}, args.out)


def _cmd_vertex_enumerate(args) -> None:
    count = 0
    for d in diagrams.enumerate_diagrams(args.n, basic_only=args.basic):
        count += 1
        if not args.count_only:
            print(json.dumps(d.to_json()))
    print(f"# {count} diagrams on {args.n} nodes" + (" (basic only)" if args.basic else ""), file=sys.stderr)


def _cmd_check(args) -> None:
    h = _load_h(args.h)
    if args.what == "invariance":
        print("true" if qcert.check_invariance(h) else "false")
    elif args.what == "certificates":
        _emit(qcert.certificates(h).to_json(), args.out)
    elif args.what == "optimal":
        print("true" if qcert.is_optimal(h) else "false")
    elif args.what == "rho":
        print(rat_str(qcert.rho(h)))


def _cmd_glue(args) -> None:
    left = _load_h(args.left)
    right = _load_h(args.right)
    glued = gluing.glue_h(left, right)
    out = {"h": glued.to_json()}
    if args.verify:
        out["gluing_theorem"] = gluing.verify_gluing_theorem(left, right)
        out["certificates"] = gluing.glue_lambda(
            qcert.certificates(left), qcert.certificates(right), left.n, glued.n
        ).to_json()
    _emit(out, args.out)


def _cmd_dual(args) -> None:
    if args.h:
        h = _load_h(args.h)
        report = duality.dual_report(h)
        out = {
            "dual_h": report.dual_h.to_json(),
            "dual_optimal": report.dual_optimal,
            "route_agreement": report.route_agreement,
        }
        try:
            d = vertex.diagram_from_vertex(h)
            out["diagram"] = d.to_json()
            if report.dual_optimal:
                out["dual_diagram"] = vertex.diagram_from_vertex(report.dual_h).to_json()
        except vertex.NotAVertexError:
            pass
        _emit(out, args.out)
    else:
        d = diagrams.ArcDiagram.from_json(_load_json(args.diagram))
        dual_d = duality.dualize_basic_diagram(d)
        _emit(dual_d.to_json(), args.out)
        if args.art:
            print(diagrams.ascii_art(d), file=sys.stderr)
            print("-> dual:", file=sys.stderr)
            print(diagrams.ascii_art(dual_d), file=sys.stderr)


def _cmd_diagram_art(args) -> None:
    print(diagrams.ascii_art(_diagram_from_args(args)))


def _build_operator(args, n: int):
    cfg = lab.OperatorConfig(kind=args.operator, gamma=args.gamma, delta=args.delta)
    return cfg, cfg.build(n, args.seed)


def _cmd_run(args) -> None:
    n = args.n
    op_cfg, op = _build_operator(args, n)
    cfg = lab.ExperimentConfig(
        n=n,
        algorithms=(args.algorithm,),
        operators=(op_cfg,),
        out_dir=".",
        radius=args.radius,
        seed=args.seed,
    )
    y0 = lab.initial_point(cfg, op_cfg)
    trace = algorithms.run_algorithm(
        args.algorithm, op, y0, n, record_all=(args.record == "all")
    )
    algorithms.write_trace_csv(trace, args.out)
    final = trace.final_residual_sq if trace.records else float("nan")
    print(f"{args.algorithm}: {len(trace.records)} records, final residual^2 = {final}", file=sys.stderr)


def _cmd_experiment(args) -> None:
    cfg = lab.ExperimentConfig.from_json(_load_json(args.config))
    if args.out_dir:
        cfg = lab.ExperimentConfig.from_json({**cfg.to_json(), "out_dir": args.out_dir})
    manifest = lab.run_experiment(cfg)
    print(str(Path(cfg.out_dir) / "manifest.json"))
    failures = [c for c in manifest["cells"] if c["status"] != "ok"]
    if failures:
        print(f"{len(failures)} cell(s) aborted", file=sys.stderr)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="vertexkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_vertex = sub.add_parser("vertex", help="construct vertex algorithms")
    vsub = p_vertex.add_subparsers(dest="vertex_command", required=True)
    p_build = vsub.add_parser("build", help="pattern/diagram -> H-matrix + certificates")
    g = p_build.add_mutually_exclusive_group(required=True)
    g.add_argument("--pattern", help="comma-separated parent map, e.g. 2,3,4,5")
    g.add_argument("--diagram", help="diagram JSON file")
    p_build.add_argument("--out")
    p_build.set_defaults(func=_cmd_vertex_build)
    p_enum = vsub.add_parser("enumerate", help="stream all diagrams on n nodes")
    p_enum.add_argument("--n", type=int, required=True)
    p_enum.add_argument("--basic", action="store_true", help="non-crossing only")
    p_enum.add_argument("--count-only", action="store_true")
    p_enum.set_defaults(func=_cmd_vertex_enumerate)

    p_check = sub.add_parser("check", help="verify properties of an H-matrix")
    p_check.add_argument("what", choices=["invariance", "certificates", "optimal", "rho"])
    p_check.add_argument("--h", required=True, help="H-matrix JSON file")
    p_check.add_argument("--out")
    p_check.set_defaults(func=_cmd_check)

    p_glue = sub.add_parser("glue", help="glue two optimal H-matrices")
    p_glue.add_argument("--left", required=True)
    p_glue.add_argument("--right", required=True)
    p_glue.add_argument("--verify", action="store_true", help="check the gluing theorem")
    p_glue.add_argument("--out")
    p_glue.set_defaults(func=_cmd_glue)

    p_dual = sub.add_parser("dual", help="anti-diagonal dual of a matrix or diagram")
    g = p_dual.add_mutually_exclusive_group(required=True)
    g.add_argument("--h")
    g.add_argument("--diagram")
    p_dual.add_argument("--art", action="store_true", help="print ASCII diagrams to stderr")
    p_dual.add_argument("--out")
    p_dual.set_defaults(func=_cmd_dual)

    p_art = sub.add_parser("diagram", help="diagram utilities")
    asub = p_art.add_subparsers(dest="diagram_command", required=True)
    p_aa = asub.add_parser("art", help="render ASCII arc art")
    g = p_aa.add_mutually_exclusive_group(required=True)
    g.add_argument("--pattern")
    g.add_argument("--diagram")
    p_aa.set_defaults(func=_cmd_diagram_art)

    p_run = sub.add_parser("run", help="run one algorithm on one operator")
    p_run.add_argument("--algorithm", required=True, help="ohm | dual-ohm | rdo:p | rdo:p1,p2 | fsdm | hmatrix:<file>")
    p_run.add_argument("--n", type=int, required=True, help="horizon N (N-1 operator steps)")
    p_run.add_argument("--operator", default="worst-case", choices=["worst-case", "contraction", "violation"])
    p_run.add_argument("--gamma", type=float, default=1.0)
    p_run.add_argument("--delta", type=float, default=0.0)
    p_run.add_argument("--radius", type=float, default=1.0)
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--record", default="all", choices=["all", "sparse"])
    p_run.add_argument("--out", required=True, help="trace CSV path")
    p_run.set_defaults(func=_cmd_run)

    p_exp = sub.add_parser("experiment", help="run a config of (algorithm x operator) cells")
    p_exp.add_argument("--config", required=True, help="experiment config JSON")
    p_exp.add_argument("--out-dir", help="override the config's output directory")
    p_exp.set_defaults(func=_cmd_experiment)

    args = parser.parse_args(argv)
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
