"""Command line entry point ``td13``.

Exit codes: 0 success, 2 bad input, 3 no valid sample within the retry
budget, 4 a drawing failed verification, 5 a self-test suite failed.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import embedder, encoding as enc, selftest, svg, symbolic as sy, validator
from .errors import InputError, RetryBudgetExhausted, Td13Error

DEPTH_CAP = 12
EXIT_OK, EXIT_INPUT, EXIT_RETRY, EXIT_VERIFY, EXIT_SELFTEST = 0, 2, 3, 4, 5


def _pair(text: str) -> tuple[int, int]:
    try:
        u, v = (int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected u,v but got {text!r}") from None
    return u, v


def _model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--s-convention", choices=enc.CONVENTIONS, default="figure",
                   help="indexing of the type counter s (default: figure)")
    p.add_argument("--gluing", choices=enc.GLUINGS, default="folded",
                   help="orientation of rhombi glued after a right step (default: folded)")


def _tolerance_flags(p: argparse.ArgumentParser) -> None:
    d = validator.Tolerances()
    p.add_argument("--tol-vertex", type=float, default=d.vertex_gap)
    p.add_argument("--tol-edge", type=float, default=d.vertex_edge_gap)
    p.add_argument("--tol-cluster", type=float, default=d.cluster)
    p.add_argument("--tol-coords", type=float, default=d.coordinate)


def _tolerances(args) -> validator.Tolerances:
    return validator.Tolerances(args.tol_vertex, args.tol_edge, args.tol_cluster, args.tol_coords)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="td13", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("draw", help="draw an outerplanar graph given as JSON")
    p.add_argument("graph", type=Path)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale", type=float, default=embedder.DEFAULT_SCALE)
    p.add_argument("--base-edge", type=_pair)
    p.add_argument("--keep-augmented", action="store_true",
                   help="also draw the edges added by triangulation")
    p.add_argument("--budget", type=int, default=embedder.RETRY_BUDGET)
    p.add_argument("--out", type=Path, help="output prefix (default: next to the input)")
    _model_flags(p)
    _tolerance_flags(p)

    p = sub.add_parser("enumerate", help="tabulate rhombi up to a depth")
    p.add_argument("--depth", type=int, required=True)
    _model_flags(p)

    p = sub.add_parser("verify", help="re-check a drawing file")
    p.add_argument("drawing", type=Path)
    _tolerance_flags(p)

    p = sub.add_parser("selftest", help="run the property suites")
    p.add_argument("--depth", type=int, default=6)
    p.add_argument("--seeds", type=int, default=25, help="random torus points per suite")
    _model_flags(p)
    return parser


def cmd_draw(args) -> int:
    try:
        graph = embedder.PlaneGraphInput.from_json(args.graph.read_text())
        d = embedder.draw(graph, args.seed, args.scale, convention=args.s_convention,
                          gluing=args.gluing, base_edge=args.base_edge,
                          keep_augmented=args.keep_augmented, budget=args.budget,
                          tolerances=_tolerances(args))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InputError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except RetryBudgetExhausted as exc:
        print(f"error: {exc} (check {exc.failing_check}, min gap {exc.min_gap:.3g})",
              file=sys.stderr)
        return EXIT_RETRY
    prefix = args.out or args.graph.with_suffix("")
    json_path = prefix.with_name(prefix.name + ".drawing.json")
    svg_path = prefix.with_name(prefix.name + ".svg")
    json_path.write_text(d.to_json() + "\n")
    svg_path.write_text(svg.render(d))
    print(f"{json_path}\n{svg_path}\n{len(d.classes)} length classes, attempts {d.attempts}")
    return EXIT_OK


def cmd_enumerate(args, out=None) -> int:
    out = out or sys.stdout
    if not 0 <= args.depth <= DEPTH_CAP:
        print(f"error: depth must lie in 0..{DEPTH_CAP}", file=sys.stderr)
        return EXIT_INPUT
    conv, gluing = args.s_convention, args.gluing
    out.write("\t".join(["node", "qr", "proper", "type", "pi_v0", "pi_v1", "pi_v2", "pi_v3",
                         "psi_v2", "psi_v3"]) + "\n")
    for node in enc.iter_nodes(args.depth):
        code = enc.qr_encode(node)
        names = enc.corners(node, gluing)
        row = [node, str(code), "yes" if code.is_proper else "no",
               enc.type_of(node, conv).key(), *names,
               sy.format_poly(sy.psi_poly(names[2], conv, gluing)),
               sy.format_poly(sy.psi_poly(names[3], conv, gluing))]
        out.write("\t".join(row) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        d = embedder.Drawing.from_json(args.drawing.read_text())
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        report = validator.validate(d, _tolerances(args), coordinates=True)
    except (Td13Error, IndexError, ValueError) as exc:
        print(f"error: drawing cannot be checked: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(json.dumps(report.to_dict(), indent=1))
    return EXIT_OK if report.ok else EXIT_VERIFY


def cmd_selftest(args) -> int:
    if not 0 <= args.depth <= DEPTH_CAP:
        print(f"error: depth must lie in 0..{DEPTH_CAP}", file=sys.stderr)
        return EXIT_INPUT
    results = selftest.run_all(args.depth, args.seeds, args.s_convention, args.gluing)
    width = max(len(r.name) for r in results)
    for r in results:
        print(f"{r.name:<{width}}  {'PASS' if r.ok else 'FAIL'}  {r.seconds:7.2f}s  {r.detail}")
    return EXIT_OK if all(r.ok for r in results) else EXIT_SELFTEST


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"draw": cmd_draw, "enumerate": cmd_enumerate,
               "verify": cmd_verify, "selftest": cmd_selftest}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
