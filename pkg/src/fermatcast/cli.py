"""Command line front end.

Subcommands: ``fermat`` (solve one anchor set with every method), ``route``
(one unicast route as a trace CSV), ``simulate`` (config file to metrics CSV,
optional SVG renders) and ``sweep`` (vary the region count, aggregate CSV).

Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .experiment import (
    ParseError,
    ValidationError,
    emit_csv,
    emit_sweep_csv,
    parse_config,
    render_svg,
    rows_from_seed_run,
    run_seed,
    run_sweep,
)
from .forwarding import (
    GreedyRule,
    greedy_route,
    imin_route,
    multicast_legs,
    write_trace_csv,
)
from .geometry import (
    AnchorSet,
    Point2D,
    SearchBounds,
    minima_fermat_point,
    torricelli_triangle,
    weiszfeld_fermat_point,
)
from .topology import Arena, deploy_nodes, read_topology_csv


class CliError(Exception):
    """Usage or configuration problem surfaced to the user (exit code 1)."""


def _parse_point(text: str) -> Point2D:
    parts = text.split(",")
    if len(parts) != 2:
        raise CliError(f"expected 'x,y', got '{text}'")
    try:
        return Point2D(float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise CliError(f"bad point '{text}': {exc}") from exc


def _load_anchor_points(args) -> list[Point2D]:
    if args.anchors and args.anchors_file:
        raise CliError("use either --anchors or --anchors-file, not both")
    if args.anchors:
        chunks = [c.strip() for c in args.anchors.split(";") if c.strip()]
        return [_parse_point(c) for c in chunks]
    if args.anchors_file:
        try:
            text = Path(args.anchors_file).read_text()
        except OSError as exc:
            raise CliError(f"cannot read {args.anchors_file}: {exc}") from exc
        lines = [l.split("#", 1)[0].strip() for l in text.splitlines()]
        return [_parse_point(l) for l in lines if l]
    raise CliError("provide anchors via --anchors or --anchors-file")


def _open_out(args):
    if getattr(args, "out", None):
        return open(args.out, "w", newline="")
    return None


def cmd_fermat(args) -> int:
    points = _load_anchor_points(args)
    if len(points) < 2:
        raise CliError("need at least 2 anchors (source plus one destination)")
    anchors = AnchorSet(points[0], tuple(points[1:]))
    results = [
        minima_fermat_point(anchors, SearchBounds.from_anchors(anchors, args.step)),
        weiszfeld_fermat_point(anchors, args.tolerance, args.max_iterations),
    ]
    if len(points) == 3:
        results.append(torricelli_triangle(points[0], points[1], points[2]))

    out = _open_out(args)
    stream = out or sys.stdout
    try:
        stream.write("method,fermat_x,fermat_y,total_distance_m\n")
        for result in results:
            stream.write(
                f"{result.method.value},{result.point.x:.6g},"
                f"{result.point.y:.6g},{result.total_distance:.6g}\n"
            )
    finally:
        if out:
            out.close()
    return 0


def _build_route_network(args):
    if args.topology:
        try:
            with open(args.topology, newline="") as fh:
                return read_topology_csv(fh, radius=args.radius)
        except OSError as exc:
            raise CliError(f"cannot read {args.topology}: {exc}") from exc
        except ValueError as exc:
            raise CliError(str(exc)) from exc
    if args.nodes is None:
        raise CliError("provide a topology via --topology or --nodes/--arena/--seed")
    arena = Arena(args.arena[0], args.arena[1])
    return deploy_nodes(args.nodes, arena, args.seed, args.radius)


def cmd_route(args) -> int:
    network = _build_route_network(args)
    router = imin_route if args.forwarding == "imin" else greedy_route
    rule = GreedyRule(args.greedy_rule)
    trace = router(network, args.source, args.dest, args.hop_limit, rule)
    out = _open_out(args)
    try:
        write_trace_csv(network, [("route", trace)], out or sys.stdout)
    finally:
        if out:
            out.close()
    print(
        f"status={trace.status.value} transitions={trace.transitions} "
        f"distance_m={trace.total_distance:.6g}",
        file=sys.stderr,
    )
    return 0


def _read_config(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def _svg_path(template: str, seed: int, multi: bool) -> Path:
    path = Path(template)
    if not multi:
        return path
    return path.with_name(f"{path.stem}_seed{seed}{path.suffix or '.svg'}")


def cmd_simulate(args) -> int:
    config = _read_config(args.config)
    seed_runs = [
        run_seed(config, seed)
        for seed in range(config.seed, config.seed + config.seeds)
    ]
    rows = []
    for run in seed_runs:
        rows.extend(rows_from_seed_run(config, run))
    out = _open_out(args)
    try:
        emit_csv(rows, out or sys.stdout)
    finally:
        if out:
            out.close()
    if args.svg:
        for run in seed_runs:
            traces = [o.trace for o in run.outcomes if o.trace is not None]
            target = _svg_path(args.svg, run.seed, config.seeds > 1)
            with open(target, "w") as fh:
                render_svg(run.network, traces, fh)
    return 0


def cmd_sweep(args) -> int:
    config = _read_config(args.config)
    rows = run_sweep(config, args.max_regions)
    out = _open_out(args)
    try:
        emit_sweep_csv(rows, out or sys.stdout)
    finally:
        if out:
            out.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fermatcast",
        description="Fermat-point geocast forwarding simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fermat = sub.add_parser(
        "fermat", help="locate the Fermat point of an anchor set by every method"
    )
    p_fermat.add_argument(
        "--anchors", help="semicolon-separated 'x,y' pairs, source first"
    )
    p_fermat.add_argument(
        "--anchors-file", help="file with one 'x,y' per line, source first"
    )
    p_fermat.add_argument("--step", type=float, default=1.0, help="grid step, m")
    p_fermat.add_argument("--tolerance", type=float, default=1e-6)
    p_fermat.add_argument("--max-iterations", type=int, default=1000)
    p_fermat.add_argument("--out", help="output CSV path (default stdout)")
    p_fermat.set_defaults(func=cmd_fermat)

    p_route = sub.add_parser("route", help="route one unicast and emit its trace CSV")
    p_route.add_argument("--topology", help="topology CSV (header id,x,y)")
    p_route.add_argument("--nodes", type=int, help="deploy this many nodes instead")
    p_route.add_argument(
        "--arena",
        type=float,
        nargs=2,
        metavar=("W", "H"),
        default=(1800.0, 1100.0),
    )
    p_route.add_argument("--seed", type=int, default=0)
    p_route.add_argument("--radius", type=float, required=True, help="radio range, m")
    p_route.add_argument("--source", type=int, required=True)
    p_route.add_argument("--dest", type=int, required=True)
    p_route.add_argument(
        "--forwarding", choices=("greedy", "imin"), default="imin"
    )
    p_route.add_argument(
        "--greedy-rule",
        choices=tuple(r.value for r in GreedyRule),
        default=GreedyRule.MAX_PROGRESS.value,
    )
    p_route.add_argument("--hop-limit", type=int, default=None)
    p_route.add_argument("--out", help="output CSV path (default stdout)")
    p_route.set_defaults(func=cmd_route)

    p_sim = sub.add_parser("simulate", help="run a config file, emit metrics CSV")
    p_sim.add_argument("--config", required=True)
    p_sim.add_argument("--out", help="output CSV path (default stdout)")
    p_sim.add_argument(
        "--svg", help="also render each seed's topology and routes to SVG"
    )
    p_sim.set_defaults(func=cmd_simulate)

    p_sweep = sub.add_parser(
        "sweep", help="vary region count 2..N over the config's regions"
    )
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--max-regions", type=int, required=True)
    p_sweep.add_argument("--out", help="output CSV path (default stdout)")
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse prints its own message
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except (CliError, ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary, report and fail
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2


def run() -> None:
    sys.exit(main())
