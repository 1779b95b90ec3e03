"""Seeded experiment sweeps comparing the multicast schemes.

A configuration is a line-oriented ``key = value`` document (see
``CONFIG_KEYS`` and the README for the full key list). One experiment cell is
a (seed, scheme) pair sharing the same topology and source node, so scheme
comparisons differ only in Fermat solver and forwarding rule. Every cell
yields one metrics row; rows where routing failed keep their status instead
of being dropped.
"""

from __future__ import annotations

import csv
import dataclasses
import statistics
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import IO, Iterable

from .energy import RadioParams, route_energy
from .forwarding import (
    GreedyRule,
    MulticastTrace,
    Scheme,
    SchemeArityMismatchError,
    fermat_multicast_route,
)
from .geometry import Point2D
from .topology import Arena, GeocastRegion, Network, deploy_nodes

DEFAULT_ARENA = Arena(1800.0, 1100.0)
DEFAULT_NODE_COUNT = 200
DEFAULT_RADIUS_M = 150.0
DEFAULT_SOURCE_POINT = Point2D(100.0, 100.0)

METRICS_HEADER = [
    "scheme",
    "seed",
    "node_count",
    "region_count",
    "fermat_x",
    "fermat_y",
    "relay_id",
    "total_hops",
    "total_distance_m",
    "total_energy_j",
    "status",
]

_SCHEME_COLORS = {
    Scheme.GEOMETRY_DRIVEN: "#1f77b4",
    Scheme.GLOBAL_MINIMA: "#ff7f0e",
    Scheme.IMIN: "#2ca02c",
}


class ParseError(ValueError):
    """Malformed configuration document (syntax, unknown key, bad scalar)."""


class ValidationError(ValueError):
    """Configuration violates an invariant; the message names it."""


@dataclass
class ExperimentConfig:
    regions: tuple[GeocastRegion, ...]
    arena: Arena = DEFAULT_ARENA
    node_count: int = DEFAULT_NODE_COUNT
    radius: float = DEFAULT_RADIUS_M
    seed: int = 0
    seeds: int = 1
    schemes: tuple[Scheme, ...] = (
        Scheme.GEOMETRY_DRIVEN,
        Scheme.GLOBAL_MINIMA,
        Scheme.IMIN,
    )
    grid_step: float = 1.0
    hop_limit: int | None = None  # None resolves to 10 * node_count
    source_point: Point2D = DEFAULT_SOURCE_POINT
    radio: RadioParams = RadioParams()
    rule: GreedyRule = GreedyRule.MAX_PROGRESS

    @property
    def effective_hop_limit(self) -> int:
        return self.hop_limit if self.hop_limit is not None else 10 * self.node_count

    def validate(self) -> None:
        if not self.regions:
            raise ValidationError("regions must be provided and non-empty")
        if self.node_count < 1:
            raise ValidationError(f"nodes.count must be >= 1, got {self.node_count}")
        if self.radius <= 0:
            raise ValidationError(f"nodes.radius_m must be > 0, got {self.radius}")
        if self.seeds < 1:
            raise ValidationError(f"seeds must be >= 1, got {self.seeds}")
        if self.grid_step <= 0:
            raise ValidationError(f"grid.step_m must be > 0, got {self.grid_step}")
        if self.hop_limit is not None and self.hop_limit < 1:
            raise ValidationError(f"hop.limit must be >= 1, got {self.hop_limit}")
        if not self.schemes:
            raise ValidationError("schemes must be non-empty")
        for region in self.regions:
            if not self.arena.contains(region.center):
                raise ValidationError(
                    f"region center ({region.center.x}, {region.center.y}) lies "
                    f"outside the {self.arena.width} x {self.arena.height} arena"
                )


def _parse_regions(value: str) -> tuple[GeocastRegion, ...]:
    regions = []
    for chunk in value.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(",")
        if len(parts) != 2:
            raise ValueError(f"region '{chunk}' is not 'x,y'")
        regions.append(GeocastRegion(Point2D(float(parts[0]), float(parts[1]))))
    return tuple(regions)


def _parse_schemes(value: str) -> tuple[Scheme, ...]:
    names = {s.value: s for s in Scheme}
    schemes = []
    for chunk in value.split(","):
        chunk = chunk.strip()
        if chunk not in names:
            raise ValueError(
                f"unknown scheme '{chunk}' (expected one of {sorted(names)})"
            )
        schemes.append(names[chunk])
    return tuple(schemes)


def _parse_rule(value: str) -> GreedyRule:
    names = {r.value: r for r in GreedyRule}
    if value not in names:
        raise ValueError(f"unknown rule '{value}' (expected one of {sorted(names)})")
    return names[value]


# key -> (converter, target field); later assignments override earlier ones.
CONFIG_KEYS = {
    "arena.width": (float, "arena_width"),
    "arena.height": (float, "arena_height"),
    "nodes.count": (int, "node_count"),
    "nodes.radius_m": (float, "radius"),
    "seed": (int, "seed"),
    "seeds": (int, "seeds"),
    "regions": (_parse_regions, "regions"),
    "schemes": (_parse_schemes, "schemes"),
    "grid.step_m": (float, "grid_step"),
    "hop.limit": (int, "hop_limit"),
    "source.x": (float, "source_x"),
    "source.y": (float, "source_y"),
    "energy.elec_nj_per_bit": (float, "elec_nj"),
    "energy.amp_pj_per_bit_m2": (float, "amp_pj"),
    "packet.bits": (int, "packet_bits"),
    "forwarding.rule": (_parse_rule, "rule"),
}


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a ``key = value`` configuration document.

    Blank lines and ``#`` comments are ignored. Unknown keys and malformed
    values raise ParseError with the offending line; invariant violations
    raise ValidationError.
    """
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected 'key = value', got '{raw.strip()}'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip().strip('"')
        if key not in CONFIG_KEYS:
            raise ParseError(f"line {lineno}: unknown key '{key}'")
        converter, field = CONFIG_KEYS[key]
        try:
            values[field] = converter(value)
        except ValueError as exc:
            raise ParseError(f"line {lineno}: bad value for '{key}': {exc}") from exc

    try:
        arena = Arena(
            float(values.pop("arena_width", DEFAULT_ARENA.width)),
            float(values.pop("arena_height", DEFAULT_ARENA.height)),
        )
        source = Point2D(
            float(values.pop("source_x", DEFAULT_SOURCE_POINT.x)),
            float(values.pop("source_y", DEFAULT_SOURCE_POINT.y)),
        )
        radio = RadioParams(
            elec=float(values.pop("elec_nj", 50.0)) * 1e-9,
            amp=float(values.pop("amp_pj", 10.0)) * 1e-12,
            packet_bits=int(values.pop("packet_bits", 1000)),
        )
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc

    config = ExperimentConfig(
        regions=values.pop("regions", ()),
        arena=arena,
        source_point=source,
        radio=radio,
        **values,
    )
    config.validate()
    return config


@dataclass(frozen=True)
class MetricsRow:
    """One (seed, scheme) experiment cell. Numeric fields are None when the
    scheme could not run at all (e.g. a scheme/region arity mismatch)."""

    scheme: str
    seed: int
    node_count: int
    region_count: int
    fermat_x: float | None
    fermat_y: float | None
    relay_id: int | None
    total_hops: int | None
    total_distance_m: float | None
    total_energy_j: float | None
    status: str


@dataclass(frozen=True)
class SchemeOutcome:
    scheme: Scheme
    trace: MulticastTrace | None
    error: str | None


@dataclass(frozen=True)
class SeedRun:
    """Everything one seed produced: the topology plus per-scheme outcomes."""

    seed: int
    network: Network
    source_id: int
    outcomes: tuple[SchemeOutcome, ...]


def run_seed(config: ExperimentConfig, seed: int) -> SeedRun:
    """Deploy the seed's topology and run every configured scheme on it."""
    network = deploy_nodes(config.node_count, config.arena, seed, config.radius)
    source_id = network.nearest_node(config.source_point).id
    outcomes = []
    for scheme in config.schemes:
        try:
            trace = fermat_multicast_route(
                network,
                source_id,
                config.regions,
                scheme,
                hop_limit=config.effective_hop_limit,
                energy_params=config.radio,
                grid_step=config.grid_step,
                rule=config.rule,
            )
            outcomes.append(SchemeOutcome(scheme, trace, None))
        except SchemeArityMismatchError:
            outcomes.append(SchemeOutcome(scheme, None, "SchemeArityMismatch"))
    return SeedRun(seed, network, source_id, tuple(outcomes))


def rows_from_seed_run(config: ExperimentConfig, run: SeedRun) -> list[MetricsRow]:
    rows = []
    for outcome in run.outcomes:
        if outcome.trace is None:
            rows.append(
                MetricsRow(
                    scheme=outcome.scheme.value,
                    seed=run.seed,
                    node_count=config.node_count,
                    region_count=len(config.regions),
                    fermat_x=None,
                    fermat_y=None,
                    relay_id=None,
                    total_hops=None,
                    total_distance_m=None,
                    total_energy_j=None,
                    status=outcome.error or "Error",
                )
            )
            continue
        trace = outcome.trace
        rows.append(
            MetricsRow(
                scheme=outcome.scheme.value,
                seed=run.seed,
                node_count=config.node_count,
                region_count=len(config.regions),
                fermat_x=trace.fermat.point.x,
                fermat_y=trace.fermat.point.y,
                relay_id=trace.relay_id,
                total_hops=trace.total_hops,
                total_distance_m=trace.total_distance,
                total_energy_j=trace.total_energy,
                status=trace.status.value,
            )
        )
    return rows


def run_experiment(config: ExperimentConfig) -> list[MetricsRow]:
    """One metrics row per (seed, scheme) cell, in deterministic order."""
    config.validate()
    rows = []
    for seed in range(config.seed, config.seed + config.seeds):
        rows.extend(rows_from_seed_run(config, run_seed(config, seed)))
    return rows


def _fmt(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".6g")
    return str(value)


def emit_csv(rows: Iterable[MetricsRow], stream: IO[str]) -> None:
    """Write metrics rows as CSV, floats at 6 significant digits."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(METRICS_HEADER)
    for row in rows:
        writer.writerow(
            [
                row.scheme,
                row.seed,
                row.node_count,
                row.region_count,
                _fmt(row.fermat_x),
                _fmt(row.fermat_y),
                _fmt(row.relay_id),
                _fmt(row.total_hops),
                _fmt(row.total_distance_m),
                _fmt(row.total_energy_j),
                row.status,
            ]
        )


def parse_metrics_csv(lines: Iterable[str]) -> list[MetricsRow]:
    """Inverse of emit_csv; empty fields parse back as None."""
    reader = csv.reader(lines)
    header = next(reader, None)
    if header != METRICS_HEADER:
        raise ValueError(f"unexpected metrics header {header}")

    def opt(value: str, conv):
        return conv(value) if value != "" else None

    rows = []
    for row in reader:
        if not row:
            continue
        rows.append(
            MetricsRow(
                scheme=row[0],
                seed=int(row[1]),
                node_count=int(row[2]),
                region_count=int(row[3]),
                fermat_x=opt(row[4], float),
                fermat_y=opt(row[5], float),
                relay_id=opt(row[6], int),
                total_hops=opt(row[7], int),
                total_distance_m=opt(row[8], float),
                total_energy_j=opt(row[9], float),
                status=row[10],
            )
        )
    return rows


def recompute_total_energy(config: ExperimentConfig, trace: MulticastTrace) -> float:
    """Re-derive a trace's energy from its per-hop distances (cross-check)."""
    return sum(route_energy(config.radio, leg).total for leg in trace.legs)


def render_svg(
    network: Network, traces: Iterable[MulticastTrace], stream: IO[str]
) -> None:
    """Standalone SVG: node dots, the source's dashed radius circle, route
    polylines color-keyed by scheme, and a cross at each Fermat point."""
    traces = list(traces)
    arena = network.arena
    margin = max(network.radius, 0.05 * max(arena.width, arena.height))
    width = arena.width + 2 * margin
    height = arena.height + 2 * margin

    def sx(x: float) -> str:
        return format(x + margin, ".2f")

    def sy(y: float) -> str:
        return format(arena.height - y + margin, ".2f")  # y up

    svg = ET.Element(
        "svg",
        {
            "xmlns": "http://www.w3.org/2000/svg",
            "viewBox": f"0 0 {width:.2f} {height:.2f}",
            "width": "900",
        },
    )
    ET.SubElement(
        svg,
        "rect",
        {
            "x": sx(0.0),
            "y": sy(arena.height),
            "width": format(arena.width, ".2f"),
            "height": format(arena.height, ".2f"),
            "fill": "none",
            "stroke": "#999999",
        },
    )
    dot_r = max(2.0, 0.004 * max(arena.width, arena.height))
    for node in network.nodes:
        ET.SubElement(
            svg,
            "circle",
            {
                "cx": sx(node.position.x),
                "cy": sy(node.position.y),
                "r": format(dot_r, ".2f"),
                "fill": "#444444",
            },
        )
    if traces:
        source = network.node(traces[0].source_leg.hops[0]).position
        ET.SubElement(
            svg,
            "circle",
            {
                "cx": sx(source.x),
                "cy": sy(source.y),
                "r": format(network.radius, ".2f"),
                "fill": "none",
                "stroke": "#555555",
                "stroke-dasharray": "8 6",
            },
        )
    for trace in traces:
        color = _SCHEME_COLORS.get(trace.scheme, "#d62728")
        for leg in trace.legs:
            points = " ".join(
                f"{sx(network.node(h).position.x)},{sy(network.node(h).position.y)}"
                for h in leg.hops
            )
            ET.SubElement(
                svg,
                "polyline",
                {
                    "points": points,
                    "fill": "none",
                    "stroke": color,
                    "stroke-width": format(max(1.5, dot_r * 0.6), ".2f"),
                    "stroke-opacity": "0.8",
                },
            )
        fp = trace.fermat.point
        arm = 3.0 * dot_r
        for dx, dy in ((arm, arm), (arm, -arm)):
            x0, y0 = fp.x - dx, fp.y - dy
            x1, y1 = fp.x + dx, fp.y + dy
            ET.SubElement(
                svg,
                "path",
                {
                    "d": f"M {sx(x0)} {sy(y0)} L {sx(x1)} {sy(y1)}",
                    "stroke": color,
                    "stroke-width": format(max(1.5, dot_r * 0.6), ".2f"),
                },
            )
    stream.write(ET.tostring(svg, encoding="unicode"))
    stream.write("\n")


@dataclass(frozen=True)
class SweepRow:
    """Per (region_count, scheme) aggregate over all seeds of a sweep."""

    region_count: int
    scheme: str
    rows: int
    delivered: int
    mean_total_hops: float | None
    mean_total_distance_m: float | None
    mean_total_energy_j: float | None


SWEEP_HEADER = [
    "region_count",
    "scheme",
    "rows",
    "delivered",
    "mean_total_hops",
    "mean_total_distance_m",
    "mean_total_energy_j",
]


def run_sweep(config: ExperimentConfig, max_regions: int) -> list[SweepRow]:
    """Vary the region count from 2 to ``max_regions`` using prefixes of the
    configured region list, aggregating each (count, scheme) over all seeds.

    Means cover the rows that produced metrics (any routing status); rows a
    scheme could not run at all are counted in ``rows`` but not averaged.
    """
    if max_regions < 2:
        raise ValidationError(f"max_regions must be >= 2, got {max_regions}")
    if len(config.regions) < max_regions:
        raise ValidationError(
            f"config provides {len(config.regions)} regions; sweep needs {max_regions}"
        )
    sweep_rows = []
    for count in range(2, max_regions + 1):
        sub = dataclasses.replace(config, regions=config.regions[:count])
        rows = run_experiment(sub)
        for scheme in sub.schemes:
            cell = [r for r in rows if r.scheme == scheme.value]
            with_metrics = [r for r in cell if r.total_hops is not None]

            def mean(field: str) -> float | None:
                if not with_metrics:
                    return None
                return statistics.fmean(getattr(r, field) for r in with_metrics)

            sweep_rows.append(
                SweepRow(
                    region_count=count,
                    scheme=scheme.value,
                    rows=len(cell),
                    delivered=sum(1 for r in cell if r.status == "Delivered"),
                    mean_total_hops=mean("total_hops"),
                    mean_total_distance_m=mean("total_distance_m"),
                    mean_total_energy_j=mean("total_energy_j"),
                )
            )
    return sweep_rows


def emit_sweep_csv(rows: Iterable[SweepRow], stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for row in rows:
        writer.writerow(
            [
                row.region_count,
                row.scheme,
                row.rows,
                row.delivered,
                _fmt(row.mean_total_hops),
                _fmt(row.mean_total_distance_m),
                _fmt(row.mean_total_energy_j),
            ]
        )
