"""Hop-by-hop geographic forwarding and Fermat-point multicast composition.

Two unicast forwarders are provided. ``greedy_route`` is the flat greedy
baseline: every step hands the packet to the neighbor with the most forward
progress toward the destination, which can overshoot a destination that is
already in range and then oscillate. ``imin_route`` adds a destination check
before each selection: when the destination is already a neighbor the packet
is unicast straight to it, which removes that whole family of route loops.

``fermat_multicast_route`` composes either forwarder with a Fermat-point
solver: the packet travels source -> relay (the node nearest the Fermat
point), then relay -> each geocast target as separate unicasts.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from typing import IO, Iterable, Sequence

from .energy import RadioParams, route_energy
from .geometry import (
    AnchorSet,
    FermatResult,
    SearchBounds,
    minima_fermat_point,
    torricelli_triangle,
)
from .topology import GeocastRegion, Network


class SchemeArityMismatchError(ValueError):
    """The GeometryDriven scheme handles exactly two geocast regions."""


class RouteStatus(Enum):
    DELIVERED = "Delivered"
    LOOP_DETECTED = "LoopDetected"
    VOID = "Void"
    HOP_LIMIT_EXCEEDED = "HopLimitExceeded"


class Scheme(Enum):
    """Multicast scheme: Fermat solver plus forwarding rule."""

    GEOMETRY_DRIVEN = "GeometryDriven"  # Torricelli triangle + flat greedy
    GLOBAL_MINIMA = "GlobalMinima"  # grid scan + flat greedy
    IMIN = "IMin"  # grid scan + destination-aware greedy


class GreedyRule(Enum):
    # Default rule: maximum positive projection toward the destination
    # (most forward within radius; may overshoot an in-range destination).
    MAX_PROGRESS = "max_progress"
    # Sensitivity variant: neighbor strictly closest to the destination.
    MIN_REMAINING = "min_remaining"


@dataclass(frozen=True)
class RouteTrace:
    """One unicast leg: visited node ids, per-transition distances, outcome."""

    hops: tuple[int, ...]
    per_hop_distance: tuple[float, ...]
    status: RouteStatus

    @property
    def transitions(self) -> int:
        return len(self.hops) - 1

    @property
    def total_distance(self) -> float:
        return sum(self.per_hop_distance)

    @property
    def delivered(self) -> bool:
        return self.status is RouteStatus.DELIVERED


@dataclass(frozen=True)
class MulticastTrace:
    """A composed source -> relay -> destinations route set with aggregates."""

    scheme: Scheme
    fermat: FermatResult
    relay_id: int
    source_leg: RouteTrace
    destination_legs: tuple[RouteTrace, ...]
    total_hops: int
    total_distance: float
    total_energy: float

    @property
    def legs(self) -> tuple[RouteTrace, ...]:
        return (self.source_leg,) + self.destination_legs

    @property
    def delivered(self) -> bool:
        return all(leg.delivered for leg in self.legs)

    @property
    def status(self) -> RouteStatus:
        for leg in self.legs:
            if not leg.delivered:
                return leg.status
        return RouteStatus.DELIVERED


def greedy_next_hop(
    network: Network,
    current: int,
    destination: int,
    rule: GreedyRule = GreedyRule.MAX_PROGRESS,
) -> int | None:
    """Pick the next hop by the greedy rule, or None when no neighbor qualifies.

    MAX_PROGRESS scores each neighbor by the scalar projection of
    (neighbor - current) onto the unit vector toward the destination and takes
    the maximum strictly positive score. MIN_REMAINING takes the neighbor
    strictly closest to the destination. Ties resolve to the lowest node id.
    """
    if current == destination:
        raise ValueError("current and destination must differ")
    cur = network.node(current).position
    dst = network.node(destination).position
    dist = cur.distance_to(dst)
    if dist == 0.0:
        return None  # coincident destination: no forward direction is defined
    ux = (dst.x - cur.x) / dist
    uy = (dst.y - cur.y) / dist

    best: int | None = None
    best_score = 0.0
    for nb in network.neighbors(current):  # ascending id: strict compare keeps ties low
        if rule is GreedyRule.MAX_PROGRESS:
            progress = (nb.position.x - cur.x) * ux + (nb.position.y - cur.y) * uy
            if progress <= 0.0:
                continue
            if best is None or progress > best_score:
                best = nb.id
                best_score = progress
        else:
            remaining = nb.position.distance_to(dst)
            if remaining >= dist:
                continue
            if best is None or remaining < best_score:
                best = nb.id
                best_score = remaining
    return best


def _route(
    network: Network,
    source: int,
    destination: int,
    hop_limit: int | None,
    deliver_to_neighbor: bool,
    rule: GreedyRule,
) -> RouteTrace:
    network.node(source)
    network.node(destination)
    if hop_limit is None:
        hop_limit = 10 * len(network)  # guards non-repeating stagnation
    if hop_limit < 1:
        raise ValueError(f"hop_limit must be >= 1, got {hop_limit}")

    hops = [source]
    distances: list[float] = []
    visited = {source}
    while True:
        current = hops[-1]
        if current == destination:
            status = RouteStatus.DELIVERED
            break
        if len(distances) >= hop_limit:
            status = RouteStatus.HOP_LIMIT_EXCEEDED
            break
        if deliver_to_neighbor and destination in network.neighbor_ids(current):
            nxt = destination
        else:
            nxt = greedy_next_hop(network, current, destination, rule)
        if nxt is None:
            status = RouteStatus.VOID
            break
        hops.append(nxt)
        distances.append(
            network.node(current).position.distance_to(network.node(nxt).position)
        )
        if nxt in visited:
            status = RouteStatus.LOOP_DETECTED
            break
        visited.add(nxt)
    return RouteTrace(tuple(hops), tuple(distances), status)


def greedy_route(
    network: Network,
    source: int,
    destination: int,
    hop_limit: int | None = None,
    rule: GreedyRule = GreedyRule.MAX_PROGRESS,
) -> RouteTrace:
    """Flat greedy forwarding; never short-circuits to an in-range destination."""
    return _route(network, source, destination, hop_limit, False, rule)


def imin_route(
    network: Network,
    source: int,
    destination: int,
    hop_limit: int | None = None,
    rule: GreedyRule = GreedyRule.MAX_PROGRESS,
) -> RouteTrace:
    """Destination-aware greedy: before every selection, check whether the
    destination is already a neighbor and if so unicast directly to it."""
    return _route(network, source, destination, hop_limit, True, rule)


def fermat_multicast_route(
    network: Network,
    source: int,
    regions: Sequence[GeocastRegion],
    scheme: Scheme,
    hop_limit: int | None = None,
    energy_params: RadioParams | None = None,
    grid_step: float = 1.0,
    rule: GreedyRule = GreedyRule.MAX_PROGRESS,
) -> MulticastTrace:
    """Route one packet from ``source`` to every region via the Fermat point.

    The Fermat point of {source position} union {region centers} comes from
    the Torricelli construction for GeometryDriven (exactly two regions) and
    from the grid scan for GlobalMinima and IMin. The relay is the node
    nearest that point. All legs are routed and accounted even when an
    earlier leg fails, so scheme comparisons see every leg's cost; ``status``
    aggregates the first failure.
    """
    if not regions:
        raise ValueError("regions must be non-empty")
    src = network.node(source)
    params = energy_params if energy_params is not None else RadioParams()
    centers = [r.center for r in regions]

    if scheme is Scheme.GEOMETRY_DRIVEN:
        if len(centers) != 2:
            raise SchemeArityMismatchError(
                f"GeometryDriven needs exactly 2 regions, got {len(centers)}"
            )
        fermat = torricelli_triangle(src.position, centers[0], centers[1])
    else:
        anchors = AnchorSet(src.position, tuple(centers))
        bounds = SearchBounds.from_anchors(anchors, step=grid_step)
        fermat = minima_fermat_point(anchors, bounds)

    relay = network.nearest_node(fermat.point)
    router = imin_route if scheme is Scheme.IMIN else greedy_route
    source_leg = router(network, source, relay.id, hop_limit, rule)
    destination_legs = tuple(
        router(network, relay.id, network.nearest_node(center).id, hop_limit, rule)
        for center in centers
    )

    legs = (source_leg,) + destination_legs
    total_hops = sum(leg.transitions for leg in legs)
    total_distance = sum(leg.total_distance for leg in legs)
    total_energy = sum(route_energy(params, leg).total for leg in legs)
    return MulticastTrace(
        scheme=scheme,
        fermat=fermat,
        relay_id=relay.id,
        source_leg=source_leg,
        destination_legs=destination_legs,
        total_hops=total_hops,
        total_distance=total_distance,
        total_energy=total_energy,
    )


def multicast_legs(trace: MulticastTrace) -> list[tuple[str, RouteTrace]]:
    """Labelled legs of a multicast trace: source first, then dest1..destN."""
    labelled = [("source", trace.source_leg)]
    labelled += [
        (f"dest{i + 1}", leg) for i, leg in enumerate(trace.destination_legs)
    ]
    return labelled


def write_trace_csv(
    network: Network, legs: Iterable[tuple[str, RouteTrace]], stream: IO[str]
) -> None:
    """Trace export, header ``leg,seq,node_id,x,y,hop_distance_m``.

    ``hop_distance_m`` is the length of the transition into the row's node;
    the first node of each leg carries 0.
    """
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["leg", "seq", "node_id", "x", "y", "hop_distance_m"])
    for label, trace in legs:
        for seq, node_id in enumerate(trace.hops):
            pos = network.node(node_id).position
            hop = trace.per_hop_distance[seq - 1] if seq > 0 else 0.0
            writer.writerow(
                [
                    label,
                    seq,
                    node_id,
                    format(pos.x, ".6g"),
                    format(pos.y, ".6g"),
                    format(hop, ".6g"),
                ]
            )
