"""Static unit-disk network topologies over a rectangular arena.

Nodes share one transmission radius; two nodes are connected iff their
Euclidean distance is at most that radius (boundary inclusive). Deployments
are seeded and reproduce bit-identically for the same (count, arena, seed).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

import numpy as np

from .geometry import Point2D


class UnknownNodeError(KeyError):
    """Node id not present in the network."""

    def __init__(self, node_id: int):
        super().__init__(node_id)
        self.node_id = node_id

    def __str__(self) -> str:
        return f"unknown node id {self.node_id}"


class EmptyNetworkError(ValueError):
    """Query requires at least one node."""


@dataclass(frozen=True)
class Arena:
    """Rectangular deployment region [0, width] x [0, height], in meters."""

    width: float
    height: float

    def __post_init__(self):
        if not (math.isfinite(self.width) and math.isfinite(self.height)):
            raise ValueError("arena dimensions must be finite")
        if self.width <= 0 or self.height <= 0:
            raise ValueError(
                f"arena dimensions must be > 0, got {self.width} x {self.height}"
            )

    def contains(self, point: Point2D) -> bool:
        return 0.0 <= point.x <= self.width and 0.0 <= point.y <= self.height


@dataclass(frozen=True)
class Node:
    id: int
    position: Point2D


@dataclass(frozen=True)
class GeocastRegion:
    """A geographic destination area, represented by its center point.

    The delivery target of a region is the deployed node nearest to the
    center; region extent is deliberately not modeled.
    """

    center: Point2D


class Network:
    """Immutable set of positioned nodes with a common transmission radius.

    Node ids must be unique and dense (0..count-1) and every position must lie
    inside the arena. Neighbor lists are precomputed at construction; all
    queries afterwards are read-only and safe for concurrent use.
    """

    def __init__(self, nodes: Sequence[Node], radius: float, arena: Arena):
        nodes = tuple(nodes)
        if radius <= 0 or not math.isfinite(radius):
            raise ValueError(f"radius must be > 0, got {radius}")
        for i, node in enumerate(nodes):
            if node.id != i:
                raise ValueError(
                    f"node ids must be dense 0..{len(nodes) - 1}; "
                    f"position {i} holds id {node.id}"
                )
            if not arena.contains(node.position):
                raise ValueError(
                    f"node {node.id} at ({node.position.x}, {node.position.y}) "
                    f"lies outside the {arena.width} x {arena.height} arena"
                )
        self.nodes = nodes
        self.radius = float(radius)
        self.arena = arena
        self._neighbor_ids: list[list[int]] = [[] for _ in nodes]
        for i in range(len(nodes)):
            pi = nodes[i].position
            for j in range(i + 1, len(nodes)):
                if pi.distance_to(nodes[j].position) <= radius:
                    self._neighbor_ids[i].append(j)
                    self._neighbor_ids[j].append(i)

    def __len__(self) -> int:
        return len(self.nodes)

    def node(self, node_id: int) -> Node:
        if not 0 <= node_id < len(self.nodes):
            raise UnknownNodeError(node_id)
        return self.nodes[node_id]

    def neighbor_ids(self, node_id: int) -> list[int]:
        """Ids of all nodes within the transmission radius, ascending."""
        self.node(node_id)
        return list(self._neighbor_ids[node_id])

    def neighbors(self, node_id: int) -> list[Node]:
        """Nodes within the transmission radius of ``node_id``, sorted by id."""
        return [self.nodes[i] for i in self.neighbor_ids(node_id)]

    def nearest_node(self, point: Point2D) -> Node:
        """The node closest to ``point``; ties resolve to the lowest id."""
        if not self.nodes:
            raise EmptyNetworkError("network has no nodes")
        best = self.nodes[0]
        best_d = best.position.distance_to(point)
        for node in self.nodes[1:]:
            d = node.position.distance_to(point)
            if d < best_d:
                best = node
                best_d = d
        return best


def deploy_nodes(count: int, arena: Arena, seed: int, radius: float) -> Network:
    """Seeded pseudo-random uniform deployment over the arena.

    The generator is pinned for reproducibility: numpy PCG64 seeded directly
    (``np.random.default_rng(seed)``), drawing ``count`` uniform doubles for
    the x coordinates and then ``count`` for the y coordinates. Identical
    (count, arena, seed) yield bit-identical positions on any platform.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    rng = np.random.default_rng(seed)
    xs = rng.uniform(0.0, arena.width, count)
    ys = rng.uniform(0.0, arena.height, count)
    nodes = [Node(i, Point2D(float(xs[i]), float(ys[i]))) for i in range(count)]
    return Network(nodes, radius, arena)


def write_topology_csv(network: Network, stream: IO[str]) -> None:
    """Snapshot export, header ``id,x,y``. Coordinates keep full precision."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["id", "x", "y"])
    for node in network.nodes:
        writer.writerow([node.id, repr(node.position.x), repr(node.position.y)])


def read_topology_csv(
    lines: Iterable[str], radius: float, arena: Arena | None = None
) -> Network:
    """Rebuild a network from a topology snapshot.

    When ``arena`` is omitted it is inferred as the positions' bounding box
    (at least 1 m per side so the arena stays valid).
    """
    reader = csv.reader(lines)
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["id", "x", "y"]:
        raise ValueError("topology CSV must start with header 'id,x,y'")
    nodes = []
    for row in reader:
        if not row:
            continue
        node_id, x, y = int(row[0]), float(row[1]), float(row[2])
        nodes.append(Node(node_id, Point2D(x, y)))
    if arena is None:
        if not nodes:
            raise ValueError("topology CSV contains no nodes")
        arena = Arena(
            max(max(n.position.x for n in nodes), 1.0),
            max(max(n.position.y for n in nodes), 1.0),
        )
    return Network(nodes, radius, arena)
