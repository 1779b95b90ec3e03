import io

import numpy as np
import pytest

from fermatcast.geometry import Point2D
from fermatcast.topology import (
    Arena,
    EmptyNetworkError,
    GeocastRegion,
    Network,
    Node,
    UnknownNodeError,
    deploy_nodes,
    read_topology_csv,
    write_topology_csv,
)

ARENA = Arena(1800.0, 1100.0)


def line_network(xs, radius, y=10.0, arena=Arena(1000.0, 1000.0)):
    nodes = [Node(i, Point2D(x, y)) for i, x in enumerate(xs)]
    return Network(nodes, radius, arena)


class TestArena:
    def test_rejects_nonpositive_dimensions(self):
        with pytest.raises(ValueError):
            Arena(0.0, 10.0)
        with pytest.raises(ValueError):
            Arena(10.0, -1.0)

    def test_contains_boundary_inclusive(self):
        a = Arena(10.0, 5.0)
        assert a.contains(Point2D(0, 0))
        assert a.contains(Point2D(10, 5))
        assert not a.contains(Point2D(10.0001, 2))


class TestDeploy:
    def test_zero_count_rejected(self):
        with pytest.raises(ValueError):
            deploy_nodes(0, ARENA, seed=1, radius=100)

    def test_determinism_bit_identical(self):
        a = deploy_nodes(200, ARENA, seed=42, radius=150)
        b = deploy_nodes(200, ARENA, seed=42, radius=150)
        assert [n.position for n in a.nodes] == [n.position for n in b.nodes]

    def test_positions_inside_paper_arena(self):
        net = deploy_nodes(200, ARENA, seed=42, radius=150)
        for node in net.nodes:
            assert 0.0 <= node.position.x <= 1800.0
            assert 0.0 <= node.position.y <= 1100.0

    def test_different_seeds_differ(self):
        a = deploy_nodes(50, ARENA, seed=1, radius=150)
        b = deploy_nodes(50, ARENA, seed=2, radius=150)
        assert [n.position for n in a.nodes] != [n.position for n in b.nodes]

    def test_radius_does_not_affect_positions(self):
        a = deploy_nodes(50, ARENA, seed=9, radius=50)
        b = deploy_nodes(50, ARENA, seed=9, radius=500)
        assert [n.position for n in a.nodes] == [n.position for n in b.nodes]


class TestNetworkValidation:
    def test_ids_must_be_dense(self):
        nodes = [Node(0, Point2D(1, 1)), Node(2, Point2D(2, 2))]
        with pytest.raises(ValueError):
            Network(nodes, 10.0, Arena(10, 10))

    def test_radius_positive(self):
        with pytest.raises(ValueError):
            Network([Node(0, Point2D(1, 1))], 0.0, Arena(10, 10))

    def test_positions_inside_arena(self):
        with pytest.raises(ValueError):
            Network([Node(0, Point2D(11, 1))], 5.0, Arena(10, 10))


class TestNeighbors:
    def test_pair_within_radius(self):
        net = line_network([0.0, 5.0], radius=10)
        assert net.neighbor_ids(0) == [1]
        assert net.neighbor_ids(1) == [0]

    def test_boundary_distance_counts(self):
        net = line_network([0.0, 10.0], radius=10)
        assert net.neighbor_ids(0) == [1]
        assert net.neighbor_ids(1) == [0]

    def test_regression_chain(self):
        # 3 collinear nodes at 0, 8, 9.5 with radius 10: 0 reaches both
        net = line_network([0.0, 8.0, 9.5], radius=10)
        assert net.neighbor_ids(0) == [1, 2]
        assert net.neighbor_ids(1) == [0, 2]
        assert net.neighbor_ids(2) == [0, 1]

    def test_unknown_node(self):
        net = line_network([0.0, 5.0], radius=10)
        with pytest.raises(UnknownNodeError):
            net.neighbors(2)
        with pytest.raises(UnknownNodeError):
            net.neighbors(-1)

    def test_symmetry_on_random_network(self):
        net = deploy_nodes(80, ARENA, seed=5, radius=200)
        for a in range(len(net)):
            for b in net.neighbor_ids(a):
                assert a in net.neighbor_ids(b)

    def test_neighbor_lists_sorted_and_self_free(self):
        net = deploy_nodes(60, ARENA, seed=6, radius=250)
        for a in range(len(net)):
            ids = net.neighbor_ids(a)
            assert ids == sorted(ids)
            assert a not in ids


class TestNearestNode:
    def test_single_node(self):
        net = line_network([3.0], radius=5)
        assert net.nearest_node(Point2D(900, 900)).id == 0

    def test_closest_wins(self):
        net = line_network([0.0, 10.0], radius=10)
        assert net.nearest_node(Point2D(4, 10)).id == 0

    def test_tie_breaks_to_lowest_id(self):
        net = line_network([0.0, 10.0], radius=10)
        assert net.nearest_node(Point2D(5, 10)).id == 0

    def test_node_position_maps_to_itself(self):
        net = deploy_nodes(40, ARENA, seed=8, radius=150)
        for node in net.nodes:
            assert net.nearest_node(node.position).id == node.id

    def test_empty_network(self):
        net = Network([], 10.0, Arena(10, 10))
        with pytest.raises(EmptyNetworkError):
            net.nearest_node(Point2D(1, 1))


class TestTopologyCsv:
    def test_round_trip_exact(self):
        net = deploy_nodes(25, ARENA, seed=3, radius=150)
        buf = io.StringIO()
        write_topology_csv(net, buf)
        rebuilt = read_topology_csv(
            io.StringIO(buf.getvalue()), radius=150, arena=ARENA
        )
        assert [n.position for n in rebuilt.nodes] == [n.position for n in net.nodes]

    def test_header_shape(self):
        net = line_network([0.0, 5.0], radius=10)
        buf = io.StringIO()
        write_topology_csv(net, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "id,x,y"
        assert len(lines) == 3

    def test_bad_header_rejected(self):
        with pytest.raises(ValueError):
            read_topology_csv(io.StringIO("x,y,id\n0,1,2\n"), radius=10)

    def test_arena_inferred(self):
        text = "id,x,y\n0,100.0,50.0\n1,20.0,80.0\n"
        net = read_topology_csv(io.StringIO(text), radius=200)
        assert net.arena.width == 100.0
        assert net.arena.height == 80.0


class TestGeocastRegion:
    def test_holds_center(self):
        region = GeocastRegion(Point2D(10, 20))
        assert region.center == Point2D(10, 20)


def test_numpy_stream_is_stable():
    # The deployment generator contract: PCG64, count x-draws then count
    # y-draws. Pin the first draws for seed 0 so silent generator changes
    # surface as a failure.
    rng = np.random.default_rng(0)
    expected_x = rng.uniform(0.0, 1800.0, 3)
    expected_y = rng.uniform(0.0, 1100.0, 3)
    net = deploy_nodes(3, ARENA, seed=0, radius=100)
    assert [n.position.x for n in net.nodes] == list(expected_x)
    assert [n.position.y for n in net.nodes] == list(expected_y)
