"""Fermat-point geocast forwarding simulator.

A library for locating geometric medians (Fermat points) of a source plus a
set of geocast region centers, routing packets hop by hop through seeded
unit-disk networks, and comparing forwarding schemes on hops, distance and
radio energy.
"""

from .energy import (
    EnergyReport,
    NegativeDistanceError,
    RadioParams,
    route_energy,
    rx_energy,
    tx_energy,
)
from .forwarding import (
    GreedyRule,
    MulticastTrace,
    RouteStatus,
    RouteTrace,
    Scheme,
    SchemeArityMismatchError,
    fermat_multicast_route,
    greedy_next_hop,
    greedy_route,
    imin_route,
    multicast_legs,
    write_trace_csv,
)
from .geometry import (
    AnchorSet,
    CoincidentAnchorError,
    EmptyGridError,
    FermatMethod,
    FermatResult,
    NoConvergenceError,
    Point2D,
    SearchBounds,
    gradient_terms,
    minima_fermat_point,
    torricelli_triangle,
    total_path_distance,
    weiszfeld_fermat_point,
)
from .experiment import (
    ExperimentConfig,
    MetricsRow,
    ParseError,
    SeedRun,
    SweepRow,
    ValidationError,
    emit_csv,
    emit_sweep_csv,
    parse_config,
    parse_metrics_csv,
    render_svg,
    run_experiment,
    run_seed,
    run_sweep,
)
from .topology import (
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

__version__ = "0.1.0"

__all__ = [
    "AnchorSet",
    "Arena",
    "CoincidentAnchorError",
    "EmptyGridError",
    "EmptyNetworkError",
    "EnergyReport",
    "ExperimentConfig",
    "FermatMethod",
    "FermatResult",
    "GeocastRegion",
    "GreedyRule",
    "MetricsRow",
    "MulticastTrace",
    "NegativeDistanceError",
    "Network",
    "NoConvergenceError",
    "Node",
    "ParseError",
    "Point2D",
    "RadioParams",
    "RouteStatus",
    "RouteTrace",
    "Scheme",
    "SchemeArityMismatchError",
    "SearchBounds",
    "SeedRun",
    "SweepRow",
    "UnknownNodeError",
    "ValidationError",
    "deploy_nodes",
    "emit_csv",
    "emit_sweep_csv",
    "fermat_multicast_route",
    "gradient_terms",
    "greedy_next_hop",
    "greedy_route",
    "imin_route",
    "minima_fermat_point",
    "multicast_legs",
    "parse_config",
    "parse_metrics_csv",
    "read_topology_csv",
    "render_svg",
    "route_energy",
    "run_experiment",
    "run_seed",
    "run_sweep",
    "rx_energy",
    "torricelli_triangle",
    "total_path_distance",
    "tx_energy",
    "weiszfeld_fermat_point",
    "write_topology_csv",
    "write_trace_csv",
]
