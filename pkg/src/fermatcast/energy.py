"""First-order radio energy accounting for route traces.

Transmitting an m-bit packet over distance d costs m*elec + m*amp*d^2 joules
(electronics plus amplifier); receiving it costs m*elec regardless of
distance. Every receiving node on a path, including the final destination,
pays the reception cost once per received copy. The sender's own reception is
never charged and idle listening is not modeled.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .forwarding import RouteTrace


class NegativeDistanceError(ValueError):
    """Transmission distance must be non-negative."""


@dataclass(frozen=True)
class RadioParams:
    """Radio energy model constants.

    Args:
        elec: Per-bit electronics energy, J/bit. Default 50 nJ/bit.
        amp: Amplifier coefficient, J/bit/m^2. Default 10 pJ/bit/m^2.
        packet_bits: Packet size in bits. Default 1000.
    """

    elec: float = 50e-9
    amp: float = 10e-12
    packet_bits: int = 1000

    def __post_init__(self):
        if self.elec <= 0:
            raise ValueError(f"elec must be > 0, got {self.elec}")
        if self.amp <= 0:
            raise ValueError(f"amp must be > 0, got {self.amp}")
        if self.packet_bits < 1:
            raise ValueError(f"packet_bits must be >= 1, got {self.packet_bits}")


@dataclass(frozen=True)
class EnergyReport:
    """Energy totals for one route, with the per-hop (tx, rx) breakdown."""

    tx_energy: float
    rx_energy: float
    total: float
    per_hop: tuple[tuple[float, float], ...]


def tx_energy(params: RadioParams, distance: float) -> float:
    """Energy to transmit one packet over ``distance`` meters.

    Returns:
        packet_bits * elec + packet_bits * amp * distance^2, in joules.
    """
    if distance < 0:
        raise NegativeDistanceError(f"distance must be >= 0, got {distance}")
    return (
        params.packet_bits * params.elec
        + params.packet_bits * params.amp * distance * distance
    )


def rx_energy(params: RadioParams) -> float:
    """Energy to receive one packet: packet_bits * elec, in joules."""
    return params.packet_bits * params.elec


def route_energy(params: RadioParams, trace: "RouteTrace") -> EnergyReport:
    """Energy spent along one route trace.

    Each hop transition of length d charges tx_energy(params, d) at the
    sender and rx_energy(params) at the receiver. A trace without
    transitions costs nothing.
    """
    per_hop = tuple(
        (tx_energy(params, d), rx_energy(params)) for d in trace.per_hop_distance
    )
    tx_total = sum(tx for tx, _ in per_hop)
    rx_total = sum(rx for _, rx in per_hop)
    return EnergyReport(
        tx_energy=tx_total,
        rx_energy=rx_total,
        total=tx_total + rx_total,
        per_hop=per_hop,
    )
