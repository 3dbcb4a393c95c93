"""Aggregation of per-packet outcomes into the evaluation metrics.

Energy accounting charges the transmit cost once per transmitted bit, for
delivered and interfered packets alike (the node did transmit before a
clash was detected); guard drops and no-bond packets cost nothing, and
receive-side or sensing energy is not modeled.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence


class Outcome(enum.Enum):
    DELIVERED = "delivered"
    INTERFERED = "interfered"
    DROPPED_NO_BOND = "dropped_no_bond"
    DROPPED_GUARD = "dropped_guard"


@dataclass(frozen=True)
class MetricsReport:
    """Aggregated result of one simulation run."""

    sent: int
    delivered: int
    interfered: int
    dropped_no_bond: int
    dropped_guard: int
    delivery_ratio: float
    hir: float  # harmful-interference ratio: interfered / sent
    switches: int
    energy_consumed: float  # joules
    lifetime_packets: float  # packets transmittable on the initial energy; inf if none sent


def transmit_energy_per_packet(config) -> float:
    """Joules spent transmitting one packet."""
    return config.packet_bytes * 8 * config.tx_energy_per_bit


def build_report(
    delivered: int,
    interfered: int,
    dropped_no_bond: int,
    dropped_guard: int,
    switches: int,
    config,
) -> MetricsReport:
    sent = config.n_packets
    if delivered + interfered + dropped_no_bond + dropped_guard != sent:
        raise ValueError("outcome counts must sum to the number of packets sent")
    per_packet = transmit_energy_per_packet(config)
    transmitted = delivered + interfered
    if transmitted > 0:
        lifetime = float(math.floor(config.initial_energy / per_packet))
    else:
        lifetime = math.inf
    return MetricsReport(
        sent=sent,
        delivered=delivered,
        interfered=interfered,
        dropped_no_bond=dropped_no_bond,
        dropped_guard=dropped_guard,
        delivery_ratio=delivered / sent,
        hir=interfered / sent,
        switches=switches,
        energy_consumed=transmitted * per_packet,
        lifetime_packets=lifetime,
    )


def aggregate(records: Sequence, config) -> MetricsReport:
    """Aggregate a full per-packet record list into a MetricsReport.

    Channel switches count every packet whose bond differs from the
    previous packet's bond, plus one forced switch per interfered packet.
    """
    if not records:
        raise ValueError("cannot aggregate an empty record list")
    if len(records) != config.n_packets:
        raise ValueError(
            f"expected {config.n_packets} records, got {len(records)}"
        )
    counts = {outcome: 0 for outcome in Outcome}
    switched = 0
    for r in records:
        counts[r.outcome] += 1
        if r.switched:
            switched += 1
    interfered = counts[Outcome.INTERFERED]
    return build_report(
        delivered=counts[Outcome.DELIVERED],
        interfered=interfered,
        dropped_no_bond=counts[Outcome.DROPPED_NO_BOND],
        dropped_guard=counts[Outcome.DROPPED_GUARD],
        switches=switched + interfered,
        config=config,
    )
