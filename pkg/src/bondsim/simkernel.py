"""Packet-by-packet simulation of one transmitter-receiver pair.

Each packet: advance simulated time, sense every channel, let the scheme
pick a bond, then resolve the transmission against the true channel
timelines.  A clash means some bond member is busy at any point of the
airtime window; interference-capable schemes transmit into it (Interfered)
while ritcb-ip's guard drops the packet instead (DroppedGuard), which is
what keeps its interference at exactly zero while delivering the same
packets as ritcb.  Everything is deterministic given the config.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import engine
from .bonding import SCHEME_NAMES, Bond, min_utilization_window
from .codes import OUT_INTERFERED, SCHEME_CODES
from .errors import ConfigurationError
from .metrics import MetricsReport, Outcome, build_report
from .prmodel import (
    MAX_CHANNELS,
    MIN_CHANNELS,
    ON,
    ChannelParams,
    ChannelProcess,
    build_timeline,
    regime_preset,
    truncate_regime,
)
from .rng import SCHEME_STREAM, SENSING_STREAM, Stream, substream_state
from .sensing import PERFECT_SENSING, SensingErrorModel

_CODE_TO_OUTCOME = (
    Outcome.DELIVERED,
    Outcome.INTERFERED,
    Outcome.DROPPED_NO_BOND,
    Outcome.DROPPED_GUARD,
)


@dataclass(frozen=True)
class SimConfig:
    """Full configuration of one run."""

    n_channels: int
    regime: str
    scheme: str
    n_packets: int = 10000
    packet_bytes: int = 44
    seed: int = 0
    packet_airtime: float = 0.01
    inter_packet_gap: float = 0.0
    initial_energy: float = 1.0
    tx_energy_per_bit: float = 50e-9
    sensing_error: SensingErrorModel = PERFECT_SENSING
    bond_size: int = 3
    channel_overrides: tuple[ChannelParams, ...] | None = None

    def validate(self) -> "SimConfig":
        if not (MIN_CHANNELS <= self.n_channels <= MAX_CHANNELS):
            raise ConfigurationError(f"channels must be in [{MIN_CHANNELS},{MAX_CHANNELS}]")
        if self.scheme not in SCHEME_NAMES:
            raise ConfigurationError(
                f"unknown scheme {self.scheme!r}; valid schemes: {', '.join(SCHEME_NAMES)}"
            )
        if self.channel_overrides is None:
            regime_preset(self.regime)
        elif self.n_channels > len(self.channel_overrides):
            raise ConfigurationError(
                f"channel file defines {len(self.channel_overrides)} channels, "
                f"cannot simulate {self.n_channels}"
            )
        if self.n_packets <= 0:
            raise ConfigurationError("packets must be positive")
        if self.packet_bytes <= 0:
            raise ConfigurationError("packet size must be positive")
        if self.packet_airtime <= 0.0:
            raise ConfigurationError("airtime must be positive")
        if self.inter_packet_gap < 0.0:
            raise ConfigurationError("gap must be non-negative")
        if self.initial_energy <= 0.0 or self.tx_energy_per_bit <= 0.0:
            raise ConfigurationError("energies must be positive")
        if self.bond_size not in (2, 3):
            raise ConfigurationError("bond-size must be 2 or 3")
        if self.scheme in ("ritcb", "ritcb-ip") and self.bond_size != 3:
            raise ConfigurationError(f"scheme {self.scheme} requires bond-size 3")
        return self

    @property
    def step(self) -> float:
        return self.packet_airtime + self.inter_packet_gap


@dataclass(frozen=True)
class PacketRecord:
    """Per-packet facts the metrics aggregate."""

    index: int
    time: float
    bond: Bond | None
    outcome: Outcome
    switched: bool  # bond differs (as a set) from the previous packet's bond


@dataclass(frozen=True)
class RunArrays:
    """Raw per-packet simulation output (internal fast path)."""

    bond_start: np.ndarray
    bond_width: np.ndarray
    outcome: np.ndarray
    score: np.ndarray
    rit_evals: np.ndarray
    switched: np.ndarray
    report: MetricsReport


def active_params(config: SimConfig) -> tuple[ChannelParams, ...]:
    """The channel parameter list a config simulates (prefix rule)."""
    if config.channel_overrides is not None:
        return config.channel_overrides[: config.n_channels]
    return truncate_regime(regime_preset(config.regime), config.n_channels)


def next_attempt_time(previous: float, config: SimConfig) -> float:
    """Transmit-attempt clock: previous attempt plus airtime plus gap."""
    return previous + config.packet_airtime + config.inter_packet_gap


def simulate_arrays(config: SimConfig, backend=None) -> RunArrays:
    """Run the packet kernel and aggregate; array-level result."""
    config.validate()
    params = active_params(config)
    n = len(params)
    lam_x = np.array([p.lambda_x for p in params], dtype=np.float64)
    lam_y = np.array([p.lambda_y for p in params], dtype=np.float64)

    horizon = (config.n_packets - 1) * config.step + config.packet_airtime
    timelines = [
        build_timeline(p, Stream.substream(config.seed, i), horizon)
        for i, p in enumerate(params)
    ]
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum([len(tl) for tl in timelines], out=offsets[1:])
    trans = np.concatenate(timelines)

    fixed_start = -1
    if config.scheme == "swa":
        fixed_start = 0
    elif config.scheme == "agile":
        fixed_start = min_utilization_window(params)

    kernel = engine.simulate_packets if backend is None else backend.simulate_packets
    bond_start, bond_width, outcome, score, rit_evals = kernel(
        trans,
        offsets,
        lam_x,
        lam_y,
        config.n_packets,
        config.packet_airtime,
        config.step,
        SCHEME_CODES[config.scheme],
        config.sensing_error.p_miss,
        config.sensing_error.p_false_alarm,
        substream_state(config.seed, SENSING_STREAM),
        substream_state(config.seed, SCHEME_STREAM),
        fixed_start,
        config.bond_size,
    )

    switched = np.zeros(config.n_packets, dtype=bool)
    if config.n_packets > 1:
        switched[1:] = (bond_start[1:] != bond_start[:-1]) | (
            bond_width[1:] != bond_width[:-1]
        )
    interfered = int((outcome == OUT_INTERFERED).sum())
    counts = np.bincount(outcome, minlength=4)
    report = build_report(
        delivered=int(counts[0]),
        interfered=int(counts[1]),
        dropped_no_bond=int(counts[2]),
        dropped_guard=int(counts[3]),
        switches=int(switched.sum()) + interfered,
        config=config,
    )
    return RunArrays(bond_start, bond_width, outcome, score, rit_evals, switched, report)


def _records_from_arrays(arrays: RunArrays, config: SimConfig) -> list[PacketRecord]:
    records = []
    step = config.step
    for k in range(config.n_packets):
        w = int(arrays.bond_width[k])
        if w == 0:
            bond = None
        else:
            s = int(arrays.bond_start[k])
            sc = float(arrays.score[k])
            bond = Bond(tuple(range(s, s + w)), None if np.isnan(sc) else sc)
        records.append(
            PacketRecord(
                index=k,
                time=k * step,
                bond=bond,
                outcome=_CODE_TO_OUTCOME[int(arrays.outcome[k])],
                switched=bool(arrays.switched[k]),
            )
        )
    return records


def run(config: SimConfig) -> tuple[MetricsReport, list[PacketRecord]]:
    """Simulate one full run; deterministic given the config."""
    arrays = simulate_arrays(config)
    return arrays.report, _records_from_arrays(arrays, config)


def resolve_transmission(
    bond: Bond,
    t: float,
    airtime: float,
    truth: Sequence[ChannelProcess],
    scheme: str,
) -> Outcome:
    """Resolve one transmission on `bond` against the true channel timelines.

    A clash is any bond member busy at any point of [t, t + airtime].
    ritcb-ip's guard turns a clash into a dropped packet; every other
    scheme transmits into it and interferes.
    """
    clash = False
    for c in bond.channel_ids:
        proc = truth[c]
        if proc.state_at(t) is ON or proc.next_transition <= t + airtime:
            clash = True
            break
    if not clash:
        return Outcome.DELIVERED
    return Outcome.DROPPED_GUARD if scheme == "ritcb-ip" else Outcome.INTERFERED


def format_event_line(record: PacketRecord) -> str:
    ids = "+".join(str(c) for c in record.bond.channel_ids) if record.bond else "-"
    return f"{record.index},{record.time:.6f},{ids},{record.outcome.value},{int(record.switched)}"


def write_event_log(records: Sequence[PacketRecord], path) -> None:
    """One line per packet: index, time, bond ids, outcome, switched."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for r in records:
            fh.write(format_event_line(r) + "\n")
