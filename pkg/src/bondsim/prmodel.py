"""Per-channel licensed-user activity as an alternating busy/idle renewal process.

Every channel alternates ON (busy) and OFF (idle) phases whose lengths are
independent exponential draws with rates lambda_x (ON) and lambda_y (OFF).
All channels start OFF at t = 0 and the first OFF period is a fresh draw.
Four 15-channel rate presets (low / high / long / intermittent activity)
are compiled in; the rate columns are authoritative and the printed period
and utilization columns are kept only as validation data, because the
published tables carry 2-decimal truncation noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .rng import Stream

ON = "on"
OFF = "off"

REGIMES = ("low", "high", "long", "intermittent")

MIN_CHANNELS = 3
MAX_CHANNELS = 15

# Tolerances used when cross-checking the redundant printed columns.
RATE_PERIOD_TOL = 0.02
UTILIZATION_TOL = 0.015

# fmt: off
_TABLES = {
    "low": {
        "t_on":     (0.83, 0.77, 0.42, 0.31, 0.53, 0.27, 0.36, 0.20, 0.26, 0.24, 0.13, 0.15, 0.18, 0.48, 0.30),
        "t_off":    (2.50, 1.11, 10.0, 1.67, 3.33, 10.0, 4.00, 9.09, 3.45, 2.08, 5.26, 3.70, 1.00, 1.61, 2.63),
        "lambda_x": (1.20, 1.29, 2.38, 3.22, 1.88, 3.70, 2.77, 5.00, 3.84, 4.16, 7.69, 6.66, 5.55, 2.08, 3.33),
        "lambda_y": (0.40, 0.90, 0.10, 0.59, 0.30, 0.10, 0.25, 0.11, 0.28, 0.48, 0.19, 0.27, 1.00, 0.62, 0.38),
        "mu":       (0.24, 0.40, 0.04, 0.15, 0.13, 0.02, 0.08, 0.02, 0.07, 0.10, 0.02, 0.03, 0.15, 0.22, 0.10),
    },
    "high": {
        "t_on":     (3.33, 1.11, 10.0, 5.00, 2.50, 1.67, 2.86, 5.56, 5.88, 4.35, 1.85, 1.30, 1.00, 1.23, 2.38),
        "t_off":    (0.83, 0.77, 0.42, 0.31, 0.53, 0.27, 0.36, 0.20, 0.26, 0.24, 0.13, 0.15, 0.18, 0.48, 0.30),
        "lambda_x": (0.30, 0.90, 0.10, 0.20, 0.40, 0.59, 0.34, 0.17, 0.17, 0.22, 0.54, 0.76, 1.00, 0.81, 0.42),
        "lambda_y": (1.20, 1.29, 2.38, 3.22, 1.88, 3.70, 2.77, 5.00, 3.84, 4.16, 7.69, 6.66, 5.55, 2.08, 3.33),
        "mu":       (0.80, 0.59, 0.95, 0.94, 0.82, 0.86, 0.88, 0.96, 0.95, 0.94, 0.93, 0.89, 0.84, 0.71, 0.88),
    },
    "long": {
        "t_on":     (3.33, 1.11, 10.0, 5.00, 2.50, 1.67, 2.86, 5.56, 5.88, 4.35, 1.85, 1.30, 1.00, 1.23, 2.38),
        "t_off":    (2.50, 1.11, 10.0, 1.67, 3.33, 10.0, 4.00, 9.09, 3.45, 2.08, 5.26, 3.70, 1.00, 1.61, 2.63),
        "lambda_x": (0.30, 0.90, 0.10, 0.20, 0.40, 0.59, 0.34, 0.17, 0.17, 0.22, 0.54, 0.76, 1.00, 0.81, 0.42),
        "lambda_y": (0.40, 0.90, 0.10, 0.59, 0.30, 0.10, 0.25, 0.11, 0.28, 0.48, 0.19, 0.27, 1.00, 0.62, 0.38),
        "mu":       (0.57, 0.50, 0.50, 0.74, 0.42, 0.14, 0.41, 0.37, 0.63, 0.67, 0.26, 0.26, 0.50, 0.43, 0.47),
    },
    "intermittent": {
        "t_on":     (0.83, 0.77, 0.42, 0.31, 0.53, 0.27, 0.36, 0.20, 0.26, 0.24, 0.13, 0.15, 0.18, 0.48, 0.30),
        "t_off":    (0.27, 0.36, 0.20, 0.26, 0.24, 0.83, 0.77, 0.42, 0.31, 0.53, 0.40, 0.29, 0.15, 0.53, 0.20),
        "lambda_x": (1.20, 1.29, 2.38, 3.22, 1.88, 3.70, 2.77, 5.00, 3.84, 4.16, 7.69, 6.66, 5.55, 2.08, 3.33),
        "lambda_y": (3.70, 2.77, 5.00, 3.84, 4.16, 1.20, 1.29, 2.38, 3.22, 1.88, 2.50, 3.44, 6.66, 1.88, 5.00),
        "mu":       (0.75, 0.68, 0.67, 0.54, 0.68, 0.24, 0.31, 0.32, 0.45, 0.31, 0.24, 0.34, 0.54, 0.47, 0.60),
    },
}
# fmt: on


@dataclass(frozen=True)
class ChannelParams:
    """Rate parameters of one channel plus the derived means and utilization."""

    lambda_x: float  # ON-period rate (1/s)
    lambda_y: float  # OFF-period rate (1/s)
    mean_on: float
    mean_off: float
    utilization: float  # long-run fraction of time ON

    @classmethod
    def from_rates(cls, lambda_x: float, lambda_y: float) -> "ChannelParams":
        if not (lambda_x > 0.0 and lambda_y > 0.0):
            raise ConfigurationError(
                f"channel rates must be positive, got lambda_x={lambda_x}, lambda_y={lambda_y}"
            )
        return cls(
            lambda_x=lambda_x,
            lambda_y=lambda_y,
            mean_on=1.0 / lambda_x,
            mean_off=1.0 / lambda_y,
            utilization=lambda_y / (lambda_x + lambda_y),
        )


@dataclass(frozen=True)
class RegimePreset:
    """One activity regime: 15 channels plus the printed validation columns."""

    regime: str
    channels: tuple[ChannelParams, ...]
    table_t_on: tuple[float, ...]
    table_t_off: tuple[float, ...]
    table_mu: tuple[float, ...]


def _build_preset(name: str) -> RegimePreset:
    rows = _TABLES[name]
    channels = tuple(
        ChannelParams.from_rates(lx, ly)
        for lx, ly in zip(rows["lambda_x"], rows["lambda_y"])
    )
    return RegimePreset(name, channels, rows["t_on"], rows["t_off"], rows["mu"])


_PRESETS = {name: _build_preset(name) for name in REGIMES}


def regime_preset(regime: str) -> RegimePreset:
    """Look up one of the four compiled-in 15-channel presets."""
    key = regime.strip().lower()
    if key not in _PRESETS:
        raise ConfigurationError(
            f"unknown regime {regime!r}; valid regimes: {', '.join(REGIMES)}"
        )
    return _PRESETS[key]


def truncate_regime(preset: RegimePreset, n: int) -> tuple[ChannelParams, ...]:
    """First `n` channels of a preset, in table order."""
    if not (MIN_CHANNELS <= n <= MAX_CHANNELS):
        raise ConfigurationError(f"channels must be in [{MIN_CHANNELS},{MAX_CHANNELS}]")
    return preset.channels[:n]


def load_channel_file(path) -> tuple[ChannelParams, ...]:
    """Read a channel override file: one `id lambda_x lambda_y` triple per line.

    Blank lines and `#` comments are ignored; ids must run 0..m-1 in order.
    """
    channels: list[ChannelParams] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ConfigurationError(
                    f"{path}:{lineno}: expected 'id lambda_x lambda_y', got {raw.strip()!r}"
                )
            try:
                cid, lx, ly = int(parts[0]), float(parts[1]), float(parts[2])
            except ValueError as exc:
                raise ConfigurationError(f"{path}:{lineno}: {exc}") from exc
            if cid != len(channels):
                raise ConfigurationError(
                    f"{path}:{lineno}: channel ids must be consecutive from 0, got {cid}"
                )
            channels.append(ChannelParams.from_rates(lx, ly))
    if not (MIN_CHANNELS <= len(channels) <= MAX_CHANNELS):
        raise ConfigurationError(
            f"channel file must define between {MIN_CHANNELS} and {MAX_CHANNELS} channels, "
            f"got {len(channels)}"
        )
    return tuple(channels)


def sample_period(params: ChannelParams, phase: str, stream: Stream) -> float:
    """One strictly positive phase-length draw from the channel's own stream."""
    if phase == ON:
        return stream.exponential(params.lambda_x)
    if phase == OFF:
        return stream.exponential(params.lambda_y)
    raise ValueError(f"phase must be {ON!r} or {OFF!r}, got {phase!r}")


class ChannelProcess:
    """Live renewal-process state of one channel (single-owner, mutable).

    The process only moves forward: state queries must be non-decreasing in
    time.  Successive period lengths come from the channel's own substream,
    so timelines are bit-reproducible from (master seed, channel id) and
    independent across channels.
    """

    __slots__ = ("channel_id", "params", "phase", "phase_start", "next_transition",
                 "stream", "last_off_start")

    def __init__(self, channel_id: int, params: ChannelParams, master_seed: int):
        self.channel_id = channel_id
        self.params = params
        self.stream = Stream.substream(master_seed, channel_id)
        self.phase = OFF
        self.phase_start = 0.0
        self.last_off_start = 0.0
        self.next_transition = sample_period(params, OFF, self.stream)

    def state_at(self, t: float) -> str:
        """Phase containing time `t`, advancing through transitions as needed."""
        if t < self.phase_start:
            raise ValueError(
                f"channel {self.channel_id}: time query {t} precedes phase start "
                f"{self.phase_start}; queries must be non-decreasing"
            )
        while self.next_transition <= t:
            self.phase_start = self.next_transition
            if self.phase == OFF:
                self.phase = ON
            else:
                self.phase = OFF
                self.last_off_start = self.phase_start
            self.next_transition = self.phase_start + sample_period(
                self.params, self.phase, self.stream
            )
        return self.phase

    def idle_elapsed(self, t: float) -> float:
        """Seconds since the most recent entry into OFF (call state_at(t) first)."""
        return t - self.last_off_start


def build_timeline(params: ChannelParams, stream: Stream, horizon: float) -> np.ndarray:
    """All transition times of one channel from 0 until strictly past `horizon`.

    Even indices end OFF periods, odd indices end ON periods (the channel
    starts OFF at 0).  Draw order and float accumulation match
    ChannelProcess exactly, so both produce bit-identical timelines.
    """
    mean_period = params.mean_on + params.mean_off
    pairs = max(16, int(horizon / mean_period * 1.25) + 8)
    chunks: list[np.ndarray] = []
    t = 0.0
    while t <= horizon:
        rates = np.empty(2 * pairs, dtype=np.float64)
        rates[0::2] = params.lambda_y
        rates[1::2] = params.lambda_x
        lengths = stream.exponential(rates, 2 * pairs)
        seg = np.cumsum(np.concatenate(([t], lengths)))[1:]
        chunks.append(seg)
        t = float(seg[-1])
        pairs = max(16, pairs // 2)
    return np.concatenate(chunks)


def table_validation_rows() -> list[dict]:
    """Cross-check every preset row's printed periods and utilization.

    For each of the 60 channels: lambda_x*T_on and lambda_y*T_off must sit
    within RATE_PERIOD_TOL of 1, and the rate-derived utilization within
    UTILIZATION_TOL of the printed value.  Returns one result dict per row.
    """
    rows = []
    for regime in REGIMES:
        preset = _PRESETS[regime]
        for i, ch in enumerate(preset.channels):
            on_product = ch.lambda_x * preset.table_t_on[i]
            off_product = ch.lambda_y * preset.table_t_off[i]
            mu = preset.table_mu[i]
            failures = []
            if abs(on_product - 1.0) > RATE_PERIOD_TOL:
                failures.append("on-rate")
            if abs(off_product - 1.0) > RATE_PERIOD_TOL:
                failures.append("off-rate")
            if abs(ch.utilization - mu) > UTILIZATION_TOL:
                failures.append("utilization")
            rows.append(
                {
                    "regime": regime,
                    "channel": i,
                    "on_product": on_product,
                    "off_product": off_product,
                    "utilization": ch.utilization,
                    "table_mu": mu,
                    "failures": tuple(failures),
                    "ok": not failures,
                }
            )
    return rows
