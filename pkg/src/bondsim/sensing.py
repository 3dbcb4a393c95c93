"""Channel sensing oracle and closed-form occupancy / remaining-idle-time math.

Physical-layer detection is abstracted to a boolean per-channel oracle with
optional miss / false-alarm probabilities (defaults are perfect sensing).
The closed forms describe a channel observed from an idle start:

    p_on(t)  = u - u * exp(-(lambda_x + lambda_y) * t)
    p_off(t) = 1 - p_on(t)
    remaining_idle_time(t) = p_off(t) / lambda_x

where u is the channel utilization.  The time argument fed to these
functions during a run is the channel's elapsed idle time, i.e. the time
since its most recent transition into OFF.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .prmodel import ON, ChannelParams, ChannelProcess
from .rng import Stream


@dataclass(frozen=True)
class SensingErrorModel:
    """Flip probabilities of the sensing oracle; (0, 0) is perfect sensing."""

    p_miss: float = 0.0         # busy channel reported idle
    p_false_alarm: float = 0.0  # idle channel reported busy

    def __post_init__(self):
        for name in ("p_miss", "p_false_alarm"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name} must be in [0,1], got {v}")

    @property
    def perfect(self) -> bool:
        return self.p_miss == 0.0 and self.p_false_alarm == 0.0


PERFECT_SENSING = SensingErrorModel()


@dataclass(frozen=True)
class SensingSnapshot:
    """Timestamped per-channel observations.

    idle_elapsed[i] is the seconds since channel i last entered OFF and is
    present exactly for the channels reported idle (None where busy).
    """

    timestamp: float
    busy: tuple[bool, ...]
    idle_elapsed: tuple[float | None, ...]

    def __post_init__(self):
        if len(self.busy) != len(self.idle_elapsed):
            raise ValueError("busy and idle_elapsed must have equal length")
        for b, e in zip(self.busy, self.idle_elapsed):
            if b != (e is None):
                raise ValueError("idle_elapsed must be present iff the channel is idle")

    @property
    def width(self) -> int:
        return len(self.busy)


def _check_time(t: float) -> None:
    if t < 0.0:
        raise ValueError(f"time must be non-negative, got {t}")


def p_on(params: ChannelParams, t: float) -> float:
    """Probability the channel is busy at elapsed time t from an idle start."""
    _check_time(t)
    u = params.utilization
    s = params.lambda_x + params.lambda_y
    return u - u * float(np.exp(-s * t))


def p_off(params: ChannelParams, t: float) -> float:
    """Probability the channel is idle at elapsed time t from an idle start."""
    return 1.0 - p_on(params, t)


def remaining_idle_time(params: ChannelParams, t: float) -> float:
    """Expected remaining idle time of a channel idle for t seconds.

    Strictly decreasing in t, from 1/lambda_x at t=0 down to
    1/(lambda_x + lambda_y) in the limit.
    """
    return p_off(params, t) / params.lambda_x


def sense(
    processes: Sequence[ChannelProcess],
    t: float,
    err: SensingErrorModel = PERFECT_SENSING,
    stream: Stream | None = None,
) -> SensingSnapshot:
    """Observe every channel at time t, flipping states per the error model.

    One uniform per channel is always consumed when a stream is supplied,
    regardless of the error probabilities, so draw alignment does not depend
    on the configuration.  idle_elapsed always reflects the true timeline.
    """
    _check_time(t)
    if stream is None and not err.perfect:
        raise ValueError("a random stream is required when sensing errors are enabled")
    busy: list[bool] = []
    elapsed: list[float | None] = []
    for proc in processes:
        on = proc.state_at(t) is ON
        if stream is not None:
            u = stream.uniform()
            reported = (u >= err.p_miss) if on else (u < err.p_false_alarm)
        else:
            reported = on
        busy.append(reported)
        elapsed.append(None if reported else proc.idle_elapsed(t))
    return SensingSnapshot(timestamp=t, busy=tuple(busy), idle_elapsed=tuple(elapsed))
