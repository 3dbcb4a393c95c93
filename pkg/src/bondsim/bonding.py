"""Contiguous-channel discovery and the six bond-selection schemes.

All schemes share one interface: given a sensing snapshot and the channel
parameters they return a width-3 or width-2 contiguous bond, or no bond.

ritcb / ritcb-ip score candidate windows by their bottleneck remaining idle
time (the minimum over members) and keep the best width-3 window when its
score is at least the best width-2 score, otherwise the best width-2
window.  Ties between equal-scoring windows go to the lowest starting id.
The baselines reconstruct simpler published behaviors: pracb draws random
channels and bonds the idle survivors, swa always transmits on the fixed
lowest block, knows takes the longest currently idle run, and agile takes
the least-utilized width-3 window regardless of instantaneous state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import ConfigurationError
from .prmodel import ChannelParams
from .rng import Stream
from .sensing import SensingSnapshot, remaining_idle_time

SCHEME_NAMES = ("ritcb", "ritcb-ip", "pracb", "swa", "knows", "agile")


@dataclass(frozen=True)
class Bond:
    """An ordered run of 2 or 3 strictly consecutive channel indices."""

    channel_ids: tuple[int, ...]
    bottleneck_rit: float | None = None  # min member RIT; None for RIT-free schemes

    def __post_init__(self):
        ids = self.channel_ids
        if len(ids) not in (2, 3):
            raise ValueError(f"bond width must be 2 or 3, got {len(ids)}")
        for a, b in zip(ids, ids[1:]):
            if b != a + 1:
                raise ValueError(f"bond channels must be consecutive, got {ids}")

    @property
    def width(self) -> int:
        return len(self.channel_ids)


@dataclass
class SelectionContext:
    """Inputs of one selection call: snapshot, channel params, bond width, stream."""

    snapshot: SensingSnapshot
    params: Sequence[ChannelParams]
    cb_size: int = 3
    rng: Stream | None = None

    def __post_init__(self):
        if len(self.params) != self.snapshot.width:
            raise ValueError("params length must equal snapshot width")


@dataclass(frozen=True)
class SelectionResult:
    bond: Bond | None
    rit_evaluations: int = 0


def classify_contiguous(sorted_ids: Sequence[int]):
    """First run of three consecutive ids, else first consecutive pair, else None.

    Ids must be sorted ascending and distinct.
    """
    ids = list(sorted_ids)
    for a, b in zip(ids, ids[1:]):
        if b <= a:
            raise ValueError(f"ids must be sorted ascending and distinct, got {ids}")
    for i in range(len(ids) - 2):
        if ids[i + 1] == ids[i] + 1 and ids[i + 2] == ids[i] + 2:
            return tuple(ids[i : i + 3])
    for i in range(len(ids) - 1):
        if ids[i + 1] == ids[i] + 1:
            return tuple(ids[i : i + 2])
    return None


def enumerate_contiguous_sets(idle_ids: Sequence[int], width: int) -> list[tuple[int, ...]]:
    """Every width-`width` window of consecutive ids fully contained in idle_ids."""
    idle = set(idle_ids)
    runs = []
    for start in sorted(idle):
        window = tuple(range(start, start + width))
        if all(c in idle for c in window):
            runs.append(window)
    return runs


def draw_distinct_ids(stream: Stream, n: int, k: int) -> list[int]:
    """k distinct ids from range(n) via Floyd's sampling (k draws, always)."""
    chosen: list[int] = []
    for j in range(n - k, n):
        r = int(stream.uniform() * (j + 1))
        chosen.append(j if r in chosen else r)
    return chosen


def _idle_rit(ctx: SelectionContext) -> dict[int, float]:
    snap = ctx.snapshot
    return {
        i: remaining_idle_time(ctx.params[i], snap.idle_elapsed[i])
        for i in range(snap.width)
        if not snap.busy[i]
    }


def _best_window(ritv: dict[int, float], n: int, width: int):
    """(start, bottleneck) of the max-bottleneck window, lowest start on ties."""
    best_start, best_score = -1, float("-inf")
    for start in range(n - width + 1):
        if all(start + j in ritv for j in range(width)):
            score = min(ritv[start + j] for j in range(width))
            if score > best_score:
                best_start, best_score = start, score
    return (best_start, best_score) if best_start >= 0 else None


def ritcb_select(ctx: SelectionContext) -> SelectionResult:
    """Best bottleneck-RIT contiguous bond among idle channels (width 3 preferred)."""
    if ctx.cb_size != 3:
        raise ConfigurationError(
            f"ritcb compares width-3 against width-2 candidates; cb_size must be 3, got {ctx.cb_size}"
        )
    ritv = _idle_rit(ctx)
    n = ctx.snapshot.width
    best3 = _best_window(ritv, n, 3)
    best2 = _best_window(ritv, n, 2)
    evals = len(ritv)
    if best3 is not None and (best2 is None or best3[1] >= best2[1]):
        start, score = best3
        return SelectionResult(Bond(tuple(range(start, start + 3)), score), evals)
    if best2 is not None:
        start, score = best2
        return SelectionResult(Bond(tuple(range(start, start + 2)), score), evals)
    return SelectionResult(None, evals)


def pracb_select(ctx: SelectionContext) -> SelectionResult:
    """Random cb_size-channel draw; bond whatever idle contiguous run survives."""
    if ctx.rng is None:
        raise ValueError("pracb requires a scheme-local random stream")
    ids = draw_distinct_ids(ctx.rng, ctx.snapshot.width, ctx.cb_size)
    survivors = sorted(i for i in ids if not ctx.snapshot.busy[i])
    run = classify_contiguous(survivors)
    return SelectionResult(Bond(run) if run else None)


def swa_select(ctx: SelectionContext) -> SelectionResult:
    """Fixed lowest width-3 block, blind to any licensed-user activity."""
    return SelectionResult(Bond((0, 1, 2)))


def knows_select(ctx: SelectionContext) -> SelectionResult:
    """Largest currently idle run, capped at width 3 (minimum 2), lowest start."""
    busy = ctx.snapshot.busy
    best_len, best_end, run = 0, -1, 0
    for i in range(len(busy)):
        run = run + 1 if not busy[i] else 0
        if run > best_len:
            best_len, best_end = run, i
    if best_len < 2:
        return SelectionResult(None)
    start = best_end - best_len + 1
    width = 3 if best_len >= 3 else 2
    return SelectionResult(Bond(tuple(range(start, start + width))))


def agile_select(ctx: SelectionContext) -> SelectionResult:
    """Width-3 window with the smallest summed utilization, blind to state."""
    start = min_utilization_window(ctx.params)
    return SelectionResult(Bond((start, start + 1, start + 2)))


def min_utilization_window(params: Sequence[ChannelParams]) -> int:
    """Start of the width-3 window minimizing summed utilization (lowest start on ties)."""
    best_start, best_sum = 0, float("inf")
    for s in range(len(params) - 2):
        total = params[s].utilization + params[s + 1].utilization + params[s + 2].utilization
        if total < best_sum:
            best_start, best_sum = s, total
    return best_start


def ip_guard_drops(bond: Bond, member_active) -> bool:
    """Interference-prevention guard: True means drop the packet and release.

    `member_active` is indexable by channel id and is True when that channel
    is busy at transmit start or turns busy during the packet airtime.
    """
    return any(member_active[c] for c in bond.channel_ids)


SELECTORS: dict[str, Callable[[SelectionContext], SelectionResult]] = {
    "ritcb": ritcb_select,
    "ritcb-ip": ritcb_select,  # same selection; the guard differs downstream
    "pracb": pracb_select,
    "swa": swa_select,
    "knows": knows_select,
    "agile": agile_select,
}
