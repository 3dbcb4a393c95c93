"""Pure-NumPy packet-simulation kernel (fallback backend).

Vectorized over packets; produces bit-identical outputs to the numba
backend because both consume the same SplitMix64 substreams in the same
order and apply the same elementwise arithmetic.
"""

from __future__ import annotations

import numpy as np

from .codes import (
    OUT_DELIVERED,
    OUT_GUARD,
    OUT_INTERFERED,
    OUT_NO_BOND,
    SCHEME_CODES,
)
from .rng import raw_block, uniform01

_RITCB = SCHEME_CODES["ritcb"]
_RITCB_IP = SCHEME_CODES["ritcb-ip"]
_PRACB = SCHEME_CODES["pracb"]
_SWA = SCHEME_CODES["swa"]
_KNOWS = SCHEME_CODES["knows"]
_AGILE = SCHEME_CODES["agile"]


def simulate_packets(
    trans: np.ndarray,
    offsets: np.ndarray,
    lam_x: np.ndarray,
    lam_y: np.ndarray,
    n_packets: int,
    airtime: float,
    step: float,
    scheme_code: int,
    p_miss: float,
    p_false_alarm: float,
    sense_state: int,
    scheme_state: int,
    fixed_start: int,
    cb_size: int,
):
    """Simulate n_packets transmit attempts over precomputed channel timelines.

    Returns (bond_start, bond_width, outcome, score, rit_evals) arrays;
    bond_start is -1 and bond_width 0 when no bond was formed, and score is
    NaN whenever the scheme does not rank candidates by remaining idle time.
    """
    n = lam_x.size
    t = np.arange(n_packets, dtype=np.float64) * step
    te = t + airtime

    cnt_t = np.empty((n_packets, n), dtype=np.int64)
    cnt_e = np.empty((n_packets, n), dtype=np.int64)
    off_start = np.empty((n_packets, n), dtype=np.float64)
    for i in range(n):
        tr = trans[offsets[i] : offsets[i + 1]]
        ct = np.searchsorted(tr, t, side="right")
        cnt_t[:, i] = ct
        cnt_e[:, i] = np.searchsorted(tr, te, side="right")
        idx = ct - 1 - (ct & 1)  # ON phases look back to the previous OFF entry
        off_start[:, i] = np.where(idx >= 0, tr[np.clip(idx, 0, tr.size - 1)], 0.0)

    on = (cnt_t & 1) == 1
    on_in_window = on | (cnt_e > cnt_t)
    tau = t[:, None] - off_start

    block, _ = raw_block(sense_state, n_packets * n)
    u_sense = uniform01(block).reshape(n_packets, n)
    sensed_busy = np.where(on, u_sense >= p_miss, u_sense < p_false_alarm)
    idle = ~sensed_busy

    start = np.full(n_packets, -1, dtype=np.int64)
    width = np.zeros(n_packets, dtype=np.int64)
    score = np.full(n_packets, np.nan, dtype=np.float64)
    rit_evals = np.zeros(n_packets, dtype=np.int64)

    if scheme_code in (_RITCB, _RITCB_IP):
        s = lam_x + lam_y
        util = lam_y / s
        pon = util - util * np.exp(-s * tau)
        ritm = (1.0 - pon) / lam_x
        masked = np.where(idle, ritm, -np.inf)
        w2 = np.minimum(masked[:, :-1], masked[:, 1:])
        best2 = w2.max(axis=1)
        s2 = w2.argmax(axis=1)
        w3 = np.minimum(np.minimum(masked[:, :-2], masked[:, 1:-1]), masked[:, 2:])
        best3 = w3.max(axis=1)
        s3 = w3.argmax(axis=1)
        has3 = np.isfinite(best3)
        has2 = np.isfinite(best2)
        choose3 = has3 & (best3 >= best2)
        start = np.where(choose3, s3, np.where(has2, s2, -1))
        width = np.where(choose3, 3, np.where(has2, 2, 0))
        score = np.where(choose3, best3, np.where(has2, best2, np.nan))
        rit_evals = idle.sum(axis=1)
    elif scheme_code == _PRACB:
        block, _ = raw_block(scheme_state, n_packets * cb_size)
        u_draw = uniform01(block).reshape(n_packets, cb_size)
        sel = np.empty((n_packets, cb_size), dtype=np.int64)
        for col, j in enumerate(range(n - cb_size, n)):
            r = (u_draw[:, col] * (j + 1)).astype(np.int64)
            dup = np.zeros(n_packets, dtype=bool)
            for prev in range(col):
                dup |= sel[:, prev] == r
            sel[:, col] = np.where(dup, j, r)
        sel.sort(axis=1)
        rows = np.arange(n_packets)
        if cb_size == 3:
            a, b, c = sel[:, 0], sel[:, 1], sel[:, 2]
            fa, fb, fc = idle[rows, a], idle[rows, b], idle[rows, c]
            cons_ab = b == a + 1
            cons_bc = c == b + 1
            three = fa & fb & fc & cons_ab & cons_bc
            pair_ab = fa & fb & cons_ab & ~three
            pair_bc = fb & fc & cons_bc & ~three & ~pair_ab
            start = np.where(three | pair_ab, a, np.where(pair_bc, b, -1))
            width = np.where(three, 3, np.where(pair_ab | pair_bc, 2, 0))
        else:  # cb_size == 2
            a, b = sel[:, 0], sel[:, 1]
            pair = idle[rows, a] & idle[rows, b] & (b == a + 1)
            start = np.where(pair, a, -1)
            width = np.where(pair, 2, 0)
    elif scheme_code == _KNOWS:
        runlen = np.zeros((n_packets, n), dtype=np.int64)
        runlen[:, 0] = idle[:, 0]
        for i in range(1, n):
            runlen[:, i] = np.where(idle[:, i], runlen[:, i - 1] + 1, 0)
        best_len = runlen.max(axis=1)
        best_end = np.argmax(runlen == best_len[:, None], axis=1)
        run_start = best_end - best_len + 1
        width = np.where(best_len >= 3, 3, np.where(best_len == 2, 2, 0))
        start = np.where(width > 0, run_start, -1)
    elif scheme_code in (_SWA, _AGILE):
        start = np.full(n_packets, fixed_start, dtype=np.int64)
        width = np.full(n_packets, 3, dtype=np.int64)
    else:
        raise ValueError(f"unknown scheme code {scheme_code}")

    has = width > 0
    rows = np.arange(n_packets)
    st = np.clip(start, 0, n - 1)
    clash = on_in_window[rows, st]
    clash |= (width >= 2) & on_in_window[rows, np.minimum(st + 1, n - 1)]
    clash |= (width == 3) & on_in_window[rows, np.minimum(st + 2, n - 1)]
    clash &= has

    outcome = np.full(n_packets, OUT_NO_BOND, dtype=np.int64)
    outcome[has & ~clash] = OUT_DELIVERED
    outcome[has & clash] = OUT_GUARD if scheme_code == _RITCB_IP else OUT_INTERFERED

    return (
        start.astype(np.int64),
        width.astype(np.int64),
        outcome,
        score,
        np.asarray(rit_evals, dtype=np.int64),
    )
