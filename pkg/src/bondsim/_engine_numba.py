"""Numba-JIT packet-simulation kernel (default backend).

Scalar-loop twin of the NumPy backend: same substream consumption order,
same arithmetic, same outputs.  Scheme codes are the integers from
bondsim.codes (0 ritcb, 1 ritcb-ip, 2 pracb, 3 swa, 4 knows, 5 agile).
"""

from __future__ import annotations

import numpy as np
from numba import njit

_GAMMA = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB
_INV_2_53 = 1.0 / 9007199254740992.0


@njit(cache=True)
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX_A)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX_B)
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def _next_uniform(state):
    state = state + np.uint64(_GAMMA)
    x = _mix64(state)
    return np.float64(x >> np.uint64(11)) * _INV_2_53, state


@njit(cache=True)
def _simulate(trans, offsets, lam_x, lam_y, n_packets, airtime, step,
              scheme_code, p_miss, p_fa, sense_state, scheme_state,
              fixed_start, cb_size):
    n = lam_x.shape[0]
    bond_start = np.full(n_packets, -1, np.int64)
    bond_width = np.zeros(n_packets, np.int64)
    outcome = np.zeros(n_packets, np.int64)
    score = np.full(n_packets, np.nan, np.float64)
    rit_evals = np.zeros(n_packets, np.int64)

    ptr_t = offsets[:n].copy()
    ptr_e = offsets[:n].copy()
    on = np.zeros(n, np.bool_)
    on_win = np.zeros(n, np.bool_)
    sensed_busy = np.zeros(n, np.bool_)
    tau = np.zeros(n, np.float64)
    ritv = np.zeros(n, np.float64)
    sel = np.zeros(4, np.int64)
    surv = np.zeros(4, np.int64)

    s_state = sense_state
    c_state = scheme_state

    for k in range(n_packets):
        t = k * step
        te = t + airtime
        for i in range(n):
            lo = offsets[i]
            hi = offsets[i + 1]
            p = ptr_t[i]
            while p < hi and trans[p] <= t:
                p += 1
            ptr_t[i] = p
            cnt = p - lo
            ch_on = (cnt & 1) == 1
            on[i] = ch_on
            q = ptr_e[i]
            if q < p:
                q = p
            while q < hi and trans[q] <= te:
                q += 1
            ptr_e[i] = q
            on_win[i] = ch_on or (q > p)
            idx = cnt - 1 - (cnt & 1)  # ON looks back to the previous OFF entry
            if idx >= 0:
                tau[i] = t - trans[lo + idx]
            else:
                tau[i] = t
        for i in range(n):
            u, s_state = _next_uniform(s_state)
            if on[i]:
                sensed_busy[i] = u >= p_miss
            else:
                sensed_busy[i] = u < p_fa

        start = -1
        width = 0
        bscore = np.nan
        nev = 0
        if scheme_code == 0 or scheme_code == 1:
            for i in range(n):
                if not sensed_busy[i]:
                    s_i = lam_x[i] + lam_y[i]
                    u_i = lam_y[i] / s_i
                    pon = u_i - u_i * np.exp(-s_i * tau[i])
                    ritv[i] = (1.0 - pon) / lam_x[i]
                    nev += 1
            best3 = -np.inf
            s3 = -1
            for s0 in range(n - 2):
                if (not sensed_busy[s0]) and (not sensed_busy[s0 + 1]) and (not sensed_busy[s0 + 2]):
                    m = ritv[s0]
                    if ritv[s0 + 1] < m:
                        m = ritv[s0 + 1]
                    if ritv[s0 + 2] < m:
                        m = ritv[s0 + 2]
                    if m > best3:
                        best3 = m
                        s3 = s0
            best2 = -np.inf
            s2 = -1
            for s0 in range(n - 1):
                if (not sensed_busy[s0]) and (not sensed_busy[s0 + 1]):
                    m = ritv[s0]
                    if ritv[s0 + 1] < m:
                        m = ritv[s0 + 1]
                    if m > best2:
                        best2 = m
                        s2 = s0
            if s3 >= 0 and best3 >= best2:
                start = s3
                width = 3
                bscore = best3
            elif s2 >= 0:
                start = s2
                width = 2
                bscore = best2
        elif scheme_code == 2:
            m_ = 0
            for j in range(n - cb_size, n):
                u, c_state = _next_uniform(c_state)
                r = np.int64(u * (j + 1))
                dup = False
                for x in range(m_):
                    if sel[x] == r:
                        dup = True
                        break
                sel[m_] = j if dup else r
                m_ += 1
            for a in range(1, m_):
                key = sel[a]
                b = a - 1
                while b >= 0 and sel[b] > key:
                    sel[b + 1] = sel[b]
                    b -= 1
                sel[b + 1] = key
            ns = 0
            for x in range(m_):
                if not sensed_busy[sel[x]]:
                    surv[ns] = sel[x]
                    ns += 1
            if ns == 3 and surv[1] == surv[0] + 1 and surv[2] == surv[1] + 1:
                start = surv[0]
                width = 3
            else:
                for x in range(ns - 1):
                    if surv[x + 1] == surv[x] + 1:
                        start = surv[x]
                        width = 2
                        break
        elif scheme_code == 4:
            best_len = 0
            best_end = -1
            run = 0
            for i in range(n):
                run = run + 1 if not sensed_busy[i] else 0
                if run > best_len:
                    best_len = run
                    best_end = i
            if best_len >= 2:
                start = best_end - best_len + 1
                width = 3 if best_len >= 3 else 2
        else:  # swa or agile: fixed width-3 window, blind to state
            start = fixed_start
            width = 3

        if width == 0:
            outcome[k] = 2
        else:
            clash = False
            for c in range(start, start + width):
                if on_win[c]:
                    clash = True
                    break
            if not clash:
                outcome[k] = 0
            elif scheme_code == 1:
                outcome[k] = 3
            else:
                outcome[k] = 1
            bond_start[k] = start
            bond_width[k] = width
            score[k] = bscore
        rit_evals[k] = nev

    return bond_start, bond_width, outcome, score, rit_evals


def simulate_packets(trans, offsets, lam_x, lam_y, n_packets, airtime, step,
                     scheme_code, p_miss, p_false_alarm, sense_state, scheme_state,
                     fixed_start, cb_size):
    """JIT-backed twin of the NumPy backend; see that module for semantics."""
    return _simulate(
        np.ascontiguousarray(trans, dtype=np.float64),
        np.ascontiguousarray(offsets, dtype=np.int64),
        np.ascontiguousarray(lam_x, dtype=np.float64),
        np.ascontiguousarray(lam_y, dtype=np.float64),
        np.int64(n_packets),
        float(airtime),
        float(step),
        np.int64(scheme_code),
        float(p_miss),
        float(p_false_alarm),
        np.uint64(sense_state),
        np.uint64(scheme_state),
        np.int64(fixed_start),
        np.int64(cb_size),
    )
