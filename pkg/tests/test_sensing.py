import math

import numpy as np
import pytest

from bondsim.prmodel import ChannelParams, ChannelProcess, ON, regime_preset
from bondsim.rng import Stream
from bondsim.sensing import (
    PERFECT_SENSING,
    SensingErrorModel,
    SensingSnapshot,
    p_off,
    p_on,
    remaining_idle_time,
    sense,
)


def _random_params(rng, count):
    lx = rng.uniform(0.05, 10.0, count)
    ly = rng.uniform(0.05, 10.0, count)
    return [ChannelParams.from_rates(a, b) for a, b in zip(lx, ly)]


# --- closed forms ------------------------------------------------------------


def test_limits_at_zero_are_exact():
    rng = np.random.default_rng(1)
    for params in _random_params(rng, 200):
        assert p_on(params, 0.0) == 0.0
        assert p_off(params, 0.0) == 1.0
        assert remaining_idle_time(params, 0.0) == 1.0 / params.lambda_x


def test_normalization_over_random_pairs():
    rng = np.random.default_rng(2)
    params = _random_params(rng, 10_000)
    ts = rng.uniform(0.0, 50.0, 10_000)
    for p, t in zip(params, ts):
        assert abs(p_on(p, t) + p_off(p, t) - 1.0) <= 1e-12


def test_asymptotes():
    rng = np.random.default_rng(3)
    for params in _random_params(rng, 200):
        s = params.lambda_x + params.lambda_y
        t = 50.0 / s
        assert abs(p_on(params, t) - params.utilization) <= 1e-9
        assert abs(p_off(params, t) - (1.0 - params.utilization)) <= 1e-9
        assert abs(remaining_idle_time(params, t) - 1.0 / s) <= 1e-9


def test_rit_closed_forms_agree():
    # The implementation divides the idle probability by the busy-period
    # rate; both explicitly expanded forms must agree everywhere.
    rng = np.random.default_rng(4)
    params = _random_params(rng, 2_000)
    ts = rng.uniform(0.0, 30.0, 2_000)
    for p, t in zip(params, ts):
        s = p.lambda_x + p.lambda_y
        expanded = (p.lambda_x + p.lambda_y * math.exp(-s * t)) / (p.lambda_x * s)
        mean_scaled = (1.0 / p.lambda_x) * ((p.lambda_x + p.lambda_y * math.exp(-s * t)) / s)
        got = remaining_idle_time(p, t)
        assert abs(got - expanded) <= 1e-12
        assert abs(got - mean_scaled) <= 1e-12


def test_rit_frozen_value():
    # independently computed to 20 digits: 0.66706177458221987677...
    params = regime_preset("low").channels[0]
    assert abs(remaining_idle_time(params, 1.0) - 0.6670617745822198) <= 1e-12


def test_rit_strictly_decreasing_and_bounded():
    rng = np.random.default_rng(5)
    for params in _random_params(rng, 50):
        s = params.lambda_x + params.lambda_y
        grid = np.linspace(0.0, 20.0 / s, 200)
        values = [remaining_idle_time(params, t) for t in grid]
        assert all(a > b for a, b in zip(values, values[1:]))
        assert all(1.0 / s <= v <= 1.0 / params.lambda_x for v in values)


def test_ranking_matches_idle_probability_ratio():
    rng = np.random.default_rng(6)
    a_list = _random_params(rng, 500)
    b_list = _random_params(rng, 500)
    ts = rng.uniform(0.0, 10.0, 500)
    for a, b, t in zip(a_list, b_list, ts):
        lhs = remaining_idle_time(a, t) > remaining_idle_time(b, t)
        rhs = p_off(a, t) / a.lambda_x > p_off(b, t) / b.lambda_x
        assert lhs == rhs


def test_negative_time_rejected():
    params = regime_preset("low").channels[0]
    for fn in (p_on, p_off, remaining_idle_time):
        with pytest.raises(ValueError):
            fn(params, -1e-9)


# --- sensing oracle ----------------------------------------------------------


def _fresh_processes(seed=0, n=15, regime="low"):
    channels = regime_preset(regime).channels[:n]
    return [ChannelProcess(i, ch, seed) for i, ch in enumerate(channels)]


def test_perfect_sensing_all_idle_at_start():
    snap = sense(_fresh_processes(), 0.0)
    assert snap.busy == (False,) * 15
    assert snap.idle_elapsed == (0.0,) * 15


def test_full_inversion_flips_everything():
    procs = _fresh_processes(seed=3)
    truth = [p.state_at(5.0) is ON for p in procs]
    snap = sense(procs, 5.0, SensingErrorModel(1.0, 1.0), Stream.substream(0, 999))
    assert list(snap.busy) == [not b for b in truth]


def test_errors_require_stream():
    with pytest.raises(ValueError, match="stream"):
        sense(_fresh_processes(), 0.0, SensingErrorModel(p_miss=0.5))


def test_miss_probability_monte_carlo():
    # Hold one busy channel fixed and sense it many times.
    proc = _fresh_processes(seed=1, n=1, regime="high")[0]
    t = proc.next_transition + 1e-6  # just inside the first busy period
    assert proc.state_at(t) is ON
    stream = Stream.substream(42, 1234)
    n, reported_idle = 100_000, 0
    for _ in range(n):
        snap = sense([proc], t, SensingErrorModel(p_miss=0.1), stream)
        reported_idle += 0 if snap.busy[0] else 1
    sigma = math.sqrt(0.1 * 0.9 / n)
    assert abs(reported_idle / n - 0.1) <= 3 * sigma


def test_false_alarm_probability_monte_carlo():
    proc = _fresh_processes(seed=1, n=1)[0]
    stream = Stream.substream(43, 1234)
    n, reported_busy = 100_000, 0
    for _ in range(n):
        snap = sense([proc], 0.0, SensingErrorModel(p_false_alarm=0.2), stream)
        reported_busy += 1 if snap.busy[0] else 0
    sigma = math.sqrt(0.2 * 0.8 / n)
    assert abs(reported_busy / n - 0.2) <= 3 * sigma


def test_idle_elapsed_tracks_true_timeline():
    from bondsim.prmodel import build_timeline

    params = regime_preset("intermittent").channels[0]
    timeline = build_timeline(params, Stream.substream(7, 0), 50.0)
    proc = ChannelProcess(0, params, master_seed=7)
    # after the first full busy period, elapsed idle restarts at timeline[1]
    t = timeline[1] + 0.01
    snap = sense([proc], t)
    assert not snap.busy[0]
    assert snap.idle_elapsed[0] == pytest.approx(t - timeline[1], abs=1e-15)


def test_snapshot_invariants_enforced():
    with pytest.raises(ValueError):
        SensingSnapshot(0.0, (True,), (1.0,))
    with pytest.raises(ValueError):
        SensingSnapshot(0.0, (False,), (None,))
    with pytest.raises(ValueError):
        SensingSnapshot(0.0, (False, True), (0.0,))


def test_error_model_validation():
    with pytest.raises(ValueError):
        SensingErrorModel(p_miss=1.5)
    assert PERFECT_SENSING.perfect
