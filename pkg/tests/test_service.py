"""Live session service: protocol, rolling window, replay parity."""

import math
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from taskbits.estimator import trial_consumed_info
from taskbits.service import (
    QUEUE_BOUND,
    RollingWindow,
    SCHEMA_VERSION,
    ServiceClient,
    replay_trace,
    start_server,
)
from taskbits.sim import Condition, DriverParams, run_condition

EPS = 1e-9


@pytest.fixture(scope="module")
def server():
    srv = start_server(port=0, window_s=1.0)
    yield srv
    srv.shutdown()
    srv.server_close()


@pytest.fixture()
def client(server):
    c = ServiceClient(port=server.port)
    yield c
    c.close()


def _declare(client, **extra):
    rec = {"type": "declare", "schema": SCHEMA_VERSION,
           "task_kind": "car-following", "s_level": 4.84, "window_s": 1.0}
    rec.update(extra)
    seq = client.send(rec)
    return client.wait_for(lambda d: d.get("seq") == seq)


def test_declare_ack_echoes_seq(client):
    ack = _declare(client)
    assert ack["type"] == "metric"
    assert ack["t"] is None and not ack["collision_flag"]


def test_sample_before_declare_refused(client):
    seq = client.send({"type": "sample", "t": 0.0, "gap": 5.0})
    err = client.wait_for(lambda d: d.get("seq") == seq)
    assert err["type"] == "error"
    assert "no declaration" in err["message"]


def test_bad_schema_rejected(client):
    ack = _declare(client, schema=99)
    assert ack["type"] == "error"


def test_constant_gap_surprise_vanishes(client):
    _declare(client)
    last = None
    for i in range(200):
        last = client.send({"type": "sample", "t": i / 100.0, "gap": 5.0})
    m = client.wait_for(lambda d: d.get("seq") == last)
    assert m["type"] == "metric"
    assert m["surprise_bits"] == 0.0
    assert m["ns_ratio"] == 0.0


def test_first_sample_has_no_metric_values(client):
    _declare(client)
    seq = client.send({"type": "sample", "t": 0.0, "gap": 5.0})
    m = client.wait_for(lambda d: d.get("seq") == seq)
    assert m["type"] == "metric" and m["surprise_bits"] is None


def test_out_of_order_sample_errors_then_continues(client):
    _declare(client)
    client.send({"type": "sample", "t": 1.0, "gap": 5.0})
    bad = client.send({"type": "sample", "t": 0.5, "gap": 5.0})
    err = client.wait_for(lambda d: d.get("seq") == bad)
    assert err["type"] == "error" and "out-of-order" in err["message"]
    ok = client.send({"type": "sample", "t": 1.01, "gap": 5.0})
    m = client.wait_for(lambda d: d.get("seq") == ok)
    assert m["type"] == "metric"


def test_gap_collapse_flags_collision(client):
    _declare(client)
    client.send({"type": "sample", "t": 0.0, "gap": 1.0})
    seq = client.send({"type": "sample", "t": 0.1, "gap": 0.0})
    m = client.wait_for(lambda d: d.get("seq") == seq)
    assert m["collision_flag"] and m["unbounded"]
    assert m["surprise_bits"] is None


def test_malformed_json_errors_then_continues(client):
    _declare(client)
    client.sock.sendall(b"{not json}\n")
    err = client.wait_for(lambda d: d.get("type") == "error")
    assert "bad record" in err["message"]
    seq = client.send({"type": "sample", "t": 0.0, "gap": 5.0})
    assert client.wait_for(lambda d: d.get("seq") == seq)["type"] == "metric"


def test_unknown_record_type(client):
    _declare(client)
    seq = client.send({"type": "warp"})
    err = client.wait_for(lambda d: d.get("seq") == seq)
    assert err["type"] == "error" and "unknown record type" in err["message"]


def test_metric_matches_offline_window(client):
    _declare(client)
    rng = np.random.default_rng(7)
    t = np.arange(500) / 100.0
    gap = 5.0 + rng.normal(0.0, 0.3, t.size)
    seqs = [client.send({"type": "sample", "t": float(ti), "gap": float(gi)})
            for ti, gi in zip(t, gap)]
    for i in (120, 250, 499):
        m = client.wait_for(lambda d, s=seqs[i]: d.get("seq") == s)
        mask = (t >= t[i] - 1.0 - EPS) & (t <= t[i] + EPS)
        mean, sigma = gap[mask].mean(), gap[mask].std()
        assert m["ns_ratio"] == pytest.approx(sigma / mean, abs=1e-9)
        assert m["surprise_bits"] == pytest.approx((sigma / mean) ** 2, abs=1e-9)


def test_pointing_session_blocks(client):
    ack = _declare(client, task_kind="pointing", amplitude=7.0, width=1.0)
    assert ack["type"] == "metric"
    for i in range(20):
        client.send({"type": "sample", "t": i * 0.05, "x": 3.5 + 0.1 * i})
    clicks = [(1.0, True), (1.8, True), (2.6, False), (3.4, True)]
    for t, hit in clicks:
        client.send({"type": "click", "t": t, "hit": hit})
    end = client.send({"type": "end"})
    summary = client.wait_for(lambda d: d.get("seq") == end)
    assert summary["type"] == "summary"
    (block,) = summary["blocks"]
    assert block["id_bits"] == pytest.approx(3.0)
    assert block["mean_mt_s"] == pytest.approx(0.8)
    assert block["throughput_bps"] == pytest.approx(3.0 / 0.8)
    assert block["error_rate"] == pytest.approx(0.25)
    assert block["error_bits"] == pytest.approx(-math.log2(0.75))


@pytest.fixture(scope="module")
def small_run():
    return run_condition(Condition(4.84, 2), DriverParams(seed=17), 17,
                         trials_per_kind=2)


def test_replay_summary_matches_offline(server, small_run):
    summary = replay_trace(small_run, port=server.port)
    assert summary["n_samples"] == small_run.t.size
    by_id = {e["trial_id"]: e for e in summary["trials"]}
    checked = 0
    for tr in small_run.trials:
        entry = by_id[tr.trial_id]
        if tr.kind != "decel" or tr.collided or tr.response_onset is None:
            assert "skipped" in entry
            continue
        info = trial_consumed_info(small_run.t, small_run.gap, tr)
        assert entry["consumed_bits"] == pytest.approx(info.consumed_bits,
                                                       abs=1e-9)
        assert entry["stimulus_bits"] == pytest.approx(info.stimulus_bits,
                                                       abs=1e-9)
        checked += 1
    assert checked >= 2


def test_replay_pacing(server):
    run = run_condition(Condition(8.84, 1), DriverParams(seed=1), 1,
                        trials_per_kind=0)
    duration = float(run.t[-1])
    speed = duration / 0.5  # target ~0.5 s wall time
    t0 = time.monotonic()
    summary = replay_trace(run, port=server.port, speed=speed)
    elapsed = time.monotonic() - t0
    assert summary["n_samples"] == run.t.size
    assert elapsed >= 0.9 * duration / speed


def test_replay_trial_free_trace(server):
    run = run_condition(Condition(8.84, 1), DriverParams(seed=1), 1,
                        trials_per_kind=0)
    summary = replay_trace(run, port=server.port)
    assert summary["trials"] == []
    assert summary["n_samples"] == run.t.size


# width bounded away from sample spacing so eps-edge samples cannot land
# exactly on the window boundary
@given(st.lists(st.tuples(st.floats(0.011, 0.2), st.floats(-10.0, 10.0)),
                min_size=2, max_size=300),
       st.floats(0.5, 3.0))
@settings(max_examples=60, deadline=None)
def test_rolling_window_matches_batch(increments, width):
    rw = RollingWindow(width)
    t = 0.0
    ts, vs = [], []
    for dt, v in increments:
        t += dt
        ts.append(t)
        vs.append(v)
        rw.push(t, v)
    ta, va = np.array(ts), np.array(vs)
    mask = ta >= t - width - EPS
    mean, sigma, n = rw.stats()
    assert n == int(mask.sum())
    assert mean == pytest.approx(va[mask].mean(), abs=1e-9)
    assert sigma == pytest.approx(va[mask].std(), abs=1e-9)


def test_rolling_window_recompute_path():
    rng = np.random.default_rng(0)
    rw = RollingWindow(1.0)
    t = np.arange(6000) * 0.01
    v = rng.normal(100.0, 5.0, t.size)  # large offset stresses the sums
    for ti, vi in zip(t, v):
        rw.push(float(ti), float(vi))
    mask = t >= t[-1] - 1.0 - EPS
    mean, sigma, n = rw.stats()
    assert n == int(mask.sum())
    assert mean == pytest.approx(v[mask].mean(), abs=1e-9)
    assert sigma == pytest.approx(v[mask].std(), abs=1e-9)
