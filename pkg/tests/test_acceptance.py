"""End-to-end acceptance checks, one verdict line per criterion."""

import contextlib
import json
import math
import os
import time

import numpy as np
import pytest

from taskbits.estimator import (
    bin_series,
    error_series,
    fit_quadratic,
    trial_consumed_info,
    window_stats,
)
from taskbits.laws import (
    HickTask,
    LearningSchedule,
    fitts_run_from_edge,
    fitts_steps_closed_form,
    hick_capacity,
    power_law_run,
)
from taskbits.service import (
    SCHEMA_VERSION,
    ServiceClient,
    replay_trace,
    start_server,
)
from taskbits.sim import Condition, DriverParams, run_condition
from taskbits.surprise import (
    KL_BITS,
    GaussianBelief,
    error_bits_from_rate,
    hick_entropy,
    kl_equal_variance,
    kl_numeric,
    kl_unequal_variance,
)


@contextlib.contextmanager
def _verdict(capsys, label):
    try:
        yield
    except BaseException:
        with capsys.disabled():
            print(f"\nACCEPTANCE {label}: FAIL")
        raise
    with capsys.disabled():
        print(f"\nACCEPTANCE {label}: PASS")


def test_acceptance_1_kl_oracle(capsys):
    with _verdict(capsys, "1 KL closed forms vs quadrature oracle"):
        rng = np.random.default_rng(20240817)
        t0 = time.monotonic()
        for _ in range(1000):
            sg = rng.uniform(0.5, 2.0)
            gap = rng.uniform(0.0, 10.0) * sg
            sp = rng.uniform(0.25, 4.0) * sg
            p = GaussianBelief(gap, sp)
            g = GaussianBelief(0.0, sg)
            assert abs(kl_unequal_variance(p, g, b=1.0)
                       - kl_numeric(p, g)) < 1e-6
        for _ in range(100):
            sg = rng.uniform(0.5, 2.0)
            p = GaussianBelief(rng.uniform(0.0, 10.0) * sg, sg)
            g = GaussianBelief(0.0, sg)
            assert abs(kl_equal_variance(p, g, b=KL_BITS)
                       - kl_numeric(p, g)) < 1e-6
        assert time.monotonic() - t0 < 10.0


def test_acceptance_2_fitts_emergence(capsys):
    with _verdict(capsys, "2 halving recursion matches closed form"):
        for k in range(0, 21):
            e0 = (2.0 ** k - 1.0) * 1.0
            assert fitts_run_from_edge(e0, 1.0).steps == k
        rng = np.random.default_rng(2)
        for _ in range(1000):
            width = rng.uniform(0.01, 10.0)
            e0 = rng.uniform(1e-3, 1e6)
            steps = fitts_run_from_edge(e0, width).steps
            assert steps == math.ceil(math.log2(e0 / width + 1.0))
            assert steps == fitts_steps_closed_form(e0, width)


def test_acceptance_3_pipeline_recovery(capsys, tmp_path_factory):
    from taskbits.cli import main

    with _verdict(capsys, "3 reference-driver capacity recovery"):
        t0 = time.monotonic()
        base = tmp_path_factory.mktemp("recovery")
        cfg = base / "cfg.json"
        cfg.write_text(json.dumps({"driver": "reference"}))
        out = str(base / "traces")
        assert main(["simulate", "--config", str(cfg), "--seed", "0",
                     "--out", out]) == 0
        traces = sorted(os.path.join(out, n) for n in os.listdir(out)
                        if n.endswith(".csv") and ".trials" not in n)
        assert len(traces) == 180  # 15 participants x 12 conditions
        report_path = str(base / "report.json")
        assert main(["analyze", "--out", report_path, "--window-s", "1.0",
                     "--bin-capacity", "0.05", "--bin-error", "0.5",
                     "--onset-threshold", "0.02"] + traces) == 0
        fit = json.loads(open(report_path).read())["capacity_fit"]
        assert abs(fit["b"] - 0.25) <= 0.1 * 0.25
        assert abs(fit["a"] - (-0.02)) <= 0.02
        assert fit["r_squared"] >= 0.80
        assert time.monotonic() - t0 < 120.0


def test_acceptance_4_error_model_recovery(capsys):
    with _verdict(capsys, "4 quadratic error-law recovery"):
        b_true = 0.13
        centers = [0.25 + 0.5 * k for k in range(5)]

        def share_sum(a):
            return sum(1.0 - 2.0 ** -(a + b_true * x * x) for x in centers)

        lo, hi = 0.0, 1.0
        for _ in range(80):  # bisect the intercept so shares sum to 1
            mid = 0.5 * (lo + hi)
            lo, hi = (mid, hi) if share_sum(mid) < 1.0 else (lo, mid)
        a_true = 0.5 * (lo + hi)
        assert share_sum(a_true) == pytest.approx(1.0, abs=1e-12)

        ratios = []
        for x in centers:
            n = round(90 * (1.0 - 2.0 ** -(a_true + b_true * x * x)))
            ratios.extend([x] * n)
        assert abs(len(ratios) - 90) <= 3

        es = error_series(ratios, bin_width=0.5)
        assert es.unbounded_bins == ()
        fit = fit_quadratic(es.series)
        assert abs(fit.b - b_true) <= 0.15 * b_true
        assert fit.r_squared >= 0.90
        assert error_bits_from_rate(0.43) == pytest.approx(0.811, abs=1e-3)


def test_acceptance_5_gradient(capsys, default_report):
    with _verdict(capsys, "5 consumed-info gradient directions"):
        table = {(r["s_level"], r["n_level"]): r["mean_consumed_bits"]
                 for r in default_report.consumed_table}
        s_levels = sorted({s for s, _ in table})
        n_levels = sorted({n for _, n in table})
        assert len(table) == 12
        for s in s_levels:
            for n0, n1 in zip(n_levels, n_levels[1:]):
                assert table[(s, n1)] > table[(s, n0)], (s, n0, n1)
        for n in n_levels:
            for s0, s1 in zip(s_levels, s_levels[1:]):
                assert table[(s1, n)] < table[(s0, n)], (n, s0, s1)


def test_acceptance_6_determinism(capsys, tmp_path):
    from taskbits.cli import main

    with _verdict(capsys, "6 byte-identical traces and reports"):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"participants": 2, "trials_per_kind": 3}))
        outs, reports = [], []
        for tag in ("a", "b"):
            out = str(tmp_path / tag)
            assert main(["simulate", "--config", str(cfg), "--seed", "7",
                         "--out", out]) == 0
            traces = sorted(os.path.join(out, n) for n in os.listdir(out)
                            if n.endswith(".csv") and ".trials" not in n)
            rep = str(tmp_path / f"report_{tag}.json")
            assert main(["analyze", "--out", rep] + traces) == 0
            outs.append(out)
            reports.append(rep)
        names = sorted(os.listdir(outs[0]))
        assert names == sorted(os.listdir(outs[1]))
        for n in names:
            assert open(os.path.join(outs[0], n), "rb").read() == \
                open(os.path.join(outs[1], n), "rb").read(), n
        assert open(reports[0], "rb").read() == open(reports[1], "rb").read()


def test_acceptance_7_hick_power(capsys):
    with _verdict(capsys, "7 choice and learning spot values"):
        assert hick_entropy([0.25, 0.25, 0.25, 0.25]) == 2.0
        assert hick_capacity(HickTask(7), b=1.0) == 3.0
        sched = LearningSchedule(trials=1100, snr_of_trial=lambda x: float(x),
                                 a=10.0, b=1.0)
        run = dict(power_law_run(sched))
        assert run[1024] == 0.0
        assert run[1023] > 0.0


def test_acceptance_8_online_offline(capsys):
    with _verdict(capsys, "8 live replay matches offline estimator"):
        run = run_condition(Condition(4.84, 2), DriverParams(seed=17), 17,
                            trials_per_kind=2)
        server = start_server(port=0, window_s=1.0)
        try:
            # per-sample metrics against the batch window
            client = ServiceClient(port=server.port)
            try:
                seq = client.send({
                    "type": "declare", "schema": SCHEMA_VERSION,
                    "task_kind": "car-following",
                    "s_level": run.condition.s_level, "window_s": 1.0})
                client.wait_for(lambda d: d.get("seq") == seq)
                gap = run.gap
                seqs = {}
                probe = [i for i in range(run.t.size)
                         if run.t[i] >= 1.0][:: max(1, run.t.size // 40)]
                for i in range(run.t.size):
                    s = client.send({"type": "sample", "t": float(run.t[i]),
                                     "gap": float(gap[i])})
                    seqs[i] = s
                client.wait_for(lambda d: d.get("seq") == seqs[run.t.size - 1])
                for i in probe:
                    m = client.wait_for(lambda d, s=seqs[i]: d.get("seq") == s)
                    w = window_stats(run.t, gap, float(run.t[i]), 1.0)
                    ratio = w.sigma_gap / w.mean_gap
                    assert abs(m["surprise_bits"] - ratio * ratio) < 1e-6
            finally:
                client.close()

            # per-trial summary against the offline pipeline
            summary = replay_trace(run, port=server.port)
            by_id = {e["trial_id"]: e for e in summary["trials"]}
            checked = 0
            for tr in run.trials:
                if tr.kind != "decel" or tr.collided or tr.response_onset is None:
                    continue
                info = trial_consumed_info(run.t, run.gap, tr)
                entry = by_id[tr.trial_id]
                assert abs(entry["stimulus_bits"] - info.stimulus_bits) < 1e-6
                assert abs(entry["remaining_bits"] - info.remaining_bits) < 1e-6
                assert abs(entry["consumed_bits"] - info.consumed_bits) < 1e-6
                checked += 1
            assert checked >= 2
        finally:
            server.shutdown()
            server.server_close()
