"""Trace serialization: bit-exact float round-trip, column stability."""

import numpy as np

from thermoquad.harness import constant_profile, run_episode, sample_setup, agent_rng
from thermoquad.traces import (
    TRACE_COLUMNS,
    read_trace,
    write_record_trace,
    write_summary,
    read_summary,
)


def test_trace_round_trip_bit_exact(tmp_path, config, ctx):
    setup = sample_setup(agent_rng(3, 0), config.randomization)
    rec = run_episode(setup, constant_profile(2.0, 1.2, 0.3, -0.5), "governed",
                      config, ctx=ctx)
    path = tmp_path / "trace.csv"
    write_record_trace(rec, path)
    back = read_trace(path)
    assert np.array_equal(back["time_s"], rec.time)
    for k in range(14):
        assert np.array_equal(back[TRACE_COLUMNS[1 + k]], rec.temps[:, k])
    assert np.array_equal(back["reward_total"], rec.rewards["total"])
    assert np.array_equal(back["a_res_FL_KFE"], rec.a_res[:, 2])
    assert np.array_equal(back["tracking_err"], rec.tracking_err)


def test_trace_columns_documented_and_unique():
    assert len(TRACE_COLUMNS) == len(set(TRACE_COLUMNS))
    assert TRACE_COLUMNS[0] == "time_s"
    assert "temp_FL_HAA" in TRACE_COLUMNS and "heat_COMPUTER" in TRACE_COLUMNS


def test_summary_round_trip(tmp_path):
    payload = {"a": 1.0 / 3.0, "nested": {"xs": [1.5, 2.25]}}
    path = tmp_path / "summary.json"
    write_summary(payload, path)
    back = read_summary(path)
    assert back["a"] == payload["a"]
    assert back["nested"]["xs"] == payload["nested"]["xs"]
    assert back["format"] == "thermoquad-summary-v1"
