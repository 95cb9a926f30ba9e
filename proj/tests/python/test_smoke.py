# Copyright (c) 2026 memexplorer contributors
# SPDX-License-Identifier: Apache-2.0
"""Smoke tests for the Python bindings: every exposed operation runs and
returns sane values. Numerical depth lives in the C++ suites."""

import json
import math
import os

import pytest

import memexplorer as mx

OSWORLD = {
    "model": {
        "name": "llama-3.3-70b",
        "num_layers": 80,
        "hidden_dim": 8192,
        "num_heads": 64,
        "num_kv_heads": 8,
        "head_dim": 128,
        "ffn_dim": 28672,
        "vocab_size": 128256,
    },
    "trace": {"prompt_tokens": 90000, "generated_tokens": 8000, "stage": "prefill"},
    "precision": {"weight_bits": 8, "activation_bits": 8, "kv_bits": 8},
}

P1 = {
    "compute": {"pe_rows": 2048, "pe_cols": 256, "vlen": 2048},
    "hierarchy": [
        {"tech": "SRAM3D", "units": 3},
        {"tech": "HBM4", "units": 2},
        {"tech": "HBF", "units": 1},
    ],
    "precision": {"weight_bits": 8, "activation_bits": 8, "kv_bits": 8},
    "strategy": {
        "dataflow": "WS",
        "storage_priority": "Activation",
        "bw_priority": "Matrix",
    },
}


def test_catalog():
    cat = mx.default_catalog()
    names = {t["name"] for t in cat}
    assert {"SRAM2D", "SRAM3D", "HBM3E", "HBM4", "HBF"} <= names
    hbf = next(t for t in cat if t["name"] == "HBF")
    assert hbf["capacity_gb"] == 384


def test_max_stacks():
    assert mx.max_stacks("HBM3E") == 5
    assert mx.max_stacks("LPDDR5X") == 12
    with pytest.raises(Exception):
        mx.max_stacks("SRAM2D")  # on-chip has no shoreline


def test_transfer_time():
    tiers = [{"tech": "SRAM3D", "units": 1}, {"tech": "HBM3E", "units": 1}]
    out = mx.transfer_time(tiers, 1 << 30, [0.5, 0.5])
    assert out["analytic_s"] > 0
    assert abs(out["simulated_s"] - out["analytic_s"]) / out["analytic_s"] < 0.02
    assert out["effective_bandwidth_gb_s"] == [7000.0, 1000.0]


def test_footprints():
    fp = mx.footprints(OSWORLD)
    assert fp["weights_bytes"] == pytest.approx(70.55e9, rel=0.01)
    assert fp["kv_bytes_per_seq"] == pytest.approx(
        2 * 80 * 8 * 128 * 98000, rel=1e-9
    )
    assert fp["total_bytes"] > fp["weights_bytes"]


def test_eval_prefill_and_decode():
    pre = mx.eval_stage(P1, OSWORLD, "prefill")
    assert pre["tps"] > 0
    assert pre["power"]["avg_w"] <= pre["power"]["tdp_w"]
    assert pre["tps"] * pre["latency_s"] == pytest.approx(pre["tokens"], rel=1e-6)

    dec = mx.eval_stage(P1, OSWORLD, "decode")
    assert dec["batch"] >= 1
    assert dec["tps"] > 0

    slices = mx.eval_stage(P1, OSWORLD, "breakdown")
    assert [s["slice"] for s in slices] == [
        "prefill-attention",
        "prefill-ffn",
        "decode-early",
        "decode-late",
    ]


def test_infeasible_raises():
    base = json.loads(json.dumps(P1))
    base["hierarchy"] = [
        {"tech": "SRAM2D", "units": 1},
        {"tech": "HBM3E", "units": 4},  # saturates the on-chip boundary
    ]
    with pytest.raises(mx.InfeasibleError):
        mx.eval_stage(base, OSWORLD, "prefill")


def test_hypervolume_and_ehvi():
    # max/max example mirrored into the (tps max, power min) frame
    assert mx.hypervolume([(1.0, -2.0), (2.0, -1.0)], 0.0, 0.0) == pytest.approx(3.0)

    front = [(100.0, 300.0), (200.0, 500.0)]
    dominated = mx.ehvi(50.0, 400.0, 0.0, 0.0, front)
    assert dominated == 0.0
    improving = mx.ehvi(300.0, 200.0, 10.0, 10.0, front)
    assert improving > 0


def test_oracle_validation():
    rep = mx.validate_oracle(cases=10, seed=7)
    assert rep["failures"] == 0
    assert rep["max_rel_err"] <= 0.02


def test_small_dse_runs_and_is_deterministic():
    a = mx.run_dse(OSWORLD, budget=14, n_init=6, seed=3, pool_size=64)
    b = mx.run_dse(OSWORLD, budget=14, n_init=6, seed=3, pool_size=64)
    assert len(a["steps"]) == 14
    assert a["final_hv"] > 0
    assert [s["design_id"] for s in a["steps"]] == [s["design_id"] for s in b["steps"]]
    hv = [s["hv"] for s in a["steps"]]
    assert hv == sorted(hv)
    assert a["pareto_front"]
