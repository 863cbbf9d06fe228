import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

import bellwire as bw
from bellwire import jsonio
from bellwire.cli import main

SC2222 = bw.Scenario(2, 2, 2, 2)


def run_cli(*argv):
    return main(list(argv))


def test_reproduce_thm2_passes(tmp_path, capsys):
    out = tmp_path / "rep.json"
    code = run_cli("reproduce-thm2", "--epsilon", "0.125", "--out", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["passed"] is True
    assert doc["ratio"] == pytest.approx(2.0, abs=1e-12)
    assert doc["before_bits"] == pytest.approx(0.25 * math.log2(3), abs=1e-15)


def test_reproduce_thm2_degenerate(tmp_path):
    out = tmp_path / "deg.json"
    code = run_cli("reproduce-thm2", "--epsilon", "0.25", "--out", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["degenerate"] is True
    assert doc["before_bits"] == 0.0 and doc["after_bits"] == 0.0


def test_reproduce_thm2_rejects_bad_epsilon(capsys):
    assert run_cli("reproduce-thm2", "--epsilon", "0.6") == 2


def test_reproduce_thm5_passes(tmp_path):
    out = tmp_path / "rep5.json"
    code = run_cli("reproduce-thm5", "--out", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["passed"] is True
    assert doc["ratio"] >= 4.0 - 1e-3
    assert doc["low_product_settings_preserved"] is True


def test_campaign_csv_deterministic(tmp_path):
    out1 = tmp_path / "c1.csv"
    out2 = tmp_path / "c2.csv"
    assert run_cli("campaign", "--suite", "losr_closure", "--trials", "10",
                   "--seed", "3", "--out", str(out1)) == 0
    assert run_cli("campaign", "--suite", "losr_closure", "--trials", "10",
                   "--seed", "3", "--out", str(out2)) == 0
    assert out1.read_bytes() == out2.read_bytes()
    lines = out1.read_text().strip().splitlines()
    assert lines[0] == "trial,label,value_before,value_after,slack,violation,error"
    assert len(lines) == 11


def test_campaign_gw_contractivity(tmp_path):
    out = tmp_path / "gw.csv"
    assert run_cli("campaign", "--suite", "gw_contractivity", "--trials", "25",
                   "--seed", "7", "--out", str(out)) == 0


def test_campaign_minimax_identity(tmp_path):
    out = tmp_path / "mm.csv"
    assert run_cli("campaign", "--suite", "minimax_identity", "--trials", "5",
                   "--seed", "3", "--out", str(out)) == 0


def test_campaign_worker_pool_matches_sequential(tmp_path):
    out1 = tmp_path / "seq.csv"
    out2 = tmp_path / "par.csv"
    assert run_cli("campaign", "--suite", "losr_closure", "--trials", "8",
                   "--seed", "1", "--out", str(out1)) == 0
    os.environ["BELLWIRE_THREADS"] = "4"
    try:
        assert run_cli("campaign", "--suite", "losr_closure", "--trials", "8",
                       "--seed", "1", "--out", str(out2)) == 0
    finally:
        del os.environ["BELLWIRE_THREADS"]
    assert out1.read_bytes() == out2.read_bytes()


def test_eval_local_check_pr_box(tmp_path):
    out = tmp_path / "pr.json"
    assert run_cli("eval", "local_check", "--in", "pr-box", "--out", str(out)) == 0
    doc = json.loads(out.read_text())
    assert doc["is_local"] is False
    cert = doc["certificate"]
    # re-verify the emitted certificate against all vertices
    coeff = np.asarray(cert["coefficients"])
    V = bw.local_vertex_matrix(SC2222)
    assert np.max(V @ coeff) == pytest.approx(cert["local_bound"], abs=1e-9)
    assert coeff @ bw.pr_box().flat() == pytest.approx(cert["value_on_behavior"],
                                                       abs=1e-9)
    assert cert["value_on_behavior"] > cert["local_bound"] + 1e-9


def test_eval_sb_doubling_pair(tmp_path):
    out = tmp_path / "sb.json"
    assert run_cli("eval", "sb", "--in", "doubling-first", "--in2",
                   "doubling-second", "--epsilon", "0.125",
                   "--out", str(out)) == 0
    doc = json.loads(out.read_text())
    assert doc["bits"] == pytest.approx(0.25 * math.log2(3), abs=1e-15)
    assert doc["argmax"] == [0, 0]


def test_eval_apply_feedback_preset(tmp_path):
    out = tmp_path / "pf.json"
    assert run_cli("eval", "apply", "--in", "feedback-wpicc", "--in2",
                   "doubling-first", "--epsilon", "0.125",
                   "--out", str(out)) == 0
    doc = json.loads(out.read_text())
    # the first member is x-independent, so the wiring leaves it unchanged
    assert doc["p"] == [0.375, 0.125, 0.125, 0.375, 0.375, 0.125, 0.125, 0.375]


def test_eval_with_behavior_file(tmp_path):
    p = bw.random_ns_behavior(SC2222, 5)
    infile = tmp_path / "p.json"
    infile.write_text(jsonio.behavior_to_json(p))
    out = tmp_path / "ns.json"
    assert run_cli("eval", "ns_check", "--in", str(infile), "--out", str(out)) == 0
    doc = json.loads(out.read_text())
    assert doc["ok"] is True


def test_eval_with_wiring_file(tmp_path):
    w = bw.random_losr_wiring(SC2222, SC2222, 2)
    wfile = tmp_path / "w.json"
    wfile.write_text(jsonio.wiring_to_json(w))
    pfile = tmp_path / "p.json"
    pfile.write_text(jsonio.behavior_to_json(bw.random_ns_behavior(SC2222, 1)))
    out = tmp_path / "out.json"
    assert run_cli("eval", "apply", "--in", str(wfile), "--in2", str(pfile),
                   "--out", str(out)) == 0
    got = jsonio.behavior_from_json(out.read_text())
    want = bw.apply_losr(w, bw.random_ns_behavior(SC2222, 1))
    assert got.allclose(want, atol=1e-15)


def test_eval_snl_emits_certificates(tmp_path):
    out = tmp_path / "snl.json"
    assert run_cli("eval", "snl", "--in", "pr-box", "--out", str(out)) == 0
    doc = json.loads(out.read_text())
    assert doc["value"] == pytest.approx(math.log2(4 / 3), abs=1e-5)
    assert doc["gap_estimate"] <= 1e-6
    weights = doc["optimizer_local"]["weights"]
    assert all(w > 0 for _, _, w in weights)


def test_eval_csv_format(tmp_path):
    out = tmp_path / "res.csv"
    assert run_cli("eval", "sb", "--in", "doubling-first", "--in2",
                   "doubling-second", "--epsilon", "0.2", "--format", "csv",
                   "--out", str(out)) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "key,value"


def test_missing_file_is_reported(capsys):
    assert run_cli("eval", "ns_check", "--in", "/nonexistent/file.json") == 2


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "bellwire.cli", "reproduce-thm2",
         "--epsilon", "0.2"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "ratio" in proc.stdout
