import json
import math

import numpy as np
import pytest

import bellwire as bw
from bellwire import jsonio

SC2222 = bw.Scenario(2, 2, 2, 2)


def test_behavior_roundtrip_byte_identical():
    for seed in range(10):
        p = bw.random_ns_behavior(SC2222, seed)
        text = jsonio.behavior_to_json(p)
        p2 = jsonio.behavior_from_json(text)
        assert np.array_equal(p.p, p2.p)
        assert jsonio.behavior_to_json(p2) == text


def test_behavior_json_schema():
    p = bw.doubling_pair_first(1 / 8)
    doc = json.loads(jsonio.behavior_to_json(p))
    assert set(doc.keys()) == {"sA", "sB", "rA", "rB", "p"}
    assert doc["sA"] == 2 and doc["sB"] == 1
    assert len(doc["p"]) == 8
    assert doc["p"][0] == 0.375


def test_input_distribution_roundtrip_all_kinds():
    u = bw.InputDistribution.uniform(SC2222)
    pr = bw.InputDistribution.product(SC2222, [0.25, 0.75], [0.5, 0.5])
    g = bw.InputDistribution.general(SC2222, [[0.1, 0.2], [0.3, 0.4]])
    for d in (u, pr, g):
        text = jsonio.input_distribution_to_json(d)
        d2 = jsonio.input_distribution_from_json(text)
        assert d2.kind == d.kind
        assert np.array_equal(d2.d, d.d)
        assert jsonio.input_distribution_to_json(d2) == text


def test_product_kind_stores_marginals():
    pr = bw.InputDistribution.product(SC2222, [0.25, 0.75], [0.5, 0.5])
    doc = json.loads(jsonio.input_distribution_to_json(pr))
    assert doc["kind"] == "product"
    assert doc["dX"] == [0.25, 0.75]
    assert "d" not in doc


def test_divergence_serialization():
    val = bw.behavior_re(bw.doubling_pair_first(0.125), bw.doubling_pair_second(0.125))
    doc = json.loads(jsonio.divergence_to_json(val))
    assert doc["argmax"] == [0, 0]
    assert doc["bits"] == pytest.approx(0.25 * math.log2(3))
    inf_doc = json.loads(jsonio.divergence_to_json(bw.DivergenceValue(math.inf)))
    assert inf_doc["bits"] == "inf"
    assert inf_doc["argmax"] is None


def test_local_model_roundtrip():
    p, model = bw.random_local_behavior(SC2222, 4)
    text = jsonio.local_model_to_json(model)
    model2 = jsonio.local_model_from_json(text)
    assert np.allclose(model.weights, model2.weights, atol=1e-15)
    assert model2.matches(p, tol=1e-8)


def test_certificate_roundtrip_and_verification():
    res = bw.is_local(bw.pr_box())
    cert = res.certificate
    text = jsonio.certificate_to_json(cert)
    cert2 = jsonio.certificate_from_json(text)  # re-validates on construction
    assert cert2.local_bound == cert.local_bound
    assert cert2.value_on(bw.pr_box()) == cert.value_on_behavior


def test_wiring_roundtrip_all_classes():
    p = bw.random_ns_behavior(SC2222, 3)
    wirings = [
        bw.random_global_wiring(SC2222, SC2222, 0),
        bw.random_losr_wiring(SC2222, SC2222, 1, n_lambda=3),
        bw.random_uclosr_wiring(SC2222, SC2222, 2),
        bw.random_wpicc_wiring(SC2222, SC2222, 3),
        bw.feedback_copy_wiring(),
        bw.setting_fold_wiring(),
    ]
    for w in wirings:
        text = jsonio.wiring_to_json(w)
        w2 = jsonio.wiring_from_json(text)
        assert jsonio.wiring_to_json(w2) == text
        if isinstance(w, bw.WpiccWiring):
            if w.initial.key() == p.scenario.key():
                a, b = bw.apply_wpicc(w, p), bw.apply_wpicc(w2, p)
                assert a.allclose(b, atol=0.0)
        elif w.initial.key() == p.scenario.key():
            a = bw.apply_wiring(w, p)
            b = bw.apply_wiring(w2, p)
            assert a.allclose(b, atol=0.0)


def test_monotone_result_serialization():
    r = bw.s_u(bw.pr_box(), 1e-6)
    doc = json.loads(jsonio.monotone_result_to_json(r))
    assert doc["value"] == pytest.approx(math.log2(4 / 3), abs=1e-5)
    assert doc["lower_bound"] is False
    assert doc["optimizer_inputs"] is None
    assert len(doc["optimizer_local"]["weights"]) >= 1


def test_seventeen_digit_floats():
    # a value needing all 17 significant digits survives the round trip
    x = 0.1234567890123456789
    p = bw.Behavior(
        bw.Scenario(1, 1, 1, 2),
        np.array([[[[x, 1.0 - x]]]]),
    )
    text = jsonio.behavior_to_json(p)
    assert jsonio.behavior_from_json(text).p[0, 0, 0, 0] == x
