"""JSON serialization for behaviors, input distributions, certificates,
and wirings.

Numbers are written as decimal doubles with 17 significant digits, which
round-trips float64 exactly: serialize -> parse -> serialize is
byte-identical. Arrays are flat row-major; shapes are implied by the
scenario fields carried alongside.
"""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

from .behaviors import (
    Behavior,
    InputDistribution,
    JointDistribution,
    KIND_PRODUCT,
    KIND_UNIFORM,
    Scenario,
    behavior_from_array,
)
from .divergence import DivergenceValue
from .errors import LengthMismatch, ParameterOutOfRange
from .geometry import BellCertificate, LocalModel
from .monotones import MonotoneResult
from .wirings import (
    BothMeasureBranch,
    GlobalWiring,
    LosrWiring,
    OneMeasuresBranch,
    UclosrWiring,
    WpiccWiring,
)


def _fmt(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isinf(v):
            return '"inf"' if v > 0 else '"-inf"'
        if math.isnan(v):
            return "null"
        return f"{v:.17g}"
    if value is None:
        return "null"
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, np.ndarray):
        return _fmt(list(value.reshape(-1)))
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(_fmt(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{" + ",".join(
            f"{json.dumps(k)}:{_fmt(v)}" for k, v in value.items()
        ) + "}"
    raise ParameterOutOfRange(f"cannot serialize {type(value).__name__}")


def dumps(obj: dict) -> str:
    """Deterministic JSON text with 17-significant-digit doubles."""
    return _fmt(obj)


def _scenario_fields(sc: Scenario) -> dict:
    return {"sA": sc.sA, "sB": sc.sB, "rA": sc.rA, "rB": sc.rB}


def _scenario_from(data: dict, vertex_cap: int | None = None) -> Scenario:
    kwargs = {} if vertex_cap is None else {"vertex_cap": vertex_cap}
    return Scenario(int(data["sA"]), int(data["rA"]), int(data["sB"]),
                    int(data["rB"]), **kwargs)


# -- behaviors --------------------------------------------------------------


def behavior_to_json(p: Behavior) -> str:
    doc = _scenario_fields(p.scenario)
    doc["p"] = p.flat()
    return dumps(doc)


def behavior_from_json(text: str, vertex_cap: int | None = None) -> Behavior:
    data = json.loads(text)
    sc = _scenario_from(data, vertex_cap)
    return behavior_from_array(sc, np.asarray(data["p"], dtype=float))


# -- input distributions -----------------------------------------------------


def input_distribution_to_json(d: InputDistribution) -> str:
    doc: dict[str, Any] = _scenario_fields(d.scenario)
    doc["kind"] = d.kind
    if d.kind == KIND_PRODUCT:
        doc["dX"] = d.dX
        doc["dY"] = d.dY
    else:
        doc["d"] = d.d.reshape(-1)
    return dumps(doc)


def input_distribution_from_json(text: str) -> InputDistribution:
    data = json.loads(text)
    sc = _scenario_from(data)
    kind = data["kind"]
    if kind == KIND_UNIFORM:
        return InputDistribution.uniform(sc)
    if kind == KIND_PRODUCT:
        return InputDistribution.product(sc, np.asarray(data["dX"], dtype=float),
                                         np.asarray(data["dY"], dtype=float))
    return InputDistribution.general(sc, np.asarray(data["d"], dtype=float))


# -- divergence and certificates ---------------------------------------------


def divergence_to_json(v: DivergenceValue) -> str:
    doc = {
        "bits": v.bits if math.isfinite(v.bits) else float("inf"),
        "argmax": list(v.argmax_setting) if v.argmax_setting is not None else None,
    }
    return dumps(doc)


def local_model_to_json(model: LocalModel) -> str:
    doc = _scenario_fields(model.scenario)
    doc["weights"] = [
        [a, b, w] for a, b, w in model.sparse_pairs(threshold=1e-15)
    ]
    return dumps(doc)


def local_model_from_json(text: str) -> LocalModel:
    data = json.loads(text)
    sc = _scenario_from(data)
    weights = np.zeros(sc.vertex_count)
    nB = sc.n_bob_strategies
    for a, b, w in data["weights"]:
        weights[int(a) * nB + int(b)] = float(w)
    return LocalModel(sc, weights)


def certificate_to_json(cert: BellCertificate) -> str:
    doc = _scenario_fields(cert.scenario)
    doc["coefficients"] = cert.coefficients.reshape(-1)
    doc["local_bound"] = cert.local_bound
    doc["value_on_behavior"] = cert.value_on_behavior
    return dumps(doc)


def certificate_from_json(text: str) -> BellCertificate:
    data = json.loads(text)
    sc = _scenario_from(data)
    return BellCertificate(
        sc,
        np.asarray(data["coefficients"], dtype=float).reshape(sc.shape),
        float(data["local_bound"]),
        float(data["value_on_behavior"]),
    )


def monotone_result_to_json(r: MonotoneResult) -> str:
    doc: dict[str, Any] = {
        "value": r.value,
        "gap_estimate": r.gap_estimate,
        "iterations": r.iterations,
        "lower_bound": r.lower_bound,
        "optimizer_local": json.loads(local_model_to_json(r.optimizer_local)),
    }
    if r.optimizer_inputs is not None:
        doc["optimizer_inputs"] = json.loads(
            input_distribution_to_json(r.optimizer_inputs)
        )
    else:
        doc["optimizer_inputs"] = None
    return dumps(doc)


# -- wirings ------------------------------------------------------------------


def _wiring_header(w, cls: str) -> dict:
    return {
        "class": cls,
        "initial": _scenario_fields(w.initial),
        "final": _scenario_fields(w.final),
    }


def wiring_to_json(w) -> str:
    if isinstance(w, GlobalWiring):
        doc = _wiring_header(w, "gw")
        doc["i_box"] = w.i_box
        doc["o_box"] = w.o_box
        return dumps(doc)
    if isinstance(w, UclosrWiring):
        doc = _wiring_header(w, "uclosr")
        doc["in_a"] = w.in_a
        doc["in_b"] = w.in_b
        doc["out_a"] = w.out_a
        doc["out_b"] = w.out_b
        return dumps(doc)
    if isinstance(w, LosrWiring):
        doc = _wiring_header(w, "losr")
        doc["components"] = [
            {
                "weight": float(w.weights[l]),
                "in_a": w.in_a[l],
                "in_b": w.in_b[l],
                "out_a": w.out_a[l],
                "out_b": w.out_b[l],
            }
            for l in range(w.n_lambda)
        ]
        return dumps(doc)
    if isinstance(w, WpiccWiring):
        doc = _wiring_header(w, "wpicc")
        doc["probabilities"] = w.branch_probabilities

        def both_doc(branch: BothMeasureBranch | None):
            if branch is None:
                return None
            return {
                "first": branch.first,
                "d_first": branch.d_first,
                "d_second": branch.d_second,
                "components": [
                    {
                        "weight": float(branch.weights[i]),
                        "out_a": branch.out_a[i],
                        "out_b": branch.out_b[i],
                    }
                    for i in range(branch.weights.size)
                ],
            }

        def one_doc(branch: OneMeasuresBranch | None):
            if branch is None:
                return None
            return {
                "measurer": branch.measurer,
                "d_meas": branch.d_meas,
                "in_other": branch.in_other,
                "components": [
                    {
                        "weight": float(branch.weights[i]),
                        "out_other": branch.out_other[i],
                        "out_meas": branch.out_meas[i],
                    }
                    for i in range(branch.weights.size)
                ],
            }

        doc["both_alice_first"] = both_doc(w.both_alice_first)
        doc["both_bob_first"] = both_doc(w.both_bob_first)
        doc["alice_only"] = one_doc(w.alice_only)
        doc["bob_only"] = one_doc(w.bob_only)
        doc["none_branch"] = (
            json.loads(wiring_to_json(w.none_branch))
            if w.none_branch is not None
            else None
        )
        return dumps(doc)
    raise ParameterOutOfRange(f"not a wiring: {type(w).__name__}")


def _arr(data, shape) -> np.ndarray:
    out = np.asarray(data, dtype=float).reshape(shape)
    return out


def wiring_from_json(text: str, vertex_cap: int | None = None):
    data = json.loads(text) if isinstance(text, str) else text
    cls = data.get("class")
    si = _scenario_from(data["initial"], vertex_cap)
    sf = _scenario_from(data["final"], vertex_cap)
    if cls == "gw":
        return GlobalWiring(
            si, sf,
            _arr(data["i_box"], (sf.sA, sf.sB, si.sA, si.sB)),
            _arr(data["o_box"],
                 (si.rA, si.rB, si.sA, si.sB, sf.sA, sf.sB, sf.rA, sf.rB)),
        )
    if cls == "uclosr":
        return UclosrWiring(
            si, sf,
            _arr(data["in_a"], (sf.sA, si.sA)),
            _arr(data["in_b"], (sf.sB, si.sB)),
            _arr(data["out_a"], (si.rA, si.sA, sf.sA, sf.rA)),
            _arr(data["out_b"], (si.rB, si.sB, sf.sB, sf.rB)),
        )
    if cls == "losr":
        comps = data["components"]
        if not comps:
            raise LengthMismatch("losr wiring needs at least one component")
        nl = len(comps)
        return LosrWiring(
            si, sf,
            np.array([float(c["weight"]) for c in comps]),
            np.stack([_arr(c["in_a"], (sf.sA, si.sA)) for c in comps]),
            np.stack([_arr(c["in_b"], (sf.sB, si.sB)) for c in comps]),
            np.stack([_arr(c["out_a"], (si.rA, si.sA, sf.sA, sf.rA)) for c in comps]),
            np.stack([_arr(c["out_b"], (si.rB, si.sB, sf.sB, sf.rB)) for c in comps]),
        )
    if cls == "wpicc":
        def both_from(doc):
            if doc is None:
                return None
            first = doc["first"]
            if first == "bob":
                d_first = _arr(doc["d_first"], (si.sB,))
                d_second = _arr(doc["d_second"], (si.rB, si.sB, si.sA))
            else:
                d_first = _arr(doc["d_first"], (si.sA,))
                d_second = _arr(doc["d_second"], (si.rA, si.sA, si.sB))
            comps = doc["components"]
            return BothMeasureBranch(
                first,
                d_first,
                d_second,
                np.array([float(c["weight"]) for c in comps]),
                np.stack([_arr(c["out_a"],
                               (si.rA, si.rB, si.sA, si.sB, sf.sA, sf.rA))
                          for c in comps]),
                np.stack([_arr(c["out_b"],
                               (si.rA, si.rB, si.sA, si.sB, sf.sB, sf.rB))
                          for c in comps]),
            )

        def one_from(doc):
            if doc is None:
                return None
            measurer = doc["measurer"]
            comps = doc["components"]
            if measurer == "bob":
                return OneMeasuresBranch(
                    measurer,
                    _arr(doc["d_meas"], (si.sB,)),
                    _arr(doc["in_other"], (si.rB, si.sB, sf.sA, si.sA)),
                    np.array([float(c["weight"]) for c in comps]),
                    np.stack([_arr(c["out_other"],
                                   (si.rB, si.sB, si.rA, si.sA, sf.sA, sf.rA))
                              for c in comps]),
                    np.stack([_arr(c["out_meas"], (si.rB, si.sB, sf.sB, sf.rB))
                              for c in comps]),
                )
            return OneMeasuresBranch(
                measurer,
                _arr(doc["d_meas"], (si.sA,)),
                _arr(doc["in_other"], (si.rA, si.sA, sf.sB, si.sB)),
                np.array([float(c["weight"]) for c in comps]),
                np.stack([_arr(c["out_other"],
                               (si.rA, si.sA, si.rB, si.sB, sf.sB, sf.rB))
                          for c in comps]),
                np.stack([_arr(c["out_meas"], (si.rA, si.sA, sf.sA, sf.rA))
                          for c in comps]),
            )

        none_branch = (
            wiring_from_json(data["none_branch"], vertex_cap)
            if data.get("none_branch") is not None
            else None
        )
        return WpiccWiring(
            si, sf,
            _arr(data["probabilities"], (5,)),
            both_from(data.get("both_alice_first")),
            both_from(data.get("both_bob_first")),
            one_from(data.get("alice_only")),
            one_from(data.get("bob_only")),
            none_branch,
        )
    raise ParameterOutOfRange(f"unknown wiring class {cls!r}")
