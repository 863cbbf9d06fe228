"""Acceptance suite: every criterion at its stated tolerance.

Each test prints one PASS/FAIL line (run with `pytest -s` to see them
even on success). Seeds are fixed so the suite is deterministic.
"""

import math
import time

import numpy as np
import pytest
from scipy.optimize import minimize

import bellwire as bw
from bellwire.geometry import local_vertex_matrix

SC2222 = bw.Scenario(2, 2, 2, 2)
TOL = 1e-6


def _report(num: int, ok: bool, elapsed: float, detail: str) -> None:
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {num} {status} ({elapsed:.1f} s): {detail}")


def test_criterion_1_divergence_doubling():
    t0 = time.time()
    worst_closed = 0.0
    worst_double = 0.0
    wiring = bw.feedback_copy_wiring()
    for eps in (0.05, 0.10, 0.125, 0.20, 0.30, 0.45):
        p0, p0p = bw.doubling_pair(eps)
        before = bw.behavior_re(p0, p0p).bits
        closed = (0.5 - 2.0 * eps) * math.log2((0.5 - eps) / eps)
        after = bw.behavior_re(
            bw.apply_wpicc(wiring, p0), bw.apply_wpicc(wiring, p0p)
        ).bits
        worst_closed = max(worst_closed, abs(before - closed))
        worst_double = max(worst_double, abs(after - 2.0 * before))
    elapsed = time.time() - t0
    ok = worst_closed <= 1e-12 and worst_double <= 1e-12 and elapsed < 1.0
    _report(1, ok, elapsed,
            f"closed-form dev {worst_closed:.2e}, doubling dev {worst_double:.2e}")
    assert worst_closed <= 1e-12
    assert worst_double <= 1e-12
    assert elapsed < 1.0


def test_criterion_2_uniform_strength_quadruples():
    t0 = time.time()
    p0 = bw.tsirelson_four_setting()
    pf = bw.apply_losr(bw.setting_fold_wiring(), p0)
    assert local_vertex_matrix(p0.scenario).shape[0] == 256
    r0 = bw.s_u(p0, TOL)
    rf = bw.s_u(pf, TOL)
    slack = 2.0 * (4.0 * r0.gap_estimate + rf.gap_estimate)
    elapsed = time.time() - t0
    ok = r0.value > 0 and rf.value >= 4.0 * r0.value - slack and elapsed < 30.0
    _report(2, ok, elapsed,
            f"v0={r0.value:.9f}, vf={rf.value:.9f}, ratio={rf.value/r0.value:.6f}")
    assert r0.value > 0
    assert rf.value >= 4.0 * r0.value - slack
    assert elapsed < 30.0


def test_criterion_3_gw_contractivity_1000():
    t0 = time.time()
    violations = 0
    for trial in range(1000):
        p = bw.random_ns_behavior(SC2222, 3_000_000 + 3 * trial)
        pp = bw.random_ns_behavior(SC2222, 3_000_001 + 3 * trial)
        w = bw.random_global_wiring(SC2222, SC2222, 3_000_002 + 3 * trial)
        before = bw.behavior_re(p, pp).bits
        after = bw.behavior_re(bw.apply_gw(w, p), bw.apply_gw(w, pp)).bits
        if math.isinf(before):
            continue
        if after > before + 1e-9:
            violations += 1
    elapsed = time.time() - t0
    ok = violations == 0 and elapsed < 60.0
    _report(3, ok, elapsed, f"{violations} contractivity violations in 1000 trials")
    assert violations == 0
    assert elapsed < 60.0


def test_criterion_4_minimax_identity_100():
    t0 = time.time()
    worst = 0.0
    for trial in range(100):
        p = bw.random_ns_behavior(SC2222, 4_000_000 + trial)
        a = bw.s_nl(p, TOL)
        b = bw.s_c_alternating(p, TOL)
        worst = max(worst, abs(a.value - b.value))
    elapsed = time.time() - t0
    ok = worst <= 2.0 * TOL and elapsed < 120.0
    _report(4, ok, elapsed, f"worst |s_nl - direct s_c| = {worst:.2e}")
    assert worst <= 2.0 * TOL
    assert elapsed < 120.0


def test_criterion_5_faithfulness_and_closure_500():
    t0 = time.time()
    worst_value = 0.0
    closure_failures = 0
    for trial in range(500):
        p, _ = bw.random_local_behavior(SC2222, 5_000_000 + trial)
        for name, kwargs in (("snl", {}), ("su", {}), ("sc", {}),
                             ("suc", {"restarts": 5, "seed": trial})):
            r = bw.evaluate_quantifier(name, p, TOL, **kwargs)
            worst_value = max(worst_value, r.value)
        w_losr = bw.random_losr_wiring(SC2222, SC2222, 5_500_000 + trial)
        w_wpicc = bw.random_wpicc_wiring(SC2222, SC2222, 5_600_000 + trial)
        if not bw.is_local(bw.apply_losr(w_losr, p), tol=1e-8).is_local:
            closure_failures += 1
        if not bw.is_local(bw.apply_wpicc(w_wpicc, p), tol=1e-8).is_local:
            closure_failures += 1
    elapsed = time.time() - t0
    ok = worst_value <= TOL and closure_failures == 0 and elapsed < 120.0
    _report(5, ok, elapsed,
            f"max quantifier on locals {worst_value:.2e}, "
            f"{closure_failures} closure failures")
    assert worst_value <= TOL
    assert closure_failures == 0
    assert elapsed < 120.0


def test_criterion_6_monotonicity_suites():
    t0 = time.time()
    snl_violations = 0
    for trial in range(200):
        p = bw.random_ns_behavior(SC2222, 6_000_000 + trial)
        w = bw.random_wpicc_wiring(SC2222, SC2222, 6_100_000 + trial)
        rep = bw.monotonicity_audit("snl", p, [w], TOL)
        snl_violations += rep.any_violation
    suc_violations = 0
    for trial in range(200):
        p = bw.random_ns_behavior(SC2222, 6_200_000 + trial)
        w = bw.random_uclosr_wiring(SC2222, SC2222, 6_300_000 + trial)
        rep = bw.monotonicity_audit("suc", p, [w], TOL, restarts=8,
                                    seed=6_400_000 + trial)
        suc_violations += rep.any_violation
    p0 = bw.tsirelson_four_setting()
    audit = bw.monotonicity_audit("su", p0, [bw.setting_fold_wiring()], TOL)
    row = audit.rows[0]
    su_flagged = row.violated
    ratio_ok = row.value_after >= (4.0 - 1e-3) * row.value_before
    elapsed = time.time() - t0
    ok = (snl_violations == 0 and suc_violations == 0 and su_flagged
          and ratio_ok and elapsed < 600.0)
    _report(6, ok, elapsed,
            f"snl violations {snl_violations}/200, suc violations "
            f"{suc_violations}/200, s_u increase flagged={su_flagged} "
            f"ratio={row.value_after/row.value_before:.4f}")
    assert snl_violations == 0
    assert suc_violations == 0
    assert su_flagged and ratio_ok
    assert elapsed < 600.0


def _oracle_snl_pr_box() -> float:
    """Brute force: a dirichlet grid over the vertex-weight simplex plus
    derivative-free local refinement (Nelder-Mead on an annealed smoothed
    maximum, final value evaluated on the exact maximum). Fully
    independent of the package solvers."""
    V = local_vertex_matrix(SC2222)
    P = bw.pr_box().flat()
    m, k = 4, 4
    Ps = P.reshape(m, k)
    masks = [Ps[s] > 0 for s in range(m)]

    def setting_kls(w: np.ndarray) -> np.ndarray | None:
        w = np.clip(w, 0.0, None)
        w = w / w.sum()
        q = (w @ V).reshape(m, k)
        out = np.empty(m)
        for s in range(m):
            pe, qe = Ps[s][masks[s]], q[s][masks[s]]
            if np.any(qe <= 0):
                return None
            out[s] = float(np.sum(pe * np.log2(pe / qe)))
        return out

    def worst_kl(w: np.ndarray) -> float:
        r = setting_kls(w)
        return math.inf if r is None else float(np.max(r))

    def smoothed(w: np.ndarray, tau: float) -> float:
        r = setting_kls(w)
        if r is None:
            return math.inf
        mx = float(np.max(r))
        return mx + tau * math.log2(np.sum(np.exp((r - mx) * math.log(2) / tau)))

    # grid stage: barycenter, pair midpoints, and dirichlet draws
    candidates = [np.full(16, 1 / 16)]
    for i in range(16):
        for j in range(i + 1, 16):
            w = np.zeros(16)
            w[i] = w[j] = 0.5
            candidates.append(w)
    rng = np.random.default_rng(123)
    for alpha in (0.3, 1.0, 3.0):
        for _ in range(300):
            candidates.append(rng.dirichlet(np.full(16, alpha)))
    candidates.sort(key=worst_kl)

    best = math.inf
    for start in candidates[:3]:
        z = np.log(np.clip(start, 1e-9, None))
        for tau in (1e-2, 1e-3, 1e-4, 1e-5, 1e-6):
            res = minimize(
                lambda zz: smoothed(np.exp(zz - np.max(zz)), tau), z,
                method="Nelder-Mead",
                options={"maxiter": 3000, "xatol": 1e-11, "fatol": 1e-14},
            )
            z = res.x
        best = min(best, worst_kl(np.exp(z - np.max(z))))
    return best


def test_criterion_7_oracle_equivalence():
    t0 = time.time()
    solver_value = bw.s_nl(bw.pr_box(), TOL).value
    oracle_value = _oracle_snl_pr_box()
    value_ok = abs(solver_value - oracle_value) <= 1e-4

    disagreements = 0
    for trial in range(1000):
        seed = 7_000_000 + trial
        p = (bw.random_behavior(SC2222, seed) if trial % 2
             else bw.random_ns_behavior(SC2222, seed))
        v1 = bw.is_local(p, pivot="bland").is_local
        v2 = bw.is_local(p, pivot="dantzig").is_local
        disagreements += (v1 != v2)
    elapsed = time.time() - t0
    ok = value_ok and disagreements == 0
    _report(7, ok, elapsed,
            f"s_nl(PR) solver={solver_value:.8f} oracle={oracle_value:.8f}, "
            f"{disagreements} pivot-rule disagreements in 1000")
    assert value_ok
    assert disagreements == 0


def test_criterion_8_convexity_suites():
    t0 = time.time()
    snl_violations = 0
    suc_violations = 0
    rng = np.random.default_rng(8_000_000)
    for trial in range(100):
        p = bw.random_ns_behavior(SC2222, 8_100_000 + trial)
        pp = bw.random_ns_behavior(SC2222, 8_200_000 + trial)
        mu = float(rng.uniform())
        rep_nl = bw.convexity_audit("snl", p, pp, [mu], TOL)
        snl_violations += rep_nl.any_violation
        rep_uc = bw.convexity_audit("suc", p, pp, [mu], TOL, restarts=6,
                                    seed=8_300_000 + trial)
        suc_violations += rep_uc.any_violation
    elapsed = time.time() - t0
    ok = snl_violations == 0 and suc_violations == 0 and elapsed < 300.0
    _report(8, ok, elapsed,
            f"snl violations {snl_violations}/100, suc violations "
            f"{suc_violations}/100")
    assert snl_violations == 0
    assert suc_violations == 0
    assert elapsed < 300.0
