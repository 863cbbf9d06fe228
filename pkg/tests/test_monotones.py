import math

import numpy as np
import pytest

import bellwire as bw
from bellwire.errors import NoConvergence

SC2222 = bw.Scenario(2, 2, 2, 2)
TOL = 1e-6

# Known closed form: the nearest local box to the PR box under uniform
# inputs matches the CHSH game at win rate 3/4 in every setting, giving
# KL((1/2,0,0,1/2) || (3/8,1/8,1/8,3/8)) = log2(4/3) per setting.
PR_STRENGTH = math.log2(4.0 / 3.0)


def noisy_pr(mu: float) -> bw.Behavior:
    table = mu * bw.pr_box().p + (1 - mu) * bw.white_noise(SC2222).p
    return bw.Behavior(SC2222, table)


def test_s_u_pr_box_closed_form():
    r = bw.s_u(bw.pr_box(), TOL)
    assert r.value == pytest.approx(PR_STRENGTH, abs=2e-6)
    assert r.gap_estimate <= TOL
    assert bw.is_local(r.optimizer_local.reconstruct()).is_local


def test_s_u_local_behavior_vanishes():
    for seed in range(5):
        p, _ = bw.random_local_behavior(SC2222, seed)
        assert bw.s_u(p, TOL).value <= TOL


def test_s_nl_pr_box_equals_s_u_by_symmetry():
    # the PR box is setting-symmetric, so the worst setting equals the
    # average and the two quantifiers coincide
    assert bw.s_nl(bw.pr_box(), TOL).value == pytest.approx(PR_STRENGTH, abs=2e-6)


def test_s_nl_local_behaviors_vanish():
    for seed in range(8):
        p, _ = bw.random_local_behavior(SC2222, seed)
        r = bw.s_nl(p, TOL)
        assert r.value <= TOL
        assert r.gap_estimate <= TOL


def test_s_nl_certificate_is_local_model():
    r = bw.s_nl(noisy_pr(0.8), TOL)
    model = r.optimizer_local
    assert bw.is_local(model.reconstruct()).is_local
    # the reported value is the worst-setting divergence at the optimizer
    recon = model.reconstruct()
    assert bw.behavior_re(noisy_pr(0.8), recon).bits == pytest.approx(
        r.value, abs=1e-9
    )


def test_s_nl_vanishes_below_visibility_threshold():
    # mu = 1/2 is the local visibility of the PR box against white noise
    assert bw.is_local(noisy_pr(0.49)).is_local
    assert bw.s_nl(noisy_pr(0.49), TOL).value <= TOL
    assert not bw.is_local(noisy_pr(0.52)).is_local
    assert bw.s_nl(noisy_pr(0.52), TOL).value > TOL


def test_s_c_equals_s_nl():
    for p in (bw.pr_box(), noisy_pr(0.7)):
        a = bw.s_nl(p, TOL)
        c = bw.s_c(p, TOL)
        assert abs(a.value - c.value) <= 2 * TOL
        assert c.optimizer_inputs is not None
        # point mass on the worst setting
        assert np.max(c.optimizer_inputs.d) == 1.0


def test_s_c_alternating_agrees():
    for seed in (0, 5, 92):
        p = bw.random_ns_behavior(SC2222, seed)
        a = bw.s_nl(p, TOL)
        b = bw.s_c_alternating(p, TOL)
        assert abs(a.value - b.value) <= 2 * TOL


def test_ordering_chain():
    for p in (bw.pr_box(), noisy_pr(0.75)):
        su = bw.s_u(p, TOL)
        suc = bw.s_uc(p, TOL, restarts=8, seed=0)
        scv = bw.s_c(p, TOL)
        assert su.value <= suc.value + TOL
        assert suc.value <= scv.value + TOL


def test_s_uc_flags_lower_bound():
    r = bw.s_uc(bw.pr_box(), TOL, restarts=8, seed=0)
    assert r.lower_bound
    assert r.optimizer_inputs.kind == "product"
    # for the setting-symmetric PR box the uniform product is stationary
    assert r.value == pytest.approx(PR_STRENGTH, abs=1e-5)


def test_s_uc_local_vanishes_from_every_start():
    p, _ = bw.random_local_behavior(SC2222, 3)
    r = bw.s_uc(p, TOL, restarts=6, seed=1)
    assert r.value <= TOL


def test_s_uc_grid_cross_check():
    # dense grid over product distributions on the 2x2 setting simplex
    p = noisy_pr(0.8)
    from bellwire.monotones import _fw_minimize
    from bellwire.geometry import local_vertex_matrix

    V = local_vertex_matrix(SC2222)
    best = 0.0
    for ax in np.linspace(0, 1, 21):
        for by in np.linspace(0, 1, 21):
            D = np.outer([ax, 1 - ax], [by, 1 - by]).reshape(-1)
            inner = _fw_minimize(p.flat(), V, D, gap_tol=1e-7)
            best = max(best, max(0.0, inner.value - inner.gap))
    r = bw.s_uc(p, TOL, restarts=8, seed=0)
    assert r.value >= best - 1e-4


def test_tsirelson_s_u_strictly_positive():
    p0 = bw.tsirelson_four_setting()
    r0 = bw.s_u(p0, TOL)
    assert r0.value > 1e-3
    # random-restart weighted local search must not find anything better
    from bellwire.geometry import local_vertex_matrix

    V = local_vertex_matrix(p0.scenario)
    rng = np.random.default_rng(7)
    P = p0.flat()
    D = np.full(16, 1.0 / 16.0)
    entry_w = np.repeat(D, 4) * P
    act = entry_w > 0
    best = math.inf
    for _ in range(40):
        w = rng.dirichlet(np.ones(V.shape[0]) * 0.5)
        q = w @ V
        if np.any(q[act] <= 0):
            continue
        val = float(np.sum(entry_w[act] * np.log2(P[act] / q[act])))
        best = min(best, val)
    assert r0.value <= best + 1e-9


def test_fold_wiring_quadruples_s_u():
    p0 = bw.tsirelson_four_setting()
    pf = bw.apply_losr(bw.setting_fold_wiring(), p0)
    r0 = bw.s_u(p0, TOL)
    rf = bw.s_u(pf, TOL)
    slack = 2.0 * (4.0 * r0.gap_estimate + rf.gap_estimate)
    assert rf.value >= 4.0 * r0.value - slack
    assert r0.value > TOL


def test_monotonicity_audit_flags_s_u_increase():
    p0 = bw.tsirelson_four_setting()
    rep = bw.monotonicity_audit("su", p0, [bw.setting_fold_wiring()], TOL)
    assert rep.any_violation
    row = rep.rows[0]
    assert row.value_after / row.value_before >= 4.0 - 1e-3


def test_monotonicity_audit_snl_under_losr():
    p = noisy_pr(0.9)
    wirings = [bw.random_losr_wiring(SC2222, SC2222, s, n_lambda=2) for s in range(5)]
    rep = bw.monotonicity_audit("snl", p, wirings, TOL)
    assert not rep.any_violation


def test_monotonicity_audit_snl_under_wpicc():
    p = bw.random_ns_behavior(SC2222, 11)
    wirings = [bw.random_wpicc_wiring(SC2222, SC2222, s) for s in range(5)]
    rep = bw.monotonicity_audit("snl", p, wirings, TOL)
    assert not rep.any_violation


def test_convexity_audit_snl():
    rep = bw.convexity_audit(
        "snl", bw.pr_box(), bw.white_noise(SC2222), [0.0, 0.25, 0.5, 0.75, 1.0], TOL
    )
    assert not rep.any_violation


def test_convexity_audit_degenerate_mixture():
    p = noisy_pr(0.8)
    rep = bw.convexity_audit("snl", p, p, [0.3, 0.7], TOL)
    assert not rep.any_violation
    for row in rep.rows:
        assert abs(row.value_after - row.value_before) <= row.slack


def test_convexity_audit_suc_pr_vs_relabeled():
    table = np.array(bw.pr_box().p, copy=True)
    anti = bw.Behavior(SC2222, table[:, :, ::-1, :])
    rep = bw.convexity_audit("suc", bw.pr_box(), anti, [0.5], TOL,
                             restarts=8, seed=2)
    assert not rep.any_violation
    # the balanced mixture is white noise, so its value collapses to zero
    assert rep.rows[0].value_after <= TOL


def test_s_nl_hard_nonlocal_instances_certified():
    # asymmetric mixtures stress the degenerate-face tiebreak machinery
    for seed in (16, 28, 43):
        qb = bw.random_ns_behavior(SC2222, seed)
        p = bw.Behavior(SC2222, 0.5 * bw.pr_box().p + 0.5 * qb.p)
        r = bw.s_nl(p, TOL)
        assert r.gap_estimate <= TOL


def test_results_deterministic():
    p = noisy_pr(0.8)
    a = bw.s_nl(p, TOL)
    b = bw.s_nl(p, TOL)
    assert a.value == b.value
    r1 = bw.s_uc(p, TOL, restarts=8, seed=5)
    r2 = bw.s_uc(p, TOL, restarts=8, seed=5)
    assert r1.value == r2.value
