"""Nonlocality quantifiers over the local polytope.

Four quantities are computed, all in bits:

* `s_u` — divergence from the local set under uniformly chosen inputs:
  a single convex minimization over vertex weights.
* `s_nl` — the input-maximized divergence from the local set, a convex
  min-max problem. The objective is linear in the input distribution, so
  input-side best responses are point masses on the worst setting; the
  solver alternates input-side updates with full convex minimizations
  over vertex weights and certifies a bracket from the saddle-point
  inequality: any vertex-weight iterate upper-bounds the value by its
  worst-setting divergence, and any inner minimization at fixed inputs
  lower-bounds it.
* `s_c` — equal to `s_nl` by the minimax theorem; reported with the
  optimizing input distribution. A direct alternating max-min
  evaluation (`s_c_alternating`) is kept deliberately separate so the
  two routes can cross-validate.
* `s_uc` — the same game restricted to product input distributions.
  The product set is nonconvex, so the alternating coordinate ascent
  with multi-start reports a certified LOWER bound, flagged as such.

The inner minimization over vertex weights uses multiplicative
(expectation-maximization form) steps, which keep full support and never
walk into the +inf boundary, interleaved with pairwise vertex exchanges;
its stopping certificate is the Frank-Wolfe gap, whose linear subproblem
is exact enumeration over the deterministic vertices. Iterates start at
the barycenter. Per-setting divergences are clamped at a finite ceiling
wherever they feed an outer model; reported values are re-evaluated
unclamped at the optimizer.

The input-side updates combine three tactics, cheapest first: Newton
equalization of the active settings' divergences (at the saddle point
all supported settings agree), an epigraph polish of the vertex-weight
side with recovery of the input weights from the stationarity system,
and plain cutting planes. Each tactic only ever tightens the same
certified bracket, so the tactic mix cannot compromise correctness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .behaviors import Behavior, InputDistribution, Scenario
from .errors import NoConvergence, SolverFailure
from .geometry import LocalModel, local_vertex_matrix
from .lp import solve_lp
from .wirings import (
    GlobalWiring,
    LosrWiring,
    UclosrWiring,
    WpiccWiring,
    apply_gw,
    apply_losr,
    apply_uclosr,
    apply_wpicc,
)

LN2 = math.log(2.0)

#: Ceiling (in bits) applied to per-setting divergences inside optimizers.
CLAMP_BITS = 60.0

#: Default optimality gap, in bits.
DEFAULT_TOL = 1e-6

MAX_INNER_ITER = 100000


@dataclass(frozen=True)
class MonotoneResult:
    """Solver output: the value in bits plus certificates.

    `optimizer_local` reconstructs to the minimizing local behavior;
    `gap_estimate` is a valid optimality-gap bound except when
    `lower_bound` is set, in which case only the inner minimization is
    certified and the outer maximization is heuristic.
    """

    value: float
    optimizer_local: LocalModel
    optimizer_inputs: InputDistribution | None
    gap_estimate: float
    iterations: int
    lower_bound: bool = False


# ---------------------------------------------------------------------------
# Inner problem: minimize the weighted divergence over vertex weights
# ---------------------------------------------------------------------------


@dataclass
class _InnerSolution:
    lam: np.ndarray
    q: np.ndarray
    value: float
    gap: float
    iterations: int
    kl_table: np.ndarray  # per-setting divergence at the optimizer, unclamped
    converged: bool


def _kl_table_from_q(P: np.ndarray, q: np.ndarray, n_settings: int) -> np.ndarray:
    """Per-setting KL(P || q) from flat tables, +inf on support mismatch."""
    k = P.size // n_settings
    Ps = P.reshape(n_settings, k)
    qs = q.reshape(n_settings, k)
    out = np.empty(n_settings)
    for s in range(n_settings):
        mask = Ps[s] > 0.0
        if np.any(qs[s][mask] <= 0.0):
            out[s] = math.inf
        else:
            out[s] = float(np.sum(Ps[s][mask] * np.log2(Ps[s][mask] / qs[s][mask])))
    return out


def _fw_minimize(
    P: np.ndarray,
    V: np.ndarray,
    setting_weights: np.ndarray,
    *,
    gap_tol: float,
    max_iter: int = MAX_INNER_ITER,
    lam0: np.ndarray | None = None,
    pairwise_every: int = 8,
) -> _InnerSolution:
    """Minimize sum_s w_s KL(P_s || (V.lam)_s) over the weight simplex.

    Steps are multiplicative (expectation-maximization form); every
    eighth step a pairwise vertex exchange with exact line search prunes
    or revives vertices. Progress is certified by the Frank-Wolfe gap,
    whose linear subproblem is exact enumeration over the vertices.
    """
    n, dim = V.shape
    n_settings = setting_weights.size
    k = dim // n_settings
    c = np.repeat(setting_weights, k) * P
    active = c > 0.0
    cE = c[active]
    VE = V[:, active]
    mass = float(cE.sum())
    const = float(np.sum(cE * np.log2(P[active])))

    if lam0 is None:
        lam = np.full(n, 1.0 / n)
    else:
        # floor the warm start: multiplicative steps cannot revive an
        # exactly-zero coordinate on their own
        lam = np.clip(np.asarray(lam0, dtype=float), 0.0, None)
        lam = lam / lam.sum()
        lam = (1.0 - 1e-6) * lam + 1e-6 / n
    qE = lam @ VE

    gap = math.inf
    it = 0
    converged = False
    while it < max_iter:
        it += 1
        # the floor only matters for entries whose target weight is
        # rounding dust; it keeps incremental cancellation from feeding
        # an exact zero into the ratio
        ratio = cE / np.maximum(qE, 1e-300)
        back = VE @ ratio  # also the (negated, scaled) vertex scores
        scores = -back / LN2
        fw = int(np.argmin(scores))
        gap = float(lam @ scores - scores[fw])
        if gap <= gap_tol:
            converged = True
            break
        if it % pairwise_every == 0:
            support = np.where(lam > 1e-15)[0]
            aw = int(support[np.argmax(scores[support])])
            if aw != fw:
                d = VE[fw] - VE[aw]
                gamma_max = float(lam[aw])

                def dphi(g: float) -> float:
                    denom = qE + g * d
                    if np.any(denom <= 0.0):
                        return math.inf
                    return -float(np.sum(cE * d / denom)) / LN2

                if dphi(gamma_max) <= 0.0:
                    gamma = gamma_max
                else:
                    lo, hi = 0.0, gamma_max
                    for _ in range(50):
                        mid = 0.5 * (lo + hi)
                        if dphi(mid) < 0.0:
                            lo = mid
                        else:
                            hi = mid
                    gamma = lo
                if gamma > 0.0:
                    lam[fw] += gamma
                    lam[aw] -= gamma
                    if lam[aw] < 1e-15:
                        lam[aw] = 0.0
                    qE = qE + gamma * d
                    continue
        lam = lam * back / mass
        lam = lam / lam.sum()
        qE = lam @ VE

    q = lam @ V
    value = const - float(np.sum(cE * np.log2(np.maximum(qE, 1e-300))))
    kl_table = _kl_table_from_q(P, q, n_settings)
    return _InnerSolution(lam, q, value, max(gap, 0.0), it, kl_table, converged)


def _result_from_lam(
    p: Behavior,
    lam: np.ndarray,
    inputs: InputDistribution | None,
    value: float,
    gap: float,
    iterations: int,
    lower_bound: bool = False,
) -> MonotoneResult:
    lam = np.clip(lam, 0.0, None)
    model = LocalModel(p.scenario, lam / lam.sum())
    return MonotoneResult(
        value=float(value),
        optimizer_local=model,
        optimizer_inputs=inputs,
        gap_estimate=float(gap),
        iterations=iterations,
        lower_bound=lower_bound,
    )


def s_u(p: Behavior, tol: float = DEFAULT_TOL) -> MonotoneResult:
    """Divergence from the local set under the uniform input
    distribution: a single convex minimization, certified by the
    Frank-Wolfe gap."""
    sc = p.scenario
    V = local_vertex_matrix(sc)
    weights = np.full(sc.sA * sc.sB, 1.0 / (sc.sA * sc.sB))
    inner = _fw_minimize(p.flat(), V, weights, gap_tol=tol)
    if not inner.converged:
        raise NoConvergence(inner.iterations, inner.gap)
    return _result_from_lam(p, inner.lam, None, inner.value, inner.gap,
                            inner.iterations)


# ---------------------------------------------------------------------------
# Minimax: s_nl and s_c
# ---------------------------------------------------------------------------


def _lex_argmax(table: np.ndarray) -> int:
    """Index of the maximum with lexicographic tie-breaking, matching the
    scan order of behavior_re."""
    best = -math.inf
    arg = 0
    for i, v in enumerate(table):
        if v > best:
            best = v
            arg = i
    return arg


def _kls_and_grads(
    P: np.ndarray, V: np.ndarray, m: int, lam: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Per-setting divergences and their gradients in the vertex weights."""
    n, dim = V.shape
    k = dim // m
    Ps = P.reshape(m, k)
    q = lam @ V
    qs = q.reshape(m, k)
    kls = np.empty(m)
    grads = np.zeros((m, n))
    for s in range(m):
        mask = Ps[s] > 0.0
        pe = Ps[s][mask]
        qe = np.maximum(qs[s][mask], 1e-300)
        kls[s] = float(np.sum(pe * np.log2(pe / qe)))
        cols = s * k + np.where(mask)[0]
        grads[s] = -(V[:, cols] @ (pe / qe)) / LN2
    return kls, grads


def _epigraph_lambda(
    P: np.ndarray, V: np.ndarray, m: int, lam0: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray] | None:
    """Polish the vertex weights by solving the epigraph program
    min t s.t. every per-setting divergence <= t, with analytic
    gradients. This is the tiebreaker for degenerate optimal faces,
    where weighted-sum minimizers are not unique and plain exchanges
    stall; returns (weights, divergences, gradients)."""
    from scipy.optimize import minimize

    n = V.shape[0]
    lam0 = (1.0 - 1e-9) * np.clip(lam0, 0.0, None) + 1e-9 / n
    lam0 = lam0 / lam0.sum()
    kls0, _ = _kls_and_grads(P, V, m, lam0)
    x0 = np.concatenate([lam0, [float(np.max(kls0)) + 1e-3]])

    def cons_f(x):
        kls, _ = _kls_and_grads(P, V, m, np.clip(x[:n], 0.0, None))
        return x[-1] - kls

    def cons_j(x):
        _, grads = _kls_and_grads(P, V, m, np.clip(x[:n], 0.0, None))
        J = np.zeros((m, n + 1))
        J[:, :n] = -grads
        J[:, -1] = 1.0
        return J

    res = minimize(
        lambda x: x[-1],
        x0,
        jac=lambda x: np.concatenate([np.zeros(n), [1.0]]),
        method="SLSQP",
        bounds=[(0.0, None)] * n + [(None, None)],
        constraints=[
            {"type": "ineq", "fun": cons_f, "jac": cons_j},
            {
                "type": "eq",
                "fun": lambda x: np.sum(x[:n]) - 1.0,
                "jac": lambda x: np.concatenate([np.ones(n), [0.0]]),
            },
        ],
        options={"maxiter": 400, "ftol": 1e-16},
    )
    lam_star = np.clip(res.x[:n], 0.0, None)
    total = lam_star.sum()
    if not np.isfinite(total) or total <= 0.0:
        return None
    lam_star = lam_star / total
    kls, grads = _kls_and_grads(P, V, m, lam_star)
    return lam_star, kls, grads


def _stationary_inputs(
    grads: np.ndarray,
    lam_star: np.ndarray,
    kls: np.ndarray,
    upper: float,
    margin: float,
    m: int,
) -> np.ndarray | None:
    """Input weights under which `lam_star` is stationary: minimize, over
    weights supported on the near-maximal settings, the Frank-Wolfe gap
    of the weighted problem at `lam_star` (a small LP)."""
    n = lam_star.size
    S = [j for j in range(m) if kls[j] >= upper - margin]
    if not S:
        return None
    gS = grads[np.array(S)]
    base = gS @ lam_star
    H = base[:, None] - gS  # (|S|, n): gap contribution per vertex
    scale = max(float(np.max(np.abs(H))), 1.0)
    Hs = H / scale
    ms = len(S)
    nv = ms + 2 + n
    A = np.zeros((n + 1, nv))
    b = np.zeros(n + 1)
    for v in range(n):
        A[v, :ms] = Hs[:, v]
        A[v, ms] = -1.0
        A[v, ms + 1] = 1.0
        A[v, ms + 2 + v] = 1.0
    A[n, :ms] = 1.0
    b[n] = 1.0
    c = np.zeros(nv)
    c[ms] = 1.0
    c[ms + 1] = -1.0
    try:
        lp = solve_lp(c, A, b)
    except SolverFailure:
        return None
    if lp.status != "optimal":
        return None
    DS = np.clip(lp.x[:ms], 0.0, None)
    if DS.sum() <= 0.0:
        return None
    D = np.zeros(m)
    D[np.array(S)] = DS / DS.sum()
    return D


class _MinimaxSolver:
    """Certified solver for min over vertex weights of the worst-setting
    divergence. Maintains a bracket [lower, upper]: lower bounds come
    from inner minimizations at fixed input weights, upper bounds from
    the worst-setting divergence of any vertex-weight iterate."""

    def __init__(self, p: Behavior, tol: float):
        self.scenario = p.scenario
        self.V = local_vertex_matrix(p.scenario)
        self.P = p.flat()
        self.m = p.scenario.sA * p.scenario.sB
        self.k = self.P.size // self.m
        self.Ps = self.P.reshape(self.m, self.k)
        self.masks = [self.Ps[s] > 0.0 for s in range(self.m)]
        self.tol = tol
        self.n = self.V.shape[0]
        self.lower = 0.0
        self.upper = math.inf
        self.lam_best: np.ndarray | None = None
        self.kl_best: np.ndarray | None = None
        self.D_best: np.ndarray | None = None
        self.iterations = 0
        self.lam_warm: np.ndarray | None = None
        self.cuts: list[np.ndarray] = []

    @property
    def gap(self) -> float:
        return self.upper - self.lower

    @property
    def closed(self) -> bool:
        return self.gap <= self.tol

    def observe_lam(self, lam: np.ndarray, kl_table: np.ndarray) -> None:
        u_here = float(np.max(kl_table))
        if u_here < self.upper:
            self.upper = u_here
            self.lam_best = lam
            self.kl_best = kl_table

    def solve_at(self, D: np.ndarray, gap_tol: float,
                 max_iter: int = MAX_INNER_ITER) -> _InnerSolution:
        inner = _fw_minimize(self.P, self.V, D, gap_tol=gap_tol,
                             max_iter=max_iter, lam0=self.lam_warm)
        self.iterations += inner.iterations
        self.lam_warm = inner.lam
        bound = max(0.0, inner.value - inner.gap)
        if bound > self.lower:
            self.lower = bound
            self.D_best = D
        self.observe_lam(inner.lam, inner.kl_table)
        self.cuts.append(np.clip(
            np.where(np.isfinite(inner.kl_table), inner.kl_table, CLAMP_BITS),
            0.0, CLAMP_BITS))
        return inner

    # -- phase 1: Newton equalization of active-setting divergences -------

    @staticmethod
    def _embed(z: np.ndarray, S: list[int], m: int) -> np.ndarray:
        w = np.exp(z - np.max(z))
        w = w / w.sum()
        D = np.zeros(m)
        D[np.array(S)] = w
        return D

    def newton_phase(self, max_rounds: int = 25) -> None:
        inner_gap = self.tol / 8.0
        r0 = self.kl_best if self.kl_best is not None else None
        if r0 is None:
            return
        margin = max(2.0 * self.gap, 1e-9)
        S = [j for j in range(self.m) if r0[j] >= self.upper - margin]
        if len(S) < 1:
            return
        if len(S) == 1:
            D = np.zeros(self.m)
            D[S[0]] = 1.0
            self.solve_at(D, inner_gap)
            if not self.closed and self.m > 1:
                S = list(range(self.m))
            else:
                return
        z = np.zeros(len(S))
        spread_prev = math.inf
        for _ in range(max_rounds):
            inner = self.solve_at(self._embed(z, S, self.m), inner_gap)
            if self.closed:
                return
            rS = inner.kl_table[np.array(S)]
            if not np.all(np.isfinite(rS)):
                return
            rho = rS - rS.mean()
            spread = float(np.max(rS) - np.min(rS))
            outside = [j for j in range(self.m) if j not in S]
            if outside:
                r_out = inner.kl_table[np.array(outside)]
                if np.max(r_out) > np.max(rS) + self.tol / 4.0:
                    S.append(outside[int(np.argmax(r_out))])
                    z = np.append(z, math.log(1.0 / len(S)))
                    spread_prev = math.inf
                    continue
            w = np.exp(z - np.max(z))
            w = w / w.sum()
            drop = [i for i in range(len(S)) if w[i] < 1e-7 and rho[i] < 0.0]
            if drop and len(S) - len(drop) >= 1:
                keep = [i for i in range(len(S)) if i not in drop]
                S = [S[i] for i in keep]
                z = z[np.array(keep)]
                if len(S) == 1:
                    D = np.zeros(self.m)
                    D[S[0]] = 1.0
                    self.solve_at(D, inner_gap)
                    return
                spread_prev = math.inf
                continue
            if spread >= spread_prev * 0.9:
                # oscillation or stall: give up on this tactic
                return
            spread_prev = spread
            h = max(1e-4, min(1e-2, 10.0 * float(np.max(np.abs(rho)))))
            k_free = len(S) - 1
            J = np.zeros((len(S), k_free))
            for i in range(k_free):
                z2 = z.copy()
                z2[i] += h
                probe = self.solve_at(self._embed(z2, S, self.m), inner_gap)
                if self.closed:
                    return
                rS2 = probe.kl_table[np.array(S)]
                if not np.all(np.isfinite(rS2)):
                    return
                J[:, i] = ((rS2 - rS2.mean()) - rho) / h
            step, *_ = np.linalg.lstsq(J, -rho, rcond=None)
            z[: k_free] += np.clip(step, -2.0, 2.0)

    # -- phase 2: epigraph polish and stationarity recovery ---------------

    def nlp_polish(self) -> None:
        lam0 = self.lam_best if self.lam_best is not None else np.full(
            self.n, 1.0 / self.n
        )
        polished = _epigraph_lambda(self.P, self.V, self.m, lam0)
        if polished is None:
            return
        lam_star, kls, grads = polished
        self.observe_lam(lam_star, kls)
        if self.closed:
            return
        U_here = float(np.max(kls))
        self.lam_warm = lam_star
        for margin in (4.0 * self.tol, 1e-5, 1e-4, 1e-3):
            D_hat = _stationary_inputs(grads, lam_star, kls, U_here, margin, self.m)
            if D_hat is None:
                continue
            self.solve_at(D_hat, min(self.tol / 8.0, 1e-9))
            if self.closed:
                return

    # -- phase 3: cutting planes on the input side ------------------------

    def kelley_phase(self, max_rounds: int = 40) -> None:
        uniform = np.full(self.m, 1.0 / self.m)
        floor = 1e-3
        inner_gap = self.tol / 8.0
        stall = 0
        for _ in range(max_rounds):
            D_model = self._model_inputs()
            if D_model is None:
                return
            D = (1.0 - floor) * D_model + floor * uniform
            u_before = self.upper
            l_before = self.lower
            self.solve_at(D, inner_gap)
            if self.closed:
                return
            if self.upper >= u_before - self.tol / 10.0 and \
               self.lower <= l_before + self.tol / 10.0:
                stall += 1
                inner_gap = max(inner_gap / 8.0, 1e-13)
            else:
                stall = 0
            if stall >= 4:
                return
            floor = max(floor * 0.5, 1e-9)

    def _model_inputs(self) -> np.ndarray | None:
        """Maximize the cutting-plane upper model max_D min_i <D, r_i>."""
        kcut = len(self.cuts)
        if kcut == 0:
            return np.full(self.m, 1.0 / self.m)
        m = self.m
        n_var = m + 1 + kcut
        A = np.zeros((kcut + 1, n_var))
        b = np.zeros(kcut + 1)
        for i, r in enumerate(self.cuts):
            A[i, :m] = r
            A[i, m] = -1.0
            A[i, m + 1 + i] = -1.0
        A[kcut, :m] = 1.0
        b[kcut] = 1.0
        obj = np.zeros(n_var)
        obj[m] = -1.0
        try:
            res = solve_lp(obj, A, b)
        except SolverFailure:
            return None
        if res.status != "optimal":
            return None
        D = np.clip(res.x[:m], 0.0, None)
        total = D.sum()
        if total <= 0.0:
            return None
        return D / total

    # -- driver ------------------------------------------------------------

    def run(self, max_effort: int = 3) -> None:
        uniform = np.full(self.m, 1.0 / self.m)
        self.solve_at(uniform, self.tol / (2.0 * self.m))
        if self.closed:
            return
        for _ in range(max_effort):
            self.newton_phase()
            if self.closed:
                return
            self.nlp_polish()
            if self.closed:
                return
            self.kelley_phase()
            if self.closed:
                return
        raise NoConvergence(self.iterations, float(self.gap))


def _minimax_solve(p: Behavior, tol: float) -> _MinimaxSolver:
    solver = _MinimaxSolver(p, tol)
    solver.run()
    return solver


def s_nl(p: Behavior, tol: float = DEFAULT_TOL) -> MonotoneResult:
    """Input-maximized divergence from the local set (the relative
    entropy of nonlocality), certified by the saddle-point bracket."""
    solver = _minimax_solve(p, tol)
    return _result_from_lam(
        p, solver.lam_best, None, solver.upper, solver.gap, solver.iterations
    )


def s_c(p: Behavior, tol: float = DEFAULT_TOL) -> MonotoneResult:
    """Max-min statistical strength over unrestricted input
    distributions; equals `s_nl` by the minimax theorem. The reported
    optimizer input is the point mass on the final worst setting."""
    solver = _minimax_solve(p, tol)
    sc = p.scenario
    arg = _lex_argmax(solver.kl_best)
    inputs = InputDistribution.point_mass(sc, arg // sc.sB, arg % sc.sB)
    return _result_from_lam(
        p, solver.lam_best, inputs, solver.upper, solver.gap, solver.iterations
    )


def s_c_alternating(
    p: Behavior,
    tol: float = DEFAULT_TOL,
    *,
    max_outer: int = 60,
) -> MonotoneResult:
    """Direct alternating max-min evaluation of the unrestricted
    statistical strength.

    The input distribution ascends by line-searched steps toward the
    best-response point mass (the worst setting), fully re-minimizing
    over vertex weights at every probe; upper bounds also come from
    running averages of the minimizing weights. The exploration dynamics
    are deliberately different from the engine behind `s_nl` so the two
    routes cross-validate; only the degenerate-face polisher, needed when
    weighted-sum minimizers are not unique, is shared between them.
    """
    sc = p.scenario
    V = local_vertex_matrix(sc)
    P = p.flat()
    m = sc.sA * sc.sB
    n = V.shape[0]
    inner_tol = tol / (2.0 * m)
    uniform = np.full(m, 1.0 / m)

    state = {
        "lower": 0.0,
        "upper": math.inf,
        "iterations": 0,
        "lam_warm": None,
        "lam_best": None,
        "kl_best": None,
        "lam_sum": np.zeros(n),
        "n_avg": 0,
    }

    def observe(lam: np.ndarray, kl_table: np.ndarray) -> None:
        u_here = float(np.max(kl_table))
        if u_here < state["upper"]:
            state["upper"] = u_here
            state["lam_best"] = lam
            state["kl_best"] = kl_table

    def evaluate(D: np.ndarray, gap: float) -> _InnerSolution:
        inner = _fw_minimize(P, V, D, gap_tol=gap, lam0=state["lam_warm"])
        state["iterations"] += inner.iterations
        state["lam_warm"] = inner.lam
        state["lower"] = max(state["lower"], max(0.0, inner.value - inner.gap))
        observe(inner.lam, inner.kl_table)
        state["lam_sum"] += inner.lam
        state["n_avg"] += 1
        return inner

    def closed() -> bool:
        return state["upper"] - state["lower"] <= tol

    D = uniform.copy()
    inner = evaluate(D, inner_tol)
    golden = (math.sqrt(5.0) - 1.0) / 2.0
    stalled = 0
    for _ in range(max_outer):
        if closed():
            break
        # averaged-iterate upper candidate
        if state["n_avg"] > 1:
            lam_avg = state["lam_sum"] / state["n_avg"]
            observe(lam_avg, _kl_table_from_q(P, lam_avg @ V, m))
            if closed():
                break
        u_before, l_before = state["upper"], state["lower"]
        table = np.clip(
            np.where(np.isfinite(inner.kl_table), inner.kl_table, CLAMP_BITS),
            0.0, CLAMP_BITS)
        best_response = np.zeros(m)
        best_response[_lex_argmax(table)] = 1.0
        # golden-section line search for the ascent step
        a, b = 0.0, 1.0
        x1 = b - golden * (b - a)
        x2 = a + golden * (b - a)
        f1 = evaluate((1 - x1) * D + x1 * best_response, inner_tol).value
        f2 = evaluate((1 - x2) * D + x2 * best_response, inner_tol).value
        for _ in range(8):
            if closed():
                break
            if f1 < f2:
                a, x1, f1 = x1, x2, f2
                x2 = a + golden * (b - a)
                f2 = evaluate((1 - x2) * D + x2 * best_response, inner_tol).value
            else:
                b, x2, f2 = x2, x1, f1
                x1 = b - golden * (b - a)
                f1 = evaluate((1 - x1) * D + x1 * best_response, inner_tol).value
        if closed():
            break
        eta = x1 if f1 >= f2 else x2
        D = (1 - eta) * D + eta * best_response
        D = np.clip(D, 1e-12, None)
        D = D / D.sum()
        inner = evaluate(D, inner_tol)
        if state["upper"] >= u_before - tol / 10.0 and \
           state["lower"] <= l_before + tol / 10.0:
            stalled += 1
        else:
            stalled = 0
        if stalled >= 2:
            # degenerate optimal face: alternate exchanges cannot select
            # the equalizing minimizer, so polish and recover the inputs
            polished = _epigraph_lambda(P, V, m, state["lam_best"])
            stalled = 0
            if polished is not None:
                lam_star, kls, grads = polished
                observe(lam_star, kls)
                if closed():
                    break
                state["lam_warm"] = lam_star
                for margin in (4.0 * tol, 1e-5, 1e-4, 1e-3):
                    D_hat = _stationary_inputs(
                        grads, lam_star, kls, float(np.max(kls)), margin, m
                    )
                    if D_hat is None:
                        continue
                    evaluate(D_hat, min(tol / 8.0, 1e-9))
                    if closed():
                        break
                if closed():
                    break
            inner_tol = max(inner_tol / 8.0, 1e-13)

    if not closed():
        raise NoConvergence(state["iterations"], float(state["upper"] - state["lower"]))

    arg = _lex_argmax(state["kl_best"])
    inputs = InputDistribution.point_mass(sc, arg // sc.sB, arg % sc.sB)
    return _result_from_lam(
        p, state["lam_best"], inputs, state["upper"],
        state["upper"] - state["lower"], state["iterations"],
    )


# ---------------------------------------------------------------------------
# s_uc: product input distributions
# ---------------------------------------------------------------------------


def _model_inputs_from_cuts(cuts: list[np.ndarray], m: int) -> np.ndarray | None:
    kcut = len(cuts)
    n_var = m + 1 + kcut
    A = np.zeros((kcut + 1, n_var))
    b = np.zeros(kcut + 1)
    for i, r in enumerate(cuts):
        A[i, :m] = r
        A[i, m] = -1.0
        A[i, m + 1 + i] = -1.0
    A[kcut, :m] = 1.0
    b[kcut] = 1.0
    obj = np.zeros(n_var)
    obj[m] = -1.0
    try:
        res = solve_lp(obj, A, b)
    except SolverFailure:
        return None
    if res.status != "optimal":
        return None
    D = np.clip(res.x[:m], 0.0, None)
    total = D.sum()
    if total <= 0.0:
        return None
    return D / total


def s_uc(
    p: Behavior,
    tol: float = DEFAULT_TOL,
    restarts: int = 32,
    seed: int = 0,
) -> MonotoneResult:
    """Certified lower bound on the product-input statistical strength.

    Alternating coordinate ascent on the two input marginals, each block
    maximized by cutting planes over its own simplex, multi-started from
    the uniform product, all point-mass products, and seeded random
    products. The product set is nonconvex, so global optimality is not
    certified: the result reports the best value found, flagged as a
    lower bound; its gap_estimate certifies only the inner minimization.
    """
    sc = p.scenario
    V = local_vertex_matrix(sc)
    P = p.flat()
    rng = np.random.default_rng(seed)

    starts: list[tuple[np.ndarray, np.ndarray]] = [
        (np.full(sc.sA, 1.0 / sc.sA), np.full(sc.sB, 1.0 / sc.sB))
    ]
    for x in range(sc.sA):
        for y in range(sc.sB):
            dx = np.zeros(sc.sA)
            dy = np.zeros(sc.sB)
            dx[x] = 1.0
            dy[y] = 1.0
            starts.append((dx, dy))
    while len(starts) < max(restarts, 1):
        starts.append(
            (rng.dirichlet(np.ones(sc.sA)), rng.dirichlet(np.ones(sc.sB)))
        )
    starts = starts[: max(restarts, len(starts))]

    best_val = -math.inf
    best_pair: tuple[np.ndarray, np.ndarray] | None = None
    iterations = 0
    lam_warm: np.ndarray | None = None

    def block_max(
        fixed: np.ndarray, free_size: int, axis: int, warm: np.ndarray | None
    ) -> tuple[np.ndarray, float, np.ndarray | None, int]:
        """Maximize the inner value over one marginal by cutting planes."""
        nonlocal iterations
        uniform_f = np.full(free_size, 1.0 / free_size)
        d_free = uniform_f.copy()
        cuts: list[np.ndarray] = []
        best_v = -math.inf
        best_d = d_free.copy()
        used = 0
        floor = 1e-3
        for _ in range(30):
            D = (np.outer(d_free, fixed) if axis == 0
                 else np.outer(fixed, d_free)).reshape(-1)
            inner = _fw_minimize(P, V, D, gap_tol=tol / 4.0, lam0=warm)
            used += inner.iterations
            warm = inner.lam
            val = max(0.0, inner.value - inner.gap)
            if val > best_v:
                best_v = val
                best_d = d_free.copy()
            table = np.clip(
                np.where(np.isfinite(inner.kl_table), inner.kl_table, CLAMP_BITS),
                0.0, CLAMP_BITS).reshape(sc.sA, sc.sB)
            grad = table @ fixed if axis == 0 else fixed @ table
            cuts.append(grad)
            model_d = _model_inputs_from_cuts(cuts, free_size)
            if model_d is None:
                break
            model_val = float(min(cut @ model_d for cut in cuts))
            if model_val - best_v <= tol / 2.0:
                break
            d_free = (1.0 - floor) * model_d + floor * uniform_f
            floor = max(floor * 0.5, 1e-9)
        iterations += used
        return best_d, best_v, warm, used

    for dx0, dy0 in starts:
        dx, dy = dx0.copy(), dy0.copy()
        val_prev = -math.inf
        for _ in range(16):
            dx, vx, lam_warm, _ = block_max(dy, sc.sA, 0, lam_warm)
            dy, vy, lam_warm, _ = block_max(dx, sc.sB, 1, lam_warm)
            if vy <= val_prev + tol / 2.0:
                val_prev = max(val_prev, vy)
                break
            val_prev = vy
        if val_prev > best_val:
            best_val = val_prev
            best_pair = (dx.copy(), dy.copy())

    dx, dy = best_pair
    D = np.outer(dx, dy).reshape(-1)
    inner = _fw_minimize(P, V, D, gap_tol=tol, lam0=None)
    iterations += inner.iterations
    inputs = InputDistribution.product(sc, dx, dy)
    return _result_from_lam(
        p, inner.lam, inputs, inner.value, inner.gap, iterations,
        lower_bound=True,
    )


QUANTIFIERS = {
    "snl": s_nl,
    "su": s_u,
    "suc": s_uc,
    "sc": s_c,
}


def evaluate_quantifier(name: str, p: Behavior, tol: float, **kwargs) -> MonotoneResult:
    if name not in QUANTIFIERS:
        raise SolverFailure(f"unknown quantifier {name!r}")
    if name == "suc":
        return s_uc(p, tol, **kwargs)
    return QUANTIFIERS[name](p, tol)


# ---------------------------------------------------------------------------
# Audits
# ---------------------------------------------------------------------------


WiringLike = GlobalWiring | LosrWiring | UclosrWiring | WpiccWiring


def apply_wiring(w: WiringLike, p: Behavior) -> Behavior:
    if isinstance(w, GlobalWiring):
        return apply_gw(w, p)
    if isinstance(w, LosrWiring):
        return apply_losr(w, p)
    if isinstance(w, UclosrWiring):
        return apply_uclosr(w, p)
    if isinstance(w, WpiccWiring):
        return apply_wpicc(w, p)
    raise SolverFailure(f"not a wiring: {type(w).__name__}")


@dataclass(frozen=True)
class AuditRow:
    label: str
    value_before: float
    value_after: float
    slack: float
    violation: float  # positive part of the excess beyond slack

    @property
    def violated(self) -> bool:
        return self.violation > 0.0


@dataclass(frozen=True)
class AuditReport:
    quantifier: str
    rows: list[AuditRow] = field(default_factory=list)

    @property
    def any_violation(self) -> bool:
        return any(r.violated for r in self.rows)

    @property
    def worst(self) -> float:
        return max((r.violation for r in self.rows), default=0.0)


def monotonicity_audit(
    quantifier: str,
    p: Behavior,
    wirings: list[WiringLike],
    tol: float = DEFAULT_TOL,
    **kwargs,
) -> AuditReport:
    """Compare the quantifier before and after each wiring; flag a
    violation when the increase exceeds the solver slack
    2*(gap_before + gap_after) + tol."""
    before = evaluate_quantifier(quantifier, p, tol, **kwargs)
    rows = []
    for idx, w in enumerate(wirings):
        out = apply_wiring(w, p)
        after = evaluate_quantifier(quantifier, out, tol, **kwargs)
        slack = 2.0 * (before.gap_estimate + after.gap_estimate) + tol
        excess = after.value - before.value - slack
        rows.append(
            AuditRow(
                label=f"{type(w).__name__}#{idx}",
                value_before=before.value,
                value_after=after.value,
                slack=slack,
                violation=max(0.0, excess),
            )
        )
    return AuditReport(quantifier, rows)


def convexity_audit(
    quantifier: str,
    p: Behavior,
    p_prime: Behavior,
    mus: list[float],
    tol: float = DEFAULT_TOL,
    **kwargs,
) -> AuditReport:
    """Check f(mu p + (1-mu) p') <= mu f(p) + (1-mu) f(p') + slack."""
    f_p = evaluate_quantifier(quantifier, p, tol, **kwargs)
    f_pp = evaluate_quantifier(quantifier, p_prime, tol, **kwargs)
    rows = []
    for mu in mus:
        mix = Behavior(p.scenario, mu * p.p + (1.0 - mu) * p_prime.p)
        f_mix = evaluate_quantifier(quantifier, mix, tol, **kwargs)
        rhs = mu * f_p.value + (1.0 - mu) * f_pp.value
        slack = (
            f_mix.gap_estimate + mu * f_p.gap_estimate
            + (1.0 - mu) * f_pp.gap_estimate + tol
        )
        excess = f_mix.value - rhs - slack
        rows.append(
            AuditRow(
                label=f"mu={mu}",
                value_before=rhs,
                value_after=f_mix.value,
                slack=slack,
                violation=max(0.0, excess),
            )
        )
    return AuditReport(quantifier, rows)
