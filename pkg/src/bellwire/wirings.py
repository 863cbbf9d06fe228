"""Wiring classes over bipartite boxes and their application semantics.

Four families are modeled:

* `GlobalWiring` — arbitrary (possibly signaling) input and output boxes
  wired around the initial box; can create nonlocality.
* `LosrWiring` — local processing on each side, coordinated only by
  shared randomness. Stored in explicit shared-randomness form (a weight
  per lambda with product stochastic maps), so class membership holds by
  construction rather than by solving a membership problem on dense
  arrays.
* `UclosrWiring` — a single product pair, i.e. an `LosrWiring` with one
  lambda.
* `WpiccWiring` — a five-branch decision tree in which parties may
  measure the initial box and communicate dits before the final inputs
  arrive, then finish with local processing. Defined only on
  no-signaling behaviors; the preparation feedback would otherwise close
  a causal loop (and the branch outputs would not even normalize).

Input/output maps are stored with conditioning axes first and the
sampled variable last, normalized along the trailing axis (or the
trailing pair for bipartite boxes).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .behaviors import Behavior, Scenario
from .errors import (
    DomainViolation,
    LengthMismatch,
    NegativeEntry,
    NormalizationViolation,
    ParameterOutOfRange,
    ScenarioMismatch,
)
from .geometry import marginal_residual

NORM_ATOL = 1e-12

ALICE_FIRST = "alice"
BOB_FIRST = "bob"


def _as_array(arr, shape: tuple[int, ...], name: str) -> np.ndarray:
    out = np.asarray(arr, dtype=float)
    if out.shape != shape:
        raise LengthMismatch(f"{name} must have shape {shape}, got {out.shape}")
    if np.any(out < 0) or not np.all(np.isfinite(out)):
        raise NegativeEntry(f"{name} has negative or non-finite entries")
    out = np.array(out, copy=True)
    out.flags.writeable = False
    return out


def _check_stochastic(arr: np.ndarray, trailing: int, name: str) -> None:
    """Require normalization along the trailing `trailing` axes."""
    lead = arr.shape[: arr.ndim - trailing]
    sums = arr.reshape(int(np.prod(lead, dtype=int)) if lead else 1, -1).sum(axis=1)
    dev = np.abs(sums - 1.0)
    if np.any(dev > NORM_ATOL):
        k = int(np.argmax(dev))
        raise NormalizationViolation(k, -1, float(sums[k] - 1.0))


def _check_weights(w: np.ndarray, name: str) -> None:
    if np.any(w < 0):
        raise NegativeEntry(f"{name} must be nonnegative")
    if abs(float(w.sum()) - 1.0) > NORM_ATOL:
        raise NormalizationViolation(-1, -1, float(w.sum() - 1.0))


def _require_scenario(p: Behavior, scenario: Scenario) -> None:
    if p.scenario.key() != scenario.key():
        raise ScenarioMismatch(
            f"behavior scenario {p.scenario.key()} does not match wiring "
            f"initial scenario {scenario.key()}"
        )


# ---------------------------------------------------------------------------
# Global wirings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GlobalWiring:
    """Arbitrary input box I(x,y|chi,psi) and output box
    O(alpha,beta|a,b,x,y,chi,psi) wired around the initial behavior.

    I has shape (sfA, sfB, sA, sB) and O has shape
    (rA, rB, sA, sB, sfA, sfB, rfA, rfB); both are normalized over their
    trailing output pair for every conditioning.
    """

    initial: Scenario
    final: Scenario
    i_box: np.ndarray
    o_box: np.ndarray

    def __post_init__(self):
        si, sf = self.initial, self.final
        i_box = _as_array(self.i_box, (sf.sA, sf.sB, si.sA, si.sB), "i_box")
        o_box = _as_array(
            self.o_box,
            (si.rA, si.rB, si.sA, si.sB, sf.sA, sf.sB, sf.rA, sf.rB),
            "o_box",
        )
        _check_stochastic(i_box, 2, "i_box")
        _check_stochastic(o_box, 2, "o_box")
        object.__setattr__(self, "i_box", i_box)
        object.__setattr__(self, "o_box", o_box)

    def is_no_signaling(self, tol: float = 1e-9) -> bool:
        """Validation flag for the no-signaling subclass: both auxiliary
        boxes, viewed as behaviors with composite per-party alphabets,
        must satisfy the marginal constraints."""
        sf, si = self.final, self.initial
        i_res, _ = marginal_residual(
            self.i_box.transpose(0, 1, 2, 3).reshape(sf.sA, sf.sB, si.sA, si.sB)
        )
        # O as a behavior: Alice side (a, x, chi) -> alpha, Bob side
        # (b, y, psi) -> beta
        o_beh = self.o_box.transpose(0, 2, 4, 1, 3, 5, 6, 7).reshape(
            si.rA * si.sA * sf.sA, si.rB * si.sB * sf.sB, sf.rA, sf.rB
        )
        o_res, _ = marginal_residual(o_beh)
        return max(i_res, o_res) <= tol


def apply_gw(w: GlobalWiring, p: Behavior) -> Behavior:
    """P_f(alpha,beta|chi,psi) = sum O(..)*P0(a,b|x,y)*I(x,y|chi,psi).

    The result is validated for normalization only; global wirings may
    produce signaling behaviors.
    """
    _require_scenario(p, w.initial)
    out = np.einsum(
        "abxycsAB,xyab,csxy->csAB", w.o_box, p.p, w.i_box, optimize=True
    )
    return Behavior(w.final, out)


def bypass_global_wiring(initial: Scenario, target: Behavior) -> GlobalWiring:
    """The wiring that ignores the initial box and emits `target`."""
    sf = target.scenario
    i_box = np.full(
        (sf.sA, sf.sB, initial.sA, initial.sB), 1.0 / (initial.sA * initial.sB)
    )
    o_box = np.broadcast_to(
        target.p[None, None, None, None, :, :, :, :],
        (initial.rA, initial.rB, initial.sA, initial.sB, sf.sA, sf.sB, sf.rA, sf.rB),
    )
    return GlobalWiring(initial, sf, i_box, np.array(o_box))


def identity_global_wiring(scenario: Scenario) -> GlobalWiring:
    si = scenario
    i_box = np.zeros((si.sA, si.sB, si.sA, si.sB))
    for c in range(si.sA):
        for s in range(si.sB):
            i_box[c, s, c, s] = 1.0
    o_box = np.zeros((si.rA, si.rB, si.sA, si.sB, si.sA, si.sB, si.rA, si.rB))
    for a in range(si.rA):
        for b in range(si.rB):
            o_box[a, b, :, :, :, :, a, b] = 1.0
    return GlobalWiring(si, si, i_box, o_box)


# ---------------------------------------------------------------------------
# LOSR and UCLOSR wirings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LosrWiring:
    """Shared-randomness mixture of product local processings.

    Per lambda: Alice's input map in_a[l][chi][x], output map
    out_a[l][a][x][chi][alpha], and Bob's mirrors. Each map is a
    conditional distribution over its trailing axis.
    """

    initial: Scenario
    final: Scenario
    weights: np.ndarray
    in_a: np.ndarray
    in_b: np.ndarray
    out_a: np.ndarray
    out_b: np.ndarray

    def __post_init__(self):
        si, sf = self.initial, self.final
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        n = w.size
        _check_weights(w, "weights")
        in_a = _as_array(self.in_a, (n, sf.sA, si.sA), "in_a")
        in_b = _as_array(self.in_b, (n, sf.sB, si.sB), "in_b")
        out_a = _as_array(self.out_a, (n, si.rA, si.sA, sf.sA, sf.rA), "out_a")
        out_b = _as_array(self.out_b, (n, si.rB, si.sB, sf.sB, sf.rB), "out_b")
        for name, arr in (("in_a", in_a), ("in_b", in_b), ("out_a", out_a), ("out_b", out_b)):
            _check_stochastic(arr, 1, name)
        w = np.array(w, copy=True)
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "in_a", in_a)
        object.__setattr__(self, "in_b", in_b)
        object.__setattr__(self, "out_a", out_a)
        object.__setattr__(self, "out_b", out_b)

    @property
    def n_lambda(self) -> int:
        return self.weights.size


def apply_losr(w: LosrWiring, p: Behavior) -> Behavior:
    """Average over lambda of the product-form processing of `p`."""
    _require_scenario(p, w.initial)
    out = np.einsum(
        "l,laxcA,lbysB,xyab,lcx,lsy->csAB",
        w.weights, w.out_a, w.out_b, p.p, w.in_a, w.in_b,
        optimize=True,
    )
    return Behavior(w.final, out)


@dataclass(frozen=True)
class UclosrWiring:
    """A single uncorrelated product of local input/output maps."""

    initial: Scenario
    final: Scenario
    in_a: np.ndarray
    in_b: np.ndarray
    out_a: np.ndarray
    out_b: np.ndarray

    def __post_init__(self):
        si, sf = self.initial, self.final
        in_a = _as_array(self.in_a, (sf.sA, si.sA), "in_a")
        in_b = _as_array(self.in_b, (sf.sB, si.sB), "in_b")
        out_a = _as_array(self.out_a, (si.rA, si.sA, sf.sA, sf.rA), "out_a")
        out_b = _as_array(self.out_b, (si.rB, si.sB, sf.sB, sf.rB), "out_b")
        for name, arr in (("in_a", in_a), ("in_b", in_b), ("out_a", out_a), ("out_b", out_b)):
            _check_stochastic(arr, 1, name)
        object.__setattr__(self, "in_a", in_a)
        object.__setattr__(self, "in_b", in_b)
        object.__setattr__(self, "out_a", out_a)
        object.__setattr__(self, "out_b", out_b)

    def as_losr(self) -> LosrWiring:
        return LosrWiring(
            self.initial,
            self.final,
            np.array([1.0]),
            self.in_a[None],
            self.in_b[None],
            self.out_a[None],
            self.out_b[None],
        )


def apply_uclosr(w: UclosrWiring, p: Behavior) -> Behavior:
    return apply_losr(w.as_losr(), p)


def uclosr_decomposition(w: LosrWiring) -> list[tuple[float, UclosrWiring]]:
    """The stored shared-randomness components, each packaged as an
    uncorrelated wiring; reweighted application reproduces apply_losr."""
    out = []
    for l in range(w.n_lambda):
        out.append(
            (
                float(w.weights[l]),
                UclosrWiring(
                    w.initial, w.final, w.in_a[l], w.in_b[l], w.out_a[l], w.out_b[l]
                ),
            )
        )
    return out


def losr_to_gw(w: LosrWiring) -> GlobalWiring:
    """Dense global-wiring form obtained by summing out the shared
    randomness.

    The input box is the plain lambda-average. The output box must carry
    the lambda correlation between input and output maps, so it is the
    conditional distribution of the per-lambda outputs given the realized
    dits: O = sum_l w_l O_l I_l / I, with a flat fallback where the
    average input box never produces the conditioning dits.
    """
    si, sf = w.initial, w.final
    i_lambda = np.einsum("lcx,lsy->lcsxy", w.in_a, w.in_b)
    i_box = np.einsum("l,lcsxy->csxy", w.weights, i_lambda)
    o_lambda = np.einsum("laxcA,lbysB->labxycsAB", w.out_a, w.out_b)
    numer = np.einsum("l,lcsxy,labxycsAB->abxycsAB", w.weights, i_lambda, o_lambda,
                      optimize=True)
    denom = i_box.transpose(2, 3, 0, 1)[None, None, :, :, :, :, None, None]
    flat = 1.0 / (sf.rA * sf.rB)
    with np.errstate(invalid="ignore", divide="ignore"):
        o_box = np.where(denom > 0, numer / np.where(denom > 0, denom, 1.0), flat)
    return GlobalWiring(si, sf, i_box, o_box)


# ---------------------------------------------------------------------------
# WPICC wirings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BothMeasureBranch:
    """Preparation branch in which both parties measure their boxes.

    `first` names the party that measures first and communicates; the
    second party chooses its initial setting from the communicated dits.
    Afterwards both parties know all four dits, so the measurement-phase
    output boxes depend on them arbitrarily (in shared-randomness form).
    """

    first: str
    d_first: np.ndarray  # (s_first,)
    d_second: np.ndarray  # bob first: (rB, sB, sA); alice first: (rA, sA, sB)
    weights: np.ndarray  # (n_mu,)
    out_a: np.ndarray  # (n_mu, rA, rB, sA, sB, sfA, rfA)
    out_b: np.ndarray  # (n_mu, rA, rB, sA, sB, sfB, rfB)

    def validate(self, si: Scenario, sf: Scenario) -> "BothMeasureBranch":
        if self.first not in (ALICE_FIRST, BOB_FIRST):
            raise ParameterOutOfRange(f"unknown first party {self.first!r}")
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        _check_weights(w, "branch weights")
        n = w.size
        if self.first == BOB_FIRST:
            d_first = _as_array(self.d_first, (si.sB,), "d_first")
            d_second = _as_array(self.d_second, (si.rB, si.sB, si.sA), "d_second")
        else:
            d_first = _as_array(self.d_first, (si.sA,), "d_first")
            d_second = _as_array(self.d_second, (si.rA, si.sA, si.sB), "d_second")
        out_a = _as_array(
            self.out_a, (n, si.rA, si.rB, si.sA, si.sB, sf.sA, sf.rA), "out_a"
        )
        out_b = _as_array(
            self.out_b, (n, si.rA, si.rB, si.sA, si.sB, sf.sB, sf.rB), "out_b"
        )
        _check_stochastic(d_first, 1, "d_first")
        _check_stochastic(d_second, 1, "d_second")
        _check_stochastic(out_a, 1, "out_a")
        _check_stochastic(out_b, 1, "out_b")
        object.__setattr__(self, "d_first", d_first)
        object.__setattr__(self, "d_second", d_second)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "out_a", out_a)
        object.__setattr__(self, "out_b", out_b)
        return self

    def apply(self, p: Behavior, final: Scenario) -> Behavior:
        if self.first == BOB_FIRST:
            joint = np.einsum("xyab,y,byx->abxy", p.p, self.d_first, self.d_second)
        else:
            joint = np.einsum("xyab,x,axy->abxy", p.p, self.d_first, self.d_second)
        out = np.einsum(
            "m,mabxycA,mabxysB,abxy->csAB",
            self.weights, self.out_a, self.out_b, joint,
            optimize=True,
        )
        return Behavior(final, out)


@dataclass(frozen=True)
class OneMeasuresBranch:
    """Preparation branch in which only one party measures and sends its
    dits; the other party wires its still-unused box during the
    measurement phase, informed by the communicated dits.
    """

    measurer: str
    d_meas: np.ndarray  # (s_meas,)
    in_other: np.ndarray  # bob measures: (rB, sB, sfA, sA); alice: (rA, sA, sfB, sB)
    weights: np.ndarray
    out_other: np.ndarray  # bob measures: (n_mu, rB, sB, rA, sA, sfA, rfA)
    out_meas: np.ndarray  # bob measures: (n_mu, rB, sB, sfB, rfB)

    def validate(self, si: Scenario, sf: Scenario) -> "OneMeasuresBranch":
        if self.measurer not in (ALICE_FIRST, BOB_FIRST):
            raise ParameterOutOfRange(f"unknown measuring party {self.measurer!r}")
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        _check_weights(w, "branch weights")
        n = w.size
        if self.measurer == BOB_FIRST:
            d_meas = _as_array(self.d_meas, (si.sB,), "d_meas")
            in_other = _as_array(self.in_other, (si.rB, si.sB, sf.sA, si.sA), "in_other")
            out_other = _as_array(
                self.out_other, (n, si.rB, si.sB, si.rA, si.sA, sf.sA, sf.rA), "out_other"
            )
            out_meas = _as_array(self.out_meas, (n, si.rB, si.sB, sf.sB, sf.rB), "out_meas")
        else:
            d_meas = _as_array(self.d_meas, (si.sA,), "d_meas")
            in_other = _as_array(self.in_other, (si.rA, si.sA, sf.sB, si.sB), "in_other")
            out_other = _as_array(
                self.out_other, (n, si.rA, si.sA, si.rB, si.sB, sf.sB, sf.rB), "out_other"
            )
            out_meas = _as_array(self.out_meas, (n, si.rA, si.sA, sf.sA, sf.rA), "out_meas")
        _check_stochastic(d_meas, 1, "d_meas")
        _check_stochastic(in_other, 1, "in_other")
        _check_stochastic(out_other, 1, "out_other")
        _check_stochastic(out_meas, 1, "out_meas")
        object.__setattr__(self, "d_meas", d_meas)
        object.__setattr__(self, "in_other", in_other)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "out_other", out_other)
        object.__setattr__(self, "out_meas", out_meas)
        return self

    def apply(self, p: Behavior, final: Scenario) -> Behavior:
        if self.measurer == BOB_FIRST:
            out = np.einsum(
                "m,mbyaxcA,mbysB,y,xyab,bycx->csAB",
                self.weights, self.out_other, self.out_meas,
                self.d_meas, p.p, self.in_other,
                optimize=True,
            )
        else:
            out = np.einsum(
                "m,maxbysB,maxcA,x,xyab,axsy->csAB",
                self.weights, self.out_other, self.out_meas,
                self.d_meas, p.p, self.in_other,
                optimize=True,
            )
        return Behavior(final, out)


@dataclass(frozen=True)
class WpiccWiring:
    """Probabilistic mixture of the five preparation branches followed by
    measurement-phase local processing. Defined on no-signaling
    behaviors only."""

    initial: Scenario
    final: Scenario
    branch_probabilities: np.ndarray  # (alice->bob, bob->alice, alice, bob, none)
    both_alice_first: BothMeasureBranch | None
    both_bob_first: BothMeasureBranch | None
    alice_only: OneMeasuresBranch | None
    bob_only: OneMeasuresBranch | None
    none_branch: LosrWiring | None

    def __post_init__(self):
        probs = np.asarray(self.branch_probabilities, dtype=float).reshape(-1)
        if probs.size != 5:
            raise LengthMismatch("branch_probabilities must have five entries")
        _check_weights(probs, "branch_probabilities")
        probs = np.array(probs, copy=True)
        probs.flags.writeable = False
        object.__setattr__(self, "branch_probabilities", probs)
        branches = [
            (self.both_alice_first, ALICE_FIRST, "both_alice_first"),
            (self.both_bob_first, BOB_FIRST, "both_bob_first"),
        ]
        for branch, first, name in branches:
            if probs[0 if first == ALICE_FIRST else 1] > 0 and branch is None:
                raise ParameterOutOfRange(f"{name} carries weight but is missing")
            if branch is not None:
                if branch.first != first:
                    raise ParameterOutOfRange(f"{name} has wrong first party")
                branch.validate(self.initial, self.final)
        if probs[2] > 0 and self.alice_only is None:
            raise ParameterOutOfRange("alice_only carries weight but is missing")
        if probs[3] > 0 and self.bob_only is None:
            raise ParameterOutOfRange("bob_only carries weight but is missing")
        if probs[4] > 0 and self.none_branch is None:
            raise ParameterOutOfRange("none_branch carries weight but is missing")
        if self.alice_only is not None:
            if self.alice_only.measurer != ALICE_FIRST:
                raise ParameterOutOfRange("alice_only must have alice as measurer")
            self.alice_only.validate(self.initial, self.final)
        if self.bob_only is not None:
            if self.bob_only.measurer != BOB_FIRST:
                raise ParameterOutOfRange("bob_only must have bob as measurer")
            self.bob_only.validate(self.initial, self.final)

    @property
    def measuring_probability(self) -> float:
        """Total weight of the four branches that use the box during
        preparation."""
        return float(self.branch_probabilities[:4].sum())


def _measuring_terms(w: WpiccWiring, p: Behavior) -> list[tuple[float, Behavior]]:
    probs = w.branch_probabilities
    terms: list[tuple[float, Behavior]] = []
    if probs[0] > 0:
        terms.append((float(probs[0]), w.both_alice_first.apply(p, w.final)))
    if probs[1] > 0:
        terms.append((float(probs[1]), w.both_bob_first.apply(p, w.final)))
    if probs[2] > 0:
        terms.append((float(probs[2]), w.alice_only.apply(p, w.final)))
    if probs[3] > 0:
        terms.append((float(probs[3]), w.bob_only.apply(p, w.final)))
    return terms


def apply_wpicc(w: WpiccWiring, p: Behavior, ns_tol: float = 1e-9) -> Behavior:
    """Apply the five-branch mixture to a no-signaling behavior.

    Signaling inputs are refused outright: the preparation phase feeds
    outputs of one box into inputs of the other, which is circular
    unless the behavior is no-signaling.
    """
    _require_scenario(p, w.initial)
    from .geometry import is_no_signaling

    report = is_no_signaling(p, ns_tol)
    if not report.ok:
        raise DomainViolation(
            f"communication wiring applied to a signaling behavior "
            f"(residual {report.max_residual:.3e} at {report.worst})"
        )
    table = np.zeros(w.final.shape)
    for weight, beh in _measuring_terms(w, p):
        table = table + weight * beh.p
    if w.branch_probabilities[4] > 0:
        table = table + w.branch_probabilities[4] * apply_losr(w.none_branch, p).p
    return Behavior(w.final, table)


def wpicc_local_part(w: WpiccWiring, p: Behavior) -> Behavior:
    """The normalized mixture of the four measuring branches: the local
    behavior the simplified two-term form mixes with the plain LOSR
    output."""
    p_meas = w.measuring_probability
    if p_meas <= 0.0:
        raise ParameterOutOfRange("wiring has no measuring branches")
    table = np.zeros(w.final.shape)
    for weight, beh in _measuring_terms(w, p):
        table = table + (weight / p_meas) * beh.p
    return Behavior(w.final, table)


# ---------------------------------------------------------------------------
# Seeded random generators
# ---------------------------------------------------------------------------


def _random_stochastic(rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    """Dirichlet-uniform conditional distribution over the trailing axis."""
    lead = int(np.prod(shape[:-1], dtype=int))
    return rng.dirichlet(np.ones(shape[-1]), size=lead).reshape(shape)


def random_global_wiring(
    initial: Scenario, final: Scenario, seed: int
) -> GlobalWiring:
    rng = np.random.default_rng(seed)
    i_box = _random_stochastic(
        rng, (final.sA, final.sB, initial.sA * initial.sB)
    ).reshape(final.sA, final.sB, initial.sA, initial.sB)
    o_shape = (
        initial.rA, initial.rB, initial.sA, initial.sB,
        final.sA, final.sB, final.rA * final.rB,
    )
    o_box = _random_stochastic(rng, o_shape).reshape(
        initial.rA, initial.rB, initial.sA, initial.sB,
        final.sA, final.sB, final.rA, final.rB,
    )
    return GlobalWiring(initial, final, i_box, o_box)


def random_losr_wiring(
    initial: Scenario, final: Scenario, seed: int, n_lambda: int = 2
) -> LosrWiring:
    rng = np.random.default_rng(seed)
    w = rng.dirichlet(np.ones(n_lambda))
    in_a = _random_stochastic(rng, (n_lambda, final.sA, initial.sA))
    in_b = _random_stochastic(rng, (n_lambda, final.sB, initial.sB))
    out_a = _random_stochastic(rng, (n_lambda, initial.rA, initial.sA, final.sA, final.rA))
    out_b = _random_stochastic(rng, (n_lambda, initial.rB, initial.sB, final.sB, final.rB))
    return LosrWiring(initial, final, w, in_a, in_b, out_a, out_b)


def random_uclosr_wiring(initial: Scenario, final: Scenario, seed: int) -> UclosrWiring:
    rng = np.random.default_rng(seed)
    return UclosrWiring(
        initial,
        final,
        _random_stochastic(rng, (final.sA, initial.sA)),
        _random_stochastic(rng, (final.sB, initial.sB)),
        _random_stochastic(rng, (initial.rA, initial.sA, final.sA, final.rA)),
        _random_stochastic(rng, (initial.rB, initial.sB, final.sB, final.rB)),
    )


def random_wpicc_wiring(
    initial: Scenario, final: Scenario, seed: int, n_lambda: int = 2
) -> WpiccWiring:
    rng = np.random.default_rng(seed)
    si, sf = initial, final
    probs = rng.dirichlet(np.ones(5))

    def both(first: str) -> BothMeasureBranch:
        if first == BOB_FIRST:
            d_first = rng.dirichlet(np.ones(si.sB))
            d_second = _random_stochastic(rng, (si.rB, si.sB, si.sA))
        else:
            d_first = rng.dirichlet(np.ones(si.sA))
            d_second = _random_stochastic(rng, (si.rA, si.sA, si.sB))
        w = rng.dirichlet(np.ones(n_lambda))
        out_a = _random_stochastic(rng, (n_lambda, si.rA, si.rB, si.sA, si.sB, sf.sA, sf.rA))
        out_b = _random_stochastic(rng, (n_lambda, si.rA, si.rB, si.sA, si.sB, sf.sB, sf.rB))
        return BothMeasureBranch(first, d_first, d_second, w, out_a, out_b)

    def one(measurer: str) -> OneMeasuresBranch:
        w = rng.dirichlet(np.ones(n_lambda))
        if measurer == BOB_FIRST:
            return OneMeasuresBranch(
                measurer,
                rng.dirichlet(np.ones(si.sB)),
                _random_stochastic(rng, (si.rB, si.sB, sf.sA, si.sA)),
                w,
                _random_stochastic(rng, (n_lambda, si.rB, si.sB, si.rA, si.sA, sf.sA, sf.rA)),
                _random_stochastic(rng, (n_lambda, si.rB, si.sB, sf.sB, sf.rB)),
            )
        return OneMeasuresBranch(
            measurer,
            rng.dirichlet(np.ones(si.sA)),
            _random_stochastic(rng, (si.rA, si.sA, sf.sB, si.sB)),
            w,
            _random_stochastic(rng, (n_lambda, si.rA, si.sA, si.rB, si.sB, sf.sB, sf.rB)),
            _random_stochastic(rng, (n_lambda, si.rA, si.sA, sf.sA, sf.rA)),
        )

    none_branch = random_losr_wiring(initial, final, int(rng.integers(2**31)), n_lambda)
    return WpiccWiring(
        initial,
        final,
        probs,
        both(ALICE_FIRST),
        both(BOB_FIRST),
        one(ALICE_FIRST),
        one(BOB_FIRST),
        none_branch,
    )


# ---------------------------------------------------------------------------
# Named wiring presets
# ---------------------------------------------------------------------------


def feedback_copy_wiring() -> WpiccWiring:
    """Measure-and-feedback preset on the single-Bob-input scenario.

    Bob presses his only button during preparation and sends his outcome
    to Alice; Alice ignores her final input and uses Bob's outcome as her
    initial setting; both final outputs copy the initial ones. This is
    the wiring that doubles the output distinguishability of the
    epsilon-family pair.
    """
    si = Scenario(2, 2, 1, 2)
    sf = Scenario(2, 2, 1, 2)
    d_meas = np.ones(1)
    in_other = np.zeros((si.rB, si.sB, sf.sA, si.sA))
    for b in range(si.rB):
        in_other[b, 0, :, b] = 1.0  # x = b, whatever chi says
    out_other = np.zeros((1, si.rB, si.sB, si.rA, si.sA, sf.sA, sf.rA))
    for a in range(si.rA):
        out_other[0, :, :, a, :, :, a] = 1.0  # alpha = a
    out_meas = np.zeros((1, si.rB, si.sB, sf.sB, sf.rB))
    for b in range(si.rB):
        out_meas[0, b, :, :, b] = 1.0  # beta = b
    branch = OneMeasuresBranch(
        BOB_FIRST, d_meas, in_other, np.ones(1), out_other, out_meas
    )
    return WpiccWiring(
        si, sf, np.array([0.0, 0.0, 0.0, 1.0, 0.0]), None, None, None, branch, None
    )


def setting_fold_wiring() -> LosrWiring:
    """Deterministic single-lambda preset on the four-setting scenario:
    each party folds its final setting mod 2 onto the initial box and
    copies the outcome through."""
    si = Scenario(4, 2, 4, 2)
    sf = Scenario(4, 2, 4, 2)
    in_a = np.zeros((1, sf.sA, si.sA))
    in_b = np.zeros((1, sf.sB, si.sB))
    for c in range(sf.sA):
        in_a[0, c, c % 2] = 1.0
    for s in range(sf.sB):
        in_b[0, s, s % 2] = 1.0
    out_a = np.zeros((1, si.rA, si.sA, sf.sA, sf.rA))
    out_b = np.zeros((1, si.rB, si.sB, sf.sB, sf.rB))
    for a in range(si.rA):
        out_a[0, a, :, :, a] = 1.0
    for b in range(si.rB):
        out_b[0, b, :, :, b] = 1.0
    return LosrWiring(si, sf, np.ones(1), in_a, in_b, out_a, out_b)
