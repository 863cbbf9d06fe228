"""Relative entropy between finite distributions and between behaviors.

All values are in bits (logarithm base 2). The conventions are the usual
ones: terms with Q(z) = 0 contribute nothing, and a term with Q(z) > 0
but Q'(z) = 0 makes the divergence +inf. Infinity is represented
explicitly and propagates through maxima and averages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .behaviors import Behavior, InputDistribution, PROB_ATOL, _require_same_scenario
from .errors import IndexMismatch, NotNormalized

LOG2 = math.log(2.0)


@dataclass(frozen=True)
class DivergenceValue:
    """A nonnegative divergence in bits, possibly +inf, together with the
    maximizing setting pair when one exists."""

    bits: float
    argmax_setting: tuple[int, int] | None = None

    def __post_init__(self):
        if not (self.bits >= 0.0 or math.isinf(self.bits)):
            raise NotNormalized(f"divergence must be >= 0, got {self.bits}")

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.bits)

    def __float__(self) -> float:
        return self.bits


def _kl_terms(q: np.ndarray, q_prime: np.ndarray) -> float:
    """Sum of q*log2(q/q') with the 0 and +inf conventions applied."""
    pos = q > 0.0
    if np.any(pos & (q_prime == 0.0)):
        return math.inf
    qs = q[pos]
    return float(np.sum(qs * np.log2(qs / q_prime[pos])))


def kl(q: np.ndarray, q_prime: np.ndarray) -> DivergenceValue:
    """Kullback-Leibler divergence between two finite distributions.

    Both arguments are flattened; they must share a shape and each must
    sum to one within the probability tolerance.
    """
    qa = np.asarray(q, dtype=float)
    qb = np.asarray(q_prime, dtype=float)
    if qa.shape != qb.shape:
        raise IndexMismatch(f"shapes {qa.shape} and {qb.shape} differ")
    for name, arr in (("first", qa), ("second", qb)):
        if abs(float(arr.sum()) - 1.0) > PROB_ATOL:
            raise NotNormalized(f"{name} distribution sums to {arr.sum()!r}")
        if np.any(arr < 0):
            raise NotNormalized(f"{name} distribution has negative entries")
    return DivergenceValue(_kl_terms(qa.reshape(-1), qb.reshape(-1)))


def per_setting_kl(p: Behavior, p_prime: Behavior) -> np.ndarray:
    """KL divergence of output columns, per setting pair: shape (sA, sB).

    This single routine feeds both the averaged and the maximized
    behavior divergences so the two stay bit-identical on shared terms.
    """
    _require_same_scenario(p, p_prime)
    sA, sB = p.scenario.sA, p.scenario.sB
    out = np.empty((sA, sB))
    for x in range(sA):
        for y in range(sB):
            out[x, y] = _kl_terms(p.p[x, y].reshape(-1), p_prime.p[x, y].reshape(-1))
    return out


def conditional_re(
    p: Behavior, p_prime: Behavior, d: InputDistribution
) -> DivergenceValue:
    """D-weighted average of the per-setting output divergences.

    Equals the KL divergence between the joint input-output statistics
    P.D and P'.D; settings with zero input weight contribute nothing even
    when their per-setting divergence is infinite.
    """
    _require_same_scenario(p, d)
    table = per_setting_kl(p, p_prime)
    mask = d.d > 0.0
    if np.any(np.isinf(table[mask])):
        return DivergenceValue(math.inf)
    return DivergenceValue(float(np.sum(d.d[mask] * table[mask])))


def behavior_re(p: Behavior, p_prime: Behavior) -> DivergenceValue:
    """Maximum over settings of the per-setting output divergence.

    Ties are broken lexicographically in (x, y); the maximizing setting
    is reported.
    """
    table = per_setting_kl(p, p_prime)
    best = -1.0
    arg = (0, 0)
    for x in range(table.shape[0]):
        for y in range(table.shape[1]):
            if table[x, y] > best:
                best = table[x, y]
                arg = (x, y)
    return DivergenceValue(float(best), arg)
