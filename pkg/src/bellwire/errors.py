"""Semantic exception hierarchy for bellwire.

Public functions raise these instead of bare ValueError so callers can
distinguish contract violations (bad inputs) from solver trouble.
"""

from __future__ import annotations


class BellwireError(Exception):
    """Base class for all bellwire errors."""


class LengthMismatch(BellwireError, ValueError):
    """A flat entry sequence has the wrong length for its scenario."""


class NegativeEntry(BellwireError, ValueError):
    """A probability table contains a negative entry."""


class NormalizationViolation(BellwireError, ValueError):
    """A conditional distribution column does not sum to one.

    Carries the offending setting pair and the signed deviation.
    """

    def __init__(self, x: int, y: int, deviation: float):
        self.x = x
        self.y = y
        self.deviation = deviation
        super().__init__(
            f"column (x={x}, y={y}) sums to 1{deviation:+.3e}, beyond tolerance"
        )


class ScenarioMismatch(BellwireError, ValueError):
    """Two objects that must share a scenario do not."""


class ParameterOutOfRange(BellwireError, ValueError):
    """A named-construction parameter lies outside its valid range."""


class VertexCapExceeded(BellwireError, ValueError):
    """A scenario's deterministic-vertex count exceeds the configured cap."""


class IndexMismatch(BellwireError, ValueError):
    """Two finite distributions do not share an index set."""


class NotNormalized(BellwireError, ValueError):
    """A finite distribution does not sum to one."""


class DomainViolation(BellwireError, ValueError):
    """An operation was applied outside its domain (e.g. a signaling
    behavior fed to a communication-assisted wiring)."""


class SolverFailure(BellwireError, RuntimeError):
    """The LP solver terminated abnormally."""

    def __init__(self, status: str):
        self.status = status
        super().__init__(f"solver failure: {status}")


class NoConvergence(BellwireError, RuntimeError):
    """An iterative solver hit its iteration cap before reaching the
    requested optimality gap; carries the gap it did achieve."""

    def __init__(self, iterations: int, gap: float):
        self.iterations = iterations
        self.gap = gap
        super().__init__(
            f"no convergence after {iterations} iterations (gap {gap:.3e})"
        )
