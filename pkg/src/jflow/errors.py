"""Exception hierarchy for the jflow package."""

from __future__ import annotations


class JFlowError(Exception):
    """Base class for all jflow errors."""


class ConfigError(JFlowError):
    """Malformed configuration text (carries line context in the message)."""


class ValidationError(JFlowError):
    """A config or model value violates its documented contract."""


class HypothesisViolationError(ValidationError):
    """The background fails the positivity condition required for convergence.

    Raised when the (normalized) condition chi0 - omega > 0 fails, either for
    the constant class representatives or pointwise on the grid.
    """


class PositivityError(JFlowError):
    """A matrix that must be positive definite is not."""


class FlowDomainError(JFlowError):
    """The evolving form chi lost positivity at some grid point.

    Attributes
    ----------
    point : tuple of int
        Grid multi-index of the first offending sample.
    eigenvalues : tuple of float
        The two eigenvalues of chi at that point.
    t : float or None
        Flow time at which the failure occurred, when known.
    state : object or None
        The last coherent flow state, attached by the run loop for
        post-mortem dumps.
    """

    def __init__(self, message, point=None, eigenvalues=None, t=None):
        super().__init__(message)
        self.point = point
        self.eigenvalues = eigenvalues
        self.t = t
        self.state = None


class NonConvergenceError(JFlowError):
    """An iteration hit its budget before reaching tolerance.

    Carries the residual history so callers can report or dump it.
    """

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = list(residuals) if residuals is not None else []


class InconsistencyError(JFlowError):
    """Two quantities tied by an exact algebraic identity disagree.

    Signals a bug in the quadratic-reduction algebra or in the solver, not a
    property of the input data.
    """


class DecayFitError(JFlowError):
    """Not enough qualifying samples to fit a decay rate (non-fatal)."""


class SnapshotFormatError(JFlowError):
    """A field snapshot file is malformed or has an unsupported version."""
