"""Exception hierarchy shared by every module."""


class FlowReconfError(Exception):
    """Base class for all errors raised by flowreconf."""


class InvalidInput(FlowReconfError, ValueError):
    """Malformed or out-of-contract input (bad moduli, loops, bad graph6...)."""


class BudgetExceeded(FlowReconfError):
    """An exhaustive search would exceed its configured size cap."""


class ConservationError(FlowReconfError, ValueError):
    """A value assignment violates conservation at some vertex."""

    def __init__(self, vertex: int, excess, expected=None):
        self.vertex = vertex
        self.excess = excess
        self.expected = expected
        msg = f"conservation violated at vertex {vertex}: excess {excess}"
        if expected is not None:
            msg += f", expected {expected}"
        super().__init__(msg)


class PreconditionError(FlowReconfError, ValueError):
    """A constructive algorithm was called outside its hypotheses."""


class CheckFailed(FlowReconfError, AssertionError):
    """A verification routine found a counterexample (implementation bug signal)."""
