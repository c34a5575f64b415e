"""Exceptions raised by spanner-forge.

Every exception derives from :class:`SpannerForgeError` and from the builtin
exception that describes it best, so callers can catch either.
"""

import typing as t


class SpannerForgeError(Exception):
    """Base class of all spanner-forge errors."""


class InputError(SpannerForgeError, ValueError):
    """Invalid user input (file format, parameters, unknown vertices)."""


class DegenerateInputError(SpannerForgeError, ValueError):
    """Input is well formed but degenerate for the requested measurement."""


class InfeasibleError(SpannerForgeError, RuntimeError):
    """The requested object does not exist (e.g. disconnected terminals).

    Args:
        message: Human readable description.
        pair: Offending vertex pair, if any.
    """

    def __init__(self, message: str, pair: t.Optional[t.Tuple[t.Any, t.Any]] = None):
        super().__init__(message)
        self.pair = pair


class ContractViolation(SpannerForgeError, RuntimeError):
    """A pluggable component broke its interface contract."""


class InvariantViolation(SpannerForgeError, AssertionError):
    """An internal invariant of a construction failed."""


class CapacityError(SpannerForgeError, RuntimeError):
    """A configured capacity (Held-Karp size, DP width) was exceeded."""


class CreditExhausted(SpannerForgeError, RuntimeError):
    """A credit ledger debit would make a balance negative.

    Args:
        message: Human readable description.
        events: Snapshot of the ledger event log at the time of failure.
    """

    def __init__(self, message: str, events: t.Sequence[t.Any] = ()):
        super().__init__(message)
        self.events = list(events)


class SeparatorImbalanceError(SpannerForgeError, RuntimeError):
    """Recursion on separator components exceeded the configured depth cap.

    Args:
        message: Human readable description.
        balances: ``(component size, largest remaining part)`` per call.
        depth: Depth that was reached.
    """

    def __init__(
        self,
        message: str,
        balances: t.Sequence[t.Tuple[int, int]] = (),
        depth: int = 0,
    ):
        super().__init__(message)
        self.balances = list(balances)
        self.depth = depth


__all__ = [
    "SpannerForgeError",
    "InputError",
    "DegenerateInputError",
    "InfeasibleError",
    "ContractViolation",
    "InvariantViolation",
    "CapacityError",
    "CreditExhausted",
    "SeparatorImbalanceError",
]
