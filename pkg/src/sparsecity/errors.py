"""Shared exception types.

Most precondition violations raise plain ValueError; the classes here exist
where callers need to distinguish the failure mode (the CLI maps them to
distinct exit codes).
"""


class BudgetError(RuntimeError):
    """A size or enumeration budget was exceeded (dense materialization
    threshold, support-enumeration count).  Usually recoverable by switching
    to a sampling estimator or raising the budget explicitly."""


class OverflowRiskError(ValueError):
    """Integer-kernel inputs could overflow the accumulator width."""
