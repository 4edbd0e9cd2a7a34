"""Exception types shared by the library and the CLI."""

from __future__ import annotations


class TreecastError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(TreecastError, ValueError):
    pass


class InvalidTreeError(TreecastError, ValueError):
    """A parent array does not describe a rooted tree.

    ``violation`` carries the structured report from ``validate_tree``.
    """

    def __init__(self, violation, index: int | None = None):
        self.violation = violation
        self.index = index
        prefix = f"tree {index}: " if index is not None else ""
        super().__init__(prefix + str(violation))


class ScheduleFormatError(TreecastError, ValueError):
    pass


class StrategyFault(TreecastError):
    """An adversary strategy returned an invalid or wrong-sized tree."""


class IncompleteTraceError(TreecastError, ValueError):
    pass


class MemoryBudgetExceeded(TreecastError):
    """The exact search memo table hit its configured entry cap.

    ``stats`` holds the counters accumulated up to the failure.
    """

    def __init__(self, limit: int, stats: dict):
        self.limit = limit
        self.stats = stats
        super().__init__(
            f"memo budget of {limit} entries exceeded "
            f"(expanded={stats.get('expanded')}, hits={stats.get('hits')})"
        )
