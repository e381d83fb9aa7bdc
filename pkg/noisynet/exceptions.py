"""Exceptions raised across noisynet."""


class NoisyNetException(Exception):
    """Base for all noisynet errors."""


class DomainException(NoisyNetException):
    """A well-formed request that cannot be answered (cli exit status 1)."""


class ImpossibleEvidenceException(DomainException):
    """The declared evidence has zero (or underflowing) probability."""

    def __init__(self, detail: str = "") -> None:
        super().__init__(f"impossible evidence{': ' + detail if detail else ''}")


class BudgetExceededException(DomainException):
    """An enumeration would exceed its configured budget."""

    def __init__(self, what: str, size: int, budget: int) -> None:
        super().__init__(f"{what} infeasible: {size} states exceeds budget of {budget}")
        self.size = size
        self.budget = budget


class PathCountStateSpaceException(DomainException):
    """A path-count variable would need more states than allowed."""

    def __init__(self, node: str, n_states: int, cap: int) -> None:
        super().__init__(
            f"path-count state space too large: '{node}' needs {n_states} states (cap {cap})"
        )


class UnreachableTargetException(DomainException):
    """The target is not a descendant of the source."""


class CycleException(NoisyNetException, ValueError):
    """The directed graph has a cycle."""

    def __init__(self, member: str) -> None:
        super().__init__(f"cycle detected through '{member}'")
        self.member = member


class DocumentException(NoisyNetException):
    """A document could not be parsed into a model (cli exit status 2)."""
