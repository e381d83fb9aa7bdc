"""Graph-structure utilities: ordering and validation."""

import dataclasses as dc
import logging
from typing import Iterable

import networkx as nx
from typeguard import typechecked

from ..config import ENV
from ..exceptions import CycleException
from .schema import ExplicitCPT, Network, NoisyGate

LOGGER = logging.getLogger(__name__)


def to_digraph(nodes: Iterable[str], edges: Iterable[tuple[str, str]]) -> nx.DiGraph:
    """Build a networkx digraph (all nodes present even if isolated)."""
    g = nx.DiGraph()
    g.add_nodes_from(nodes)
    g.add_edges_from(edges)
    return g


def find_cycle_member(g: nx.DiGraph) -> str | None:
    """Get the (name-wise) first node on some cycle, or None if acyclic."""
    try:
        cycle = nx.find_cycle(g)
    except nx.NetworkXNoCycle:
        return None
    return min(u for u, _ in cycle)


def sorted_topologically(nodes: Iterable[str], edges: Iterable[tuple[str, str]]) -> list[str]:
    """Order so every edge's tail precedes its head; ties broken by name."""
    g = to_digraph(nodes, edges)
    if (member := find_cycle_member(g)) is not None:
        raise CycleException(member)
    return list(nx.lexicographical_topological_sort(g))


def topological_order(net: Network) -> list[str]:
    """Get the network's variable names, parents before children."""
    return sorted_topologically(net.names, net.edges())


# -----------------------------------------------------------------------------


@typechecked
@dc.dataclass(frozen=True)
class Violation:
    """One problem found in a network."""

    kind: str  # cycle | dangling_parent | parent_mismatch | unnormalized | inhibitor | missing_marginal
    node: str
    message: str


@typechecked
@dc.dataclass(frozen=True)
class ValidationReport:
    """The outcome of `validate_network()`."""

    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}


def validate_network(net: Network, tolerance: float | None = None) -> ValidationReport:
    """Report every structural and numerical problem in `net`."""
    if tolerance is None:
        tolerance = ENV.NORMALIZATION_TOLERANCE
    violations: list[Violation] = []

    for node in net:
        for parent in node.parents:
            if parent.name not in net:
                violations.append(
                    Violation("dangling_parent", node.name, f"parent '{parent.name}' is not in the network")
                )
            elif net.variable(parent.name) != parent:
                violations.append(
                    Violation(
                        "parent_mismatch",
                        node.name,
                        f"parent '{parent.name}' differs from the network's variable of that name",
                    )
                )

        match node.backing:
            case ExplicitCPT(factor=factor):
                if not factor.is_normalized(tolerance):
                    worst = float(abs(factor.child_sums() - 1.0).max())
                    violations.append(
                        Violation(
                            "unnormalized",
                            node.name,
                            f"CPT slices do not sum to 1 (worst deviation {worst:.3g})",
                        )
                    )
            case NoisyGate(spec=spec):
                for message in spec.violations():
                    violations.append(Violation("inhibitor", node.name, message))
        if not node.parents and not isinstance(node.backing, ExplicitCPT):
            violations.append(Violation("missing_marginal", node.name, "root node has no marginal"))

    member = find_cycle_member(
        to_digraph(net.names, [(p, c) for p, c in net.edges() if p in net])
    )
    if member is not None:
        violations.append(Violation("cycle", member, f"cycle detected through '{member}'"))

    if violations:
        LOGGER.debug(f"network has {len(violations)} violation(s): {violations}")
    return ValidationReport(tuple(violations))
