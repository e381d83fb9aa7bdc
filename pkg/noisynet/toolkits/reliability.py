"""Two-terminal reliability of networks with unreliable links.

Each node becomes a noisy gate over its incoming links; a failed link
delivers state 0 ("no path") to the gate downstream. Two models:

- connectivity: Boolean OR at every node, so with the source observed
  true, Bel(target = true) is the probability a working path exists.
- path count: node U has n_U + 1 states (n_U = number of source->U
  paths) and adds its inputs, so Bel(target) is the distribution over
  the number of simultaneously working paths.
"""

import dataclasses as dc
import logging
from typing import Sequence

import networkx as nx
import numpy as np
from typeguard import typechecked

from .. import gates
from ..compiler import CompiledNetwork, boolean_noisy_or_spec, compile_network
from ..config import ENV
from ..exceptions import PathCountStateSpaceException, UnreachableTargetException
from ..inference import Query, eliminate
from ..model.graph import sorted_topologically, to_digraph
from ..model.schema import Evidence, InhibitorVector, Network, NodeSpec, NoisyGateSpec, Variable

LOGGER = logging.getLogger(__name__)

SUPER_SOURCE = "*source*"


@typechecked
@dc.dataclass(frozen=True)
class Link:
    """A directed link that is down with probability `failure_probability`."""

    parent: str
    child: str
    failure_probability: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.failure_probability <= 1.0:
            raise ValueError(
                f"link {self.parent}->{self.child} failure probability must be in [0, 1]"
            )
        if self.parent == self.child:
            raise ValueError(f"link {self.parent}->{self.child} is a self-loop")


@typechecked
@dc.dataclass(frozen=True)
class LinkGraph:
    """A DAG of unreliable links with a designated source and target."""

    nodes: tuple[str, ...]
    links: tuple[Link, ...]
    source: str
    target: str

    def __post_init__(self) -> None:
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError("duplicate node names in link graph")
        for name in (self.source, self.target):
            if name not in self.nodes:
                raise ValueError(f"'{name}' is not a node of the link graph")
        pairs = [(lk.parent, lk.child) for lk in self.links]
        if len(set(pairs)) != len(pairs):
            raise ValueError("link graph has parallel links between the same pair of nodes")
        for parent, child in pairs:
            if parent not in self.nodes or child not in self.nodes:
                raise ValueError(f"link {parent}->{child} references an unknown node")
        sorted_topologically(self.nodes, pairs)  # raises on cycles

    def digraph(self) -> nx.DiGraph:
        return to_digraph(self.nodes, [(lk.parent, lk.child) for lk in self.links])

    def reachable(self) -> set[str]:
        """Get the source and its descendants."""
        return {self.source} | nx.descendants(self.digraph(), self.source)

    def incoming(self, node: str, within: set[str]) -> list[Link]:
        """Get links into `node` from `within`, by parent name (links into the source are ignored)."""
        if node == self.source:
            return []
        return sorted(
            (lk for lk in self.links if lk.child == node and lk.parent in within),
            key=lambda lk: lk.parent,
        )

    def ordered_reachable(self) -> list[str]:
        """Get the source's descendant subgraph in graph order."""
        keep = self.reachable()
        return [
            n
            for n in sorted_topologically(self.nodes, [(lk.parent, lk.child) for lk in self.links])
            if n in keep
        ]


def with_super_source(g: LinkGraph, sources: Sequence[str], name: str = SUPER_SOURCE) -> LinkGraph:
    """Get a graph whose source is a virtual node with failure-free links to each of `sources`."""
    if name in g.nodes:
        raise ValueError(f"'{name}' is already a node of the link graph")
    if not sources:
        raise ValueError("need at least one source")
    return LinkGraph(
        nodes=(name,) + g.nodes,
        links=tuple(Link(name, s, 0.0) for s in sources) + g.links,
        source=name,
        target=g.target,
    )


# -----------------------------------------------------------------------------
# path counting


@typechecked
@dc.dataclass(frozen=True)
class PathCountAnnotation:
    """Number of source->node paths for every node."""

    counts: dict[str, int]

    def __getitem__(self, node: str) -> int:
        return self.counts[node]


def annotate_path_counts(g: LinkGraph) -> PathCountAnnotation:
    """Count source->node paths in graph order: n_U is the sum over U's parents."""
    everything = set(g.nodes)
    counts: dict[str, int] = {}
    for node in sorted_topologically(g.nodes, [(lk.parent, lk.child) for lk in g.links]):
        if node == g.source:
            counts[node] = 1
        else:
            counts[node] = sum(counts[lk.parent] for lk in g.incoming(node, everything))
    LOGGER.debug(f"path counts from '{g.source}': {counts}")
    return PathCountAnnotation(counts)


def expected_path_count(distribution: Sequence[float] | np.ndarray) -> float:
    """Get the mean number of working paths."""
    return float(np.dot(np.arange(len(distribution)), distribution))


# -----------------------------------------------------------------------------
# model builders


def _check_reachable(g: LinkGraph) -> None:
    if g.target not in g.reachable():
        raise UnreachableTargetException(
            f"'{g.target}' is not a descendant of '{g.source}'"
        )


def _uniform(n: int) -> list[float]:
    return [1.0 / n] * n


def build_connectivity_model(
    g: LinkGraph,
    *,
    root_marginal: Sequence[float] | None = None,
    budget: int | None = None,
) -> CompiledNetwork:
    """Build the Boolean-OR network over the source and its descendants."""
    _check_reachable(g)
    within = g.reachable()
    variables = {n: Variable.boolean(n) for n in within}

    nodes = []
    for name in g.ordered_reachable():
        if name == g.source:
            nodes.append(NodeSpec.root(variables[name], root_marginal or _uniform(2)))
            continue
        incoming = g.incoming(name, within)
        nodes.append(
            NodeSpec.noisy(
                boolean_noisy_or_spec(
                    [variables[lk.parent] for lk in incoming],
                    variables[name],
                    [lk.failure_probability for lk in incoming],
                )
            )
        )
    return compile_network(Network(tuple(nodes)), budget=budget)


def build_path_count_model(
    g: LinkGraph,
    *,
    root_marginal: Sequence[float] | None = None,
    cap: int | None = None,
    budget: int | None = None,
) -> CompiledNetwork:
    """Build the integer-addition network: node U counts its working source->U paths."""
    if cap is None:
        cap = ENV.PATH_COUNT_MAX_STATES
    _check_reachable(g)
    within = g.reachable()
    counts = annotate_path_counts(g)

    variables = {}
    for name in within:
        n_states = counts[name] + 1
        if n_states > cap:
            raise PathCountStateSpaceException(name, n_states, cap)
        variables[name] = Variable(name, n_states)

    nodes = []
    for name in g.ordered_reachable():
        if name == g.source:
            nodes.append(NodeSpec.root(variables[name], root_marginal or _uniform(2)))
            continue
        incoming = g.incoming(name, within)
        parents = tuple(variables[lk.parent] for lk in incoming)
        nodes.append(
            NodeSpec.noisy(
                NoisyGateSpec(
                    inputs=parents,
                    inhibitors=tuple(
                        InhibitorVector.failing_at(p.cardinality, 0, lk.failure_probability)
                        for p, lk in zip(parents, incoming)
                    ),
                    function=gates.IntegerAdd([p.cardinality for p in parents]),
                    output=variables[name],
                )
            )
        )
    return compile_network(Network(tuple(nodes)), budget=budget)


# -----------------------------------------------------------------------------
# queries


def query_connectivity(net: CompiledNetwork, source: str, target: str) -> float:
    """Get the probability that a working source->target path exists."""
    marginals = eliminate(Query(net, Evidence({source: 1}), (target,)))
    return float(marginals[target][1])


def connectivity_to_all(net: CompiledNetwork, source: str) -> dict[str, float]:
    """Get the path-exists probability for every node downstream of the source."""
    others = tuple(n for n in net.network.names if n != source)
    marginals = eliminate(Query(net, Evidence({source: 1}), others))
    return {n: float(marginals[n][1]) for n in others}


def query_path_distribution(net: CompiledNetwork, source: str, target: str) -> np.ndarray:
    """Get the distribution over the number of working source->target paths."""
    marginals = eliminate(Query(net, Evidence({source: 1}), (target,)))
    return marginals[target]


def path_distributions_to_all(net: CompiledNetwork, source: str) -> dict[str, np.ndarray]:
    """Get the working-path-count distribution for every node downstream of the source."""
    others = tuple(n for n in net.network.names if n != source)
    marginals = eliminate(Query(net, Evidence({source: 1}), others))
    return {n: marginals[n] for n in others}
