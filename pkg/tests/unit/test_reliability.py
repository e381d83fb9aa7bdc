"""Test the link-failure reliability models."""


import dataclasses as dc

import networkx as nx
import numpy as np
import pytest

from noisynet import oracle, sampling
from noisynet.documents import to_link_graph
from noisynet.exceptions import (
    CycleException,
    PathCountStateSpaceException,
    UnreachableTargetException,
)
from noisynet.toolkits import reliability
from noisynet.toolkits.reliability import Link, LinkGraph


def _graph(links: list[tuple[str, str, float]], source: str = "A", target: str = "D") -> LinkGraph:
    nodes = sorted({n for p, c, _ in links for n in (p, c)} | {source, target})
    return LinkGraph(tuple(nodes), tuple(Link(p, c, l) for p, c, l in links), source, target)


def _diamond(l: float) -> LinkGraph:
    return _graph([("A", "B", l), ("A", "C", l), ("B", "D", l), ("C", "D", l)])


def _connectivity(g: LinkGraph, **kwargs) -> float:  # type: ignore[no-untyped-def]
    return reliability.query_connectivity(
        reliability.build_connectivity_model(g, **kwargs), g.source, g.target
    )


def _paths(g: LinkGraph, **kwargs) -> np.ndarray:  # type: ignore[no-untyped-def]
    return reliability.query_path_distribution(
        reliability.build_path_count_model(g, **kwargs), g.source, g.target
    )


def _path_product_sum(g: LinkGraph) -> float:
    up = {(lk.parent, lk.child): 1.0 - lk.failure_probability for lk in g.links}
    return sum(
        float(np.prod([up[e] for e in zip(path, path[1:])]))
        for path in nx.all_simple_paths(g.digraph(), g.source, g.target)
    )


# -----------------------------------------------------------------------------


def test_00__link_graph_validation() -> None:
    """Test invalid graphs are rejected."""
    with pytest.raises(ValueError):
        Link("A", "B", 1.5)
    with pytest.raises(ValueError):
        Link("A", "A", 0.1)
    with pytest.raises(ValueError):
        _graph([("A", "B", 0.1), ("A", "B", 0.2)], target="B")
    with pytest.raises(ValueError):
        LinkGraph(("A", "B"), (Link("A", "Z", 0.1),), "A", "B")
    with pytest.raises(CycleException):
        _graph([("A", "B", 0.1), ("B", "C", 0.1), ("C", "A", 0.1)], target="C")


def test_10__annotate_path_counts() -> None:
    """Test the path-count recurrence."""
    chain = reliability.annotate_path_counts(_graph([("A", "B", 0.1), ("B", "C", 0.1)], target="C"))
    assert chain["C"] == 1
    diamond = reliability.annotate_path_counts(_diamond(0.5))
    assert (diamond["A"], diamond["B"], diamond["D"]) == (1, 1, 2)

    g = _graph([("A", "B", 0.1), ("Z", "B", 0.1)], target="B")
    counts = reliability.annotate_path_counts(g)
    assert counts["Z"] == 0
    assert counts["B"] == 1


def test_11__annotate_demo_graph(demo_document) -> None:  # type: ignore[no-untyped-def]
    """Test the shipped 7-node demo graph has 4 source->target paths."""
    g = to_link_graph(demo_document("demo_graph"))
    assert len(g.nodes) == 7
    assert reliability.annotate_path_counts(g)[g.target] == 4


def test_20__connectivity_values() -> None:
    """Test connectivity on hand-checked graphs."""
    assert _connectivity(_graph([("A", "B", 0.1)], target="B")) == pytest.approx(0.9, abs=1e-12)
    assert _connectivity(
        _graph([("A", "B", 0.1), ("B", "C", 0.2)], target="C")
    ) == pytest.approx(0.72, abs=1e-12)
    assert _connectivity(_diamond(0.5)) == pytest.approx(0.4375, abs=1e-12)


@pytest.mark.parametrize("l,expected", [(0.0, 1.0), (1.0, 0.0)])
def test_21__connectivity_extremes(l: float, expected: float) -> None:
    """Test perfect and broken links."""
    g = _diamond(l)
    net = reliability.build_connectivity_model(g)
    everything = reliability.connectivity_to_all(net, g.source)
    assert set(everything) == {"B", "C", "D"}
    for p in everything.values():
        assert p == pytest.approx(expected, abs=1e-12)


def test_22__unreachable_target() -> None:
    """Test a target upstream of the source is an error."""
    g = _graph([("A", "B", 0.1), ("C", "B", 0.1)], source="A", target="C")
    with pytest.raises(UnreachableTargetException):
        reliability.build_connectivity_model(g)
    with pytest.raises(UnreachableTargetException):
        reliability.build_path_count_model(g)


def test_23__connectivity_ignores_non_descendants() -> None:
    """Test only the source and its descendants are modeled."""
    g = _graph([("Z", "A", 0.3), ("A", "B", 0.1), ("Z", "B", 0.5)], target="B")
    net = reliability.build_connectivity_model(g)
    assert set(net.network.names) == {"A", "B"}
    assert reliability.query_connectivity(net, "A", "B") == pytest.approx(0.9, abs=1e-12)


def test_30__path_distribution_values() -> None:
    """Test the path-count distribution on hand-checked graphs."""
    assert _paths(_diamond(0.5)) == pytest.approx([0.5625, 0.375, 0.0625], abs=1e-12)
    assert np.array_equal(_paths(_diamond(0.0)), [0.0, 0.0, 1.0])

    chain = reliability.build_path_count_model(_graph([("A", "B", 0.1), ("B", "C", 0.2)], target="C"))
    assert all(v.cardinality == 2 for v in (n.variable for n in chain.network))


def test_31__path_count_cap() -> None:
    """Test the state-space cap."""
    with pytest.raises(PathCountStateSpaceException, match="path-count state space too large"):
        reliability.build_path_count_model(_diamond(0.5), cap=2)


def test_32__expected_path_count() -> None:
    """Test the mean of the distribution."""
    assert reliability.expected_path_count([0.5625, 0.375, 0.0625]) == pytest.approx(0.5)


def test_40__matches_link_state_enumeration() -> None:
    """Test both models against every up/down configuration, on random graphs."""
    rng = np.random.default_rng(40)
    for _ in range(50):
        g = sampling.random_link_graph(rng)
        exact = oracle.enumerate_link_states(g)
        connectivity = _connectivity(g)
        distribution = _paths(g)

        assert abs(connectivity - exact.connectivity) <= 1e-9
        assert np.max(np.abs(distribution - np.array(exact.histogram))) <= 1e-9
        assert abs(distribution[0] + connectivity - 1.0) <= 1e-9
        assert abs(reliability.expected_path_count(distribution) - _path_product_sum(g)) <= 1e-9


@pytest.mark.parametrize("marginal", [[0.5, 0.5], [0.01, 0.99], [0.9, 0.1]])
def test_41__root_marginal_irrelevant(marginal: list[float], demo_document) -> None:  # type: ignore[no-untyped-def]
    """Test any strictly positive source marginal gives the same answers."""
    g = to_link_graph(demo_document("demo_graph"))
    assert abs(
        _connectivity(g, root_marginal=marginal) - _connectivity(g)
    ) <= 1e-12
    assert np.max(np.abs(_paths(g, root_marginal=marginal) - _paths(g))) <= 1e-12


def test_50__super_source() -> None:
    """Test several sources through a virtual failure-free source."""
    g = _graph([("A", "C", 0.5), ("B", "C", 0.5)], source="A", target="C")
    multi = reliability.with_super_source(g, ["A", "B"])
    assert multi.source == reliability.SUPER_SOURCE
    assert _connectivity(multi) == pytest.approx(0.75, abs=1e-12)
    assert abs(_connectivity(multi) - oracle.enumerate_link_states(multi).connectivity) <= 1e-12
    with pytest.raises(ValueError):
        reliability.with_super_source(multi, ["A"])


def test_42__path_distributions_to_all() -> None:
    """Test one query gives every downstream node's path-count distribution."""
    g = _diamond(0.5)
    everything = reliability.path_distributions_to_all(reliability.build_path_count_model(g), g.source)
    assert set(everything) == {"B", "C", "D"}
    assert everything["B"] == pytest.approx([0.5, 0.5], abs=1e-12)
    assert everything["D"] == pytest.approx([0.5625, 0.375, 0.0625], abs=1e-12)

    rng = np.random.default_rng(42)
    for _ in range(20):
        g = sampling.random_link_graph(rng)
        everything = reliability.path_distributions_to_all(
            reliability.build_path_count_model(g), g.source
        )
        for node, distribution in everything.items():
            exact = oracle.enumerate_link_states(dc.replace(g, target=node))
            assert np.max(np.abs(distribution - np.array(exact.histogram))) <= 1e-9
