"""Test factor algebra and variable elimination."""


import numpy as np
import pytest

from noisynet import oracle, sampling
from noisynet.compiler import boolean_noisy_or_spec, compile_network
from noisynet.exceptions import ImpossibleEvidenceException
from noisynet.inference import (
    Query,
    apply_evidence,
    eliminate,
    elimination_order,
    factor_marginalize,
    factor_product,
)
from noisynet.model.graph import topological_order
from noisynet.model.schema import Evidence, Factor, Network, NodeSpec, Variable

A, B = Variable.boolean("A"), Variable.boolean("B")
X = Variable.boolean("X")


def _two_node() -> Network:
    return Network(
        (
            NodeSpec.root(A, [0.7, 0.3]),
            NodeSpec.noisy(boolean_noisy_or_spec([A], X, [0.5])),
        )
    )


# -----------------------------------------------------------------------------
# factors


def test_00__factor_product() -> None:
    """Test products align shared variables and take outer products otherwise."""
    same = factor_product(Factor((A,), np.array([0.3, 0.7])), Factor((A,), np.array([0.5, 0.5])))
    assert same.names == ("A",)
    assert np.allclose(same.table, [0.15, 0.35])

    outer = factor_product(Factor((A,), np.array([0.3, 0.7])), Factor((B,), np.array([0.1, 0.9])))
    assert outer.names == ("A", "B")
    assert np.allclose(outer.table, [0.03, 0.27, 0.07, 0.63])

    f = Factor((A, B), np.array([0.1, 0.2, 0.3, 0.4]))
    assert np.array_equal(factor_product(f, Factor.unit()).table, f.table)


def test_01__factor_product_reorders() -> None:
    """Test b's variables are matched by name, not position."""
    ab = Factor((A, B), np.array([1.0, 2.0, 3.0, 4.0]))
    ba = Factor((B, A), np.array([1.0, 10.0, 100.0, 1000.0]))
    prod = factor_product(ab, ba)
    assert prod.names == ("A", "B")
    assert np.allclose(prod.array(), [[1.0, 200.0], [30.0, 4000.0]])


def test_02__factor_product_cardinality_clash() -> None:
    """Test mismatched cardinalities are rejected."""
    with pytest.raises(ValueError):
        factor_product(Factor((A,), np.ones(2)), Factor((Variable("A", 3),), np.ones(3)))


def test_03__factor_marginalize() -> None:
    """Test summing a variable out."""
    f = Factor((A, B), np.array([0.1, 0.2, 0.3, 0.4]))
    assert np.allclose(factor_marginalize(f, "B").table, [0.3, 0.7])
    assert np.allclose(factor_marginalize(f, "A").table, [0.4, 0.6])
    cpt = Factor((A, X), np.array([1.0, 0.0, 0.5, 0.5]))
    assert np.allclose(factor_marginalize(cpt, "X").table, [1.0, 1.0])
    scalar = factor_marginalize(Factor((A,), np.array([0.3, 0.7])), "A")
    assert scalar.names == () and scalar.table[0] == pytest.approx(1.0)
    with pytest.raises(KeyError):
        factor_marginalize(f, "X")


def test_04__apply_evidence() -> None:
    """Test inconsistent entries are zeroed."""
    cpt = Factor((A, X), np.array([1.0, 0.0, 0.5, 0.5]))
    assert np.array_equal(apply_evidence(cpt, Evidence({"X": 1})).table, [0.0, 0.0, 0.0, 0.5])
    assert apply_evidence(cpt, Evidence({"B": 1})) is cpt
    assert np.count_nonzero(apply_evidence(cpt, Evidence({"A": 1, "X": 0})).table) == 1


# -----------------------------------------------------------------------------
# elimination


def test_10__two_node_posterior() -> None:
    """Test observing the effect explains it by its only cause."""
    marginals = eliminate(Query(_two_node(), Evidence({"X": 1}), ("A",)))
    assert marginals["A"] == pytest.approx([0.0, 1.0])


def test_11__no_evidence_gives_prior() -> None:
    """Test unconditioned roots keep their marginal."""
    marginals = eliminate(Query(_two_node()))
    assert list(marginals) == ["A", "X"]
    assert marginals["A"] == pytest.approx([0.7, 0.3])
    assert marginals["X"] == pytest.approx([0.85, 0.15])


def test_12__evidence_is_point_mass() -> None:
    """Test an observed variable's posterior is its observation."""
    marginals = eliminate(Query(_two_node(), Evidence({"A": 1}), ("A", "X")))
    assert np.array_equal(marginals["A"], [0.0, 1.0])
    assert marginals["X"] == pytest.approx([0.5, 0.5])


def test_13__impossible_evidence() -> None:
    """Test zero-probability evidence is an error."""
    net = _two_node().replace_node(NodeSpec.root(A, [1.0, 0.0]))
    with pytest.raises(ImpossibleEvidenceException, match="impossible evidence"):
        eliminate(Query(net, Evidence({"X": 1})))


def test_14__query_checks_names() -> None:
    """Test unknown targets and out-of-range evidence are rejected."""
    with pytest.raises(KeyError):
        Query(_two_node(), Evidence(), ("Z",))
    with pytest.raises(ValueError):
        Query(_two_node(), Evidence({"A": 2}))


def test_15__compiled_and_uncompiled_agree() -> None:
    """Test querying a compiled network is the same as compiling on the fly."""
    net = _two_node()
    e = Evidence({"X": 0})
    assert np.array_equal(
        eliminate(Query(net, e))["A"], eliminate(Query(compile_network(net), e))["A"]
    )


def test_16__elimination_order() -> None:
    """Test min-degree order with name tie-break."""
    C = Variable.boolean("C")
    factors = [
        Factor((A,), np.ones(2)),
        Factor((A, B), np.ones(4)),
        Factor((B, C), np.ones(4)),
    ]
    assert elimination_order(factors, {"C"}) == ["A", "B"]
    assert elimination_order(factors, {"A"}) == ["C", "B"]


def test_20__matches_brute_force() -> None:
    """Test elimination against the full joint on random networks and evidence."""
    rng = np.random.default_rng(20)
    checked = 0
    for _ in range(100):
        net = sampling.random_network(rng)
        e = sampling.random_evidence(rng, net)
        target = net.names[int(rng.integers(len(net.names)))]
        try:
            expected = oracle.brute_force_marginal(net, e, target)
        except ImpossibleEvidenceException:
            with pytest.raises(ImpossibleEvidenceException):
                eliminate(Query(net, e, (target,)))
            continue
        got = eliminate(Query(net, e, (target,)))[target]
        assert np.max(np.abs(got - expected)) <= 1e-9
        checked += 1
    assert checked >= 30


def test_21__order_independence() -> None:
    """Test min-degree and reversed graph order give the same marginals."""
    rng = np.random.default_rng(21)
    for _ in range(30):
        net = sampling.random_network(rng)
        e = sampling.random_evidence(rng, net)
        try:
            default = eliminate(Query(net, e))
        except ImpossibleEvidenceException:
            continue
        reversed_topo = eliminate(Query(net, e), order=topological_order(net)[::-1])
        for name in net.names:
            assert np.max(np.abs(default[name] - reversed_topo[name])) <= 1e-9


def test_22__marginals_normalized_and_rounded() -> None:
    """Test output vectors sum to one and round for display."""
    marginals = eliminate(Query(_two_node(), Evidence({"X": 0})))
    for name in marginals:
        assert marginals[name].sum() == pytest.approx(1.0, abs=1e-9)
    as_dict = marginals.to_dict()
    assert as_dict["A"][1] == pytest.approx(0.15 / 0.85, abs=1e-11)
