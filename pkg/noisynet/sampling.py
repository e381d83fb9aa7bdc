"""Seeded random models for cross-checks (shared by the tests and `verify`)."""

import numpy as np

from . import gates
from .model.schema import Evidence, InhibitorVector, Network, NodeSpec, NoisyGateSpec, Variable
from .model.utils import n_joint_states
from .toolkits.reliability import Link, LinkGraph


def random_inhibitors(
    rng: np.random.Generator, n_states: int, p_zero: float = 0.2
) -> InhibitorVector:
    """Draw inhibitors and nofail jointly from a flat Dirichlet, zeroing some entries."""
    probs = rng.dirichlet(np.ones(n_states + 1))[:n_states]
    probs[rng.random(n_states) < p_zero] = 0.0
    return InhibitorVector(tuple(float(p) for p in probs))


def _random_function(
    rng: np.random.Generator, cards: list[int], m_x: int
) -> gates.GateFunction:
    options = ["truth_table", "weighted_average"]
    if 1 + sum(m - 1 for m in cards) == m_x:
        options.append("add")
    if m_x == 2 and all(m == 2 for m in cards):
        options.append("or")
    match rng.choice(options):
        case "weighted_average":
            return gates.WeightedAverage(cards, m_x)
        case "add":
            return gates.IntegerAdd(cards, m_x)
        case "or":
            return gates.BooleanOr(len(cards))
        case _:
            return gates.TruthTable(
                cards, m_x, rng.integers(0, m_x, size=n_joint_states(cards)).tolist()
            )


def random_gate_spec(
    rng: np.random.Generator,
    *,
    max_inputs: int = 4,
    max_cardinality: int = 4,
    max_output_cardinality: int = 5,
) -> NoisyGateSpec:
    """Draw any noisy gate (function kind, sizes and inhibitors all random)."""
    n = int(rng.integers(1, max_inputs + 1))
    cards = [int(m) for m in rng.integers(2, max_cardinality + 1, size=n)]
    m_x = int(rng.integers(2, max_output_cardinality + 1))
    inputs = tuple(Variable(f"U{i}", m) for i, m in enumerate(cards))
    return NoisyGateSpec(
        inputs=inputs,
        inhibitors=tuple(random_inhibitors(rng, m) for m in cards),
        function=_random_function(rng, cards, m_x),
        output=Variable("X", m_x),
    )


def random_boolean_noisy_or_spec(rng: np.random.Generator, *, max_inputs: int = 6) -> NoisyGateSpec:
    """Draw a gate that qualifies for the Boolean noisy-or compiler."""
    n = int(rng.integers(1, max_inputs + 1))
    return NoisyGateSpec(
        inputs=tuple(Variable.boolean(f"U{i}") for i in range(n)),
        inhibitors=tuple(InhibitorVector((float(rng.random()), 0.0)) for _ in range(n)),
        function=gates.BooleanOr(n),
        output=Variable.boolean("X"),
    )


def random_nary_boolean_output_spec(
    rng: np.random.Generator, *, max_inputs: int = 6, max_cardinality: int = 4
) -> NoisyGateSpec:
    """Draw a weighted-average gate with a Boolean output and inhibition only at state 0."""
    n = int(rng.integers(1, max_inputs + 1))
    cards = [int(m) for m in rng.integers(2, max_cardinality + 1, size=n)]
    return NoisyGateSpec(
        inputs=tuple(Variable(f"U{i}", m) for i, m in enumerate(cards)),
        inhibitors=tuple(
            InhibitorVector.failing_at(m, 0, float(rng.random())) for m in cards
        ),
        function=gates.WeightedAverage(cards, 2),
        output=Variable.boolean("X"),
    )


def random_network(
    rng: np.random.Generator,
    *,
    max_nodes: int = 10,
    max_cardinality: int = 3,
    max_parents: int = 3,
) -> Network:
    """Draw a DAG mixing explicit CPTs and noisy truth-table gates."""
    n_nodes = int(rng.integers(1, max_nodes + 1))
    variables = [
        Variable(f"V{i:02d}", int(rng.integers(2, max_cardinality + 1))) for i in range(n_nodes)
    ]
    nodes = []
    for i, var in enumerate(variables):
        k = int(rng.integers(0, min(i, max_parents) + 1))
        parents = [variables[j] for j in sorted(rng.choice(i, size=k, replace=False))] if k else []
        if not parents:
            nodes.append(NodeSpec.root(var, rng.dirichlet(np.ones(var.cardinality))))
        elif rng.random() < 0.5:
            rows = rng.dirichlet(np.ones(var.cardinality), size=n_joint_states([p.cardinality for p in parents]))
            nodes.append(NodeSpec.table(var, parents, rows.reshape(-1)))
        else:
            cards = [p.cardinality for p in parents]
            nodes.append(
                NodeSpec.noisy(
                    NoisyGateSpec(
                        inputs=tuple(parents),
                        inhibitors=tuple(random_inhibitors(rng, m) for m in cards),
                        function=_random_function(rng, cards, var.cardinality),
                        output=var,
                    )
                )
            )
    return Network(tuple(nodes))


def random_evidence(rng: np.random.Generator, net: Network, max_observed: int = 2) -> Evidence:
    """Observe a few random variables at random states."""
    names = net.names
    k = int(rng.integers(0, min(max_observed, len(names)) + 1))
    observed = sorted(rng.choice(len(names), size=k, replace=False)) if k else []
    return Evidence(
        {
            names[i]: int(rng.integers(0, net.variable(names[i]).cardinality))
            for i in observed
        }
    )


def random_link_graph(
    rng: np.random.Generator, *, max_nodes: int = 7, max_links: int = 12
) -> LinkGraph:
    """Draw a DAG over N0..Nk with a guaranteed N0 -> ... -> Nk chain."""
    n_nodes = int(rng.integers(2, max_nodes + 1))
    names = [f"N{i}" for i in range(n_nodes)]
    pairs = {(i, i + 1) for i in range(n_nodes - 1)}
    candidates = [(i, j) for i in range(n_nodes) for j in range(i + 2, n_nodes)]
    rng.shuffle(candidates)
    for pair in candidates:
        if len(pairs) >= max_links:
            break
        if rng.random() < 0.5:
            pairs.add(pair)
    return LinkGraph(
        nodes=tuple(names),
        links=tuple(
            Link(names[i], names[j], float(rng.random())) for i, j in sorted(pairs)
        ),
        source=names[0],
        target=names[-1],
    )
