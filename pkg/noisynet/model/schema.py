"""Collection of dataclass-based schema for networks and their tables."""

import dataclasses as dc
from typing import Iterator, Sequence

import numpy as np
from typeguard import typechecked

from ..config import BOOLEAN_STATES, ENV
from ..gates import GateFunction
from .utils import n_joint_states


@typechecked
@dc.dataclass(frozen=True)
class Variable:
    """A named discrete variable; a state's index is its position."""

    name: str
    cardinality: int
    state_labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("variable name cannot be empty")
        if self.cardinality < 1:
            raise ValueError(f"'{self.name}' must have at least 1 state")
        if not self.state_labels:  # default labels are the indices
            object.__setattr__(  # b/c frozen
                self, "state_labels", tuple(str(j) for j in range(self.cardinality))
            )
        if len(self.state_labels) != self.cardinality:
            raise ValueError(
                f"'{self.name}' has {self.cardinality} states but {len(self.state_labels)} labels"
            )
        if len(set(self.state_labels)) != len(self.state_labels):
            raise ValueError(f"'{self.name}' has duplicate state labels")

    @staticmethod
    def boolean(name: str, labels: tuple[str, str] = BOOLEAN_STATES) -> "Variable":
        """Make a two-state variable (index 0 is false)."""
        return Variable(name, 2, labels)

    def index_of(self, state: str | int) -> int:
        """Resolve a state label (or an index, or an index as a string)."""
        if isinstance(state, str):
            if state in self.state_labels:
                return self.state_labels.index(state)
            try:
                state = int(state)
            except ValueError:
                raise ValueError(f"'{self.name}' has no state '{state}'") from None
        if not 0 <= state < self.cardinality:
            raise ValueError(f"'{self.name}' has no state index {state}")
        return state


@typechecked
@dc.dataclass(frozen=True, eq=False)
class Factor:
    """A nonnegative table over an ordered variable list, in canonical layout.

    Used as a CPT, the variable order is [parents..., child].
    """

    variables: tuple[Variable, ...]
    table: np.ndarray

    def __post_init__(self) -> None:
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise ValueError(f"factor has repeated variables: {names}")
        table = np.array(self.table, dtype=np.float64).reshape(-1)
        if table.size != n_joint_states(self.cardinalities):
            raise ValueError(
                f"factor over {names} needs {n_joint_states(self.cardinalities)} entries, got {table.size}"
            )
        if np.any(table < 0) or not np.all(np.isfinite(table)):
            raise ValueError(f"factor over {names} has negative or non-finite entries")
        table.flags.writeable = False
        object.__setattr__(self, "table", table)  # b/c frozen

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @property
    def cardinalities(self) -> tuple[int, ...]:
        return tuple(v.cardinality for v in self.variables)

    def array(self) -> np.ndarray:
        """Get the table as a read-only array with one axis per variable."""
        return self.table.reshape(self.cardinalities)

    @staticmethod
    def unit() -> "Factor":
        """The empty factor (scalar 1)."""
        return Factor((), np.ones(1))

    def child_sums(self) -> np.ndarray:
        """Sum over the last variable, one entry per parent configuration."""
        if not self.variables:
            return self.table.copy()
        return self.table.reshape(-1, self.variables[-1].cardinality).sum(axis=1)

    def is_normalized(self, tolerance: float | None = None) -> bool:
        """Whether every child slice sums to 1 (as a CPT over [parents..., child])."""
        if tolerance is None:
            tolerance = ENV.NORMALIZATION_TOLERANCE
        return bool(np.all(np.abs(self.child_sums() - 1.0) <= tolerance))


# -----------------------------------------------------------------------------


@typechecked
@dc.dataclass(frozen=True)
class InhibitorVector:
    """Per-state inhibitor probabilities of one input line."""

    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))  # b/c frozen
        if not self.probs:
            raise ValueError("inhibitor vector cannot be empty")
        if any(not 0.0 <= p <= 1.0 for p in self.probs):
            raise ValueError(f"inhibitor probabilities must be in [0, 1]: {self.probs}")
        if sum(self.probs) > 1.0 + ENV.EQUIVALENCE_TOLERANCE:
            raise ValueError(f"inhibitor probabilities sum to more than 1: {self.probs}")

    def __len__(self) -> int:
        return len(self.probs)

    @staticmethod
    def failing_at(n_states: int, state: int, probability: float) -> "InhibitorVector":
        """All inhibition on one state (`state` is where a failed line lands)."""
        probs = [0.0] * n_states
        probs[state] = probability
        return InhibitorVector(tuple(probs))


@typechecked
@dc.dataclass(frozen=True, eq=False)
class NoisyGateSpec:
    """Inputs, their line-failure inhibitors, a gate function and the output."""

    inputs: tuple[Variable, ...]
    inhibitors: tuple[InhibitorVector, ...]
    function: GateFunction
    output: Variable

    def __post_init__(self) -> None:
        if not self.inputs:
            raise ValueError(f"noisy gate for '{self.output.name}' needs at least one input")
        if len(self.inhibitors) != len(self.inputs):
            raise ValueError(
                f"'{self.output.name}' has {len(self.inputs)} inputs but {len(self.inhibitors)} inhibitor vectors"
            )
        for var, inh in zip(self.inputs, self.inhibitors):
            if len(inh) != var.cardinality:
                raise ValueError(
                    f"inhibitor vector for '{var.name}' has {len(inh)} entries, needs {var.cardinality}"
                )
        if self.function.input_cardinalities != tuple(v.cardinality for v in self.inputs):
            raise ValueError(
                f"function inputs {self.function.input_cardinalities} do not match "
                f"input cardinalities {tuple(v.cardinality for v in self.inputs)}"
            )
        if self.function.output_cardinality != self.output.cardinality:
            raise ValueError(
                f"function output cardinality {self.function.output_cardinality} does not "
                f"match '{self.output.name}' ({self.output.cardinality})"
            )

    @property
    def input_cardinalities(self) -> tuple[int, ...]:
        return tuple(v.cardinality for v in self.inputs)

    def violations(self) -> list[str]:
        """Recheck every inhibitor vector against its input."""
        found = []
        for var, inh in zip(self.inputs, self.inhibitors):
            if len(inh) != var.cardinality:
                found.append(f"inhibitor vector for '{var.name}' has the wrong length")
            if any(p < 0 for p in inh.probs):
                found.append(f"inhibitor vector for '{var.name}' has a negative entry")
            if sum(inh.probs) > 1.0 + ENV.EQUIVALENCE_TOLERANCE:
                found.append(f"inhibitor vector for '{var.name}' sums to more than 1")
        return found


@typechecked
@dc.dataclass(frozen=True, eq=False)
class ExplicitCPT:
    """A node backed by a conventional table."""

    factor: Factor


@typechecked
@dc.dataclass(frozen=True, eq=False)
class NoisyGate:
    """A node backed by a noisy gate, compiled before inference."""

    spec: NoisyGateSpec


@typechecked
@dc.dataclass(frozen=True, eq=False)
class NodeSpec:
    """A variable, its ordered parents, and what defines its CPT."""

    variable: Variable
    parents: tuple[Variable, ...]
    backing: ExplicitCPT | NoisyGate

    def __post_init__(self) -> None:
        match self.backing:
            case ExplicitCPT(factor=factor):
                if factor.variables != self.parents + (self.variable,):
                    raise ValueError(
                        f"CPT for '{self.variable.name}' must be over "
                        f"{[v.name for v in self.parents + (self.variable,)]}, got {list(factor.names)}"
                    )
            case NoisyGate(spec=spec):
                if spec.inputs != self.parents or spec.output != self.variable:
                    raise ValueError(
                        f"noisy gate for '{self.variable.name}' must have its parents as inputs, in order"
                    )

    @property
    def name(self) -> str:
        return self.variable.name

    @staticmethod
    def root(variable: Variable, marginal: Sequence[float] | np.ndarray) -> "NodeSpec":
        """A parentless node with an explicit marginal."""
        return NodeSpec(variable, (), ExplicitCPT(Factor((variable,), np.asarray(marginal))))

    @staticmethod
    def table(
        variable: Variable, parents: Sequence[Variable], table: Sequence[float] | np.ndarray
    ) -> "NodeSpec":
        """A node with an explicit CPT over [parents..., variable]."""
        parents = tuple(parents)
        return NodeSpec(
            variable, parents, ExplicitCPT(Factor(parents + (variable,), np.asarray(table)))
        )

    @staticmethod
    def noisy(spec: NoisyGateSpec) -> "NodeSpec":
        """A node backed by a noisy gate."""
        return NodeSpec(spec.output, spec.inputs, NoisyGate(spec))


@typechecked
@dc.dataclass(frozen=True, eq=False)
class Network:
    """A DAG of nodes keyed by variable name.

    Acyclicity and table normalization are not enforced here, see
    `graph.validate_network()`.
    """

    nodes: tuple[NodeSpec, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(self.nodes))  # b/c frozen
        names = [n.name for n in self.nodes]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate node names: {sorted(n for n in names if names.count(n) > 1)}")

    def __contains__(self, name: str) -> bool:
        return any(n.name == name for n in self.nodes)

    def __iter__(self) -> Iterator[NodeSpec]:
        return iter(self.nodes)

    @property
    def names(self) -> list[str]:
        return [n.name for n in self.nodes]

    def node(self, name: str) -> NodeSpec:
        """Get a node by name."""
        try:
            return next(n for n in self.nodes if n.name == name)
        except StopIteration:
            raise KeyError(f"unknown variable '{name}'") from None

    def variable(self, name: str) -> Variable:
        return self.node(name).variable

    def edges(self) -> list[tuple[str, str]]:
        """Get every (parent, child) pair."""
        return [(p.name, n.name) for n in self.nodes for p in n.parents]

    def children(self, name: str) -> list[str]:
        return sorted(n.name for n in self.nodes if any(p.name == name for p in n.parents))

    def with_node(self, node: NodeSpec) -> "Network":
        """Get a new network with `node` added (unchanged nodes are shared)."""
        return Network(self.nodes + (node,))

    def without_node(self, name: str) -> "Network":
        """Get a new network with `name` removed; it cannot have children."""
        self.node(name)
        if children := self.children(name):
            raise ValueError(f"cannot remove '{name}', it still has children: {children}")
        return Network(tuple(n for n in self.nodes if n.name != name))

    def replace_node(self, node: NodeSpec) -> "Network":
        """Get a new network with the same-named node swapped for `node`."""
        self.node(node.name)
        return Network(tuple(node if n.name == node.name else n for n in self.nodes))


@typechecked
@dc.dataclass(frozen=True)
class Evidence:
    """Observed state indices keyed by variable name."""

    assignments: dict[str, int] = dc.field(default_factory=dict)

    def __post_init__(self) -> None:
        if any(j < 0 for j in self.assignments.values()):
            raise ValueError(f"evidence indices cannot be negative: {self.assignments}")

    def __contains__(self, name: str) -> bool:
        return name in self.assignments

    def check(self, net: Network) -> None:
        """Raise if any assignment does not fit `net`."""
        for name, j in self.assignments.items():
            var = net.variable(name)
            if not 0 <= j < var.cardinality:
                raise ValueError(f"evidence {name}={j} is out of range for {var.cardinality} states")

    @staticmethod
    def resolve(net: Network, observed: dict[str, str | int]) -> "Evidence":
        """Build from labels (or indices)."""
        return Evidence({name: net.variable(name).index_of(s) for name, s in observed.items()})
