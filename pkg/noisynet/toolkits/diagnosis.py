"""Gate-level circuit diagnosis with unreliable lines and devices.

Every gate becomes a noisy gate whose function is the gate's truth
table. Each gate input is a separate line (a wire that fans out to two
gates has two independent failure events) and a failed line delivers
the fault-model's `line_fault_state`. A gate with a device-failure entry
gains an extra Boolean parent `<gate>_f` ("ok"/"failed") that forces
the failed output state when it is "failed".
"""

import dataclasses as dc
import logging
from typing import Callable, Sequence

from typeguard import typechecked

from .. import gates
from ..compiler import CompiledNetwork, compile_network
from ..inference import MarginalSet, Query, eliminate
from ..model.graph import sorted_topologically
from ..model.schema import (
    Evidence,
    InhibitorVector,
    Network,
    NodeSpec,
    NoisyGate,
    NoisyGateSpec,
    Variable,
)
from ..model.utils import iter_joint_states

LOGGER = logging.getLogger(__name__)

DEVICE_SUFFIX = "_f"
DEVICE_STATES = ("ok", "failed")


GATE_LIBRARY: dict[str, Callable[[Sequence[int]], bool]] = {
    "and": all,
    "or": any,
    "nand": lambda u: not all(u),
    "nor": lambda u: not any(u),
    "xor": lambda u: sum(u) % 2 == 1,
    "xnor": lambda u: sum(u) % 2 == 0,
    "not": lambda u: not u[0],
    "buf": lambda u: bool(u[0]),
}
SINGLE_INPUT_KINDS = ("not", "buf")
TRUTH_TABLE_KIND = "truth_table"


def library_truth_table(kind: str, n_inputs: int) -> gates.TruthTable:
    """Get the Boolean truth table of a library gate."""
    try:
        rule = GATE_LIBRARY[kind]
    except KeyError:
        raise ValueError(f"unknown gate kind '{kind}' (known: {sorted(GATE_LIBRARY)})") from None
    if kind in SINGLE_INPUT_KINDS and n_inputs != 1:
        raise ValueError(f"'{kind}' gate takes exactly 1 input, got {n_inputs}")
    cards = (2,) * n_inputs
    return gates.TruthTable(cards, 2, [int(rule(u)) for u in iter_joint_states(cards)])


# -----------------------------------------------------------------------------


@typechecked
@dc.dataclass(frozen=True)
class Gate:
    """A device: its output wire is named after it."""

    name: str
    kind: str
    inputs: tuple[str, ...]
    table: tuple[int, ...] | None = None  # only for kind == "truth_table"

    def __post_init__(self) -> None:
        if not self.inputs:
            raise ValueError(f"gate '{self.name}' needs at least one input")
        if len(set(self.inputs)) != len(self.inputs):
            raise ValueError(f"gate '{self.name}' lists an input wire twice")
        if (self.kind == TRUTH_TABLE_KIND) != (self.table is not None):
            raise ValueError(f"gate '{self.name}': a table is required for, and only for, kind '{TRUTH_TABLE_KIND}'")
        self.function()  # validates kind/arity/table

    def function(self) -> gates.GateFunction:
        """Get the gate's deterministic function."""
        if self.kind == "or":
            return gates.BooleanOr(len(self.inputs))
        if self.kind == TRUTH_TABLE_KIND:
            return gates.TruthTable((2,) * len(self.inputs), 2, self.table or ())
        return library_truth_table(self.kind, len(self.inputs))


@typechecked
@dc.dataclass(frozen=True)
class Circuit:
    """A combinational circuit: primary inputs plus gates over named wires."""

    primary_inputs: tuple[str, ...]
    gates: tuple[Gate, ...]
    line_failure: dict[str, float] = dc.field(default_factory=dict)  # per source wire
    default_line_failure: float = 0.0

    def __post_init__(self) -> None:
        wires = self.wires
        if len(set(wires)) != len(wires):
            raise ValueError("wire names must be unique across primary inputs and gates")
        for gate in self.gates:
            for w in gate.inputs:
                if w not in wires:
                    raise ValueError(f"gate '{gate.name}' input '{w}' is not a wire of the circuit")
        for w, p in list(self.line_failure.items()) + [("default", self.default_line_failure)]:
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"line failure probability for '{w}' must be in [0, 1]")
            if w != "default" and w not in wires:
                raise ValueError(f"line failure given for unknown wire '{w}'")
        self.gate_order()  # raises on cycles

    @property
    def wires(self) -> list[str]:
        return list(self.primary_inputs) + [g.name for g in self.gates]

    def gate(self, name: str) -> Gate:
        try:
            return next(g for g in self.gates if g.name == name)
        except StopIteration:
            raise KeyError(f"unknown gate '{name}'") from None

    def line_failure_of(self, wire: str) -> float:
        return self.line_failure.get(wire, self.default_line_failure)

    def gate_order(self) -> list[Gate]:
        """Get the gates with every gate after the gates that drive it."""
        order = sorted_topologically(
            self.wires, [(w, g.name) for g in self.gates for w in g.inputs]
        )
        return [self.gate(n) for n in order if n not in self.primary_inputs]


@typechecked
@dc.dataclass(frozen=True)
class DeviceFailure:
    """A two-state device fault: with `probability` the output is stuck at `failed_state`."""

    probability: float
    failed_state: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.probability <= 1.0:
            raise ValueError("device failure probability must be in [0, 1]")
        if self.failed_state not in (0, 1):
            raise ValueError(f"failed state must be 0 or 1, got {self.failed_state}")


@typechecked
@dc.dataclass(frozen=True)
class FaultModel:
    """Where failed lines land, and which devices can fail."""

    line_fault_state: int = 0
    device_failure: dict[str, DeviceFailure] = dc.field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.line_fault_state not in (0, 1):
            raise ValueError(f"line fault state must be 0 or 1, got {self.line_fault_state}")


def device_variable_name(gate: str) -> str:
    return f"{gate}{DEVICE_SUFFIX}"


# -----------------------------------------------------------------------------


def extend_with_device_failure(
    spec: NoisyGateSpec, failure: DeviceFailure
) -> tuple[NodeSpec, NoisyGateSpec]:
    """Add a failure input as the gate's last parent.

    Returns the failure variable's root node (marginal (1 - p, p)) and
    the extended gate, whose new line never fails.
    """
    fvar = Variable(device_variable_name(spec.output.name), 2, DEVICE_STATES)
    root = NodeSpec.root(fvar, [1.0 - failure.probability, failure.probability])
    extended = NoisyGateSpec(
        inputs=spec.inputs + (fvar,),
        inhibitors=spec.inhibitors + (InhibitorVector((0.0, 0.0)),),
        function=gates.DeviceFailureFunction(spec.function, failure.failed_state),
        output=spec.output,
    )
    return root, extended


def build_circuit_model(
    c: Circuit,
    fm: FaultModel | None = None,
    *,
    input_marginals: dict[str, Sequence[float]] | None = None,
    budget: int | None = None,
) -> CompiledNetwork:
    """Build and compile the diagnostic network (primary inputs default to uniform)."""
    if fm is None:
        fm = FaultModel()
    input_marginals = input_marginals or {}
    for name in list(fm.device_failure) + list(input_marginals):
        if name not in c.wires:
            raise ValueError(f"'{name}' is not a wire of the circuit")
    for name in input_marginals:
        if name not in c.primary_inputs:
            raise ValueError(f"'{name}' is not a primary input, only primary inputs have marginals")

    variables = {w: Variable.boolean(w) for w in c.wires}
    nodes = [
        NodeSpec.root(variables[w], input_marginals.get(w, (0.5, 0.5)))
        for w in c.primary_inputs
    ]
    for gate in c.gate_order():
        spec = NoisyGateSpec(
            inputs=tuple(variables[w] for w in gate.inputs),
            inhibitors=tuple(
                InhibitorVector.failing_at(2, fm.line_fault_state, c.line_failure_of(w))
                for w in gate.inputs
            ),
            function=gate.function(),
            output=variables[gate.name],
        )
        if failure := fm.device_failure.get(gate.name):
            root, spec = extend_with_device_failure(spec, failure)
            nodes.append(root)
        nodes.append(NodeSpec.noisy(spec))

    LOGGER.debug(
        f"circuit model: {len(c.primary_inputs)} input(s), {len(c.gates)} gate(s), "
        f"{len(fm.device_failure)} failing device(s)"
    )
    return compile_network(Network(tuple(nodes)), budget=budget)


def device_variables(net: Network | CompiledNetwork) -> list[str]:
    """Get the names of every device-failure variable."""
    if isinstance(net, CompiledNetwork):
        net = net.network
    found = []
    for node in net:
        if isinstance(node.backing, NoisyGate) and isinstance(
            node.backing.spec.function, gates.DeviceFailureFunction
        ):
            found.append(node.parents[-1].name)
    return found


def diagnose(
    net: CompiledNetwork,
    e: Evidence,
    targets: Sequence[str] = (),
) -> MarginalSet:
    """Get posteriors over the targets and every device-failure variable.

    With no targets, every wire and device variable is reported.
    """
    if targets:
        wanted = list(targets) + [d for d in device_variables(net) if d not in targets]
    else:
        wanted = list(net.network.names)
    return eliminate(Query(net, e, tuple(wanted)))
