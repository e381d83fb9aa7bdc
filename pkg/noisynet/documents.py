"""The JSON document format shared by every command.

One document holds any of: a network (`variables` + `nodes`), a link
graph (`graph`), and a circuit (`circuit`). Flat tables use the
canonical layout, last variable fastest.
"""

import dataclasses as dc
import json
import logging
from pathlib import Path
from typing import Any, Sequence

import dacite
from dacite.exceptions import DaciteError

from . import gates
from .compiler import choose_compiler
from .exceptions import DocumentException
from .model.schema import InhibitorVector, Network, NodeSpec, NoisyGateSpec, Variable
from .toolkits.diagnosis import Circuit, DeviceFailure, FaultModel, Gate
from .toolkits.reliability import Link, LinkGraph

LOGGER = logging.getLogger(__name__)

_DACITE_CONFIG = dacite.Config(strict=True, cast=[float])


@dc.dataclass
class VariableDoc:
    name: str
    states: list[str]


@dc.dataclass
class FunctionDoc:
    kind: str  # or | weighted_average | add | truth_table
    table: list[int] | None = None


@dc.dataclass
class NoisyGateDoc:
    function: FunctionDoc
    inhibitors: list[list[float]]


@dc.dataclass
class BackingDoc:
    """Exactly one of `cpt` and `noisy_gate`."""

    cpt: list[float] | None = None
    noisy_gate: NoisyGateDoc | None = None

    def __post_init__(self) -> None:
        if (self.cpt is None) == (self.noisy_gate is None):
            raise ValueError("backing needs exactly one of 'cpt' and 'noisy_gate'")


@dc.dataclass
class NodeDoc:
    variable: str
    backing: BackingDoc
    parents: list[str] = dc.field(default_factory=list)


@dc.dataclass
class LinkDoc:
    parent: str
    child: str
    failure_probability: float


@dc.dataclass
class GraphDoc:
    nodes: list[str]
    links: list[LinkDoc]
    source: str
    target: str


@dc.dataclass
class GateDoc:
    name: str
    kind: str
    inputs: list[str]
    table: list[int] | None = None


@dc.dataclass
class DeviceFailureDoc:
    probability: float
    failed_state: int = 0


@dc.dataclass
class CircuitDoc:
    primary_inputs: list[str]
    gates: list[GateDoc]
    default_line_failure: float = 0.0
    line_failure: dict[str, float] = dc.field(default_factory=dict)
    line_fault_state: int = 0
    device_failure: dict[str, DeviceFailureDoc] = dc.field(default_factory=dict)
    input_marginals: dict[str, list[float]] = dc.field(default_factory=dict)


@dc.dataclass
class NetworkDocument:
    variables: list[VariableDoc] = dc.field(default_factory=list)
    nodes: list[NodeDoc] = dc.field(default_factory=list)
    graph: GraphDoc | None = None
    circuit: CircuitDoc | None = None


# -----------------------------------------------------------------------------
# text <-> document


def parse_document(text: str, source: str = "<document>") -> NetworkDocument:
    """Parse JSON text into a document (unknown keys are rejected)."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentException(
            f"{source}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}"
        ) from e
    if not isinstance(data, dict):
        raise DocumentException(f"{source}: top level must be an object")
    try:
        return dacite.from_dict(NetworkDocument, data, config=_DACITE_CONFIG)
    except (DaciteError, ValueError, TypeError) as e:
        raise DocumentException(f"{source}: {e}") from e


def load_document(path: Path) -> NetworkDocument:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise DocumentException(f"cannot read {path}: {e}") from e
    return parse_document(text, str(path))


def _pruned(value: Any) -> Any:
    """Like `dc.asdict()` output, minus every None."""
    if isinstance(value, dict):
        return {k: _pruned(v) for k, v in value.items() if v is not None}
    if isinstance(value, list):
        return [_pruned(v) for v in value]
    return value


def serialize_document(doc: NetworkDocument) -> str:
    """Get deterministic JSON; floats use their shortest round-trip form."""
    return json.dumps(_pruned(dc.asdict(doc)), indent=2)


# -----------------------------------------------------------------------------
# document -> model


def _gate_function(
    fdoc: FunctionDoc, cards: Sequence[int], m_x: int
) -> gates.GateFunction:
    match fdoc.kind:
        case "or":
            return gates.BooleanOr.from_cardinalities(cards, m_x)
        case "weighted_average":
            return gates.WeightedAverage(cards, m_x)
        case "add":
            return gates.IntegerAdd(cards, m_x)
        case "truth_table":
            if fdoc.table is None:
                raise ValueError("a truth_table function needs a 'table'")
            return gates.TruthTable(cards, m_x, fdoc.table)
        case other:
            raise ValueError(f"unknown function kind '{other}'")


def _variables(doc: NetworkDocument) -> dict[str, Variable]:
    variables: dict[str, Variable] = {}
    for vdoc in doc.variables:
        if vdoc.name in variables:
            raise DocumentException(f"variable '{vdoc.name}' is declared twice")
        try:
            variables[vdoc.name] = Variable(vdoc.name, len(vdoc.states), tuple(vdoc.states))
        except ValueError as e:
            raise DocumentException(str(e)) from e
    return variables


def _node(ndoc: NodeDoc, variables: dict[str, Variable]) -> NodeSpec:
    def lookup(name: str) -> Variable:
        try:
            return variables[name]
        except KeyError:
            raise DocumentException(f"node '{ndoc.variable}': undeclared variable '{name}'") from None

    var = lookup(ndoc.variable)
    parents = [lookup(p) for p in ndoc.parents]
    try:
        if ndoc.backing.cpt is not None:
            return NodeSpec.table(var, parents, ndoc.backing.cpt)
        gdoc = ndoc.backing.noisy_gate
        assert gdoc is not None
        return NodeSpec.noisy(
            NoisyGateSpec(
                inputs=tuple(parents),
                inhibitors=tuple(InhibitorVector(tuple(row)) for row in gdoc.inhibitors),
                function=_gate_function(gdoc.function, [p.cardinality for p in parents], var.cardinality),
                output=var,
            )
        )
    except (ValueError, TypeError) as e:
        raise DocumentException(f"node '{ndoc.variable}': {e}") from e


def to_network(doc: NetworkDocument) -> Network:
    """Build the network section (validity beyond shape is `validate_network()`'s job)."""
    variables = _variables(doc)
    try:
        return Network(tuple(_node(n, variables) for n in doc.nodes))
    except ValueError as e:
        raise DocumentException(str(e)) from e


def to_link_graph(doc: NetworkDocument) -> LinkGraph:
    if doc.graph is None:
        raise DocumentException("document has no 'graph' section")
    try:
        return LinkGraph(
            nodes=tuple(doc.graph.nodes),
            links=tuple(
                Link(lk.parent, lk.child, lk.failure_probability) for lk in doc.graph.links
            ),
            source=doc.graph.source,
            target=doc.graph.target,
        )
    except ValueError as e:
        raise DocumentException(f"graph: {e}") from e


def to_circuit(
    doc: NetworkDocument,
) -> tuple[Circuit, FaultModel, dict[str, list[float]]]:
    """Build the circuit section: the circuit, its fault model and any input marginals."""
    if doc.circuit is None:
        raise DocumentException("document has no 'circuit' section")
    cdoc = doc.circuit
    try:
        circuit = Circuit(
            primary_inputs=tuple(cdoc.primary_inputs),
            gates=tuple(
                Gate(g.name, g.kind, tuple(g.inputs), tuple(g.table) if g.table is not None else None)
                for g in cdoc.gates
            ),
            line_failure=dict(cdoc.line_failure),
            default_line_failure=cdoc.default_line_failure,
        )
        fault_model = FaultModel(
            line_fault_state=cdoc.line_fault_state,
            device_failure={
                name: DeviceFailure(d.probability, d.failed_state)
                for name, d in cdoc.device_failure.items()
            },
        )
    except (ValueError, TypeError) as e:
        raise DocumentException(f"circuit: {e}") from e
    return circuit, fault_model, dict(cdoc.input_marginals)


# -----------------------------------------------------------------------------


def compile_document(
    doc: NetworkDocument, node: str | None = None, *, budget: int | None = None
) -> NetworkDocument:
    """Replace every noisy gate (or only `node`'s) with its explicit CPT."""
    if node is not None and node not in {n.variable for n in doc.nodes}:
        raise DocumentException(f"unknown variable '{node}'")
    net = to_network(doc)

    compiled_nodes = []
    for ndoc in doc.nodes:
        if ndoc.backing.noisy_gate is not None and node in (None, ndoc.variable):
            spec = net.node(ndoc.variable).backing.spec  # type: ignore[union-attr]
            table = choose_compiler(spec, budget=budget).table
            LOGGER.debug(f"compiled '{ndoc.variable}' into {table.size} entries")
            ndoc = dc.replace(ndoc, backing=BackingDoc(cpt=table.tolist()))
        compiled_nodes.append(ndoc)
    return dc.replace(doc, nodes=compiled_nodes)
