"""Compile noisy gates into full conditional probability tables.

Each input line U_i passes through a failure device before reaching the
gate function F: with probability P_i^inh(j) the line is stuck at state
j, otherwise (P_i^nofail) it passes its input through. The compiled
CPT marginalizes the line outputs U'_i away:

    P(x | u) = sum over {u' | F(u') = x} of prod_i P_i(u'_i | u_i)
"""

import dataclasses as dc
import logging
from functools import reduce
from typing import Sequence

import numpy as np
from typeguard import typechecked

from . import gates
from .model.schema import (
    ExplicitCPT,
    Factor,
    InhibitorVector,
    Network,
    NoisyGate,
    NoisyGateSpec,
    Variable,
)
from .model.utils import joint_state_matrix, n_joint_states

LOGGER = logging.getLogger(__name__)


PATH_BOOLEAN_NOISY_OR = "boolean_noisy_or"
PATH_NARY_BOOLEAN_OUTPUT = "nary_boolean_output"
PATH_GENERAL = "general"


@dc.dataclass
class CompilationStats:
    """Loop counters filled in by a compiler (pass one in to instrument it)."""

    path: str = ""
    parent_passes: int = 0
    inner_iterations: int = 0


# -----------------------------------------------------------------------------
# line failure devices


def nofail_probability(inh: InhibitorVector) -> float:
    """Get the probability that the line passes its input through."""
    return max(0.0, 1.0 - sum(inh.probs))


def line_matrix(inh: InhibitorVector) -> np.ndarray:
    """Get the (m, m) array whose row u is P(U'_i | U_i = u)."""
    probs = np.asarray(inh.probs, dtype=np.float64)
    return np.tile(probs, (probs.size, 1)) + nofail_probability(inh) * np.eye(probs.size)


def line_distribution(inh: InhibitorVector, variable: Variable | None = None) -> Factor:
    """Get P(U'_i | U_i) as a factor over [U_i, U'_i]."""
    if variable is None:
        variable = Variable("U", len(inh))
    elif variable.cardinality != len(inh):
        raise ValueError(f"'{variable.name}' has {variable.cardinality} states, inhibitors have {len(inh)}")
    passed = Variable(f"{variable.name}'", variable.cardinality, variable.state_labels)
    return Factor((variable, passed), line_matrix(inh))


# -----------------------------------------------------------------------------
# compilers


def _as_cpt(spec: NoisyGateSpec, table: np.ndarray) -> Factor:
    return Factor(spec.inputs + (spec.output,), table)


def compile_general(
    spec: NoisyGateSpec,
    *,
    budget: int | None = None,
    use_invert: bool = False,
    stats: CompilationStats | None = None,
) -> Factor:
    """Compile any noisy gate, one parent configuration at a time.

    For each parent configuration u, the row P(u' | u) over every line
    output u' (canonical order) is the Kronecker product of the per-line
    rows, and each entry is accumulated into the cell of F(u'). With
    `use_invert`, the row is instead summed over each output's preimage.
    """
    if stats is None:
        stats = CompilationStats()
    stats.path = PATH_GENERAL

    cards = spec.input_cardinalities
    n_states = gates.check_budget("compilation", cards, budget)
    m_x = spec.output.cardinality
    lines = [line_matrix(inh) for inh in spec.inhibitors]

    preimages: list[np.ndarray] | None = None
    f_out: np.ndarray | None = None
    if use_invert:
        preimages = []
        for x in range(m_x):
            pre = sorted(gates.invert(spec.function, x, budget))
            offsets = np.ravel_multi_index(tuple(np.array(pre).T), cards) if pre else np.zeros(0, dtype=np.int64)
            preimages.append(np.asarray(offsets, dtype=np.int64))
    else:
        f_out = spec.function.outputs(budget)

    table = np.zeros((n_states, m_x))
    for k, u in enumerate(joint_state_matrix(cards)):
        row = reduce(np.kron, (line[j] for line, j in zip(lines, u)))
        if preimages is not None:
            table[k] = [row[pre].sum() for pre in preimages]
            stats.inner_iterations += sum(pre.size for pre in preimages)
        else:
            table[k] = np.bincount(f_out, weights=row, minlength=m_x)  # type: ignore[arg-type]
            stats.inner_iterations += row.size
        stats.parent_passes += 1

    return _as_cpt(spec, table)


def _is_or_like(f: gates.GateFunction) -> bool:
    # the weighted average over Boolean inputs and output is Boolean OR
    return isinstance(f, (gates.BooleanOr, gates.WeightedAverage))


def is_boolean_noisy_or(spec: NoisyGateSpec) -> bool:
    """All-Boolean OR gate whose lines can only fail at false."""
    return (
        spec.output.cardinality == 2
        and all(v.cardinality == 2 for v in spec.inputs)
        and _is_or_like(spec.function)
        and all(inh.probs[1] == 0.0 for inh in spec.inhibitors)
    )


def is_nary_boolean_output(spec: NoisyGateSpec) -> bool:
    """Boolean-output weighted average whose lines can only fail at state 0."""
    return (
        spec.output.cardinality == 2
        and _is_or_like(spec.function)
        and all(not any(inh.probs[1:]) for inh in spec.inhibitors)
    )


def _compile_stuck_at_zero(
    spec: NoisyGateSpec, nonzero_inputs_only: bool, stats: CompilationStats
) -> Factor:
    q = np.array([inh.probs[0] for inh in spec.inhibitors])
    parents = joint_state_matrix(spec.input_cardinalities)
    table = np.zeros((parents.shape[0], 2))
    for k, u in enumerate(parents):
        active = u != 0 if nonzero_inputs_only else u == 1
        p_false = float(np.prod(q[active]))
        table[k] = (p_false, 1.0 - p_false)
        stats.parent_passes += 1
        stats.inner_iterations += q.size
    return _as_cpt(spec, table)


def compile_boolean_noisy_or(
    spec: NoisyGateSpec, *, stats: CompilationStats | None = None
) -> Factor:
    """Compile the Boolean noisy-or: P(false | u) = prod over true inputs of q_i."""
    if not is_boolean_noisy_or(spec):
        raise ValueError(
            f"'{spec.output.name}' is not a Boolean noisy-or "
            "(needs Boolean variables, an OR function and no inhibition of the true state)"
        )
    if stats is None:
        stats = CompilationStats()
    stats.path = PATH_BOOLEAN_NOISY_OR
    return _compile_stuck_at_zero(spec, nonzero_inputs_only=False, stats=stats)


def compile_nary_boolean_output(
    spec: NoisyGateSpec, *, stats: CompilationStats | None = None
) -> Factor:
    """Compile n-ary inputs into a Boolean output: P(false | u) = prod over nonzero inputs of q_i.

    A line lands on 0 with probability q_i when its input is nonzero (and
    always when it is zero), and the weighted average is 0 only when every
    input is 0.
    """
    if not is_nary_boolean_output(spec):
        raise ValueError(
            f"'{spec.output.name}' does not have the n-ary/Boolean-output shape "
            "(needs a Boolean output, a weighted-average function and inhibition only at state 0)"
        )
    if stats is None:
        stats = CompilationStats()
    stats.path = PATH_NARY_BOOLEAN_OUTPUT
    return _compile_stuck_at_zero(spec, nonzero_inputs_only=True, stats=stats)


def choose_path(spec: NoisyGateSpec) -> str:
    """Get the first compiler whose preconditions hold."""
    if is_boolean_noisy_or(spec):
        return PATH_BOOLEAN_NOISY_OR
    if is_nary_boolean_output(spec):
        return PATH_NARY_BOOLEAN_OUTPUT
    return PATH_GENERAL


def choose_compiler(
    spec: NoisyGateSpec,
    *,
    budget: int | None = None,
    stats: CompilationStats | None = None,
) -> Factor:
    """Compile with the cheapest applicable algorithm."""
    path = choose_path(spec)
    LOGGER.debug(f"compiling '{spec.output.name}' via {path}")
    match path:
        case "boolean_noisy_or":
            return compile_boolean_noisy_or(spec, stats=stats)
        case "nary_boolean_output":
            return compile_nary_boolean_output(spec, stats=stats)
        case _:
            return compile_general(spec, budget=budget, stats=stats)


# -----------------------------------------------------------------------------
# analysis


@typechecked
@dc.dataclass(frozen=True)
class PositivityReport:
    """Whether a compiled gate can be (and is) strictly positive."""

    onto: bool
    all_inhibitors_positive: bool
    table_strictly_positive: bool


def check_strict_positivity(spec: NoisyGateSpec, *, budget: int | None = None) -> PositivityReport:
    """Check the necessary (onto) and sufficient (positive inhibitors) conditions."""
    report = PositivityReport(
        onto=gates.check_onto(spec.function, budget),
        all_inhibitors_positive=all(p > 0 for inh in spec.inhibitors for p in inh.probs),
        table_strictly_positive=bool(np.all(choose_compiler(spec, budget=budget).table > 0)),
    )
    LOGGER.debug(f"positivity of '{spec.output.name}': {report}")
    return report


@typechecked
@dc.dataclass(frozen=True)
class StorageReport:
    """Parameters stored by the noisy form versus the full table."""

    representation: str
    parametric_entries: int
    table_entries: int


def storage_accounting(spec: NoisyGateSpec) -> StorageReport:
    """Count stored numbers: one q_i per input on the fast paths, every inhibitor otherwise."""
    path = choose_path(spec)
    if path == PATH_GENERAL:
        parametric = sum(spec.input_cardinalities)
    else:
        parametric = len(spec.inputs)
    return StorageReport(
        representation=path,
        parametric_entries=parametric,
        table_entries=spec.output.cardinality * n_joint_states(spec.input_cardinalities),
    )


# -----------------------------------------------------------------------------
# networks


@dc.dataclass(frozen=True)
class CompiledNetwork:
    """A network together with an explicit CPT for every node."""

    network: Network
    cpts: dict[str, Factor]

    def factors(self) -> list[Factor]:
        return [self.cpts[name] for name in self.network.names]


def compile_network(
    net: Network,
    *,
    budget: int | None = None,
    previous: CompiledNetwork | None = None,
) -> CompiledNetwork:
    """Compile every node; nodes shared with `previous` reuse its CPTs."""
    cpts: dict[str, Factor] = {}
    n_reused = 0
    for node in net:
        if previous and node.name in previous.network and previous.network.node(node.name) is node:
            cpts[node.name] = previous.cpts[node.name]
            n_reused += 1
            continue
        match node.backing:
            case ExplicitCPT(factor=factor):
                cpts[node.name] = factor
            case NoisyGate(spec=spec):
                cpts[node.name] = choose_compiler(spec, budget=budget)
    LOGGER.debug(f"compiled {len(cpts) - n_reused} node(s), reused {n_reused}")
    return CompiledNetwork(net, cpts)


def boolean_noisy_or_spec(
    inputs: Sequence[Variable], output: Variable, q: Sequence[float]
) -> NoisyGateSpec:
    """Build a Boolean noisy-or gate from one inhibitor probability per input."""
    if len(q) != len(inputs):
        raise ValueError(f"need one inhibitor probability per input, got {len(q)} for {len(inputs)}")
    return NoisyGateSpec(
        inputs=tuple(inputs),
        inhibitors=tuple(InhibitorVector((float(qi), 0.0)) for qi in q),
        function=gates.BooleanOr.from_cardinalities([v.cardinality for v in inputs], output.cardinality),
        output=output,
    )
