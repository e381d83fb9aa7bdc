"""Brute-force reference answers.

Everything here is exponential and written as plain loops over explicit
states, with no factor algebra; it shares no code with the compilers or
the elimination engine it is used to check.
"""

import dataclasses as dc
import itertools
import logging
from typing import Sequence

import numpy as np
from typeguard import typechecked

from .config import ENV, EVIDENCE_UNDERFLOW
from .exceptions import BudgetExceededException, ImpossibleEvidenceException
from .model.schema import Evidence, ExplicitCPT, Factor, Network, NoisyGate, NoisyGateSpec, Variable
from .toolkits.diagnosis import Circuit, FaultModel, device_variable_name
from .toolkits.reliability import LinkGraph

LOGGER = logging.getLogger(__name__)


def _product(cardinalities: Sequence[int]) -> int:
    size = 1
    for m in cardinalities:
        size *= m
    return size


def _all_states(cardinalities: Sequence[int]) -> list[tuple[int, ...]]:
    # first variable slowest, same as the canonical layout
    return list(itertools.product(*(range(m) for m in cardinalities)))


# -----------------------------------------------------------------------------
# gates


def brute_force_cpt(spec: NoisyGateSpec, budget: int | None = None) -> Factor:
    """Evaluate every (u, x) cell independently by scanning all line outputs u'."""
    if budget is None:
        budget = ENV.ENUMERATION_BUDGET
    cards = [v.cardinality for v in spec.inputs]
    if (size := _product(cards)) > budget:
        raise BudgetExceededException("brute-force compilation", size, budget)

    inhibitors = [list(inh.probs) for inh in spec.inhibitors]
    nofails = [1.0 - sum(probs) for probs in inhibitors]

    def line_probability(i: int, u_i: int, passed: int) -> float:
        p = inhibitors[i][passed]
        if passed == u_i:
            p += nofails[i]
        return p

    states = _all_states(cards)
    table = []
    for u in states:
        for x in range(spec.output.cardinality):
            cell = 0.0
            for u_passed in states:
                if spec.function.eval(u_passed) != x:
                    continue
                p = 1.0
                for i in range(len(cards)):
                    p *= line_probability(i, u[i], u_passed[i])
                cell += p
            table.append(cell)
    return Factor(spec.inputs + (spec.output,), np.array(table))


# -----------------------------------------------------------------------------
# networks


@typechecked
@dc.dataclass(frozen=True, eq=False)
class JointTable:
    """The full joint over every variable of a network, in canonical layout."""

    variables: tuple[Variable, ...]
    table: np.ndarray

    def marginal(self, name: str) -> np.ndarray:
        axis = [v.name for v in self.variables].index(name)
        out = np.zeros(self.variables[axis].cardinality)
        for state, p in zip(_all_states([v.cardinality for v in self.variables]), self.table):
            out[state[axis]] += p
        return out


def build_joint(
    net: Network,
    evidence: Evidence | None = None,
    *,
    max_entries: int | None = None,
    budget: int | None = None,
) -> JointTable:
    """Multiply every CPT entry by entry, zeroing states that disagree with the evidence."""
    if max_entries is None:
        max_entries = ENV.JOINT_ENUMERATION_MAX
    variables = tuple(node.variable for node in net)
    cards = [v.cardinality for v in variables]
    if (size := _product(cards)) > max_entries:
        raise BudgetExceededException("joint enumeration", size, max_entries)
    position = {v.name: i for i, v in enumerate(variables)}
    assignments = evidence.assignments if evidence else {}

    # per node: flat CPT plus the joint positions of [parents..., child]
    plans = []
    for node in net:
        match node.backing:
            case ExplicitCPT(factor=factor):
                cpt = factor
            case NoisyGate(spec=spec):
                cpt = brute_force_cpt(spec, budget)
        plans.append(
            (
                list(cpt.table),
                [position[v.name] for v in cpt.variables],
                [v.cardinality for v in cpt.variables],
            )
        )

    table = []
    for state in _all_states(cards):
        if any(state[position[name]] != j for name, j in assignments.items()):
            table.append(0.0)
            continue
        p = 1.0
        for cpt_table, positions, cpt_cards in plans:
            offset = 0
            for pos, m in zip(positions, cpt_cards):
                offset = offset * m + state[pos]
            p *= cpt_table[offset]
        table.append(p)
    return JointTable(variables, np.array(table))


def brute_force_marginal(
    net: Network,
    e: Evidence,
    target: str,
    *,
    max_entries: int | None = None,
) -> np.ndarray:
    """Get P(target | e) from the explicit full joint."""
    marginal = build_joint(net, e, max_entries=max_entries).marginal(target)
    total = float(marginal.sum())
    if not total > EVIDENCE_UNDERFLOW:
        raise ImpossibleEvidenceException(f"P(E) = {total:.3g}")
    return marginal / total


# -----------------------------------------------------------------------------
# link graphs


@typechecked
@dc.dataclass(frozen=True)
class LinkStateResult:
    """Exact answers from enumerating every up/down link configuration."""

    connectivity: float
    histogram: tuple[float, ...]  # P(k working source->target paths), k = 0..n_paths


def _count_paths(adjacency: dict[str, list[str]], source: str, target: str) -> int:
    memo: dict[str, int] = {}

    def walk(node: str) -> int:
        if node == target:
            return 1
        if node not in memo:
            memo[node] = sum(walk(child) for child in adjacency.get(node, []))
        return memo[node]

    return walk(source)


def enumerate_link_states(g: LinkGraph, max_links: int | None = None) -> LinkStateResult:
    """Sum over all 2^L link configurations, counting live paths in each."""
    if max_links is None:
        max_links = ENV.LINK_ENUMERATION_MAX_LINKS
    links = list(g.links)
    if len(links) > max_links:
        raise BudgetExceededException("link-state enumeration", len(links), max_links)

    all_up: dict[str, list[str]] = {}
    for lk in links:
        all_up.setdefault(lk.parent, []).append(lk.child)
    n_paths = _count_paths(all_up, g.source, g.target)

    histogram = [0.0] * (n_paths + 1)
    for config in itertools.product((False, True), repeat=len(links)):
        p = 1.0
        alive: dict[str, list[str]] = {}
        for up, lk in zip(config, links):
            if up:
                p *= 1.0 - lk.failure_probability
                alive.setdefault(lk.parent, []).append(lk.child)
            else:
                p *= lk.failure_probability
        histogram[_count_paths(alive, g.source, g.target)] += p

    LOGGER.debug(f"enumerated {2 ** len(links)} link configurations, {n_paths} path(s) at most")
    return LinkStateResult(connectivity=sum(histogram[1:]), histogram=tuple(histogram))


# -----------------------------------------------------------------------------
# circuits


def _gate_output(kind: str, table: Sequence[int] | None, values: list[int]) -> int:
    ones = sum(values)
    match kind:
        case "and":
            out = ones == len(values)
        case "or":
            out = ones > 0
        case "nand":
            out = ones != len(values)
        case "nor":
            out = ones == 0
        case "xor":
            out = ones % 2 == 1
        case "xnor":
            out = ones % 2 == 0
        case "not":
            out = values[0] == 0
        case "buf":
            out = values[0] == 1
        case "truth_table":
            offset = 0
            for v in values:
                offset = offset * 2 + v
            return table[offset]  # type: ignore[index]
        case _:
            raise ValueError(f"unknown gate kind '{kind}'")
    return int(out)


def enumerate_fault_states(
    circuit: Circuit,
    fault_model: FaultModel,
    evidence: dict[str, int],
    target: str,
    *,
    input_marginals: dict[str, Sequence[float]] | None = None,
    max_events: int | None = None,
) -> np.ndarray:
    """Get P(target | evidence) by simulating every input, line and device combination.

    `target` and the evidence keys may name wires or device-failure
    variables (`<gate>_f`, state 1 is failed).
    """
    if max_events is None:
        max_events = ENV.LINK_ENUMERATION_MAX_LINKS
    input_marginals = input_marginals or {}
    ordered = circuit.gate_order()
    branches = [(g.name, w) for g in ordered for w in g.inputs]
    devices = [g.name for g in ordered if g.name in fault_model.device_failure]
    n_events = len(circuit.primary_inputs) + len(branches) + len(devices)
    if n_events > max_events:
        raise BudgetExceededException("fault-state enumeration", n_events, max_events)

    out = np.zeros(2)
    for inputs in itertools.product((0, 1), repeat=len(circuit.primary_inputs)):
        p_inputs = 1.0
        for name, v in zip(circuit.primary_inputs, inputs):
            p_inputs *= input_marginals.get(name, (0.5, 0.5))[v]
        for broken in itertools.product((False, True), repeat=len(branches)):
            p_lines = p_inputs
            for (_, w), b in zip(branches, broken):
                q = circuit.line_failure_of(w)
                p_lines *= q if b else 1.0 - q
            for failed in itertools.product((0, 1), repeat=len(devices)):
                p = p_lines
                values: dict[str, int] = dict(zip(circuit.primary_inputs, inputs))
                for name, f in zip(devices, failed):
                    q = fault_model.device_failure[name].probability
                    p *= q if f else 1.0 - q
                    values[device_variable_name(name)] = f
                if p == 0.0:
                    continue

                is_broken = dict(zip(branches, broken))
                for g in ordered:
                    seen = [
                        fault_model.line_fault_state if is_broken[(g.name, w)] else values[w]
                        for w in g.inputs
                    ]
                    if values.get(device_variable_name(g.name)) == 1:
                        values[g.name] = fault_model.device_failure[g.name].failed_state
                    else:
                        values[g.name] = _gate_output(g.kind, g.table, seen)

                if all(values[name] == j for name, j in evidence.items()):
                    out[values[target]] += p

    total = float(out.sum())
    if not total > EVIDENCE_UNDERFLOW:
        raise ImpossibleEvidenceException(f"P(E) = {total:.3g}")
    return out / total
