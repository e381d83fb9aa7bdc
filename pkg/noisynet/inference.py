"""Exact posterior marginals by variable elimination."""

import dataclasses as dc
import logging
from functools import reduce
from typing import Iterator, Sequence

import numpy as np
from typeguard import typechecked

from .compiler import CompiledNetwork, compile_network
from .config import EVIDENCE_UNDERFLOW, QUERY_SIGNIFICANT_DIGITS
from .exceptions import ImpossibleEvidenceException
from .model.schema import Evidence, Factor, Network, Variable

LOGGER = logging.getLogger(__name__)


# -----------------------------------------------------------------------------
# factor algebra


def _aligned(f: Factor, union: Sequence[Variable]) -> np.ndarray:
    """View `f` with one axis per `union` variable (size 1 where absent)."""
    names = f.names
    present = [v.name for v in union if v.name in names]
    arr = np.transpose(f.array(), [names.index(n) for n in present])
    return arr.reshape([v.cardinality if v.name in names else 1 for v in union])


def factor_product(a: Factor, b: Factor) -> Factor:
    """Multiply two factors; the result is over a's variables then b's new ones."""
    a_vars = {v.name: v for v in a.variables}
    for v in b.variables:
        if v.name in a_vars and a_vars[v.name].cardinality != v.cardinality:
            raise ValueError(
                f"cannot multiply factors: '{v.name}' has {a_vars[v.name].cardinality} "
                f"states in one and {v.cardinality} in the other"
            )
    union = a.variables + tuple(v for v in b.variables if v.name not in a_vars)
    return Factor(union, _aligned(a, union) * _aligned(b, union))


def factor_marginalize(f: Factor, name: str) -> Factor:
    """Sum `name` out of `f`."""
    if name not in f.names:
        raise KeyError(f"'{name}' is not in the factor over {list(f.names)}")
    axis = f.names.index(name)
    return Factor(
        tuple(v for v in f.variables if v.name != name),
        f.array().sum(axis=axis),
    )


def apply_evidence(f: Factor, e: Evidence) -> Factor:
    """Zero the entries of `f` that disagree with the evidence."""
    observed = [(i, v, e.assignments[v.name]) for i, v in enumerate(f.variables) if v.name in e]
    if not observed:
        return f
    arr = f.array()
    for axis, var, j in observed:
        shape = [1] * len(f.variables)
        shape[axis] = var.cardinality
        arr = arr * (np.arange(var.cardinality) == j).reshape(shape)
    return Factor(f.variables, arr)


# -----------------------------------------------------------------------------


@typechecked
@dc.dataclass(frozen=True, eq=False)
class Query:
    """Targets to get posteriors for, given evidence (no targets means all)."""

    network: Network | CompiledNetwork
    evidence: Evidence = dc.field(default_factory=Evidence)
    targets: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        net = self.base_network
        for name in self.targets:
            net.node(name)
        self.evidence.check(net)

    @property
    def base_network(self) -> Network:
        if isinstance(self.network, CompiledNetwork):
            return self.network.network
        return self.network


@typechecked
@dc.dataclass(frozen=True, eq=False)
class MarginalSet:
    """Normalized posterior vectors keyed by variable name."""

    marginals: dict[str, np.ndarray]

    def __getitem__(self, name: str) -> np.ndarray:
        return self.marginals[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self.marginals)

    def to_dict(self, significant_digits: int = QUERY_SIGNIFICANT_DIGITS) -> dict[str, list[float]]:
        """Get plain lists, rounded for display."""
        return {
            name: [float(f"{p:.{significant_digits}g}") for p in vec]
            for name, vec in self.marginals.items()
        }


def elimination_order(factors: Sequence[Factor], keep: set[str]) -> list[str]:
    """Greedy min-degree order over every variable not in `keep` (ties by name)."""
    scopes = [set(f.names) for f in factors]
    remaining = set().union(*scopes) - keep
    order = []
    while remaining:

        def degree(v: str) -> tuple[int, str]:
            neighbors = set().union(*(s for s in scopes if v in s)) - {v}
            return len(neighbors), v

        chosen = min(remaining, key=degree)
        merged = set().union(*(s for s in scopes if chosen in s)) - {chosen}
        scopes = [s for s in scopes if chosen not in s] + [merged]
        remaining.remove(chosen)
        order.append(chosen)
    return order


def _sum_out(factors: list[Factor], order: Sequence[str]) -> Factor:
    for name in order:
        touching = [f for f in factors if name in f.names]
        if not touching:
            continue
        factors = [f for f in factors if name not in f.names]
        factors.append(factor_marginalize(reduce(factor_product, touching), name))
    return reduce(factor_product, factors, Factor.unit())


def eliminate(
    query: Query,
    *,
    order: Sequence[str] | None = None,
    budget: int | None = None,
) -> MarginalSet:
    """Get P(T | E) for every target T.

    `order` overrides the min-degree elimination order; names it omits
    are eliminated afterwards, by name.
    """
    if isinstance(query.network, CompiledNetwork):
        compiled = query.network
    else:
        compiled = compile_network(query.network, budget=budget)
    factors = [apply_evidence(f, query.evidence) for f in compiled.factors()]
    targets = query.targets or tuple(compiled.network.names)

    marginals = {}
    for target in targets:
        if order is None:
            target_order = elimination_order(factors, {target})
        else:
            hidden = set().union(*(f.names for f in factors)) - {target}
            target_order = [n for n in order if n in hidden]
            target_order += sorted(hidden - set(target_order))
        LOGGER.debug(f"eliminating for '{target}' in order {target_order}")

        result = _sum_out(list(factors), target_order)
        vec = np.array(result.table, dtype=np.float64)
        total = float(vec.sum())
        if not total > EVIDENCE_UNDERFLOW:
            raise ImpossibleEvidenceException(f"P(E) = {total:.3g}")
        marginals[target] = vec / total

    return MarginalSet(marginals)
