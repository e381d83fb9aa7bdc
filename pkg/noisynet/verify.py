"""Cross-check the optimized paths against the brute-force oracle."""

import dataclasses as dc
import logging
from typing import Any, Callable, Sequence

import numpy as np
from typeguard import typechecked

from . import oracle, sampling
from .compiler import check_strict_positivity, choose_compiler, compile_general
from .config import ENV
from .documents import NetworkDocument, to_circuit, to_link_graph, to_network
from .exceptions import BudgetExceededException, DomainException, UnreachableTargetException
from .inference import Query, eliminate
from .model.graph import validate_network
from .model.schema import Evidence, NoisyGate
from .toolkits import diagnosis, reliability

LOGGER = logging.getLogger(__name__)


@typechecked
@dc.dataclass(frozen=True)
class Check:
    """One comparison and its worst absolute deviation."""

    name: str
    max_abs_deviation: float
    tolerance: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.max_abs_deviation <= self.tolerance

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "name": self.name,
            "passed": self.passed,
            "max_abs_deviation": self.max_abs_deviation,
            "tolerance": self.tolerance,
        }
        if self.detail:
            out["detail"] = self.detail
        return out


@typechecked
@dc.dataclass(frozen=True)
class VerifyReport:
    seed: int
    trials: int
    checks: tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "seed": self.seed,
            "trials": self.trials,
            "checks": [c.to_dict() for c in self.checks],
        }


def _deviation(a: Any, b: Any) -> float:
    a, b = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        return float("inf")
    return float(np.max(np.abs(a - b))) if a.size else 0.0


# -----------------------------------------------------------------------------
# documents


def _check_network(
    label: str, doc: NetworkDocument, budget: int | None, cpt_tol: float, inference_tol: float
) -> list[Check]:
    net = to_network(doc)
    report = validate_network(net)
    if not report.ok:
        return [
            Check(f"{label}:validate:{v.node}", 1.0, 0.0, f"{v.kind}: {v.message}")
            for v in report.violations
        ]
    checks = [Check(f"{label}:validate", 0.0, 0.0)]

    for node in net:
        if isinstance(node.backing, NoisyGate):
            spec = node.backing.spec
            checks.append(
                Check(
                    f"{label}:cpt:{node.name}",
                    _deviation(
                        choose_compiler(spec, budget=budget).table,
                        oracle.brute_force_cpt(spec, budget).table,
                    ),
                    cpt_tol,
                )
            )

    try:
        marginals = eliminate(Query(net), budget=budget)
        worst = max(
            _deviation(marginals[name], oracle.brute_force_marginal(net, Evidence(), name))
            for name in net.names
        )
    except BudgetExceededException as e:
        LOGGER.info(f"{label}: skipping marginal check ({e})")
    else:
        checks.append(Check(f"{label}:marginals", worst, inference_tol))
    return checks


def _check_graph(label: str, doc: NetworkDocument, budget: int | None, tol: float) -> list[Check]:
    g = to_link_graph(doc)
    try:
        expected = oracle.enumerate_link_states(g)
    except BudgetExceededException as e:
        LOGGER.info(f"{label}: skipping reliability checks ({e})")
        return []

    try:
        net = reliability.build_connectivity_model(g, budget=budget)
        connectivity = reliability.query_connectivity(net, g.source, g.target)
    except UnreachableTargetException:
        connectivity = 0.0
        distribution = None
    else:
        distribution = reliability.query_path_distribution(
            reliability.build_path_count_model(g, budget=budget), g.source, g.target
        )

    checks = [Check(f"{label}:connectivity", abs(connectivity - expected.connectivity), tol)]
    if distribution is not None:
        checks.append(
            Check(f"{label}:path_distribution", _deviation(distribution, expected.histogram), tol)
        )
    return checks


def _check_circuit(label: str, doc: NetworkDocument, budget: int | None, tol: float) -> list[Check]:
    circuit, fault_model, marginals = to_circuit(doc)
    net = diagnosis.build_circuit_model(
        circuit, fault_model, input_marginals=marginals, budget=budget
    )
    posteriors = diagnosis.diagnose(net, Evidence())
    try:
        worst = max(
            _deviation(
                posteriors[name],
                oracle.enumerate_fault_states(
                    circuit, fault_model, {}, name, input_marginals=marginals
                ),
            )
            for name in posteriors
        )
    except BudgetExceededException as e:
        LOGGER.info(f"{label}: skipping diagnosis check ({e})")
        return []
    return [Check(f"{label}:diagnosis", worst, tol)]


def check_document(
    label: str,
    doc: NetworkDocument,
    *,
    budget: int | None = None,
    tolerance: float | None = None,
) -> list[Check]:
    """Run every check that applies to the document's sections."""
    cpt_tol = ENV.EQUIVALENCE_TOLERANCE if tolerance is None else tolerance
    inference_tol = ENV.NORMALIZATION_TOLERANCE if tolerance is None else tolerance

    checks = []
    if doc.nodes:
        checks += _check_network(label, doc, budget, cpt_tol, inference_tol)
    if doc.graph:
        checks += _check_graph(label, doc, budget, inference_tol)
    if doc.circuit:
        checks += _check_circuit(label, doc, budget, inference_tol)
    return checks


# -----------------------------------------------------------------------------
# random specs


def _worst_over(trials: int, compare: Callable[[], float]) -> float:
    return max((compare() for _ in range(trials)), default=0.0)


def check_random_specs(
    trials: int,
    seed: int,
    *,
    budget: int | None = None,
    tolerance: float | None = None,
) -> list[Check]:
    """Compare compilers on seeded random gates, and count positivity counterexamples."""
    tol = ENV.EQUIVALENCE_TOLERANCE if tolerance is None else tolerance
    rng = np.random.default_rng(seed)

    def general_vs_oracle() -> float:
        spec = sampling.random_gate_spec(rng)
        general = compile_general(spec, budget=budget).table
        return max(
            _deviation(general, oracle.brute_force_cpt(spec, budget).table),
            _deviation(general, compile_general(spec, budget=budget, use_invert=True).table),
        )

    def boolean_fast_path() -> float:
        spec = sampling.random_boolean_noisy_or_spec(rng)
        return _deviation(choose_compiler(spec).table, compile_general(spec, budget=budget).table)

    def nary_fast_path() -> float:
        spec = sampling.random_nary_boolean_output_spec(rng)
        return _deviation(choose_compiler(spec).table, compile_general(spec, budget=budget).table)

    def positivity_counterexample() -> float:
        report = check_strict_positivity(sampling.random_gate_spec(rng), budget=budget)
        sufficient = not (report.onto and report.all_inhibitors_positive) or report.table_strictly_positive
        necessary = not report.table_strictly_positive or report.onto
        return 0.0 if sufficient and necessary else 1.0

    return [
        Check("random:general_vs_oracle", _worst_over(trials, general_vs_oracle), tol),
        Check("random:boolean_noisy_or", _worst_over(trials, boolean_fast_path), tol),
        Check("random:nary_boolean_output", _worst_over(trials, nary_fast_path), tol),
        Check("random:positivity", _worst_over(trials, positivity_counterexample), 0.0),
    ]


def run_verify(
    documents: Sequence[tuple[str, NetworkDocument]],
    trials: int,
    seed: int,
    *,
    budget: int | None = None,
    tolerance: float | None = None,
) -> VerifyReport:
    """Check every document, then `trials` random specs of each kind."""
    checks: list[Check] = []
    for label, doc in documents:
        LOGGER.info(f"verifying {label}")
        try:
            checks += check_document(label, doc, budget=budget, tolerance=tolerance)
        except DomainException as e:
            checks.append(Check(f"{label}:error", 1.0, 0.0, str(e)))
    checks += check_random_specs(trials, seed, budget=budget, tolerance=tolerance)

    for c in checks:
        if not c.passed:
            LOGGER.warning(f"check failed: {c.name} deviates by {c.max_abs_deviation:.3g} {c.detail}")
    return VerifyReport(seed, trials, tuple(checks))
