"""The deterministic functions that sit behind a noisy gate.

A gate function maps one index per input (each within that input's
cardinality) to an output index. Index 0 is always the "false"/zero
state.
"""

import abc
import logging
from typing import Sequence

import numpy as np

from .config import ENV
from .exceptions import BudgetExceededException
from .model.utils import iter_joint_states, n_joint_states

LOGGER = logging.getLogger(__name__)

IndexVector = tuple[int, ...]


def check_budget(what: str, cardinalities: Sequence[int], budget: int | None) -> int:
    """Raise if enumerating `cardinalities` exceeds the budget; return the size."""
    if budget is None:
        budget = ENV.ENUMERATION_BUDGET
    size = n_joint_states(cardinalities)
    if size > budget:
        raise BudgetExceededException(what, size, budget)
    return size


# -----------------------------------------------------------------------------


class GateFunction(abc.ABC):
    """A total function from joint input states onto output states.

    Subclasses may override `invert()` to provide an exact preimage
    lookup; otherwise callers fall back to `invert_default()`.
    """

    kind = ""

    def __init__(
        self,
        input_cardinalities: Sequence[int],
        output_cardinality: int,
    ) -> None:
        if any(m < 1 for m in input_cardinalities):
            raise ValueError(f"input cardinalities must be >= 1: {input_cardinalities}")
        if output_cardinality < 1:
            raise ValueError(f"output cardinality must be >= 1: {output_cardinality}")
        self.input_cardinalities: tuple[int, ...] = tuple(int(m) for m in input_cardinalities)
        self.output_cardinality = int(output_cardinality)

    @property
    def n_inputs(self) -> int:
        return len(self.input_cardinalities)

    @abc.abstractmethod
    def eval(self, indices: IndexVector) -> int:
        """Get the output index for `indices`."""
        raise NotImplementedError()

    def invert(self, x: int, budget: int | None = None) -> frozenset[IndexVector]:
        """Get the exact set of input vectors that map to `x`."""
        raise NotImplementedError(f"{self.__class__.__name__} has no specialized inverse")

    @property
    def has_invert(self) -> bool:
        """Whether this function carries a specialized `invert()`."""
        return type(self).invert is not GateFunction.invert

    def outputs(self, budget: int | None = None) -> np.ndarray:
        """Get F over every joint input state, in canonical layout."""
        check_budget("gate enumeration", self.input_cardinalities, budget)
        return np.fromiter(
            (self.eval(u) for u in iter_joint_states(self.input_cardinalities)),
            dtype=np.int64,
            count=n_joint_states(self.input_cardinalities),
        )

    def __repr__(self) -> str:
        return (
            f"{self.__class__.__name__}("
            f"input_cardinalities={self.input_cardinalities}, "
            f"output_cardinality={self.output_cardinality})"
        )


class BooleanOr(GateFunction):
    """Boolean OR: true iff any input is true."""

    kind = "or"

    def __init__(self, n_inputs: int) -> None:
        super().__init__((2,) * n_inputs, 2)

    @staticmethod
    def from_cardinalities(
        input_cardinalities: Sequence[int], output_cardinality: int
    ) -> "BooleanOr":
        """Construct, rejecting any non-Boolean variable."""
        if any(m != 2 for m in input_cardinalities) or output_cardinality != 2:
            raise ValueError(
                f"Boolean OR needs Boolean inputs and output, got "
                f"{tuple(input_cardinalities)} -> {output_cardinality}"
            )
        return BooleanOr(len(input_cardinalities))

    def eval(self, indices: IndexVector) -> int:
        return 1 if any(indices) else 0

    def invert(self, x: int, budget: int | None = None) -> frozenset[IndexVector]:
        _check_output_index(self, x)
        all_false = (0,) * self.n_inputs
        if x == 0:
            return frozenset([all_false])
        check_budget("inversion", self.input_cardinalities, budget)
        return frozenset(u for u in iter_joint_states(self.input_cardinalities) if u != all_false)


class WeightedAverage(GateFunction):
    """Equally weighted average of the inputs' relative positions, rounded up.

    F(u) = ceil((m_x - 1) * (1/n) * sum_i j_i / (m_i - 1)), evaluated in
    exact integer arithmetic: the common denominator is n * prod(m_i - 1).
    """

    kind = "weighted_average"

    def __init__(self, input_cardinalities: Sequence[int], output_cardinality: int) -> None:
        super().__init__(input_cardinalities, output_cardinality)
        if not self.input_cardinalities:
            raise ValueError("weighted-average needs at least one input")
        if any(m == 1 for m in self.input_cardinalities):
            raise ValueError("weighted-average undefined for single-state input")
        if self.output_cardinality < 2:
            raise ValueError("weighted-average needs an output with at least 2 states")

        spans = [m - 1 for m in self.input_cardinalities]
        full = n_joint_states(spans)
        self._weights = tuple(full // s for s in spans)  # prod over k != i of (m_k - 1)
        self._denominator = self.n_inputs * full

    def eval(self, indices: IndexVector) -> int:
        numerator = (self.output_cardinality - 1) * sum(
            j * w for j, w in zip(indices, self._weights)
        )
        return -(-numerator // self._denominator)


class IntegerAdd(GateFunction):
    """Sum of the input indices (the output is sized so the sum always fits)."""

    kind = "add"

    def __init__(
        self,
        input_cardinalities: Sequence[int],
        output_cardinality: int | None = None,
    ) -> None:
        needed = 1 + sum(m - 1 for m in input_cardinalities)
        if output_cardinality is None:
            output_cardinality = needed
        elif output_cardinality != needed:
            raise ValueError(
                f"integer addition over {tuple(input_cardinalities)} needs an output "
                f"cardinality of {needed}, not {output_cardinality}"
            )
        super().__init__(input_cardinalities, output_cardinality)

    def eval(self, indices: IndexVector) -> int:
        return sum(indices)


class TruthTable(GateFunction):
    """An explicit output-index array in canonical layout."""

    kind = "truth_table"

    def __init__(
        self,
        input_cardinalities: Sequence[int],
        output_cardinality: int,
        table: Sequence[int],
    ) -> None:
        super().__init__(input_cardinalities, output_cardinality)
        if len(table) != n_joint_states(self.input_cardinalities):
            raise ValueError(
                f"truth table needs {n_joint_states(self.input_cardinalities)} entries, got {len(table)}"
            )
        if any(not 0 <= int(x) < self.output_cardinality for x in table):
            raise ValueError(f"truth table entries must be in [0, {self.output_cardinality})")
        self.table: tuple[int, ...] = tuple(int(x) for x in table)
        self._strides = tuple(
            n_joint_states(self.input_cardinalities[i + 1 :]) for i in range(self.n_inputs)
        )

    @staticmethod
    def of(f: GateFunction, budget: int | None = None) -> "TruthTable":
        """Materialize any gate function."""
        return TruthTable(f.input_cardinalities, f.output_cardinality, f.outputs(budget).tolist())

    def eval(self, indices: IndexVector) -> int:
        return self.table[sum(j * s for j, s in zip(indices, self._strides))]

    def invert(self, x: int, budget: int | None = None) -> frozenset[IndexVector]:
        check_budget("inversion", self.input_cardinalities, budget)
        return frozenset(
            u
            for u, out in zip(iter_joint_states(self.input_cardinalities), self.table)
            if out == x
        )


class DeviceFailureFunction(GateFunction):
    """A device extended with a failure input, appended as the last input.

    Failure input index 0 is "ok" (the base function applies), index 1
    is "failed" (the output is forced to `failed_state`).
    """

    kind = "device_failure"

    def __init__(self, base: GateFunction, failed_state: int) -> None:
        super().__init__(base.input_cardinalities + (2,), base.output_cardinality)
        if not 0 <= failed_state < base.output_cardinality:
            raise ValueError(
                f"failed state {failed_state} is out of range for {base.output_cardinality} output states"
            )
        self.base = base
        self.failed_state = failed_state

    def eval(self, indices: IndexVector) -> int:
        if indices[-1]:
            return self.failed_state
        return self.base.eval(indices[:-1])


# -----------------------------------------------------------------------------


def constant(
    input_cardinalities: Sequence[int], output_cardinality: int, value: int = 0
) -> TruthTable:
    """Get a truth table that ignores its inputs."""
    return TruthTable(
        input_cardinalities,
        output_cardinality,
        [value] * n_joint_states(input_cardinalities),
    )


def check_onto(f: GateFunction, budget: int | None = None) -> bool:
    """Return whether every output state has a nonempty preimage."""
    check_budget("onto-check", f.input_cardinalities, budget)
    reached = np.zeros(f.output_cardinality, dtype=bool)
    for u in iter_joint_states(f.input_cardinalities):
        reached[f.eval(u)] = True
        if reached.all():
            return True
    LOGGER.debug(f"not onto: unreachable outputs {np.flatnonzero(~reached).tolist()} for {f}")
    return False


def _check_output_index(f: GateFunction, x: int) -> None:
    if not 0 <= x < f.output_cardinality:
        raise ValueError(f"output index {x} is out of range for {f}")


def invert_default(f: GateFunction, x: int, budget: int | None = None) -> frozenset[IndexVector]:
    """Get {u | f(u) = x} by exhaustive enumeration."""
    _check_output_index(f, x)
    check_budget("inversion", f.input_cardinalities, budget)
    return frozenset(u for u in iter_joint_states(f.input_cardinalities) if f.eval(u) == x)


def invert(f: GateFunction, x: int, budget: int | None = None) -> frozenset[IndexVector]:
    """Use `f`'s specialized inverse when it has one, else enumerate."""
    _check_output_index(f, x)
    if f.has_invert:
        return f.invert(x, budget)
    return invert_default(f, x, budget)
