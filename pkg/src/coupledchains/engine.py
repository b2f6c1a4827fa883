"""Exact cylinder and conditional probabilities under partial observation.

Two independent routes are provided on purpose:

* the generic route answers any pattern by exhaustively enumerating every
  joint pair-cylinder consistent with the constraints and summing exact
  cylinder probabilities (`event_probability`, `conditional_query`);
* the recursive route (`forward_filter`) sweeps one observation at a time,
  maintaining the joint law of the last ``order`` pair symbols given the
  observed-coordinate history.

The second is the scalable path for observed-coordinate histories and doubles
as a cross-check of the first; they must agree to ``1e-10`` entrywise.

Cylinder probabilities are exact finite-dimensional distributions of the
stationary chain: the invariant law of the leading context times kernel row
entries along the remaining steps.  Sequences shorter than the context order
use the suffix marginal of the invariant law.  Final summations run through
``math.fsum`` (exactly rounded), which keeps additivity identities at the
``1e-12`` level even for deep windows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BudgetError, ConditioningError, ParameterError
from .model import CoupledKernel, StationaryLaw
from .patterns import ObservationPattern, Slot

__all__ = [
    "ConditionalLaw",
    "DEFAULT_BUDGET",
    "TARGETS",
    "cylinder_probability",
    "event_probability",
    "conditional_query",
    "forward_filter",
    "filtered_symbol_law",
    "enumeration_cost",
]

#: Maximum number of cylinders one query may enumerate.  Matches a fully
#: unconstrained depth-8 window on a binary alphabet: (2*2)**(8+1).
DEFAULT_BUDGET = 262_144

TARGETS = ("X0", "Y0", "Z0")


@dataclass(frozen=True, eq=False)
class ConditionalLaw:
    """Exact conditional distribution of one time-zero quantity.

    Attributes
    ----------
    target : str
        One of ``"X0"``, ``"Y0"``, ``"Z0"``.
    probs : ndarray
        Distribution over symbols (pair codes for ``"Z0"``).
    event_mass : float
        Probability of the conditioning event.
    """

    target: str
    probs: np.ndarray
    event_mass: float

    def __post_init__(self) -> None:
        probs = np.asarray(self.probs, dtype=np.float64).copy()
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        if self.event_mass <= 0.0:
            raise ConditioningError("conditional law built on a zero-mass event")
        if probs.min() < 0.0 or abs(float(probs.sum()) - 1.0) > 1e-10:
            raise ConditioningError(
                f"conditional law is not a distribution (sum {float(probs.sum())!r})"
            )


def _allowed_codes(slot: Slot, size: int) -> np.ndarray:
    """Pair codes consistent with one slot constraint."""
    slot.check_alphabet(size)
    if slot.x is None and slot.y is None:
        return np.arange(size * size)
    if slot.y is None:
        return slot.x * size + np.arange(size)
    if slot.x is None:
        return np.arange(size) * size + slot.y
    return np.array([slot.x * size + slot.y])


def enumeration_cost(slots: Sequence[Slot], size: int) -> int:
    """Number of joint cylinders consistent with the slot constraints."""
    cost = 1
    for slot in slots:
        cost *= len(_allowed_codes(slot, size))
    return cost


def _check_budget(slots: Sequence[Slot], size: int, budget: int) -> None:
    cost = enumeration_cost(slots, size)
    if cost > budget:
        raise BudgetError(
            f"query needs {cost} cylinders, over the budget of {budget}",
            estimate=cost,
            budget=budget,
        )


def _consistent_cylinders(slots: Sequence[Slot], size: int) -> np.ndarray:
    """All pair-code sequences consistent with the slots, shape (N, len(slots)).

    Rows are produced in lexicographic order of the allowed codes, oldest
    slot varying slowest, so downstream reductions are deterministic.
    """
    if not slots:
        return np.zeros((1, 0), dtype=np.int64)
    axes = [_allowed_codes(slot, size) for slot in slots]
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.reshape(-1) for g in grids], axis=1).astype(np.int64)


def _sequence_probabilities(
    kernel: CoupledKernel, law: StationaryLaw, seqs: np.ndarray
) -> np.ndarray:
    """Exact probability of each pair-code sequence (rows of ``seqs``)."""
    n, length = seqs.shape
    if length == 0:
        return np.ones(n)
    a2 = kernel.pair_count
    m = kernel.order
    if length < m:
        marg = law.suffix_marginal(kernel, length)
        codes = np.zeros(n, dtype=np.int64)
        for t in range(length):
            codes = codes * a2 + seqs[:, t]
        return marg[codes]
    ctx = np.zeros(n, dtype=np.int64)
    for t in range(m):
        ctx = ctx * a2 + seqs[:, t]
    probs = law.pi[ctx].copy()
    wrap = kernel.context_count
    for t in range(m, length):
        e = seqs[:, t]
        probs *= kernel.table[ctx, e]
        ctx = (ctx * a2 + e) % wrap
    return probs


def _fsum(values: np.ndarray) -> float:
    return math.fsum(values.tolist())


def cylinder_probability(
    kernel: CoupledKernel,
    law: StationaryLaw,
    pairs: Sequence[tuple[int, int]],
) -> float:
    """Probability that the chain shows exactly these pair symbols on a window.

    The empty window has probability one.
    """
    seq = np.array(
        [[x * kernel.size + y for x, y in pairs]], dtype=np.int64
    ).reshape(1, len(pairs))
    for x, y in pairs:
        if not (0 <= x < kernel.size and 0 <= y < kernel.size):
            raise ParameterError(f"pair ({x}, {y}) outside alphabet")
    return float(_sequence_probabilities(kernel, law, seq)[0])


def event_probability(
    kernel: CoupledKernel,
    law: StationaryLaw,
    pattern: ObservationPattern,
    *,
    budget: int = DEFAULT_BUDGET,
) -> float:
    """Probability of the event described by the pattern.

    Equals the sum of cylinder probabilities over every joint cylinder
    consistent with the constraints.
    """
    pattern.check_alphabet(kernel.size)
    _check_budget(pattern.slots, kernel.size, budget)
    seqs = _consistent_cylinders(pattern.slots, kernel.size)
    return _fsum(_sequence_probabilities(kernel, law, seqs))


def _target_axis(target: str, extra: Slot | None, size: int) -> Slot:
    """Slot constraint at time zero implied by the extra condition alone."""
    if target not in TARGETS:
        raise ParameterError(f"target must be one of {TARGETS}, got {target!r}")
    if extra is None:
        return Slot.free()
    extra.check_alphabet(size)
    if target == "X0" and extra.x is not None:
        raise ParameterError("extra constraint may not fix the target coordinate x")
    if target == "Y0" and extra.y is not None:
        raise ParameterError("extra constraint may not fix the target coordinate y")
    if target == "Z0" and not extra.is_free:
        raise ParameterError("extra constraint must be free when the target is the pair")
    return extra


def conditional_query(
    kernel: CoupledKernel,
    law: StationaryLaw,
    pattern: ObservationPattern,
    target: str,
    extra: Slot | None = None,
    *,
    budget: int = DEFAULT_BUDGET,
) -> ConditionalLaw:
    """Exact conditional law of a time-zero quantity given a pattern.

    ``extra`` optionally constrains the complementary time-zero coordinate
    (e.g. fix ``x`` while asking for the law of the observed symbol).  The
    law is obtained by enumerating all joint cylinders over the window
    ``-depth .. 0`` consistent with the pattern and the extra constraint and
    normalizing by the mass of the conditioning event.

    Raises
    ------
    ConditioningError
        If the conditioning event has probability zero.
    BudgetError
        If the enumeration would exceed ``budget`` cylinders.
    """
    pattern.check_alphabet(kernel.size)
    time_zero = _target_axis(target, extra, kernel.size)
    slots = pattern.slots + (time_zero,)
    _check_budget(slots, kernel.size, budget)
    seqs = _consistent_cylinders(slots, kernel.size)
    probs = _sequence_probabilities(kernel, law, seqs)
    mass = _fsum(probs)
    if mass <= 0.0:
        raise ConditioningError(
            f"conditioning event has probability zero (pattern {pattern}, extra {extra})"
        )
    last = seqs[:, -1]
    if target == "X0":
        values = last // kernel.size
        count = kernel.size
    elif target == "Y0":
        values = last % kernel.size
        count = kernel.size
    else:
        values = last
        count = kernel.pair_count
    out = np.empty(count)
    for v in range(count):
        out[v] = _fsum(probs[values == v]) / mass
    return ConditionalLaw(target=target, probs=out, event_mass=mass)


def filtered_symbol_law(
    kernel: CoupledKernel,
    law: StationaryLaw,
    observed: Sequence[int],
    target: str = "X0",
) -> ConditionalLaw:
    """Recursive-sweep conditional law given an observed-coordinate history.

    Maintains the unnormalized joint law of the last ``order`` pair symbols
    given the observed coordinates seen so far; one update per observation.
    Supports targets ``"X0"`` and ``"Y0"``.  Must agree with
    :func:`conditional_query` on the all-observed pattern to ``1e-10``.
    """
    if target not in ("X0", "Y0"):
        raise ParameterError(f"filter target must be X0 or Y0, got {target!r}")
    size = kernel.size
    for symbol in observed:
        if not 0 <= symbol < size:
            raise ParameterError(f"observed symbol {symbol} outside alphabet")
    a2 = kernel.pair_count
    wrap = kernel.context_count
    codes = np.arange(wrap)
    weights = law.pi.copy()
    for symbol in observed:
        nxt = np.zeros(wrap)
        for x in range(size):
            e = x * size + symbol
            np.add.at(nxt, (codes * a2 + e) % wrap, weights * kernel.table[:, e])
        weights = nxt
    mass = _fsum(weights)
    if mass <= 0.0:
        raise ConditioningError("observed history has probability zero")
    out = np.empty(size)
    for v in range(size):
        if target == "X0":
            emis = [v * size + y for y in range(size)]
        else:
            emis = [x * size + v for x in range(size)]
        step = kernel.table[:, emis].sum(axis=1)
        out[v] = _fsum(weights * step) / mass
    return ConditionalLaw(target=target, probs=out, event_mass=mass)


def forward_filter(
    kernel: CoupledKernel,
    law: StationaryLaw,
    observed: Sequence[int],
) -> ConditionalLaw:
    """Law of the next hidden symbol given an observed-coordinate history."""
    return filtered_symbol_law(kernel, law, observed, target="X0")
