"""Joint models for a coupled pair of finite-alphabet chains.

The object of study is a stationary chain of pair symbols ``(x, y)`` drawn
from ``A x A`` for an alphabet ``A = {0, .., size-1}``.  A model is a finite
memory transition law: a row-stochastic table giving, for every context of
``order`` past pair symbols, the distribution of the next pair symbol.

Packing conventions (fixed so files and witnesses are bit-exact):

* a pair ``(x, y)`` packs to the code ``x * size + y``;
* a context of ``order`` pairs packs oldest-symbol-most-significant, i.e.
  ``code = sum(pair_code[t] * (size**2)**(order-1-t))`` over slots oldest
  first, so the most recent pair occupies the least significant digit.

The stationary law lives on packed contexts and satisfies ``pi @ T == pi``
for the context-shift transition matrix ``T`` induced by the kernel.
"""

from __future__ import annotations

import hashlib
import json
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConvergenceError, ModelStructureError, ParameterError
from . import jsonio

__all__ = [
    "CoupledKernel",
    "StationaryLaw",
    "ValidationReport",
    "pack_pair",
    "unpack_pair",
    "pack_context",
    "unpack_context",
    "validate_kernel",
    "stationary_law",
    "context_shift_matrix",
    "build_channel_model",
    "random_model",
    "load_model",
    "save_model",
    "model_to_dict",
    "model_from_dict",
    "model_hash",
]

ROW_SUM_TOL = 1e-12
STATIONARY_RESIDUAL_TOL = 1e-12
POWER_ITERATION_TOL = 1e-14
POWER_ITERATION_CAP = 10**6


def pack_pair(x: int, y: int, size: int) -> int:
    """Pack a pair symbol to its code ``x * size + y``."""
    if not (0 <= x < size and 0 <= y < size):
        raise ParameterError(f"pair ({x}, {y}) outside alphabet of size {size}")
    return x * size + y


def unpack_pair(code: int, size: int) -> tuple[int, int]:
    """Inverse of :func:`pack_pair`."""
    if not 0 <= code < size * size:
        raise ParameterError(f"pair code {code} outside range for size {size}")
    return code // size, code % size


def pack_context(pairs: Sequence[tuple[int, int]], size: int) -> int:
    """Pack a context given as pairs, oldest first."""
    code = 0
    for x, y in pairs:
        code = code * (size * size) + pack_pair(x, y, size)
    return code


def unpack_context(code: int, size: int, order: int) -> tuple[tuple[int, int], ...]:
    """Inverse of :func:`pack_context` for a context of the given order."""
    base = size * size
    if not 0 <= code < base**order:
        raise ParameterError(f"context code {code} outside range for order {order}")
    pairs = []
    for _ in range(order):
        pairs.append(unpack_pair(code % base, size))
        code //= base
    return tuple(reversed(pairs))


@dataclass(frozen=True, eq=False)
class CoupledKernel:
    """Finite-memory transition law on pair symbols.

    Attributes
    ----------
    size : int
        Alphabet size (>= 2).
    order : int
        Context length in pair symbols (>= 1).
    table : ndarray, shape ((size**2)**order, size**2)
        Row ``c`` is the distribution of the next pair symbol given the
        context with packed code ``c``.
    positivity_floor : float or None
        Declared entrywise floor, if the model claims strict positivity.
    """

    size: int
    order: int
    table: np.ndarray
    positivity_floor: float | None = None

    def __post_init__(self) -> None:
        if self.size < 2:
            raise ModelStructureError(f"alphabet size must be >= 2, got {self.size}")
        if self.order < 1:
            raise ModelStructureError(f"order must be >= 1, got {self.order}")
        table = np.asarray(self.table, dtype=np.float64)
        expected = (self.context_count, self.pair_count)
        if table.ndim != 2 or table.shape != expected:
            raise ModelStructureError(
                f"kernel table must have shape {expected}, got {table.shape}"
            )
        table = table.copy()
        table.setflags(write=False)
        object.__setattr__(self, "table", table)
        if self.positivity_floor is not None and not self.positivity_floor > 0:
            raise ParameterError("positivity floor must be positive when given")

    @property
    def pair_count(self) -> int:
        return self.size * self.size

    @property
    def context_count(self) -> int:
        return self.pair_count**self.order

    @property
    def min_entry(self) -> float:
        return float(self.table.min())

    def row(self, context_code: int) -> np.ndarray:
        return self.table[context_code]


@dataclass(frozen=True, eq=False)
class StationaryLaw:
    """Invariant law over packed contexts, with its achieved residual.

    ``residual`` is the L1 invariance defect ``||pi @ T - pi||_1`` measured
    after convergence.
    """

    pi: np.ndarray
    residual: float

    def __post_init__(self) -> None:
        pi = np.asarray(self.pi, dtype=np.float64).copy()
        pi.setflags(write=False)
        object.__setattr__(self, "pi", pi)

    def suffix_marginal(self, kernel: CoupledKernel, length: int) -> np.ndarray:
        """Marginal law of the most recent ``length`` pairs of the context.

        The most recent symbols occupy the least significant digits of the
        packed code, so the suffix code is ``context_code mod A2**length``.
        """
        if not 0 <= length <= kernel.order:
            raise ParameterError(f"suffix length {length} outside 0..{kernel.order}")
        base = kernel.pair_count**length
        codes = np.arange(kernel.context_count) % base
        return np.bincount(codes, weights=self.pi, minlength=base)


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of :func:`validate_kernel`."""

    max_row_sum_error: float
    min_entry: float
    strictly_positive: bool
    floor: float | None
    meets_floor: bool | None
    row_sum_violations: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return not self.row_sum_violations and self.min_entry >= 0.0


def validate_kernel(kernel: CoupledKernel) -> ValidationReport:
    """Check row sums, entry signs and positivity against the declared floor.

    Dimension defects are impossible here (the constructor rejects them);
    this reports the probabilistic facts: per-row sum residuals against the
    ``1e-12`` tolerance, the minimum entry, and whether the table is strictly
    positive (and above its declared floor, when one is present).
    """
    sums = np.array([math.fsum(row.tolist()) for row in kernel.table])
    errors = np.abs(sums - 1.0)
    violations = tuple(int(i) for i in np.nonzero(errors > ROW_SUM_TOL)[0])
    min_entry = kernel.min_entry
    floor = kernel.positivity_floor
    return ValidationReport(
        max_row_sum_error=float(errors.max()),
        min_entry=min_entry,
        strictly_positive=min_entry > 0.0,
        floor=floor,
        meets_floor=None if floor is None else bool(min_entry >= floor),
        row_sum_violations=violations,
    )


def context_shift_matrix(kernel: CoupledKernel) -> np.ndarray:
    """Dense transition matrix on packed contexts.

    ``T[c, c']`` is the probability of moving from context ``c`` to ``c'``;
    the successor of ``c`` under emission ``e`` is ``(c * A2 + e) mod A2**m``.
    """
    n, a2 = kernel.context_count, kernel.pair_count
    t = np.zeros((n, n))
    codes = np.arange(n)
    for e in range(a2):
        succ = (codes * a2 + e) % n
        t[codes, succ] += kernel.table[:, e]
    return t


def stationary_law(
    kernel: CoupledKernel,
    *,
    tol: float = POWER_ITERATION_TOL,
    max_iter: int = POWER_ITERATION_CAP,
) -> StationaryLaw:
    """Compute the invariant context law by damped power iteration.

    Iterates ``v <- (v + v @ T) / 2`` from the uniform vector; the damping
    removes periodicity without changing the fixed point.  Stops when the L1
    increment falls below ``tol`` and verifies the final invariance residual
    against the contract (``< 1e-12``).

    Uniqueness is guaranteed for strictly positive kernels.  Kernels with
    zero entries are still accepted when the iteration converges (e.g. a
    noiseless channel, whose off-diagonal contexts are simply transient), but
    a warning is emitted because the fixed point of a reducible chain is not
    necessarily unique.
    """
    report = validate_kernel(kernel)
    if report.row_sum_violations:
        raise ModelStructureError(
            f"kernel rows {report.row_sum_violations[:5]} do not sum to 1 "
            f"(max error {report.max_row_sum_error:.3e})"
        )
    if kernel.min_entry < 0:
        raise ModelStructureError("kernel has negative entries")
    if not report.strictly_positive:
        warnings.warn(
            "kernel is not strictly positive; the invariant law may not be unique",
            RuntimeWarning,
            stacklevel=2,
        )
    t = context_shift_matrix(kernel)
    n = kernel.context_count
    v = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = 0.5 * (v + v @ t)
        increment = float(np.abs(nxt - v).sum())
        v = nxt
        if increment < tol:
            break
    else:
        raise ConvergenceError(
            f"stationary law did not converge within {max_iter} iterations "
            f"(last increment {increment:.3e})",
            residual=increment,
        )
    total = math.fsum(v.tolist())
    v = v / total
    residual = float(np.abs(v @ t - v).sum())
    # Transient contexts of a reducible kernel keep iteration dust instead of
    # exact zeros; snap sub-noise entries when that does not hurt invariance,
    # so genuinely impossible events measure exactly zero.
    dust = 16 * np.finfo(np.float64).eps * n * float(v.max())
    if np.any((v > 0) & (v < dust)):
        snapped = np.where(v < dust, 0.0, v)
        snapped = snapped / math.fsum(snapped.tolist())
        snapped_residual = float(np.abs(snapped @ t - snapped).sum())
        if snapped_residual <= residual:
            v, residual = snapped, snapped_residual
    if residual >= STATIONARY_RESIDUAL_TOL:
        raise ConvergenceError(
            f"stationary residual {residual:.3e} exceeds {STATIONARY_RESIDUAL_TOL}",
            residual=residual,
        )
    return StationaryLaw(pi=v, residual=residual)


def build_channel_model(
    x_table: np.ndarray,
    emission: np.ndarray,
    *,
    positivity_floor: float | None = None,
) -> CoupledKernel:
    """Joint kernel for an autonomous first chain observed through a channel.

    Parameters
    ----------
    x_table : ndarray, shape (size**order, size)
        Transition law of the first chain on its own contexts (packed oldest
        first, most recent least significant).
    emission : ndarray, shape (size, size)
        Row ``x`` is the law of the observed symbol given the hidden one.

    The joint row at any context is ``P(x | x-part of context) * C(y | x)``,
    so the observed coordinate depends on the past only through the current
    hidden symbol.
    """
    x_table = np.asarray(x_table, dtype=np.float64)
    emission = np.asarray(emission, dtype=np.float64)
    if emission.ndim != 2 or emission.shape[0] != emission.shape[1]:
        raise ModelStructureError(f"emission table must be square, got {emission.shape}")
    size = emission.shape[0]
    if x_table.ndim != 2 or x_table.shape[1] != size:
        raise ModelStructureError(
            f"x table must have {size} columns to match the emission table"
        )
    order = round(math.log(x_table.shape[0], size))
    if size**order != x_table.shape[0]:
        raise ModelStructureError(
            f"x table has {x_table.shape[0]} rows, not a power of alphabet size {size}"
        )
    for name, rows in (("x", x_table), ("emission", emission)):
        sums = np.abs(rows.sum(axis=1) - 1.0)
        if rows.min() < 0 or sums.max() > 1e-9:
            raise ModelStructureError(f"{name} table rows must be probability vectors")

    a2 = size * size
    n = a2**order
    table = np.empty((n, a2))
    for code in range(n):
        pairs = unpack_context(code, size, order)
        x_code = 0
        for x, _ in pairs:
            x_code = x_code * size + x
        for x in range(size):
            for y in range(size):
                table[code, x * size + y] = x_table[x_code, x] * emission[x, y]
    return CoupledKernel(size=size, order=order, table=table, positivity_floor=positivity_floor)


def random_model(
    seed: int,
    size: int = 2,
    order: int = 1,
    floor: float = 0.05,
    fidelity: float = 0.7,
) -> CoupledKernel:
    """Draw a strictly positive kernel whose observed symbol tracks the hidden one.

    Every row is built as ``P(x, y | context) = q(x) * c_x(y)`` with fresh
    draws of ``q`` and ``c_x`` per context, where ``q >= 1/(2*size)`` and
    ``c_x(y) >= 2*size*floor`` entrywise with ``c_x(x) >= fidelity``.  This
    guarantees every joint entry is at least ``floor`` and that, conditioned
    on the current hidden symbol, the observed symbol matches it with
    probability at least ``fidelity`` whatever the past, so the mismatch rate
    is at most ``1 - fidelity``.

    Deterministic in ``seed`` (PCG64).
    """
    if floor <= 0:
        raise ParameterError("floor must be positive")
    if not 0 < fidelity < 1:
        raise ParameterError("fidelity must lie in (0, 1)")
    if floor * size * size >= 1:
        raise ParameterError(
            f"floor {floor} infeasible: {size * size} entries cannot each reach it"
        )
    off_floor = 2 * size * floor
    diag_floor = max(fidelity, off_floor)
    slack = 1.0 - diag_floor - (size - 1) * off_floor
    if slack < 0:
        raise ParameterError(
            f"floor {floor} and fidelity {fidelity} infeasible for alphabet size {size}"
        )
    q_floor = 1.0 / (2 * size)
    rng = np.random.default_rng(seed)
    a2 = size * size
    table = np.empty((a2**order, a2))
    for code in range(table.shape[0]):
        q = q_floor + (1.0 - size * q_floor) * rng.dirichlet(np.ones(size))
        for x in range(size):
            mins = np.full(size, off_floor)
            mins[x] = diag_floor
            c = mins + slack * rng.dirichlet(np.ones(size))
            table[code, x * size : (x + 1) * size] = q[x] * c
    return CoupledKernel(size=size, order=order, table=table, positivity_floor=floor)


def model_to_dict(kernel: CoupledKernel) -> dict:
    """Plain-dict form of a model, matching the model file schema."""
    doc = {
        "alphabet_size": kernel.size,
        "order": kernel.order,
        "kernel": [list(map(float, row)) for row in kernel.table],
    }
    if kernel.positivity_floor is not None:
        doc["positivity_floor"] = float(kernel.positivity_floor)
    return doc


def model_from_dict(doc: dict) -> CoupledKernel:
    """Build a model from the file schema, with structural checks."""
    if not isinstance(doc, dict):
        raise ModelStructureError("model document must be a JSON object")
    try:
        size = int(doc["alphabet_size"])
        order = int(doc["order"])
        rows = doc["kernel"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelStructureError(f"model document missing or malformed field: {exc}") from exc
    if not isinstance(rows, list):
        raise ModelStructureError("kernel field must be an array of rows")
    floor = doc.get("positivity_floor")
    try:
        table = np.array(rows, dtype=np.float64)
    except ValueError as exc:
        raise ModelStructureError(f"kernel rows are ragged or non-numeric: {exc}") from exc
    return CoupledKernel(
        size=size,
        order=order,
        table=table,
        positivity_floor=None if floor is None else float(floor),
    )


def save_model(kernel: CoupledKernel, path: str) -> None:
    """Write the model file with 17-significant-digit probabilities.

    17 digits make the doubles bit-exact on reload.
    """
    text = jsonio.dumps(model_to_dict(kernel), float_format=".17g")
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text + "\n")


def load_model(path: str) -> CoupledKernel:
    """Read a model file; structural defects raise :class:`ModelStructureError`."""
    with open(path, "r", encoding="utf-8") as handle:
        doc = json.load(handle)
    return model_from_dict(doc)


def model_hash(kernel: CoupledKernel) -> str:
    """SHA-256 of the canonical 17-digit serialization (stable model identity)."""
    text = jsonio.dumps(model_to_dict(kernel), float_format=".17g")
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
