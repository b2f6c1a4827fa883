"""Extremal conditional quantities of a coupled model, with witnesses.

Every quantity is a supremum or infimum of exact conditional probabilities
over conditioning events of positive probability.  For a finite-memory model
the scan over window depths is capped at the kernel order: deeper windows
cannot move the extremum because the conditional law depends on at most the
last ``order`` pair symbols.  The cap is not taken on faith; the scans for
the mismatch rate and the next-symbol floor re-evaluate one level past the
cap and demand agreement to ``1e-12``.

Quantities (report field names in parentheses):

* ``mismatch_rate`` (``rho``): largest conditional probability that the
  observed symbol differs from the hidden one, given the hidden symbol and
  any joint past.
* ``nonnullness`` (``alpha``): smallest conditional probability of any next
  hidden symbol given any joint past.
* ``oscillation`` (``beta``): largest log-ratio between conditional laws of
  the next hidden symbol when the recent hidden past is fixed and the deeper
  joint past is swapped.
* ``oscillation_sum`` (``gamma``): running sum of oscillations over the
  recent-past depth.
* ``amplification`` (``r``): the closed-form factor that multiplies the
  mismatch rate in the marginal-comparison bound; equals 2 when the
  oscillation sum vanishes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .engine import DEFAULT_BUDGET, conditional_query
from .errors import ConditioningError, CoupledChainsError, ParameterError
from .model import CoupledKernel, StationaryLaw, unpack_context
from .patterns import ObservationPattern, Slot, format_pattern, pair_past, x_past

__all__ = [
    "Extremum",
    "STABILITY_TOL",
    "mismatch_rate",
    "nonnullness",
    "oscillation",
    "oscillation_sum",
    "amplification",
    "mismatch_floor_report",
    "quantity_report",
]

STABILITY_TOL = 1e-12


@dataclass(frozen=True)
class Extremum:
    """An extremal value together with the configuration achieving it.

    ``stability_gap`` is the absolute difference against the one-past-the-cap
    re-evaluation, when the scan performs one.
    """

    value: float
    witness: dict
    stability_gap: float | None = None


def _unpack_symbols(code: int, size: int, length: int) -> tuple[int, ...]:
    """Digits of ``code`` in base ``size``, oldest (most significant) first."""
    out = []
    for _ in range(length):
        out.append(code % size)
        code //= size
    return tuple(reversed(out))


def _pair_pattern(code: int, size: int, length: int) -> ObservationPattern:
    return pair_past(unpack_context(code, size, length))


def _scan_mismatch(kernel, law, depth, budget):
    """Max over hidden symbol and positive-mass pair pasts of the mismatch mass."""
    best = None
    for code in range(kernel.pair_count**depth):
        pattern = _pair_pattern(code, kernel.size, depth)
        for a in range(kernel.size):
            try:
                q = conditional_query(
                    kernel, law, pattern, "Y0", extra=Slot.x_eq(a), budget=budget
                )
            except ConditioningError:
                continue
            value = 1.0 - float(q.probs[a])
            if best is None or value > best[0]:
                best = (value, {"a": a, "k": depth, "pattern": format_pattern(pattern)})
    return best


def mismatch_rate(
    kernel: CoupledKernel, law: StationaryLaw, *, budget: int = DEFAULT_BUDGET
) -> Extremum:
    """Supremal probability that the observed symbol misses the hidden one.

    Scans window depths ``0 .. order`` and all positive-mass pair pasts;
    re-evaluates at depth ``order + 1`` as a guard on the depth cap.
    """
    m = kernel.order
    best = None
    for depth in range(m + 1):
        found = _scan_mismatch(kernel, law, depth, budget)
        if found is not None and (best is None or found[0] > best[0]):
            best = found
    if best is None:
        raise ConditioningError("no positive-mass conditioning event found")
    guard = _scan_mismatch(kernel, law, m + 1, budget)
    gap = abs(best[0] - guard[0])
    if gap > STABILITY_TOL:
        raise CoupledChainsError(
            f"mismatch rate not stable past the depth cap (gap {gap:.3e})"
        )
    return Extremum(value=best[0], witness=best[1], stability_gap=gap)


def _scan_floor(kernel, law, depth, budget):
    """Min over hidden symbol and positive-mass pair pasts of the next-symbol mass."""
    best = None
    for code in range(kernel.pair_count**depth):
        pattern = _pair_pattern(code, kernel.size, depth)
        try:
            q = conditional_query(kernel, law, pattern, "X0", budget=budget)
        except ConditioningError:
            continue
        for a in range(kernel.size):
            value = float(q.probs[a])
            if best is None or value < best[0]:
                best = (value, {"a": a, "k": depth, "pattern": format_pattern(pattern)})
    return best


def nonnullness(
    kernel: CoupledKernel, law: StationaryLaw, *, budget: int = DEFAULT_BUDGET
) -> Extremum:
    """Infimal conditional probability of a next hidden symbol given a joint past.

    Scans window depths ``1 .. order`` (the definition starts at depth one)
    plus the ``order + 1`` guard.
    """
    m = kernel.order
    best = None
    for depth in range(1, m + 1):
        found = _scan_floor(kernel, law, depth, budget)
        if found is not None and (best is None or found[0] < best[0]):
            best = found
    if best is None:
        raise ConditioningError("no positive-mass conditioning event found")
    guard = _scan_floor(kernel, law, m + 1, budget)
    gap = abs(best[0] - guard[0])
    if gap > STABILITY_TOL:
        raise CoupledChainsError(
            f"next-symbol floor not stable past the depth cap (gap {gap:.3e})"
        )
    return Extremum(value=best[0], witness=best[1], stability_gap=gap)


def oscillation(
    kernel: CoupledKernel,
    law: StationaryLaw,
    j: int,
    k: int,
    *,
    budget: int = DEFAULT_BUDGET,
) -> Extremum:
    """Supremal log-ratio of next-hidden-symbol conditionals under deep-past swaps.

    The recent hidden past (depth ``j``) is held fixed while the joint past on
    slots ``-k .. -j-1`` is replaced by another positive-mass one.  ``j = k``
    leaves nothing to swap and gives zero by convention.  ``j = 0`` is
    admitted (nothing recent is fixed; the whole window is swapped).
    """
    if not 0 <= j <= k:
        raise ParameterError(f"need 0 <= j <= k, got j={j}, k={k}")
    if j == k:
        return Extremum(value=0.0, witness={"j": j, "k": k, "note": "empty deep past"})
    size = kernel.size
    deep = k - j
    best = None
    for x_code in range(size**j):
        recent = x_past(_unpack_symbols(x_code, size, j))
        per_eta: list[tuple[int, object]] = []
        for eta_code in range(kernel.pair_count**deep):
            pattern = _pair_pattern(eta_code, size, deep).extended_left(())
            slots = pattern.slots + recent.slots
            try:
                q = conditional_query(
                    kernel, law, ObservationPattern(slots), "X0", budget=budget
                )
            except ConditioningError:
                continue
            per_eta.append((eta_code, q.probs))
        if not per_eta:
            continue
        for a in range(size):
            hi = max(per_eta, key=lambda item: item[1][a])
            lo = min(per_eta, key=lambda item: item[1][a])
            p_hi, p_lo = float(hi[1][a]), float(lo[1][a])
            if p_hi == 0.0:
                continue
            value = math.inf if p_lo == 0.0 else math.log(p_hi / p_lo)
            if best is None or value > best[0]:
                best = (
                    value,
                    {
                        "a": a,
                        "j": j,
                        "k": k,
                        "x_pattern": format_pattern(recent),
                        "upper_pattern": format_pattern(
                            _pair_pattern(hi[0], size, deep)
                        ),
                        "lower_pattern": format_pattern(
                            _pair_pattern(lo[0], size, deep)
                        ),
                    },
                )
    if best is None:
        raise ConditioningError("no positive-mass conditioning event found")
    return Extremum(value=best[0], witness=best[1])


def oscillation_sum(
    kernel: CoupledKernel,
    law: StationaryLaw,
    j: int,
    k: int,
    *,
    budget: int = DEFAULT_BUDGET,
    cache: dict | None = None,
) -> float:
    """Sum of oscillations at recent depths ``1 .. j`` with window depth ``k``.

    Nondecreasing in ``j``; zero when ``j = 0``.  ``cache`` maps ``(j, k)``
    to previously computed :class:`Extremum` values and is filled in place.
    """
    if not 0 <= j <= k:
        raise ParameterError(f"need 0 <= j <= k, got j={j}, k={k}")
    total = 0.0
    for depth in range(1, j + 1):
        if cache is not None and (depth, k) in cache:
            ext = cache[(depth, k)]
        else:
            ext = oscillation(kernel, law, depth, k, budget=budget)
            if cache is not None:
                cache[(depth, k)] = ext
        total += ext.value
    return total


def amplification(alpha: float, rho: float, gamma_kk: float) -> float:
    """Closed-form amplification factor for the marginal-comparison bound.

    With ``g`` the oscillation sum at full depth, the factor is::

        2 + exp(2g) * (2*(exp(g) - 1) + (exp(2g) - 1)) / (alpha * (1 - rho)**2)
          + 2 * exp(g) * (exp(g) - 1)

    It equals 2 when ``g == 0`` and grows with both ``g`` and ``rho``.
    """
    if not 0.0 < alpha <= 1.0:
        raise ParameterError(f"alpha must lie in (0, 1], got {alpha}")
    if not 0.0 <= rho < 1.0:
        raise ParameterError(f"rho must lie in [0, 1), got {rho}")
    if gamma_kk < 0.0:
        raise ParameterError(f"oscillation sum must be nonnegative, got {gamma_kk}")
    eg = math.exp(gamma_kk)
    e2g = math.exp(2.0 * gamma_kk)
    return (
        2.0
        + e2g * (2.0 * (eg - 1.0) + (e2g - 1.0)) / (alpha * (1.0 - rho) ** 2)
        + 2.0 * eg * (eg - 1.0)
    )


def mismatch_floor_report(
    kernel: CoupledKernel, law: StationaryLaw, *, budget: int = DEFAULT_BUDGET
) -> dict:
    """Compare the unconditional-mismatch supremum against the next-symbol floor.

    Computes ``s``, the supremal conditional probability that the two
    coordinates of the current pair differ given any positive-mass joint
    past, and reports whether ``s < alpha`` together with the mismatch rate.
    Whenever the premise holds the mismatch rate must be below one (indeed at
    most ``s / alpha``); the returned ``implication_ok`` field is the
    one-directional check of that statement.
    """
    m = kernel.order
    best = None
    for depth in range(m + 1):
        for code in range(kernel.pair_count**depth):
            pattern = _pair_pattern(code, kernel.size, depth)
            try:
                q = conditional_query(kernel, law, pattern, "Z0", budget=budget)
            except ConditioningError:
                continue
            agree = math.fsum(
                float(q.probs[a * kernel.size + a]) for a in range(kernel.size)
            )
            value = 1.0 - agree
            if best is None or value > best[0]:
                best = (value, {"k": depth, "pattern": format_pattern(pattern)})
    s_value, s_witness = best
    alpha = nonnullness(kernel, law, budget=budget)
    rho = mismatch_rate(kernel, law, budget=budget)
    premise = s_value < alpha.value
    h1 = rho.value < 1.0
    return {
        "s": s_value,
        "s_witness": s_witness,
        "alpha": alpha.value,
        "premise_holds": premise,
        "rho": rho.value,
        "h1_holds": h1,
        "implication_ok": (not premise) or h1,
    }


def quantity_report(
    kernel: CoupledKernel,
    law: StationaryLaw,
    j_max: int,
    k_max: int,
    *,
    budget: int = DEFAULT_BUDGET,
) -> dict:
    """Full quantity report over all admissible depth pairs up to the request.

    Emits the mismatch rate and next-symbol floor with witnesses, the
    oscillation table for ``1 <= j <= j_max``, ``j <= k <= k_max``, the
    matching sums, and the amplification factor for each window depth.
    """
    if j_max < 0 or k_max < 0 or j_max > k_max:
        raise ParameterError(f"need 0 <= j_max <= k_max, got {j_max}, {k_max}")
    rho = mismatch_rate(kernel, law, budget=budget)
    alpha = nonnullness(kernel, law, budget=budget)
    cache: dict = {}
    beta_rows = []
    for j in range(1, j_max + 1):
        for k in range(j, k_max + 1):
            ext = cache.get((j, k))
            if ext is None:
                ext = oscillation(kernel, law, j, k, budget=budget)
                cache[(j, k)] = ext
            beta_rows.append(
                {"j": j, "k": k, "value": ext.value, "witness": ext.witness}
            )
    gamma_rows = []
    for j in range(1, j_max + 1):
        for k in range(j, k_max + 1):
            gamma_rows.append(
                {
                    "j": j,
                    "k": k,
                    "value": oscillation_sum(kernel, law, j, k, budget=budget, cache=cache),
                }
            )
    r_rows = []
    for k in range(k_max + 1):
        gamma_kk = oscillation_sum(kernel, law, k, k, budget=budget, cache=cache)
        r_rows.append(
            {"k": k, "value": amplification(alpha.value, rho.value, gamma_kk)}
        )
    return {
        "alphabet_size": kernel.size,
        "order": kernel.order,
        "rho": {"value": rho.value, "witness": rho.witness},
        "alpha": {"value": alpha.value, "witness": alpha.witness},
        "beta": beta_rows,
        "gamma": gamma_rows,
        "r": r_rows,
    }
