"""Trajectory sampling and empirical estimates, as an oracle for the engine.

Sampling is exactly stationary: the leading context is drawn from the
invariant law, so every window of a trajectory has the model's stationary
finite-dimensional distributions and no burn-in is needed.  The generator is
numpy's PCG64 with 64-bit integer seeding ("numpy-pcg64" in reports), fixed
so trajectories are reproducible from ``(model, seed, n)``.

Empirical conditionals use sliding windows (stride one).  z-scores compare
an empirical frequency against an exact engine value using the binomial
standard error at the exact value; overlapping windows are positively
correlated, so these z-scores are approximate and the comparison gate is a
wide one (|z| <= 4).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .engine import DEFAULT_BUDGET, conditional_query
from .errors import ConditioningError, ParameterError
from .model import CoupledKernel, StationaryLaw, model_hash
from .patterns import ObservationPattern, format_pattern

__all__ = [
    "RNG_NAME",
    "Trajectory",
    "EmpiricalEstimate",
    "sample_path",
    "empirical_conditional",
    "mc_vs_exact",
    "export_trajectory",
]

RNG_NAME = "numpy-pcg64"
Z_GATE = 4.0
LOW_POWER_MATCHES = 1000


@dataclass(frozen=True, eq=False)
class Trajectory:
    """A sampled stationary path of pair symbols."""

    xs: np.ndarray
    ys: np.ndarray
    seed: int
    size: int
    model_hash: str

    def __post_init__(self) -> None:
        for name in ("xs", "ys"):
            arr = np.asarray(getattr(self, name), dtype=np.int64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return int(self.xs.shape[0])


def sample_path(
    kernel: CoupledKernel, law: StationaryLaw, n: int, seed: int
) -> Trajectory:
    """Sample ``n`` pair symbols: context from the invariant law, then kernel rows."""
    m = kernel.order
    if n < m:
        raise ParameterError(f"need n >= order ({m}), got {n}")
    rng = np.random.default_rng(seed)
    a2 = kernel.pair_count
    wrap = kernel.context_count
    pi_cum = np.cumsum(law.pi)
    context = int(np.searchsorted(pi_cum, rng.random(), side="right"))
    context = min(context, wrap - 1)
    symbols = np.empty(n, dtype=np.int64)
    digits = []
    c = context
    for _ in range(m):
        digits.append(c % a2)
        c //= a2
    symbols[:m] = digits[::-1]
    row_cum = np.cumsum(kernel.table, axis=1)
    draws = rng.random(n - m)
    for t in range(m, n):
        e = int(np.searchsorted(row_cum[context], draws[t - m], side="right"))
        e = min(e, a2 - 1)
        symbols[t] = e
        context = (context * a2 + e) % wrap
    return Trajectory(
        xs=symbols // kernel.size,
        ys=symbols % kernel.size,
        seed=seed,
        size=kernel.size,
        model_hash=model_hash(kernel),
    )


@dataclass(frozen=True, eq=False)
class EmpiricalEstimate:
    """Sliding-window counts for one pattern and target.

    ``estimate`` and ``stderr`` are None when the pattern never matched.
    """

    matches: int
    hits: np.ndarray
    estimate: np.ndarray | None
    stderr: np.ndarray | None
    windows: int

    @property
    def sufficient(self) -> bool:
        return self.matches > 0


def _slot_mask(traj: Trajectory, pattern: ObservationPattern) -> np.ndarray:
    """Boolean mask over target positions ``t`` whose window matches the pattern."""
    depth = pattern.depth
    n = traj.n
    if depth > n - 1:
        raise ParameterError(
            f"pattern depth {depth} exceeds trajectory length {n} minus one"
        )
    count = n - depth
    mask = np.ones(count, dtype=bool)
    for i, slot in enumerate(pattern.slots):
        # slot i sits at position t - depth + i for target position t
        lo = i
        hi = i + count
        if slot.x is not None:
            mask &= traj.xs[lo:hi] == slot.x
        if slot.y is not None:
            mask &= traj.ys[lo:hi] == slot.y
    return mask


def empirical_conditional(
    traj: Trajectory,
    pattern: ObservationPattern,
    target: str,
) -> EmpiricalEstimate:
    """Sliding-window estimate of the conditional law of the target symbol.

    Counts windows matching the pattern and, among them, each value of the
    target at the following position.  The standard error is the binomial
    one at the estimated frequency.
    """
    size = traj.size
    depth = pattern.depth
    mask = _slot_mask(traj, pattern)
    if target == "X0":
        values = traj.xs[depth:]
        count = size
    elif target == "Y0":
        values = traj.ys[depth:]
        count = size
    elif target == "Z0":
        values = traj.xs[depth:] * size + traj.ys[depth:]
        count = size * size
    else:
        raise ParameterError(f"unknown target {target!r}")
    matches = int(mask.sum())
    hits = np.bincount(values[mask], minlength=count).astype(np.int64)
    if matches == 0:
        return EmpiricalEstimate(
            matches=0, hits=hits, estimate=None, stderr=None, windows=mask.size
        )
    est = hits / matches
    stderr = np.sqrt(est * (1.0 - est) / matches)
    return EmpiricalEstimate(
        matches=matches, hits=hits, estimate=est, stderr=stderr, windows=mask.size
    )


def _z_score(p_hat: float, p_exact: float, trials: int) -> float:
    """Binomial z at the exact null value; exact degenerate cases give 0 or inf."""
    if trials == 0:
        return math.nan
    se = math.sqrt(p_exact * (1.0 - p_exact) / trials)
    if se == 0.0:
        return 0.0 if p_hat == p_exact else math.inf
    return (p_hat - p_exact) / se


def _finite(z: float) -> float | None:
    return z if math.isfinite(z) else None


def mc_vs_exact(
    kernel: CoupledKernel,
    law: StationaryLaw,
    queries: Sequence[tuple[ObservationPattern, str]],
    n: int,
    seed: int,
    *,
    budget: int = DEFAULT_BUDGET,
) -> dict:
    """Compare engine conditionals against one sampled trajectory.

    For each (pattern, target) query: the exact conditional law and event
    mass, the empirical counterparts, a per-symbol z-score at the exact
    value, and a z-score for the event frequency itself.  The summary flags
    any |z| above 4 and any query with too few matches to be meaningful.
    """
    traj = sample_path(kernel, law, n, seed)
    rows = []
    any_exceed = False
    for pattern, target in queries:
        emp = empirical_conditional(traj, pattern, target)
        try:
            exact = conditional_query(kernel, law, pattern, target, budget=budget)
            exact_probs = exact.probs
            exact_mass = exact.event_mass
        except ConditioningError:
            exact_probs = None
            exact_mass = 0.0
        event_z = _z_score(emp.matches / emp.windows, exact_mass, emp.windows)
        row: dict = {
            "pattern": format_pattern(pattern),
            "target": target,
            "matches": emp.matches,
            "windows": emp.windows,
            "exact_event_mass": exact_mass,
            "event_z": _finite(event_z),
            "low_power": emp.matches < LOW_POWER_MATCHES,
        }
        if not math.isfinite(event_z):
            any_exceed = True
        if exact_probs is not None and emp.sufficient:
            zs = [
                _z_score(float(emp.estimate[v]), float(exact_probs[v]), emp.matches)
                for v in range(len(exact_probs))
            ]
            if any(not math.isfinite(z) for z in zs):
                any_exceed = True
            row["exact"] = [float(p) for p in exact_probs]
            row["estimate"] = [float(p) for p in emp.estimate]
            row["stderr"] = [float(s) for s in emp.stderr]
            row["z"] = [_finite(z) for z in zs]
            row["max_abs_z"] = max(
                (abs(z) for z in zs if math.isfinite(z)), default=None
            )
        else:
            row["exact"] = None if exact_probs is None else [float(p) for p in exact_probs]
            row["estimate"] = None
            row["stderr"] = None
            row["z"] = None
            row["max_abs_z"] = None
            row["insufficient_data"] = emp.matches == 0
        row_z = []
        if row["event_z"] is not None:
            row_z.append(abs(row["event_z"]))
        if row["max_abs_z"] is not None:
            row_z.append(row["max_abs_z"])
        if any(z > Z_GATE for z in row_z):
            any_exceed = True
        rows.append(row)
    return {
        "rng": RNG_NAME,
        "seed": seed,
        "n": n,
        "model_hash": traj.model_hash,
        "z_gate": Z_GATE,
        "any_z_exceeds": any_exceed,
        "queries": rows,
    }


def export_trajectory(traj: Trajectory, path: str) -> None:
    """Write one `x y` line per step, preceded by a reproducibility header."""
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(f"# model {traj.model_hash}\n")
        handle.write(f"# seed {traj.seed}\n")
        handle.write(f"# n {traj.n}\n")
        handle.write(f"# rng {RNG_NAME}\n")
        for x, y in zip(traj.xs.tolist(), traj.ys.tolist()):
            handle.write(f"{x} {y}\n")
