"""Independent brute-force oracles used to freeze expected values.

Everything here is deliberately naive: plain Python loops over explicitly
enumerated pair sequences, probabilities assembled one factor at a time, and
an undamped power iteration.  No code is shared with the package's engine
beyond the model dataclasses, so agreement is meaningful evidence.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def naive_stationary(kernel, tol=1e-14, max_iter=10**6):
    """Plain power iteration on the context chain, no damping."""
    n = kernel.context_count
    a2 = kernel.pair_count
    v = [1.0 / n] * n
    for _ in range(max_iter):
        nxt = [0.0] * n
        for c in range(n):
            base = (c * a2) % n
            for e in range(a2):
                nxt[(base + e) % n] += v[c] * kernel.table[c, e]
        diff = sum(abs(nxt[c] - v[c]) for c in range(n))
        v = nxt
        if diff < tol:
            break
    total = math.fsum(v)
    return np.array([x / total for x in v])


def naive_sequence_prob(kernel, pi, seq):
    """Probability of one pair-code sequence, factor by factor."""
    a2 = kernel.pair_count
    m = kernel.order
    length = len(seq)
    if length == 0:
        return 1.0
    if length < m:
        total = 0.0
        for prefix in itertools.product(range(a2), repeat=m - length):
            code = 0
            for e in prefix + tuple(seq):
                code = code * a2 + e
            total += pi[code]
        return total
    code = 0
    for e in seq[:m]:
        code = code * a2 + e
    prob = pi[code]
    for t in range(m, length):
        prob *= kernel.table[code, seq[t]]
        code = (code * a2 + seq[t]) % kernel.context_count
    return prob


def matches_slot(slot, code, size):
    x, y = code // size, code % size
    return (slot.x is None or slot.x == x) and (slot.y is None or slot.y == y)


def naive_event_prob(kernel, pi, pattern):
    """Sum over every sequence of the pattern's depth, filtered slot by slot."""
    size = kernel.size
    total = []
    for seq in itertools.product(range(kernel.pair_count), repeat=pattern.depth):
        if all(
            matches_slot(slot, code, size) for slot, code in zip(pattern.slots, seq)
        ):
            total.append(naive_sequence_prob(kernel, pi, seq))
    return math.fsum(total)


def naive_conditional(kernel, pi, pattern, target, extra=None):
    """Conditional law over target symbols by full enumeration of the window."""
    size = kernel.size
    a2 = kernel.pair_count
    count = a2 if target == "Z0" else size
    sums = [[] for _ in range(count)]
    mass = []
    for seq in itertools.product(range(a2), repeat=pattern.depth + 1):
        window, last = seq[:-1], seq[-1]
        if not all(
            matches_slot(slot, code, size) for slot, code in zip(pattern.slots, window)
        ):
            continue
        if extra is not None and not matches_slot(extra, last, size):
            continue
        prob = naive_sequence_prob(kernel, pi, seq)
        mass.append(prob)
        if target == "X0":
            sums[last // size].append(prob)
        elif target == "Y0":
            sums[last % size].append(prob)
        else:
            sums[last].append(prob)
    denom = math.fsum(mass)
    if denom <= 0:
        return None, 0.0
    return np.array([math.fsum(s) / denom for s in sums]), denom


def naive_oscillation(kernel, pi, j, k):
    """Double loop over recent words and both deep pasts, log-ratio supremum."""
    from coupledchains.patterns import ObservationPattern, Slot

    size = kernel.size
    a2 = kernel.pair_count
    best = 0.0
    for x_word in itertools.product(range(size), repeat=j):
        laws = []
        for eta in itertools.product(range(a2), repeat=k - j):
            slots = tuple(
                Slot.pair(code // size, code % size) for code in eta
            ) + tuple(Slot.x_eq(s) for s in x_word)
            law, mass = naive_conditional(
                kernel, pi, ObservationPattern(slots), "X0"
            )
            if mass > 0:
                laws.append(law)
        for a in range(size):
            for one in laws:
                for other in laws:
                    if one[a] > 0 and other[a] > 0:
                        best = max(best, math.log(one[a] / other[a]))
    return best
