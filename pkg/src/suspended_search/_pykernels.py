"""Pure-Python implementations of the hot kernels.

These mirror ``_ckernels.pyx`` operation for operation so that both backends
produce bit-identical floating point results.
"""
from __future__ import annotations

import numpy as np


def indel_distance(a: str, b: str) -> int:
    """Edit distance with insert/delete cost 1 and substitution cost 2."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i] + [0] * len(b)
        for j, cb in enumerate(b, 1):
            if ca == cb:
                best = prev[j - 1]
            else:
                best = prev[j - 1] + 2
            if prev[j] + 1 < best:
                best = prev[j] + 1
            if cur[j - 1] + 1 < best:
                best = cur[j - 1] + 1
            cur[j] = best
        prev = cur
    return prev[len(b)]


def levenshtein_distance(a: str, b: str) -> int:
    """Classic edit distance, all operations cost 1."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i] + [0] * len(b)
        for j, cb in enumerate(b, 1):
            best = prev[j - 1] + (ca != cb)
            if prev[j] + 1 < best:
                best = prev[j] + 1
            if cur[j - 1] + 1 < best:
                best = cur[j - 1] + 1
            cur[j] = best
        prev = cur
    return prev[len(b)]


def sequence_cost(q, seq) -> float:
    """Sum over stages of the running product of failure probabilities.

    ``q[i, k]`` is the failure probability of the k-th query of friend ``i``;
    ``seq`` is a sequence of friend indices.
    """
    q = np.asarray(q, dtype=np.float64)
    counts = [0] * q.shape[0]
    prod = 1.0
    total = 0.0
    for i in seq:
        i = int(i)
        prod = prod * float(q[i, counts[i]])
        if prod < 0.0:
            prod = 0.0
        counts[i] += 1
        total = total + prod
    return total


def brute_force_min(q, counts):
    """Exhaustive minimum of ``sequence_cost`` over all multiset orderings.

    Friends are tried in ascending index order and only strictly better
    sequences replace the incumbent, so the returned minimizer is the
    lexicographically first one. Branches whose partial sum already reaches
    the incumbent are pruned (every term is nonnegative).
    """
    qrows = [list(map(float, row)) for row in np.asarray(q, dtype=np.float64)]
    remaining = [int(c) for c in counts]
    done = [0] * len(remaining)
    n = sum(remaining)
    seq = [0] * n
    best = [float("inf"), None]

    def dfs(depth: int, prod: float, total: float) -> None:
        if total >= best[0]:
            return
        if depth == n:
            best[0] = total
            best[1] = list(seq)
            return
        for i in range(len(remaining)):
            if remaining[i] == 0:
                continue
            p = prod * qrows[i][done[i]]
            if p < 0.0:
                p = 0.0
            remaining[i] -= 1
            done[i] += 1
            seq[depth] = i
            dfs(depth + 1, p, total + p)
            remaining[i] += 1
            done[i] -= 1

    dfs(0, 1.0, 0.0)
    return best[0], np.asarray(best[1], dtype=np.int64)
