"""Independent reference computations used to check the package.

Nothing here imports the package's cost or policy code: costs come straight
from the not-found product over friends, and orderings are enumerated
exhaustively.
"""
from __future__ import annotations

import math
from fractions import Fraction


def queries(n: int, page: int) -> int:
    return -(-n // page)


def psi(n: int, page: int, x: int):
    return 1 if x >= queries(n, page) else Fraction(x * page, n)


def cost_exact(followers, phis, page, seq, rho0=1):
    """Expected unsuccessful queries as an exact Fraction.

    Query t fails iff the target is not found through query t, which has
    probability (1 - rho0) + rho0 * prod_i (1 - psi_i * phi_i).
    """
    phis = [Fraction(p) for p in phis]
    rho0 = Fraction(rho0)
    done = [0] * len(followers)
    total = Fraction(0)
    for i in seq:
        done[i] += 1
        prod = Fraction(1)
        for k, n in enumerate(followers):
            prod *= 1 - psi(n, page, done[k]) * phis[k]
        total += (1 - rho0) + rho0 * prod
    return total


def cost_float(followers, phis, page, seq, rho0=1.0) -> float:
    done = [0] * len(followers)
    total = 0.0
    for i in seq:
        done[i] += 1
        prod = math.prod(1.0 - float(psi(n, page, done[k])) * phis[k] for k, n in enumerate(followers))
        total += (1.0 - rho0) + rho0 * prod
    return total


def multiset_permutations(counts):
    """Every distinct ordering of a multiset given as per-item counts."""
    counts = list(counts)
    total = sum(counts)
    out = []
    seq = []

    def rec():
        if len(seq) == total:
            out.append(tuple(seq))
            return
        for i, c in enumerate(counts):
            if c:
                counts[i] -= 1
                seq.append(i)
                rec()
                seq.pop()
                counts[i] += 1

    rec()
    return out


def brute_force(followers, phis, page, rho0=1.0):
    """(min cost, every minimizing ordering) by enumeration."""
    counts = [queries(n, page) for n in followers]
    scored = [(cost_float(followers, phis, page, s, rho0), s) for s in multiset_permutations(counts)]
    best = min(c for c, _ in scored)
    return best, [s for c, s in scored if c <= best * (1 + 1e-12)]


def indel_distance(a: str, b: str) -> int:
    """Insertions and deletions only, via the longest common subsequence."""
    m, n = len(a), len(b)
    lcs = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(m):
        for j in range(n):
            lcs[i + 1][j + 1] = lcs[i][j] + 1 if a[i] == b[j] else max(lcs[i][j + 1], lcs[i + 1][j])
    return m + n - 2 * lcs[m][n]


def levenshtein(a: str, b: str) -> int:
    if not a:
        return len(b)
    if not b:
        return len(a)
    d = [[i + j if i * j == 0 else 0 for j in range(len(b) + 1)] for i in range(len(a) + 1)]
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            d[i][j] = min(d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] != b[j - 1]))
    return d[-1][-1]


def clustering_oracle(nodes, edges) -> Fraction:
    """Mean local clustering coefficient, degree < 2 counted as zero."""
    adj = {v: set() for v in nodes}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    total = Fraction(0)
    for v in nodes:
        nb = sorted(adj[v])
        k = len(nb)
        if k < 2:
            continue
        links = sum(1 for i in range(k) for j in range(i + 1, k) if nb[j] in adj[nb[i]])
        total += Fraction(2 * links, k * (k - 1))
    return total / len(nodes)
