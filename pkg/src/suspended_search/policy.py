"""Query orderings: the optimal index policy, four baselines, and cost evaluation."""
from __future__ import annotations

import heapq
import math
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .model import (
    SearchDomainError,
    SearchInstance,
    SearchState,
    _fraction,
    _success_given_exists,
    failure_table,
    query_count,
)

DEFAULT_BRUTE_FORCE_CAP = 10


class BruteForceRefused(SearchDomainError):
    """The instance has more queries than the enumeration cap allows."""


@dataclass(frozen=True)
class Policy:
    sequence: tuple

    def __post_init__(self):
        object.__setattr__(self, "sequence", tuple(self.sequence))

    def __len__(self):
        return len(self.sequence)

    def __iter__(self):
        return iter(self.sequence)


@dataclass(frozen=True)
class GroundTruth:
    """Which friends the target actually refollowed, and whether a new account exists."""

    reconnected: frozenset
    exists: bool = True

    def __post_init__(self):
        object.__setattr__(self, "reconnected", frozenset(self.reconnected))
        if self.reconnected and not self.exists:
            raise SearchDomainError("reconnections recorded for a target with no new account")


@dataclass(frozen=True)
class PolicyReport:
    policy: Policy
    expected_cost: float
    gamma_trace: tuple | None = None
    name: str = ""


def _sequence(policy) -> tuple:
    return policy.sequence if isinstance(policy, Policy) else tuple(policy)


def is_valid(instance: SearchInstance, policy) -> bool:
    """True iff every friend appears exactly as many times as it has pages."""
    try:
        seen = Counter(_sequence(policy))
    except TypeError:
        return False
    return seen == Counter(instance.query_counts)


def _require_valid(instance, policy) -> tuple:
    seq = _sequence(policy)
    if not is_valid(instance, seq):
        raise SearchDomainError("policy is not valid for this instance")
    return seq


def expected_cost(instance: SearchInstance, policy) -> float:
    """Expected number of unsuccessful queries when the search runs to completion."""
    seq = _require_valid(instance, policy)
    q = failure_table(instance)
    idx = np.fromiter((instance.index_of(f) for f in seq), dtype=np.int64, count=len(seq))
    s = kernels.sequence_cost(q, idx)
    return instance.rho0 * s + len(seq) * (1.0 - instance.rho0)


# --- the index of the optimal policy ---------------------------------------

def _block_terms(n: int, page: int, phi: float):
    c = query_count(n, page)
    lhs = n / (page * phi) - 0.5 * c
    rhs = n * (1.0 - phi) / (phi * (n - c * page + page))
    return c, lhs, rhs


def block_condition(instance: SearchInstance, friend) -> bool:
    """Whether finishing the friend in one uninterrupted block is preferred.

    Equality is counted as holding; an optimal policy then still exists that
    keeps the friend in a single block.
    """
    f = instance.friend(friend)
    if f.phi <= 0.0:
        return False
    _, lhs, rhs = _block_terms(f.follower_count, instance.page_size, f.phi)
    return lhs >= rhs


def _gamma(n: int, page: int, phi: float, x: int) -> float:
    c = query_count(n, page)
    if x >= c or phi <= 0.0:
        return math.inf
    c, lhs, rhs = _block_terms(n, page, phi)
    if lhs >= rhs:
        return c / phi - page / (2.0 * n) * c * (c - 1) - 1.0
    if x <= c - 2:
        return lhs
    return rhs


def gamma(instance: SearchInstance, state: SearchState, friend) -> float:
    """Index minimized at every stage by an optimal policy (``inf`` once exhausted)."""
    f = instance.friend(friend)
    return _gamma(f.follower_count, instance.page_size, f.phi, state.count(friend))


# --- stagewise constructors ------------------------------------------------

def _stagewise(instance: SearchInstance, score) -> tuple:
    """Build a policy by repeatedly taking the friend with the lowest score.

    ``score(friend, x)`` depends only on that friend's own query count, so a
    heap with lazy re-insertion of the queried friend suffices. Ties go to
    the smallest friend id.
    """
    rank = {fid: r for r, fid in enumerate(sorted(instance.ids))}
    limits = instance.query_counts
    done = {f.id: 0 for f in instance.friends}
    heap = [(score(f, 0), rank[f.id], f.id) for f in instance.friends]
    heapq.heapify(heap)
    seq = []
    while heap:
        _, _, fid = heapq.heappop(heap)
        seq.append(fid)
        done[fid] += 1
        if done[fid] < limits[fid]:
            heapq.heappush(heap, (score(instance.friend(fid), done[fid]), rank[fid], fid))
    return tuple(seq)


def _report(instance, seq, name, with_gamma=False) -> PolicyReport:
    trace = None
    if with_gamma:
        done = Counter()
        vals = []
        for fid in seq:
            f = instance.friend(fid)
            vals.append(_gamma(f.follower_count, instance.page_size, f.phi, done[fid]))
            done[fid] += 1
        trace = tuple(vals)
    return PolicyReport(Policy(seq), expected_cost(instance, seq), trace, name)


def optimal_policy(instance: SearchInstance) -> PolicyReport:
    """Index policy: query the friend with the smallest gamma at every stage."""
    page = instance.page_size
    seq = _stagewise(instance, lambda f, x: _gamma(f.follower_count, page, f.phi, x))
    return _report(instance, seq, "optimal", with_gamma=True)


def greedy_policy(instance: SearchInstance) -> PolicyReport:
    page = instance.page_size

    def score(f, x):
        c = query_count(f.follower_count, page)
        return -_success_given_exists(f.follower_count, page, f.phi, c, x)

    return _report(instance, _stagewise(instance, score), "greedy")


def min_n_policy(instance: SearchInstance) -> PolicyReport:
    page = instance.page_size
    seq = _stagewise(instance, lambda f, x: max(f.follower_count - x * page, 0))
    return _report(instance, seq, "min_n")


def max_p_policy(instance: SearchInstance) -> PolicyReport:
    page = instance.page_size

    def score(f, x):
        psi = _fraction(f.follower_count, page, x)
        if psi >= 1.0:
            return 0.0
        return -(f.phi * (1.0 - psi) / (1.0 - psi * f.phi))

    return _report(instance, _stagewise(instance, score), "max_p")


def random_sequence(instance: SearchInstance, rng: np.random.Generator) -> tuple:
    """Uniform choice among friends with queries left, stage by stage."""
    ids = sorted(instance.ids)
    left = [instance.query_counts[i] for i in ids]
    live = [k for k in range(len(ids)) if left[k] > 0]
    seq = []
    while live:
        j = int(rng.integers(len(live)))
        k = live[j]
        seq.append(ids[k])
        left[k] -= 1
        if left[k] == 0:
            live.pop(j)
    return tuple(seq)


def random_policy(instance: SearchInstance, seed: int = 0) -> PolicyReport:
    seq = random_sequence(instance, np.random.default_rng(seed))
    return _report(instance, seq, "random")


POLICY_BUILDERS = {
    "optimal": optimal_policy,
    "greedy": greedy_policy,
    "min_n": min_n_policy,
    "max_p": max_p_policy,
}


def brute_force_optimal(instance: SearchInstance, cap: int = DEFAULT_BRUTE_FORCE_CAP) -> PolicyReport:
    """Exhaustive minimum over every distinct valid ordering.

    Refuses instances with more than ``cap`` total queries.
    """
    n = instance.total_queries
    if n > cap:
        raise BruteForceRefused(f"{n} queries exceeds the brute-force cap of {cap}")
    ids = sorted(instance.ids)
    ordered = SearchInstance(
        tuple(instance.friend(i) for i in ids),
        page_size=instance.page_size,
        rho0=instance.rho0,
        rho_bar=instance.rho_bar,
    )
    counts = np.array([query_count(f.follower_count, ordered.page_size) for f in ordered.friends])
    _, best = kernels.brute_force_min(failure_table(ordered), counts)
    seq = tuple(ids[int(k)] for k in best)
    return _report(instance, seq, "brute_force")


def actual_cost(instance: SearchInstance, policy, truth: GroundTruth) -> float:
    """Expected unsuccessful queries given the realized reconnections.

    The target's position among each reconnected friend's followers is
    uniform and independent across friends.
    """
    seq = _require_valid(instance, policy)
    reconnected = [f for f in truth.reconnected]
    for fid in reconnected:
        instance.index_of(fid)
    if not truth.exists or not reconnected:
        return float(len(seq))
    page = instance.page_size
    factors = {fid: 1.0 for fid in reconnected}
    done = Counter()
    prod = 1.0
    total = 0.0
    for fid in seq:
        done[fid] += 1
        if fid in factors:
            f = instance.friend(fid)
            factors[fid] = 1.0 - _fraction(f.follower_count, page, done[fid])
            prod = max(math.prod(factors.values()), 0.0)
        total += prod
    return total


def block_violations(instance: SearchInstance, policy) -> list[str]:
    """Describe every breach of the block structure an optimal policy must have."""
    seq = _sequence(policy)
    problems = []
    for fid, c in instance.query_counts.items():
        stages = [t for t, u in enumerate(seq) if u == fid]
        head = stages[: c - 1]
        if head and head[-1] - head[0] != len(head) - 1:
            problems.append(f"first {c - 1} queries of {fid!r} are not contiguous")
        f = instance.friend(fid)
        if c > 1 and f.phi > 0:
            _, lhs, rhs = _block_terms(f.follower_count, instance.page_size, f.phi)
            if lhs > rhs and stages[-1] - stages[0] != c - 1:
                problems.append(f"all {c} queries of {fid!r} should form one block")
    return problems


def policy_for(instance: SearchInstance, name: str, seed: int = 0) -> PolicyReport:
    if name == "random":
        return random_policy(instance, seed)
    try:
        return POLICY_BUILDERS[name](instance)
    except KeyError:
        raise SearchDomainError(f"unknown policy {name!r}") from None


def as_policy(instance: SearchInstance, ids: Sequence) -> Policy:
    seq = tuple(ids)
    _require_valid(instance, seq)
    return Policy(seq)
