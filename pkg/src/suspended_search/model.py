"""Multi-urn model of the search for a suspended user's new account.

Each former friend is an urn holding its followers; one follower query
removes up to ``page_size`` of them. The functions here give the per-state
probabilities that drive every policy and the simulator.
"""
from __future__ import annotations

import enum
import math
from collections.abc import Hashable, Iterable, Mapping
from dataclasses import dataclass, field

import numpy as np

FriendId = Hashable


class SearchDomainError(ValueError):
    """Raised for requests outside the model's domain (unknown friend, exhausted urn...)."""


class Termination(str, enum.Enum):
    FOUND = "Found"
    BELOW_THRESHOLD = "BelowThreshold"
    EXHAUSTED = "Exhausted"


def query_count(follower_count: int, page_size: int) -> int:
    """Number of queries needed to retrieve every follower."""
    return -(-int(follower_count) // int(page_size))


@dataclass(frozen=True)
class FriendSpec:
    id: FriendId
    follower_count: int
    phi: float

    def __post_init__(self):
        if isinstance(self.follower_count, bool) or int(self.follower_count) != self.follower_count:
            raise SearchDomainError(f"friend {self.id!r}: follower_count must be an integer")
        if self.follower_count < 1:
            raise SearchDomainError(f"friend {self.id!r}: follower_count must be >= 1")
        if not (0.0 <= self.phi <= 1.0) or math.isnan(self.phi):
            raise SearchDomainError(f"friend {self.id!r}: phi must lie in [0, 1]")


@dataclass(frozen=True)
class SearchInstance:
    """Former friends, page size, prior existence probability and stop threshold."""

    friends: tuple[FriendSpec, ...]
    page_size: int = 5000
    rho0: float = 1.0
    rho_bar: float = 0.0
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        friends = tuple(self.friends)
        object.__setattr__(self, "friends", friends)
        if not friends:
            raise SearchDomainError("instance needs at least one friend")
        if isinstance(self.page_size, bool) or int(self.page_size) != self.page_size or self.page_size < 1:
            raise SearchDomainError("page_size must be a positive integer")
        if not 0.0 <= self.rho0 <= 1.0:
            raise SearchDomainError("rho0 must lie in [0, 1]")
        if not 0.0 <= self.rho_bar < 1.0:
            raise SearchDomainError("rho_bar must lie in [0, 1)")
        index = {}
        for k, f in enumerate(friends):
            if f.id in index:
                raise SearchDomainError(f"duplicate friend id {f.id!r}")
            index[f.id] = k
        try:
            sorted(index)
        except TypeError as exc:
            raise SearchDomainError("friend ids must be mutually comparable") from exc
        object.__setattr__(self, "_index", index)

    @classmethod
    def from_lists(cls, follower_counts, phis, *, ids=None, page_size=5000, rho0=1.0, rho_bar=0.0):
        ids = list(range(len(follower_counts))) if ids is None else list(ids)
        friends = tuple(FriendSpec(i, int(n), float(p)) for i, n, p in zip(ids, follower_counts, phis))
        return cls(friends, page_size=page_size, rho0=rho0, rho_bar=rho_bar)

    @property
    def ids(self) -> list:
        return [f.id for f in self.friends]

    @property
    def query_counts(self) -> dict:
        return {f.id: query_count(f.follower_count, self.page_size) for f in self.friends}

    @property
    def total_queries(self) -> int:
        return sum(self.query_counts.values())

    def friend(self, friend_id) -> FriendSpec:
        try:
            return self.friends[self._index[friend_id]]
        except (KeyError, TypeError):
            raise SearchDomainError(f"unknown friend id {friend_id!r}") from None

    def index_of(self, friend_id) -> int:
        try:
            return self._index[friend_id]
        except (KeyError, TypeError):
            raise SearchDomainError(f"unknown friend id {friend_id!r}") from None

    def with_rho(self, rho0=None, rho_bar=None) -> "SearchInstance":
        return SearchInstance(
            self.friends,
            page_size=self.page_size,
            rho0=self.rho0 if rho0 is None else rho0,
            rho_bar=self.rho_bar if rho_bar is None else rho_bar,
        )


@dataclass(frozen=True)
class SearchState:
    """Queries executed so far on each friend, or a terminal marker."""

    queries_done: Mapping = field(default_factory=dict)
    terminated: Termination | None = None

    @property
    def stage(self) -> int:
        return sum(self.queries_done.values())

    def count(self, friend_id) -> int:
        return int(self.queries_done.get(friend_id, 0))

    @classmethod
    def initial(cls, instance: SearchInstance) -> "SearchState":
        return cls({f.id: 0 for f in instance.friends})

    @classmethod
    def after(cls, instance: SearchInstance, queries: Iterable) -> "SearchState":
        """State reached by executing ``queries`` without finding the target."""
        counts = {f.id: 0 for f in instance.friends}
        for q in queries:
            instance.index_of(q)
            counts[q] += 1
        return cls(counts)

    def advance(self, friend_id) -> "SearchState":
        counts = dict(self.queries_done)
        counts[friend_id] = counts.get(friend_id, 0) + 1
        return SearchState(counts)

    def validate(self, instance: SearchInstance) -> None:
        limits = instance.query_counts
        for fid, x in self.queries_done.items():
            if fid not in limits:
                raise SearchDomainError(f"unknown friend id {fid!r}")
            if not 0 <= x <= limits[fid]:
                raise SearchDomainError(f"friend {fid!r}: {x} queries exceeds {limits[fid]}")


def _require_live(state: SearchState) -> None:
    if state.terminated is not None:
        raise SearchDomainError(f"state is terminal ({state.terminated.value})")


def _fraction(follower_count: int, page_size: int, x: int) -> float:
    c = query_count(follower_count, page_size)
    if x >= c:
        return 1.0
    return x * page_size / follower_count


def queried_fraction(instance: SearchInstance, state: SearchState, friend) -> float:
    """Fraction of a friend's followers already retrieved."""
    _require_live(state)
    f = instance.friend(friend)
    x = state.count(friend)
    if x > query_count(f.follower_count, instance.page_size):
        raise SearchDomainError(f"friend {friend!r} queried more times than it has pages")
    return _fraction(f.follower_count, instance.page_size, x)


def _not_found_product(instance: SearchInstance, state: SearchState) -> float:
    prod = 1.0
    for f in instance.friends:
        prod *= 1.0 - _fraction(f.follower_count, instance.page_size, state.count(f.id)) * f.phi
    return max(prod, 0.0)


def _posterior(rho0: float, prod: float) -> float:
    num = rho0 * prod
    den = 1.0 - rho0 + num
    if den <= 0.0:
        # rho0 == 1 and every reconnection ruled out: the state is unreachable.
        return 0.0
    return num / den


def existence_probability(instance: SearchInstance, state: SearchState) -> float:
    """Posterior probability that a new account exists, given no hit so far."""
    _require_live(state)
    return _posterior(instance.rho0, _not_found_product(instance, state))


def conditional_reconnection(instance: SearchInstance, state: SearchState, friend) -> float:
    """P(target follows ``friend`` | account exists, not found so far)."""
    psi = queried_fraction(instance, state, friend)
    phi = instance.friend(friend).phi
    if psi >= 1.0:
        return 0.0
    return phi * (1.0 - psi) / (1.0 - psi * phi)


def _remaining_guard(instance: SearchInstance, state: SearchState, friend):
    _require_live(state)
    f = instance.friend(friend)
    c = query_count(f.follower_count, instance.page_size)
    x = state.count(friend)
    if x >= c:
        raise SearchDomainError(f"friend {friend!r} has no queries left")
    return f, c, x


def _success_given_exists(n: int, page: int, phi: float, c: int, x: int) -> float:
    den = n - phi * x * page
    if x <= c - 2:
        return phi * page / den
    return phi * (n - x * page) / den


def _failure_given_exists(n: int, page: int, phi: float, c: int, x: int) -> float:
    den = n - phi * x * page
    if x <= c - 2:
        return (n - phi * (x + 1) * page) / den
    return (1.0 - phi) * n / den


def success_probability_given_A(instance: SearchInstance, state: SearchState, friend) -> float:
    """P(next query of ``friend`` finds the target | account exists, state)."""
    f, c, x = _remaining_guard(instance, state, friend)
    return _success_given_exists(f.follower_count, instance.page_size, f.phi, c, x)


def failure_probability_given_A(instance: SearchInstance, state: SearchState, friend) -> float:
    f, c, x = _remaining_guard(instance, state, friend)
    return _failure_given_exists(f.follower_count, instance.page_size, f.phi, c, x)


def unconditional_success_probability(instance: SearchInstance, state: SearchState, friend) -> float:
    p = success_probability_given_A(instance, state, friend)
    return p * existence_probability(instance, state)


def failure_table(instance: SearchInstance) -> np.ndarray:
    """Failure probability of the k-th query of each friend, given existence.

    Row order follows ``instance.friends``; unused cells are padded with 1.
    """
    counts = [query_count(f.follower_count, instance.page_size) for f in instance.friends]
    table = np.ones((len(counts), max(counts)), dtype=np.float64)
    for r, (f, c) in enumerate(zip(instance.friends, counts)):
        for x in range(c):
            table[r, x] = _failure_given_exists(f.follower_count, instance.page_size, f.phi, c, x)
    return table


def existence_trajectory(instance: SearchInstance, policy_ids) -> np.ndarray:
    """Posterior existence probability before each stage and after the last."""
    page = instance.page_size
    factors = {f.id: 1.0 for f in instance.friends}
    done = {f.id: 0 for f in instance.friends}
    out = np.empty(len(policy_ids) + 1)
    out[0] = _posterior(instance.rho0, max(math.prod(factors.values()), 0.0))
    for t, fid in enumerate(policy_ids):
        f = instance.friend(fid)
        done[fid] += 1
        factors[fid] = 1.0 - _fraction(f.follower_count, page, done[fid]) * f.phi
        # same multiplication order as _not_found_product, so values agree exactly
        out[t + 1] = _posterior(instance.rho0, max(math.prod(factors.values()), 0.0))
    return out
