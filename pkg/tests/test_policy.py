import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_instance
from oracles import brute_force, cost_exact, cost_float
from suspended_search import (
    BruteForceRefused,
    GroundTruth,
    SearchDomainError,
    SearchInstance,
    SearchState,
    actual_cost,
    block_violations,
    brute_force_optimal,
    expected_cost,
    gamma,
    greedy_policy,
    max_p_policy,
    min_n_policy,
    optimal_policy,
    random_policy,
)
from suspended_search.policy import as_policy, block_condition, is_valid


def test_two_friend_costs(two_friends):
    assert expected_cost(two_friends, ["a", "b"]) == pytest.approx(0.19, abs=1e-15)
    assert expected_cost(two_friends, ["b", "a"]) == pytest.approx(0.99, abs=1e-15)
    exact = cost_exact([10, 10], ["0.9", "0.1"], 5000, [0, 1])
    assert exact == Fraction(19, 100)
    assert cost_exact([10, 10], ["0.9", "0.1"], 5000, [1, 0]) == Fraction(99, 100)


def test_optimal_two_friends(two_friends):
    rep = optimal_policy(two_friends)
    assert rep.policy.sequence == ("a", "b")
    assert rep.expected_cost == pytest.approx(0.19)
    assert greedy_policy(two_friends).policy.sequence == ("a", "b")


def test_gamma_single_page():
    inst = SearchInstance.from_lists([10], [0.9])
    assert gamma(inst, SearchState.initial(inst), 0) == pytest.approx(1 / 9)


def test_gamma_block_branch():
    inst = SearchInstance.from_lists([10000], [0.5])
    assert block_condition(inst, 0)
    assert gamma(inst, SearchState({0: 0}), 0) == pytest.approx(2.5)
    assert gamma(inst, SearchState({0: 1}), 0) == pytest.approx(2.5)
    assert gamma(inst, SearchState({0: 2}), 0) == math.inf


def test_gamma_split_branches():
    inst = SearchInstance.from_lists([6000], [0.9])
    assert not block_condition(inst, 0)
    assert gamma(inst, SearchState({0: 0}), 0) == pytest.approx(1 / 3)
    assert gamma(inst, SearchState({0: 1}), 0) == pytest.approx(2 / 3)


def test_three_single_page_order():
    inst = SearchInstance.from_lists([10, 10, 10], [0.5, 0.3, 0.8], ids=["a", "b", "c"])
    rep = optimal_policy(inst)
    assert rep.policy.sequence == ("c", "a", "b")
    assert rep.gamma_trace == pytest.approx((0.25, 1.0, 7 / 3))
    best, argmins = brute_force([10, 10, 10], [0.5, 0.3, 0.8], 5000)
    assert argmins == [(2, 0, 1)]
    assert rep.expected_cost == pytest.approx(best, rel=1e-12)


def test_tie_break_by_id():
    inst = SearchInstance.from_lists([10, 10], [0.4, 0.4], ids=["z", "m"])
    assert optimal_policy(inst).policy.sequence == ("m", "z")
    assert greedy_policy(inst).policy.sequence == ("m", "z")


def test_zero_phi_friend_goes_last():
    inst = SearchInstance.from_lists([10, 10, 10], [0.0, 0.2, 0.0], ids=[1, 2, 3])
    assert optimal_policy(inst).policy.sequence == (2, 1, 3)


def test_rho0_affine():
    base = SearchInstance.from_lists([12000, 3000], [0.3, 0.6])
    seq = optimal_policy(base).policy.sequence
    c1 = expected_cost(base, seq)
    for r in (0.0, 0.25, 0.7):
        inst = base.with_rho(rho0=r)
        assert expected_cost(inst, seq) == pytest.approx(r * c1 + len(seq) * (1 - r), rel=1e-12)


def test_invalid_policy_rejected(two_friends):
    assert not is_valid(two_friends, ["a"])
    with pytest.raises(SearchDomainError):
        expected_cost(two_friends, ["a", "a"])
    with pytest.raises(SearchDomainError):
        as_policy(two_friends, ["a", "c"])


def test_baselines():
    inst = SearchInstance.from_lists([12000, 3000, 7000], [0.3, 0.6, 0.9], ids=["x", "y", "z"])
    assert min_n_policy(inst).policy.sequence[0] == "y"
    assert max_p_policy(inst).policy.sequence[0] == "z"
    r1, r2 = random_policy(inst, seed=4), random_policy(inst, seed=4)
    assert r1 == r2
    for rep in (greedy_policy(inst), min_n_policy(inst), max_p_policy(inst), r1):
        assert is_valid(inst, rep.policy)


def test_brute_force_cap():
    inst = SearchInstance.from_lists([10] * 11, [0.5] * 11)
    with pytest.raises(BruteForceRefused):
        brute_force_optimal(inst)


def test_brute_force_matches_oracle(rng):
    for _ in range(20):
        inst = random_instance(rng)
        followers = [f.follower_count for f in inst.friends]
        phis = [f.phi for f in inst.friends]
        best, _ = brute_force(followers, phis, 5000)
        assert brute_force_optimal(inst).expected_cost == pytest.approx(best, rel=1e-12)


def test_expected_cost_matches_independent_product(rng):
    for _ in range(30):
        inst = random_instance(rng, rho0=float(rng.uniform(0, 1)))
        seq = random_policy(inst, seed=int(rng.integers(1000))).policy.sequence
        idx = [inst.index_of(i) for i in seq]
        followers = [f.follower_count for f in inst.friends]
        phis = [f.phi for f in inst.friends]
        assert expected_cost(inst, seq) == pytest.approx(cost_float(followers, phis, 5000, idx, inst.rho0), rel=1e-12)


def test_actual_cost_examples(two_friends):
    assert actual_cost(two_friends, ["a", "b"], GroundTruth(frozenset({"b"}))) == 1.0
    assert actual_cost(two_friends, ["a", "b"], GroundTruth(frozenset({"a"}))) == 0.0
    assert actual_cost(two_friends, ["a", "b"], GroundTruth(frozenset(), exists=False)) == 2.0
    inst = SearchInstance.from_lists([10000], [0.5], ids=["a"])
    # target on page 1 or 2 with equal chance
    assert actual_cost(inst, ["a", "a"], GroundTruth(frozenset({"a"}))) == pytest.approx(0.5)


def test_truth_rejects_reconnections_without_account():
    with pytest.raises(ValueError):
        GroundTruth(frozenset({"a"}), exists=False)


def test_block_violations_detects_interleaving():
    inst = SearchInstance.from_lists([15000, 10], [0.5, 0.5], ids=["a", "b"])
    assert block_violations(inst, ["a", "b", "a", "a"])
    assert not block_violations(inst, optimal_policy(inst).policy)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 15000), st.floats(0.05, 0.95)), min_size=1, max_size=3))
def test_optimal_never_worse_than_baselines(friends):
    inst = SearchInstance.from_lists([n for n, _ in friends], [p for _, p in friends])
    opt = optimal_policy(inst).expected_cost
    for rep in (greedy_policy(inst), min_n_policy(inst), max_p_policy(inst), random_policy(inst)):
        assert opt <= rep.expected_cost * (1 + 1e-12) + 1e-12


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 15000), st.floats(0.0, 1.0)), min_size=1, max_size=4),
       st.floats(0.0, 1.0))
def test_cost_bounds(friends, rho0):
    inst = SearchInstance.from_lists([n for n, _ in friends], [p for _, p in friends], rho0=rho0)
    c = optimal_policy(inst).expected_cost
    assert -1e-12 <= c <= inst.total_queries + 1e-12
