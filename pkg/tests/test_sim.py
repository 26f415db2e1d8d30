import numpy as np
import pytest

from suspended_search import GroundTruth, SearchInstance, expected_cost, optimal_policy, simulate, simulate_given_truth
from suspended_search.model import SearchDomainError
from suspended_search.sim import CHUNK, threshold_stage


def test_seed_reproducible(two_friends):
    a = simulate(two_friends, ["a", "b"], 5000, seed=11)
    b = simulate(two_friends, ["a", "b"], 5000, seed=11)
    assert a == b and a.costs == b.costs
    c = simulate(two_friends, ["a", "b"], 5000, seed=12)
    assert c.costs != a.costs


def test_chunk_boundary_consistent(two_friends):
    # runs just past one chunk exercise the second batch
    rep = simulate(two_friends, ["a", "b"], CHUNK + 7, seed=1)
    assert len(rep.costs) == CHUNK + 7
    assert sum(rep.termination_counts.values()) == CHUNK + 7


def test_mean_near_expected(two_friends):
    rep = simulate(two_friends, ["b", "a"], 40000, seed=3)
    assert abs(rep.mean_unsuccessful_queries - 0.99) < 4 * rep.std_error


def test_given_truth_matches_actual_cost():
    inst = SearchInstance.from_lists([12000, 10], [0.5, 0.5], ids=["a", "b"])
    truth = GroundTruth(frozenset({"a"}))
    seq = ["b", "a", "a", "a"]
    rep = simulate_given_truth(inst, seq, truth, 60000, seed=2)
    from suspended_search import actual_cost
    exact = actual_cost(inst, seq, truth)
    assert abs(rep.mean_unsuccessful_queries - exact) < 4 * rep.std_error


def test_no_account_costs_everything(two_friends):
    rep = simulate_given_truth(two_friends, ["a", "b"], GroundTruth(frozenset(), exists=False), 100)
    assert set(rep.costs) == {2}
    assert rep.termination_counts["Exhausted"] == 100


def test_threshold_stops_search():
    inst = SearchInstance.from_lists([10, 10, 10], [0.9, 0.5, 0.5], rho0=0.5, rho_bar=0.3)
    seq = optimal_policy(inst).policy.sequence
    t = threshold_stage(inst, seq)
    assert 0 < t < 3
    rep = simulate(inst, seq, 2000, seed=0)
    assert max(rep.costs) <= t
    assert rep.termination_counts["BelowThreshold"] > 0


def test_runs_must_be_positive(two_friends):
    with pytest.raises(SearchDomainError):
        simulate(two_friends, ["a", "b"], 0)


def test_report_dict(two_friends):
    d = simulate(two_friends, ["a", "b"], 10).to_dict()
    assert d["rng"] == "numpy.PCG64" and d["runs"] == 10 and "costs" not in d
