"""Monte Carlo execution of a fixed query policy.

Each run draws whether a new account exists, which friends the target
refollowed, and where the target sits in each refollowed friend's follower
list; the policy is then replayed until the target is found, the posterior
existence probability drops below the threshold, or the queries run out.

Randomness comes from numpy's PCG64 generator seeded with ``seed``. Runs are
drawn in fixed-size chunks so results do not depend on ``runs`` beyond the
prefix they share.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import SearchDomainError, SearchInstance, Termination, existence_trajectory, query_count
from .policy import GroundTruth, _require_valid

RNG_ALGORITHM = "numpy.PCG64"
CHUNK = 8192


@dataclass(frozen=True)
class SimReport:
    runs: int
    mean_unsuccessful_queries: float
    std_error: float
    termination_counts: dict
    seed: int
    rng: str = RNG_ALGORITHM
    costs: tuple = field(default=(), repr=False)

    def to_dict(self, include_costs: bool = False) -> dict:
        out = {
            "runs": self.runs,
            "mean_unsuccessful_queries": self.mean_unsuccessful_queries,
            "std_error": self.std_error,
            "termination_counts": dict(self.termination_counts),
            "seed": self.seed,
            "rng": self.rng,
        }
        if include_costs:
            out["costs"] = list(self.costs)
        return out


def _stage_table(instance: SearchInstance, seq) -> np.ndarray:
    """stage_of[f, k] = stage at which friend f's k-th query is executed."""
    counts = [query_count(f.follower_count, instance.page_size) for f in instance.friends]
    table = np.full((len(counts), max(counts)), -1, dtype=np.int64)
    done = [0] * len(counts)
    for t, fid in enumerate(seq):
        r = instance.index_of(fid)
        table[r, done[r]] = t
        done[r] += 1
    return table


def threshold_stage(instance: SearchInstance, seq) -> int:
    """First stage whose pre-query existence probability is below ``rho_bar``.

    Returns ``len(seq)`` when the threshold is never crossed.
    """
    n = len(seq)
    if instance.rho_bar <= 0.0:
        return n
    rho = existence_trajectory(instance, seq)[:n]
    below = np.flatnonzero(rho < instance.rho_bar)
    return int(below[0]) if below.size else n


def _run(instance, seq, runs, seed, truth: GroundTruth | None) -> SimReport:
    if runs < 1:
        raise SearchDomainError("runs must be >= 1")
    n = len(seq)
    stage_of = _stage_table(instance, seq)
    t_stop = threshold_stage(instance, seq)
    followers = np.array([f.follower_count for f in instance.friends], dtype=np.int64)
    phis = np.array([f.phi for f in instance.friends])
    nf = len(followers)
    rows = np.arange(nf)
    if truth is not None:
        fixed = np.zeros(nf, dtype=bool)
        for fid in truth.reconnected:
            fixed[instance.index_of(fid)] = True
        fixed &= truth.exists

    rng = np.random.default_rng(seed)
    costs = np.empty(runs, dtype=np.int64)
    reasons = np.empty(runs, dtype=np.int8)
    for start in range(0, runs, CHUNK):
        m = min(CHUNK, runs - start)
        if truth is None:
            exists = rng.random(m) < instance.rho0
            linked = (rng.random((m, nf)) < phis) & exists[:, None]
        else:
            linked = np.broadcast_to(fixed, (m, nf))
        pos = rng.integers(0, followers, size=(m, nf))
        pages = pos // instance.page_size
        hit_stage = np.where(linked, stage_of[rows, pages], n)
        found = hit_stage.min(axis=1)
        cost = np.where(found < t_stop, found, min(t_stop, n))
        reason = np.where(found < t_stop, 0, 1 if t_stop < n else 2)
        costs[start:start + m] = cost
        reasons[start:start + m] = reason

    names = (Termination.FOUND, Termination.BELOW_THRESHOLD, Termination.EXHAUSTED)
    tally = np.bincount(reasons, minlength=3)
    mean = float(costs.mean())
    se = float(costs.std(ddof=1) / np.sqrt(runs)) if runs > 1 else 0.0
    return SimReport(
        runs=runs,
        mean_unsuccessful_queries=mean,
        std_error=se,
        termination_counts={k.value: int(v) for k, v in zip(names, tally)},
        seed=seed,
        costs=tuple(int(c) for c in costs),
    )


def simulate(instance: SearchInstance, policy, runs: int, seed: int = 0) -> SimReport:
    seq = _require_valid(instance, policy)
    return _run(instance, seq, runs, seed, None)


def simulate_given_truth(instance: SearchInstance, policy, truth: GroundTruth, runs: int, seed: int = 0) -> SimReport:
    """As :func:`simulate`, with the reconnection set held fixed."""
    seq = _require_valid(instance, policy)
    return _run(instance, seq, runs, seed, truth)
