"""Multi-step workflows behind the command line: data splits, model selection,
instance construction from follow edges, and policy comparison tables."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .featurize import AccountSnapshot, Interactions, RefollowRow, refollow_features, zscore_fit_apply
from .learn import (
    ConstantModel,
    Dataset,
    DegenerateDataError,
    KernelModel,
    LinearModel,
    predict,
    roc_auc,
    train_kernel_logistic,
    train_l1_logistic,
)
from .model import FriendSpec, SearchDomainError, SearchInstance
from .policy import GroundTruth, actual_cost, expected_cost, policy_for, random_sequence
from .sim import simulate, simulate_given_truth

DEFAULT_SPLIT = (0.5, 0.25, 0.25)


# --- splitting -------------------------------------------------------------

def split_rows(n: int, ratios=DEFAULT_SPLIT, seed: int = 0, groups=None):
    """Train/validation/test index arrays.

    Without groups, rows are shuffled and cut at the ratio boundaries. With
    groups, whole groups are assigned in shuffled order until each split
    reaches its share of rows, so no group spans two splits.
    """
    ratios = np.asarray(ratios, dtype=float)
    if ratios.shape != (3,) or np.any(ratios < 0) or ratios.sum() <= 0:
        raise ValueError("split ratios must be three nonnegative numbers")
    ratios = ratios / ratios.sum()
    rng = np.random.default_rng(seed)
    if groups is None:
        perm = rng.permutation(n)
        a = int(np.floor(n * ratios[0]))
        b = a + int(np.floor(n * ratios[1]))
        return perm[:a], perm[a:b], perm[b:]
    groups = np.asarray(groups).astype(str)
    if groups.shape[0] != n:
        raise ValueError("one group label per row is required")
    labels = np.unique(groups)
    order = labels[rng.permutation(labels.size)]
    bounds = np.cumsum(ratios)[:2] * n
    parts = ([], [], [])
    filled = 0
    for g in order:
        rows = np.flatnonzero(groups == g)
        k = 0 if filled < bounds[0] else (1 if filled < bounds[1] else 2)
        parts[k].append(rows)
        filled += rows.size
    return tuple(np.sort(np.concatenate(p)) if p else np.array([], dtype=int) for p in parts)


# --- training --------------------------------------------------------------

@dataclass
class TrainingResult:
    model: object
    lam: float
    scaler: object
    validation_auc: dict = field(default_factory=dict)
    test_auc: float | None = None
    test_roc: object = None


def _check_classes(name, y):
    vals = np.unique(y)
    if vals.size < 2:
        raise DegenerateDataError(
            f"{name} split has a single class; use a different --seed, other split ratios, or more data"
        )


def train_with_selection(data: Dataset, kind: str, lambdas, ratios=DEFAULT_SPLIT, seed: int = 0,
                         groups=None, normalize: bool | None = None) -> TrainingResult:
    """Fit one model per lambda on the training split, keep the best validation AUC,
    and score it on the test split."""
    if kind not in ("suspension", "match", "refollow"):
        raise ValueError(f"unknown model kind {kind!r}")
    if normalize is None:
        normalize = kind == "refollow"
    tr, va, te = split_rows(len(data), ratios, seed, groups)
    _check_classes("training", data.y[tr])
    X_tr, X_va, X_te = data.X[tr], data.X[va], data.X[te]
    scaler = None
    if normalize:
        (X_tr, X_va, X_te), scaler = zscore_fit_apply(X_tr, X_va, X_te)
    train = Dataset(X_tr, data.y[tr], data.feature_names)
    trainer = train_kernel_logistic if kind == "refollow" else train_l1_logistic

    lambdas = [float(v) for v in lambdas]
    fits = {}
    val_auc = {}
    for lam in lambdas:
        fits[lam] = trainer(train, lam)
        if len(va):
            _check_classes("validation", data.y[va])
            val_auc[lam] = roc_auc(predict(fits[lam], X_va), data.y[va]).auc
    best = max(lambdas, key=lambda v: (val_auc.get(v, 0.0), -lambdas.index(v))) if val_auc else lambdas[0]
    result = TrainingResult(fits[best], best, scaler, val_auc)
    if len(te):
        _check_classes("test", data.y[te])
        result.test_roc = roc_auc(predict(fits[best], X_te), data.y[te])
        result.test_auc = result.test_roc.auc
    return result


# --- instance construction -------------------------------------------------

def eligible_friends(user_id, edges, accounts) -> list:
    """Former friends that are known, active, public and have followers."""
    out = []
    seen = set()
    for follower, friend in edges:
        if follower != user_id or friend in seen:
            continue
        seen.add(friend)
        entry = accounts.get(friend)
        if entry is None:
            continue
        snap, active = entry
        if active and not snap.protected and snap.followers_count > 0:
            out.append(friend)
    return out


def reconnection_probabilities(user_id, friends, edges, accounts, model, scaler=None, interactions=None) -> list:
    if isinstance(model, ConstantModel):
        return [model.probability] * len(friends)
    follows = {}
    for follower, friend in edges:
        follows.setdefault(follower, set()).add(friend)
    if user_id not in accounts:
        raise SearchDomainError(f"account {user_id!r} missing from the accounts file")

    def snap(aid) -> AccountSnapshot:
        base = accounts[aid][0]
        return AccountSnapshot(**{**base.__dict__, "follows": frozenset(follows.get(aid, ()))})

    user0 = snap(user_id)
    neighbors = tuple(snap(a) for a in sorted(follows.get(user_id, ())) if a in accounts)
    interactions = interactions or {}
    rows = []
    for fid in friends:
        row = RefollowRow(user0, snap(fid), neighbors, interactions.get((user_id, fid), Interactions()))
        rows.append(refollow_features(row))
    X = np.vstack(rows)
    if scaler is not None:
        X = scaler.apply(X)
    if isinstance(model, (LinearModel, KernelModel)) and model.feature_names and len(model.feature_names) != X.shape[1]:
        raise ValueError(f"model expects {len(model.feature_names)} features, refollow rows have {X.shape[1]}")
    return [float(p) for p in np.atleast_1d(predict(model, X))]


def build_instance(user_id, edges, accounts, model, scaler=None, interactions=None,
                   rho0=1.0, rho_bar=0.0, page_size=5000) -> SearchInstance:
    friends = eligible_friends(user_id, edges, accounts)
    if not friends:
        raise SearchDomainError(f"user {user_id!r} has no eligible former friends to search")
    phis = reconnection_probabilities(user_id, friends, edges, accounts, model, scaler, interactions)
    specs = tuple(FriendSpec(fid, accounts[fid][0].followers_count, phi) for fid, phi in zip(friends, phis))
    return SearchInstance(specs, page_size=page_size, rho0=rho0, rho_bar=rho_bar)


# --- policy comparison -----------------------------------------------------

POLICY_NAMES = ("optimal", "greedy", "min_n", "max_p", "random")


def _pooled(reports):
    costs = np.concatenate([np.asarray(r.costs, dtype=float) for r in reports])
    se = float(costs.std(ddof=1) / np.sqrt(costs.size)) if costs.size > 1 else 0.0
    return float(costs.mean()), se


def compare_policies(instance: SearchInstance, policies=POLICY_NAMES, truth: GroundTruth | None = None,
                     runs: int | None = None, random_count: int = 500, seed: int = 0, order=None) -> list[dict]:
    """One row per policy: expected cost, and optionally actual and simulated cost.

    The random policy row averages over ``random_count`` independently drawn
    policies; its simulated value pools runs across those policies.
    """
    rows = []
    named = [(name, None) for name in policies]
    if order is not None:
        named.append(("forced", tuple(order)))
    for name, seq in named:
        row = {"policy": name}
        if name == "random":
            rng = np.random.default_rng(seed)
            seqs = [random_sequence(instance, rng) for _ in range(max(1, random_count))]
        else:
            seqs = [seq if seq is not None else policy_for(instance, name).policy.sequence]
        row["expected_cost"] = float(np.mean([expected_cost(instance, s) for s in seqs]))
        if truth is not None:
            row["actual_cost"] = float(np.mean([actual_cost(instance, s, truth) for s in seqs]))
        if runs:
            per = max(1, runs // len(seqs))
            reps = []
            for k, s in enumerate(seqs):
                run_seed = seed + k
                if truth is None:
                    reps.append(simulate(instance, s, per, run_seed))
                else:
                    reps.append(simulate_given_truth(instance, s, truth, per, run_seed))
            row["sim_mean"], row["sim_stderr"] = _pooled(reps)
        rows.append(row)
    return rows
