"""Feature vectors for the suspension and refollow classifiers."""
from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)
SECONDS_PER_DAY = 86400.0


@dataclass(frozen=True)
class AccountSnapshot:
    account_id: object = None
    created_at: float = 0.0  # seconds since the Unix epoch, UTC
    friends_count: int = 0
    followers_count: int = 0
    tweet_count: int = 0
    favorites_count: int = 0
    retweet_count: int = 0
    geo_enabled: bool = False
    protected: bool = False
    verified: bool = False
    language: str = ""
    follows: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "follows", frozenset(self.follows))
        object.__setattr__(self, "created_at", to_epoch_seconds(self.created_at))
        for name in ("friends_count", "followers_count", "tweet_count", "favorites_count", "retweet_count"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")


def to_epoch_seconds(value) -> float:
    """Accept epoch seconds, a datetime, or an ISO-8601 string."""
    if isinstance(value, datetime):
        if value.tzinfo is None:
            value = value.replace(tzinfo=timezone.utc)
        return (value - EPOCH).total_seconds()
    if isinstance(value, str):
        return to_epoch_seconds(datetime.fromisoformat(value.replace("Z", "+00:00")))
    return float(value)


@dataclass(frozen=True)
class Interactions:
    mentions: int = 0
    retweets: int = 0
    replies: int = 0


@dataclass(frozen=True)
class RefollowRow:
    """One (suspended user, former friend) pair.

    ``neighbors`` are snapshots of every account User0 followed; only their
    aggregates enter the feature vector.
    """

    user0: AccountSnapshot
    friend: AccountSnapshot
    neighbors: tuple = ()
    interactions: Interactions = field(default_factory=Interactions)
    response: int | None = None


SUSPENSION_ACCOUNT_FEATURES = (
    "created_at", "friends_count", "followers_count", "tweet_count",
    "geo_enabled", "protected", "verified",
)


def suspension_feature_names(seed_ids: Sequence) -> list[str]:
    return [f"follows_{s}" for s in seed_ids] + list(SUSPENSION_ACCOUNT_FEATURES)


def suspension_features(account: AccountSnapshot, seed_ids: Sequence) -> np.ndarray:
    """Seed-follow indicators (in ``seed_ids`` order) then seven account features."""
    follows = account.follows
    block = [1.0 if s in follows else 0.0 for s in seed_ids]
    return np.array(block + [
        account.created_at,
        account.friends_count,
        account.followers_count,
        account.tweet_count,
        float(account.geo_enabled),
        float(account.protected),
        float(account.verified),
    ], dtype=float)


REFOLLOW_FEATURES = (
    "friend_friends_log",
    "friend_followers_log",
    "friend_tweets_log",
    "age_difference_days",
    "friend_follows_user0",
    "mentions_log",
    "retweets_log",
    "replies_log",
    "user0_friends_log",
    "user0_followers_log",
    "user0_tweets_log",
    "user0_favorites_log",
    "user0_retweets_log",
    "neighbors_friends_mean_log",
    "neighbors_friends_median_log",
    "neighbors_friends_std_log",
    "neighbors_followers_mean_log",
    "neighbors_followers_median_log",
    "neighbors_followers_std_log",
    "neighbors_tweets_mean_log",
    "neighbors_tweets_median_log",
    "neighbors_tweets_std_log",
    "neighbors_favorites_mean_log",
    "neighbors_favorites_median_log",
    "neighbors_favorites_std_log",
    "friend_verified",
    "neighbors_verified_fraction",
    "same_language",
)


def _log(x) -> float:
    return math.log1p(float(x))


def _aggregates(values: np.ndarray) -> list[float]:
    if values.size == 0:
        return [0.0, 0.0, 0.0]
    values = np.sort(values)  # order-free sums
    return [_log(values.mean()), _log(np.median(values)), _log(values.std())]


def refollow_features(row: RefollowRow) -> np.ndarray:
    """Feature vector in ``REFOLLOW_FEATURES`` order.

    Counts use log(1 + x); neighbor aggregates are log-transformed after
    aggregation; standard deviations are population values. The age
    difference is friend age minus User0 age, in days.
    """
    u, f, act = row.user0, row.friend, row.interactions
    nb = row.neighbors

    def col(attr):
        return np.array([getattr(a, attr) for a in nb], dtype=float)

    age_diff = (u.created_at - f.created_at) / SECONDS_PER_DAY
    out = [
        _log(f.friends_count), _log(f.followers_count), _log(f.tweet_count),
        age_diff,
        1.0 if u.account_id is not None and u.account_id in f.follows else 0.0,
        _log(act.mentions), _log(act.retweets), _log(act.replies),
        _log(u.friends_count), _log(u.followers_count), _log(u.tweet_count),
        _log(u.favorites_count), _log(u.retweet_count),
    ]
    for attr in ("friends_count", "followers_count", "tweet_count", "favorites_count"):
        out += _aggregates(col(attr))
    out.append(float(f.verified))
    out.append(float(np.mean(col("verified"))) if nb else 0.0)
    out.append(1.0 if u.language == f.language else 0.0)
    return np.array(out, dtype=float)


@dataclass(frozen=True)
class ZScoreStats:
    mean: np.ndarray
    std: np.ndarray

    def apply(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        safe = np.where(self.std > 0, self.std, 1.0)
        return np.where(self.std > 0, (X - self.mean) / safe, 0.0)

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, d) -> "ZScoreStats":
        return cls(np.asarray(d["mean"], dtype=float), np.asarray(d["std"], dtype=float))


def zscore_fit_apply(train, *others):
    """Standardize with training-set mean and population std.

    Constant training columns map to 0 in every matrix. Returns
    ``(normalized_matrices, stats)`` with the training matrix first.
    """
    train = np.atleast_2d(np.asarray(train, dtype=float))
    stats = ZScoreStats(train.mean(axis=0), train.std(axis=0))
    return [stats.apply(train)] + [stats.apply(m) for m in others], stats
