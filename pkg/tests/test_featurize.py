import math

import numpy as np
import pytest

from suspended_search import (
    REFOLLOW_FEATURES,
    AccountSnapshot,
    Interactions,
    RefollowRow,
    refollow_features,
    suspension_feature_names,
    suspension_features,
    zscore_fit_apply,
)


def test_suspension_vector_layout():
    acct = AccountSnapshot("u", created_at=100, friends_count=3, followers_count=4, tweet_count=5,
                           geo_enabled=True, verified=True, follows={"s2"})
    seeds = ["s1", "s2", "s3"]
    v = suspension_features(acct, seeds)
    assert v.shape == (len(seeds) + 7,)
    assert v[:3].tolist() == [0, 1, 0]
    assert v[3:].tolist() == [100, 3, 4, 5, 1, 0, 1]
    assert len(suspension_feature_names(seeds)) == v.size


def test_created_at_iso():
    a = AccountSnapshot(created_at="1970-01-02T00:00:00Z")
    assert a.created_at == 86400.0


def test_negative_counts_rejected():
    with pytest.raises(ValueError):
        AccountSnapshot(followers_count=-1)


def test_refollow_vector():
    u = AccountSnapshot("u", created_at=10 * 86400, friends_count=9, followers_count=99, tweet_count=0,
                        language="en")
    f = AccountSnapshot("f", created_at=4 * 86400, friends_count=1, followers_count=3, verified=True,
                        language="en", follows={"u"})
    nb = (AccountSnapshot("n1", friends_count=1, verified=True), AccountSnapshot("n2", friends_count=3))
    v = refollow_features(RefollowRow(u, f, nb, Interactions(2, 0, 1)))
    assert v.shape == (len(REFOLLOW_FEATURES),) == (28,)
    d = dict(zip(REFOLLOW_FEATURES, v))
    assert d["age_difference_days"] == 6.0
    assert d["friend_follows_user0"] == 1.0
    assert d["mentions_log"] == math.log1p(2)
    assert d["neighbors_friends_mean_log"] == math.log1p(2.0)
    assert d["neighbors_friends_std_log"] == math.log1p(1.0)
    assert d["neighbors_verified_fraction"] == 0.5
    assert d["same_language"] == 1.0


def test_refollow_empty_neighbors():
    v = refollow_features(RefollowRow(AccountSnapshot("u"), AccountSnapshot("f")))
    assert np.all(np.isfinite(v))


def test_zscore_train_only():
    train = np.array([[1.0, 5.0], [3.0, 5.0]])
    test = np.array([[5.0, 7.0]])
    (a, b), stats = zscore_fit_apply(train, test)
    assert a.tolist() == [[-1.0, 0.0], [1.0, 0.0]]
    assert b.tolist() == [[3.0, 0.0]]
    assert stats.std.tolist() == [1.0, 0.0]
