"""The compiled kernels and the pure-Python fallback must agree exactly."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import indel_distance, levenshtein
from suspended_search import _pykernels
from suspended_search._backend import BACKEND, compiled_kernels

BACKENDS = [pytest.param(_pykernels, id="python")]
if compiled_kernels() is not None:
    BACKENDS.append(pytest.param(compiled_kernels(), id="cython"))


def test_backend_reported():
    assert BACKEND in ("cython", "python")


@pytest.mark.parametrize("k", BACKENDS)
@settings(max_examples=150, deadline=None)
@given(a=st.text(max_size=15), b=st.text(max_size=15))
def test_distances(k, a, b):
    assert k.indel_distance(a, b) == indel_distance(a, b)
    assert k.levenshtein_distance(a, b) == levenshtein(a, b)


@pytest.mark.parametrize("k", BACKENDS)
def test_unicode_astral(k):
    assert k.indel_distance("a\U0001F600b", "ab") == 1


@pytest.mark.parametrize("k", BACKENDS)
def test_sequence_cost_and_brute_force(k):
    rng = np.random.default_rng(1)
    for _ in range(30):
        nf = int(rng.integers(2, 5))
        counts = rng.integers(1, 3, size=nf)
        q = np.ones((nf, 2))
        for r in range(nf):
            q[r, : counts[r]] = rng.uniform(0.05, 0.99, size=counts[r])
        seq = np.repeat(np.arange(nf), counts)
        rng.shuffle(seq)
        assert k.sequence_cost(q, seq) == _pykernels.sequence_cost(q, seq)
        best, order = k.brute_force_min(q, counts.astype(np.int64))
        ref_best, ref_order = _pykernels.brute_force_min(q, counts.astype(np.int64))
        assert best == ref_best and list(order) == list(ref_order)
