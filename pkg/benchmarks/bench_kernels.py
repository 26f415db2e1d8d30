"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from suspended_search import SearchInstance, _pykernels
from suspended_search._backend import compiled_kernels
from suspended_search.model import failure_table


def cases(rng):
    words = ["".join(rng.choice(list("abcdefghij_"), size=int(rng.integers(8, 20)))) for _ in range(200)]
    pairs = list(zip(words[::2], words[1::2]))
    inst = SearchInstance.from_lists([5000, 5000, 10000, 10000, 15000], rng.uniform(0.1, 0.9, 5).tolist())
    q = failure_table(inst)
    counts = np.array([1, 1, 2, 2, 3], dtype=np.int64)
    seq = np.repeat(np.arange(5), counts)
    return {
        "indel_distance x100": lambda k: [k.indel_distance(a, b) for a, b in pairs],
        "levenshtein_distance x100": lambda k: [k.levenshtein_distance(a, b) for a, b in pairs],
        "sequence_cost x1000": lambda k: [k.sequence_cost(q, seq) for _ in range(1000)],
        "brute_force_min (9 queries)": lambda k: k.brute_force_min(q, counts),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    compiled = compiled_kernels()
    if compiled is None:
        print("compiled kernels are not built; only the Python timings are shown")
    print(f"{'kernel':30s} {'python (ms)':>12s} {'cython (ms)':>12s} {'speedup':>8s}")
    for name, fn in cases(np.random.default_rng(0)).items():
        py = min(timeit.repeat(lambda: fn(_pykernels), number=1, repeat=args.repeat)) * 1e3
        if compiled is None:
            print(f"{name:30s} {py:12.2f}")
            continue
        cy = min(timeit.repeat(lambda: fn(compiled), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:30s} {py:12.2f} {cy:12.3f} {py / cy:7.0f}x")


if __name__ == "__main__":
    main()
