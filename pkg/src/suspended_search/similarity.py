"""Pairwise profile similarity, same-user classification and cluster graphs."""
from __future__ import annotations

import math
from collections import defaultdict
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from itertools import combinations

import networkx as nx
import numpy as np

from ._backend import kernels

DEFAULT_THRESHOLD = 0.782
LOW_SIMILARITY_NORM = 0.1
MANUAL_CANDIDATE_NORM = 0.85
DEFAULT_PAIR_CAP = 2_000_000


@dataclass(frozen=True)
class ProfileRecord:
    """One snapshot of an account's public profile.

    Pictures are 2-D grayscale arrays, precomputed 64-bit average hashes, or
    None when the account has no picture set.
    """

    user_id: object
    screen_name: str
    name: str
    profile_picture: object = None
    banner_picture: object = None


@dataclass(frozen=True)
class ComparisonFeatures:
    phi1: float
    phi2: float
    phi3: int
    phi4: int

    def as_array(self) -> np.ndarray:
        return np.array([self.phi1, self.phi2, self.phi3, self.phi4], dtype=float)

    @property
    def norm(self) -> float:
        return math.sqrt(self.phi1 ** 2 + self.phi2 ** 2 + self.phi3 ** 2 + self.phi4 ** 2)


@dataclass(frozen=True)
class PairLabel:
    label: int | None
    source: str | None
    manual_candidate: bool = False


@dataclass(frozen=True)
class MatchModel:
    intercept: float = -8.05
    coefficients: tuple = (2.94, 7.05, 1.88, 0.0)
    threshold: float = DEFAULT_THRESHOLD

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        if len(self.coefficients) != 4:
            raise ValueError("match model needs exactly four coefficients")
        if not 0.0 < self.threshold < 1.0:
            raise ValueError("threshold must lie in (0, 1)")


# --- strings ---------------------------------------------------------------

def levenshtein_ratio(a: str, b: str, variant: str = "indel") -> float:
    """Edit-distance similarity in [0, 1].

    ``indel`` (default): (|a|+|b|-d)/(|a|+|b|) where substitutions cost 2.
    ``simple``: 1 - d/max(|a|, |b|) with unit costs.
    Comparison is case-sensitive over code points; two empty strings score 1.
    """
    if variant == "indel":
        total = len(a) + len(b)
        if total == 0:
            return 1.0
        return (total - kernels.indel_distance(a, b)) / total
    if variant == "simple":
        longest = max(len(a), len(b))
        if longest == 0:
            return 1.0
        return 1.0 - kernels.levenshtein_distance(a, b) / longest
    raise ValueError(f"unknown ratio variant {variant!r}")


# --- images ----------------------------------------------------------------

def average_hash(image) -> int:
    """64-bit average hash of a grayscale raster.

    The image is cut into an 8x8 grid of (near) equal blocks; a bit is set
    when the block mean is strictly above the global mean. Bits are packed
    row-major with the top-left block as the most significant bit. Integer
    rasters are compared exactly via cross-multiplied sums.
    """
    img = np.asarray(image)
    if img.ndim != 2:
        raise ValueError("average_hash expects a 2-D grayscale raster")
    h, w = img.shape
    if h < 8 or w < 8:
        raise ValueError(f"image is {h}x{w}; need at least 8x8")
    exact = np.issubdtype(img.dtype, np.integer) or img.dtype == bool
    data = img.astype(np.int64 if exact else np.float64)
    conv = int if exact else float
    rows = [r * h // 8 for r in range(9)]
    cols = [c * w // 8 for c in range(9)]
    total = conv(data.sum())
    area = h * w
    bits = 0
    for r in range(8):
        band = data[rows[r]:rows[r + 1]]
        for c in range(8):
            block = band[:, cols[c]:cols[c + 1]]
            count = block.shape[0] * block.shape[1]
            bits <<= 1
            if conv(block.sum()) * area > total * count:
                bits |= 1
    return int(bits)


def _fingerprint(picture):
    if picture is None:
        return None
    if isinstance(picture, (int, np.integer)):
        return int(picture)
    return average_hash(picture)


def image_match(a, b) -> int:
    """1 if both pictures hash equal or both are absent; 0 otherwise."""
    fa, fb = _fingerprint(a), _fingerprint(b)
    if fa is None and fb is None:
        return 1
    if fa is None or fb is None:
        return 0
    return int(fa == fb)


# --- pairs -----------------------------------------------------------------

def compare_profiles(a: ProfileRecord, b: ProfileRecord, variant: str = "indel") -> ComparisonFeatures:
    return ComparisonFeatures(
        levenshtein_ratio(a.screen_name, b.screen_name, variant),
        levenshtein_ratio(a.name, b.name, variant),
        image_match(a.profile_picture, b.profile_picture),
        image_match(a.banner_picture, b.banner_picture),
    )


def _as_vector(phi) -> np.ndarray:
    if isinstance(phi, ComparisonFeatures):
        return phi.as_array()
    return np.asarray(phi, dtype=float)


def match_probability(model: MatchModel, phi) -> float:
    """sigma(beta . phi + beta0): larger similarity means higher probability."""
    z = float(np.dot(model.coefficients, _as_vector(phi))) + model.intercept
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def classify_pair(model: MatchModel, phi, threshold: float | None = None) -> int:
    t = model.threshold if threshold is None else threshold
    return int(match_probability(model, phi) >= t)


def auto_label(pairs: Iterable[tuple[ProfileRecord, ProfileRecord]], variant: str = "indel") -> list[PairLabel]:
    """Rule-based labels for training data.

    Same account id gives label 1. Otherwise a feature norm below 0.1 gives
    label 0, and a norm above 0.85 marks the pair for manual review.
    """
    out = []
    for a, b in pairs:
        if a.user_id == b.user_id:
            out.append(PairLabel(1, "user_id_match"))
            continue
        norm = compare_profiles(a, b, variant).norm
        if norm < LOW_SIMILARITY_NORM:
            out.append(PairLabel(0, "low_similarity_rule"))
        elif norm > MANUAL_CANDIDATE_NORM:
            out.append(PairLabel(None, None, manual_candidate=True))
        else:
            out.append(PairLabel(None, None))
    return out


# --- graphs ----------------------------------------------------------------

def _trigrams(s: str) -> set:
    s = s.lower()
    if len(s) < 3:
        return {s} if s else set()
    return {s[i:i + 3] for i in range(len(s) - 2)}


def candidate_pairs(profiles: Sequence[ProfileRecord], blocking: bool = False, cap: int = DEFAULT_PAIR_CAP):
    """Index pairs (i, j), i < j, to compare; blocking keeps pairs sharing a 3-gram."""
    n = len(profiles)
    if not blocking:
        total = n * (n - 1) // 2
        if total > cap:
            raise ValueError(f"{total} profile pairs exceeds cap {cap}; enable blocking or raise the cap")
        return list(combinations(range(n), 2))
    index = defaultdict(set)
    for k, p in enumerate(profiles):
        for g in _trigrams(p.name) | _trigrams(p.screen_name):
            index[g].add(k)
    pairs = set()
    for members in index.values():
        members = sorted(members)
        for i, j in combinations(members, 2):
            pairs.add((i, j))
            if len(pairs) > cap:
                raise ValueError(f"blocked pair count exceeds cap {cap}")
    return sorted(pairs)


@dataclass
class ScoredPairs:
    """Match probabilities for compared pairs of accounts."""

    accounts: list
    pairs: list  # (account_a, account_b, probability), a < b by account order

    def graph(self, threshold: float) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.accounts)
        g.add_edges_from((a, b) for a, b, p in self.pairs if p >= threshold)
        return g


def score_pairs(profiles: Sequence[ProfileRecord], model: MatchModel, blocking: bool = False,
                cap: int = DEFAULT_PAIR_CAP, variant: str = "indel") -> ScoredPairs:
    """Best match probability between every compared pair of distinct accounts."""
    accounts = []
    seen = set()
    for p in profiles:
        if p.user_id not in seen:
            seen.add(p.user_id)
            accounts.append(p.user_id)
    order = {a: k for k, a in enumerate(accounts)}
    best = {}
    for i, j in candidate_pairs(profiles, blocking, cap):
        a, b = profiles[i], profiles[j]
        if a.user_id == b.user_id:
            continue
        prob = match_probability(model, compare_profiles(a, b, variant))
        key = (a.user_id, b.user_id) if order[a.user_id] < order[b.user_id] else (b.user_id, a.user_id)
        if prob > best.get(key, -1.0):
            best[key] = prob
    pairs = sorted(((a, b, p) for (a, b), p in best.items()), key=lambda e: (order[e[0]], order[e[1]]))
    return ScoredPairs(accounts, pairs)


def components(graph: nx.Graph) -> list[list]:
    """Connected components, each in node insertion order, largest first."""
    order = {n: k for k, n in enumerate(graph.nodes)}
    comps = [sorted(c, key=order.__getitem__) for c in nx.connected_components(graph)]
    comps.sort(key=lambda c: (-len(c), order[c[0]]))
    return comps


def build_cluster_graph(profiles: Sequence[ProfileRecord], model: MatchModel, threshold: float | None = None,
                        blocking: bool = False, cap: int = DEFAULT_PAIR_CAP):
    """Same-user graph over accounts and its connected components."""
    t = model.threshold if threshold is None else threshold
    g = score_pairs(profiles, model, blocking, cap).graph(t)
    return g, components(g)


def average_clustering(graph: nx.Graph) -> float:
    """Mean local clustering over all nodes; nodes of degree < 2 count as 0."""
    if graph.number_of_nodes() == 0:
        return 0.0
    return float(nx.average_clustering(graph, count_zeros=True))


@dataclass(frozen=True)
class SweepRow:
    threshold: float
    edges: int
    connected_account_count: int
    giant_component_size: int
    component_count: int
    average_clustering: float


def graph_summary(graph: nx.Graph, threshold: float) -> SweepRow:
    comps = list(nx.connected_components(graph))
    return SweepRow(
        threshold=threshold,
        edges=graph.number_of_edges(),
        connected_account_count=sum(1 for _, d in graph.degree() if d > 0),
        giant_component_size=max((len(c) for c in comps), default=0),
        component_count=len(comps),
        average_clustering=average_clustering(graph),
    )


def threshold_sweep(profiles: Sequence[ProfileRecord], model: MatchModel, grid: Iterable[float],
                    blocking: bool = False, cap: int = DEFAULT_PAIR_CAP) -> list[SweepRow]:
    scored = score_pairs(profiles, model, blocking, cap)
    return [graph_summary(scored.graph(t), float(t)) for t in grid]
