"""Attribute and relational similarity measures.

Names are compared with Soft TF-IDF over Jaro-Winkler token matches; the
synthetic numeric attribute uses a range-scaled absolute difference.  The
combined cluster similarity is the weighted blend

    sim(c1, c2) = (1 - alpha) * attribute_sim + alpha * relational_sim

where relational similarity is the Jaccard overlap of the clusters'
neighborhood label sets.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

from .corpus import (
    Dataset,
    first_initial,
    last_name,
    name_tokens,
    normalize_name,
)

# Width of the occupied attribute range of one synthetic entity; two numeric
# values further apart than this are maximally dissimilar.
NUMERIC_RANGE = 6.0

SOFT_TFIDF_THRESHOLD = 0.9
WINKLER_PREFIX = 4
WINKLER_SCALE = 0.1


@dataclass
class SimilarityConfig:
    alpha: float
    epsilon: float
    delta: float
    merge_threshold: float
    attr_weights: dict[str, float] = field(default_factory=lambda: {"name": 1.0})
    multiset_neighborhood: bool = False

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha out of range: {self.alpha}")
        for nm, v in (("epsilon", self.epsilon), ("delta", self.delta),
                      ("merge_threshold", self.merge_threshold)):
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{nm} out of range: {v}")
        total = sum(self.attr_weights.values())
        if any(w < 0 for w in self.attr_weights.values()):
            raise ValueError("attribute weights must be non-negative")
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"attribute weights sum to {total}, expected 1")


def levenshtein(s1: str, s2: str) -> int:
    if len(s1) < len(s2):
        s1, s2 = s2, s1
    prev = list(range(len(s2) + 1))
    for i, c1 in enumerate(s1, 1):
        cur = [i]
        for j, c2 in enumerate(s2, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1,
                           prev[j - 1] + (c1 != c2)))
        prev = cur
    return prev[-1]


def jaro(s1: str, s2: str) -> float:
    if s1 == s2:
        return 1.0
    if not s1 or not s2:
        return 0.0
    window = max(len(s1), len(s2)) // 2 - 1
    window = max(window, 0)
    used = [False] * len(s2)
    matches = []
    for i, c in enumerate(s1):
        lo, hi = max(0, i - window), min(len(s2), i + window + 1)
        for j in range(lo, hi):
            if not used[j] and s2[j] == c:
                used[j] = True
                matches.append((i, j))
                break
    m = len(matches)
    if m == 0:
        return 0.0
    transpositions = 0
    s2_matched = [j for _, j in matches]
    for a, b in zip(s2_matched, sorted(s2_matched)):
        if a != b:
            transpositions += 1
    t = transpositions / 2
    return (m / len(s1) + m / len(s2) + (m - t) / m) / 3


def jaro_winkler(s1: str, s2: str) -> float:
    """Jaro with the standard prefix boost (prefix <= 4, scale 0.1)."""
    s1, s2 = normalize_name(s1), normalize_name(s2)
    j = jaro(s1, s2)
    prefix = 0
    for a, b in zip(s1, s2):
        if a != b or prefix == WINKLER_PREFIX:
            break
        prefix += 1
    return j + prefix * WINKLER_SCALE * (1 - j)


class CorpusStats:
    """Token document frequencies over all reference name strings."""

    def __init__(self, ds: Dataset):
        self.n_docs = max(len(ds.references), 1)
        self.df: Counter = Counter()
        for r in ds.references.values():
            for tok in set(name_tokens(r.norm_name)):
                self.df[tok] += 1

    def idf(self, token: str) -> float:
        return math.log((1 + self.n_docs) / (1 + self.df.get(token, 0))) + 1.0


def _tfidf_vector(tokens, stats: CorpusStats) -> dict[str, float]:
    tf = Counter(tokens)
    vec = {t: c * stats.idf(t) for t, c in tf.items()}
    norm = math.sqrt(sum(v * v for v in vec.values()))
    if norm == 0:
        return {}
    return {t: v / norm for t, v in vec.items()}


def soft_tfidf(tokens1, tokens2, stats: CorpusStats,
               threshold: float = SOFT_TFIDF_THRESHOLD) -> float:
    """Greedy one-to-one Soft TF-IDF; symmetric and bounded in [0, 1]."""
    v1 = _tfidf_vector(tokens1, stats)
    v2 = _tfidf_vector(tokens2, stats)
    if not v1 or not v2:
        return 0.0
    candidates = []
    for t1 in v1:
        for t2 in v2:
            s = 1.0 if t1 == t2 else jaro_winkler(t1, t2)
            if s >= threshold:
                candidates.append((s, t1, t2))
    candidates.sort(key=lambda c: (-c[0], c[1], c[2]))
    used1, used2 = set(), set()
    score = 0.0
    for s, t1, t2 in candidates:
        if t1 in used1 or t2 in used2:
            continue
        used1.add(t1)
        used2.add(t2)
        score += v1[t1] * v2[t2] * s
    return min(score, 1.0)


def numeric_sim(x1: float, x2: float) -> float:
    return 1.0 - min(1.0, abs(x1 - x2) / NUMERIC_RANGE)


def name_sim(n1: str, n2: str, stats: CorpusStats | None = None,
             numeric: bool = False) -> float:
    if numeric:
        return numeric_sim(float(n1), float(n2))
    n1, n2 = normalize_name(n1), normalize_name(n2)
    if n1 == n2:
        return 1.0
    if stats is None:
        raise ValueError("corpus stats required for text name similarity")
    return soft_tfidf(name_tokens(n1), name_tokens(n2), stats)


def delta_similar_names(n1: str, n2: str, numeric: bool = False,
                        delta: float = 0.0) -> bool:
    """Liberal candidate test for a pair of (normalized) name values.

    Text rule: first initials match, last names share their first character
    and differ by at most 2 edits.  Numeric rule: range-scaled similarity at
    least delta.
    """
    if numeric:
        return numeric_sim(float(n1), float(n2)) >= delta
    n1, n2 = normalize_name(n1), normalize_name(n2)
    if first_initial(n1) != first_initial(n2):
        return False
    l1, l2 = last_name(n1), last_name(n2)
    if not l1 or not l2 or l1[0] != l2[0]:
        return False
    return levenshtein(l1, l2) <= 2


class SimilarityContext:
    """Caches per-dataset corpus statistics and pairwise name scores."""

    def __init__(self, ds: Dataset, cfg: SimilarityConfig):
        self.ds = ds
        self.cfg = cfg
        self.numeric = ds.name_mode == "numeric"
        self.stats = None if self.numeric else CorpusStats(ds)
        self._name_cache: dict[tuple[str, str], float] = {}

    def name_sim(self, n1: str, n2: str) -> float:
        if not self.numeric:
            n1, n2 = normalize_name(n1), normalize_name(n2)
        if n1 == n2:
            return 1.0
        key = (n1, n2) if n1 < n2 else (n2, n1)
        cached = self._name_cache.get(key)
        if cached is None:
            cached = name_sim(n1, n2, self.stats, numeric=self.numeric)
            self._name_cache[key] = cached
        return cached

    def delta_similar(self, n1: str, n2: str) -> bool:
        return delta_similar_names(n1, n2, numeric=self.numeric,
                                   delta=self.cfg.delta)

    def ref_attribute_sim(self, rid1: str, rid2: str) -> float:
        r1 = self.ds.references[rid1]
        r2 = self.ds.references[rid2]
        score = 0.0
        for attr, w in self.cfg.attr_weights.items():
            if w == 0:
                continue
            if attr == "name":
                score += w * self.name_sim(r1.norm_name, r2.norm_name)
            else:
                v1 = r1.extra_attrs.get(attr)
                v2 = r2.extra_attrs.get(attr)
                if v1 and v2:
                    score += w * self._text_attr_sim(v1, v2)
        return score

    def _text_attr_sim(self, v1: str, v2: str) -> float:
        t1 = normalize_name(v1).split()
        t2 = normalize_name(v2).split()
        if not t1 or not t2:
            return 0.0
        if t1 == t2:
            return 1.0
        # plain TF-IDF cosine (exact token matches) for non-name attributes
        stats = self.stats
        if stats is None:
            return 1.0 if v1 == v2 else 0.0
        va = _tfidf_vector(t1, stats)
        vb = _tfidf_vector(t2, stats)
        return min(sum(va[t] * vb.get(t, 0.0) for t in va), 1.0)

    def epsilon_similar(self, rid1: str, rid2: str) -> bool:
        return self.ref_attribute_sim(rid1, rid2) >= self.cfg.epsilon


def representative(values, numeric: bool = False) -> str:
    """Most frequent value; ties broken lexicographically (numerically for
    the numeric attribute)."""
    counts = Counter(values)
    top = max(counts.values())
    tied = [v for v, c in counts.items() if c == top]
    return min(tied, key=float) if numeric else min(tied)


def _cluster_rep(ctx: SimilarityContext, member_ids, attr: str) -> str | None:
    if attr == "name":
        values = [ctx.ds.references[r].norm_name for r in member_ids]
    else:
        values = [ctx.ds.references[r].extra_attrs.get(attr) for r in member_ids]
        values = [v for v in values if v]
        if not values:
            return None
    counts = Counter(values)
    top = max(counts.values())
    tied = [v for v, c in counts.items() if c == top]
    if ctx.numeric and attr == "name":
        return min(tied, key=float)
    return min(tied)


def attribute_sim(ctx: SimilarityContext, members1, members2) -> float:
    """Weighted attribute similarity between two clusters of reference ids,
    compared through per-attribute representative values."""
    score = 0.0
    for attr, w in ctx.cfg.attr_weights.items():
        if w == 0:
            continue
        v1 = _cluster_rep(ctx, members1, attr)
        v2 = _cluster_rep(ctx, members2, attr)
        if v1 is None or v2 is None:
            continue
        if attr == "name":
            score += w * ctx.name_sim(v1, v2)
        else:
            score += w * ctx._text_attr_sim(v1, v2)
    return score


def hyperedge_set(ds: Dataset, member_ids) -> set[str]:
    """Union of hyper-edge ids over the cluster's member references."""
    out: set[str] = set()
    for rid in member_ids:
        out |= ds.references[rid].hyperedges
    return out


def neighborhood(ds: Dataset, member_ids, labels: dict[str, object],
                 own_label=None, multiset: bool = False):
    """Cluster labels of the references spanned by the cluster's hyper-edges,
    excluding the cluster's own label.

    References without an entry in ``labels`` (outside the clustering scope)
    are ignored.  Returns a set, or a Counter when ``multiset``.
    """
    counts: Counter = Counter()
    for hid in hyperedge_set(ds, member_ids):
        for rid in ds.hyperedges[hid].refs:
            lab = labels.get(rid)
            if lab is not None and lab != own_label:
                counts[lab] += 1
    return counts if multiset else set(counts)


def jaccard(a, b) -> float:
    """Jaccard overlap for sets or Counters; empty-vs-empty is 0."""
    if isinstance(a, Counter) or isinstance(b, Counter):
        a = Counter(a) if not isinstance(a, Counter) else a
        b = Counter(b) if not isinstance(b, Counter) else b
        inter = sum((a & b).values())
        union = sum((a | b).values())
    else:
        inter = len(a & b)
        union = len(a | b)
    return inter / union if union else 0.0


def relational_sim(ds: Dataset, members1, members2, labels,
                   label1=None, label2=None, multiset: bool = False) -> float:
    n1 = neighborhood(ds, members1, labels, own_label=label1, multiset=multiset)
    n2 = neighborhood(ds, members2, labels, own_label=label2, multiset=multiset)
    return jaccard(n1, n2)


def combined_sim(ctx: SimilarityContext, members1, members2, labels,
                 label1=None, label2=None) -> float:
    a = attribute_sim(ctx, members1, members2)
    r = relational_sim(ctx.ds, members1, members2, labels,
                       label1=label1, label2=label2,
                       multiset=ctx.cfg.multiset_neighborhood)
    return (1 - ctx.cfg.alpha) * a + ctx.cfg.alpha * r


def combine(alpha: float, attr: float, rel: float) -> float:
    return (1 - alpha) * attr + alpha * rel


def load_config(path) -> SimilarityConfig:
    """Read a key = value configuration file.

    Mandatory scalars: alpha, epsilon, delta, merge_threshold, plus
    attr_weights given as "attr:weight" pairs separated by commas.
    """
    raw: dict[str, str] = {}
    with open(path) as f:
        for line in f:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {line!r}")
            k, v = line.split("=", 1)
            raw[k.strip()] = v.strip()
    missing = [k for k in ("alpha", "epsilon", "delta", "merge_threshold",
                           "attr_weights") if k not in raw]
    if missing:
        raise ValueError(f"missing config keys: {', '.join(missing)}")
    weights = {}
    for part in raw["attr_weights"].split(","):
        attr, w = part.split(":")
        weights[attr.strip()] = float(w)
    return SimilarityConfig(
        alpha=float(raw["alpha"]),
        epsilon=float(raw["epsilon"]),
        delta=float(raw["delta"]),
        merge_threshold=float(raw["merge_threshold"]),
        attr_weights=weights,
        multiset_neighborhood=raw.get("multiset_neighborhood", "false").lower()
        in ("1", "true", "yes"),
    )
