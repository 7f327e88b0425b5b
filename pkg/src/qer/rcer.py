"""Greedy agglomerative relational clustering.

References start as (near-)singleton clusters; the algorithm repeatedly
extracts the most similar candidate cluster pair from a priority queue,
merges it, and refreshes the queued similarities of every pair whose
relational evidence the merge changed.  Candidate pairs come from cheap
blocking; the loop stops when the best remaining similarity drops below the
merge threshold.
"""

from __future__ import annotations

import heapq
from collections import Counter
from dataclasses import dataclass, field

from .corpus import Dataset, Reference, blocking_key
from .similarity import (
    NUMERIC_RANGE,
    SimilarityConfig,
    SimilarityContext,
    jaccard,
)


def block_candidates(ds: Dataset, refs, ctx: SimilarityContext) -> set[frozenset]:
    """Unordered reference-id pairs that pass the liberal candidate test.

    Text mode buckets by (first initial, last-name first character) and
    checks the edit-distance rule within each bucket; numeric mode scans a
    sorted window.
    """
    ref_list = [r if isinstance(r, Reference) else ds.references[r] for r in refs]
    pairs: set[frozenset] = set()
    if ctx.numeric:
        ordered = sorted(ref_list, key=lambda r: float(r.norm_name))
        max_gap = (1.0 - ctx.cfg.delta) * NUMERIC_RANGE
        for i, r1 in enumerate(ordered):
            v1 = float(r1.norm_name)
            for r2 in ordered[i + 1:]:
                if float(r2.norm_name) - v1 > max_gap:
                    break
                pairs.add(frozenset((r1.id, r2.id)))
        return pairs
    blocks: dict[tuple, list[Reference]] = {}
    for r in ref_list:
        blocks.setdefault(blocking_key(r.norm_name), []).append(r)
    for block in blocks.values():
        for i, r1 in enumerate(block):
            for r2 in block[i + 1:]:
                if ctx.delta_similar(r1.norm_name, r2.norm_name):
                    pairs.add(frozenset((r1.id, r2.id)))
    return pairs


def bootstrap(ds: Dataset, refs, mode: str = "singleton",
              ambiguity=None, ambiguity_cutoff: float = 0.0) -> list[list[str]]:
    """Initial partition.  Default is one singleton per reference; the
    exact-name mode pre-merges references sharing a normalized name whose
    estimated ambiguity falls below the cutoff."""
    ids = [r.id if isinstance(r, Reference) else r for r in refs]
    if mode == "singleton":
        return [[rid] for rid in ids]
    if mode != "exact-name":
        raise ValueError(f"unknown bootstrap mode: {mode}")
    if ambiguity is None:
        raise ValueError("exact-name bootstrap needs an ambiguity estimate")
    groups: dict[str, list[str]] = {}
    order: list[str] = []
    for rid in ids:
        name = ds.references[rid].norm_name
        if name not in groups:
            order.append(name)
        groups.setdefault(name, []).append(rid)
    out: list[list[str]] = []
    for name in order:
        members = groups[name]
        if len(members) > 1 and ambiguity(name) < ambiguity_cutoff:
            out.append(members)
        else:
            out.extend([rid] for rid in members)
    return out


@dataclass
class RcerResult:
    clusters: list[frozenset]
    labels: dict[str, int]
    merge_log: list[tuple]  # (sim, c1, c2, new_id)
    stopped_reason: str
    initial_clusters: list[tuple] = field(default_factory=list)  # (id, members)

    def as_partition(self) -> list[set[str]]:
        return [set(c) for c in self.clusters]


class _State:
    def __init__(self, ds: Dataset, ctx: SimilarityContext,
                 initial: list[list[str]]):
        self.ds = ds
        self.ctx = ctx
        self.members: dict[int, set[str]] = {}
        self.edges: dict[int, set[str]] = {}
        self.labels: dict[str, int] = {}
        self.reps: dict[int, dict[str, str | None]] = {}
        self.nbr: dict[int, Counter] = {}
        self.next_id = 0
        for group in initial:
            cid = self.next_id
            self.next_id += 1
            self.members[cid] = set(group)
            es: set[str] = set()
            for rid in group:
                self.labels[rid] = cid
                es |= ds.references[rid].hyperedges
            self.edges[cid] = es
            self.reps[cid] = self._compute_reps(cid)
        for cid in self.members:
            self.nbr[cid] = self._compute_nbr(cid)

    def _compute_reps(self, cid: int) -> dict[str, str | None]:
        reps: dict[str, str | None] = {}
        for attr in self.ctx.cfg.attr_weights:
            if attr == "name":
                values = [self.ds.references[r].norm_name
                          for r in self.members[cid]]
            else:
                values = [self.ds.references[r].extra_attrs.get(attr)
                          for r in self.members[cid]]
                values = [v for v in values if v]
            if not values:
                reps[attr] = None
                continue
            counts = Counter(values)
            top = max(counts.values())
            tied = [v for v, c in counts.items() if c == top]
            if self.ctx.numeric and attr == "name":
                reps[attr] = min(tied, key=float)
            else:
                reps[attr] = min(tied)
        return reps

    def _compute_nbr(self, cid: int) -> Counter:
        counts: Counter = Counter()
        for hid in self.edges[cid]:
            for rid in self.ds.hyperedges[hid].refs:
                lab = self.labels.get(rid)
                if lab is not None and lab != cid:
                    counts[lab] += 1
        return counts

    def attr_sim(self, c1: int, c2: int) -> float:
        score = 0.0
        for attr, w in self.ctx.cfg.attr_weights.items():
            if w == 0:
                continue
            v1, v2 = self.reps[c1].get(attr), self.reps[c2].get(attr)
            if v1 is None or v2 is None:
                continue
            if attr == "name":
                score += w * self.ctx.name_sim(v1, v2)
            else:
                score += w * self.ctx._text_attr_sim(v1, v2)
        return score

    def rel_sim(self, c1: int, c2: int) -> float:
        if self.ctx.cfg.multiset_neighborhood:
            return jaccard(self.nbr[c1], self.nbr[c2])
        return jaccard(set(self.nbr[c1]), set(self.nbr[c2]))

    def combined(self, c1: int, c2: int) -> float:
        alpha = self.ctx.cfg.alpha
        a = self.attr_sim(c1, c2) if alpha < 1.0 else 0.0
        r = self.rel_sim(c1, c2) if alpha > 0.0 else 0.0
        return (1 - alpha) * a + alpha * r

    def merge(self, c1: int, c2: int) -> int:
        if c1 == c2:
            raise ValueError("cannot merge a cluster with itself")
        if c1 not in self.members or c2 not in self.members:
            raise KeyError("merge of a retired cluster")
        new = self.next_id
        self.next_id += 1
        self.members[new] = self.members.pop(c1) | self.members.pop(c2)
        self.edges[new] = self.edges.pop(c1) | self.edges.pop(c2)
        for rid in self.members[new]:
            self.labels[rid] = new
        self.reps.pop(c1), self.reps.pop(c2)
        self.reps[new] = self._compute_reps(new)
        self.nbr.pop(c1), self.nbr.pop(c2)
        self.nbr[new] = self._compute_nbr(new)
        for n in self.nbr[new]:
            cnt = self.nbr[n]
            moved = cnt.pop(c1, 0) + cnt.pop(c2, 0)
            if moved:
                cnt[new] = moved
        return new


def run_rcer(ds: Dataset, refs, cfg: SimilarityConfig,
             ctx: SimilarityContext | None = None,
             bootstrap_mode: str = "singleton",
             ambiguity=None, ambiguity_cutoff: float = 0.0) -> RcerResult:
    """Cluster the given references; see the module docstring.

    The merge log records (similarity at extraction, cluster 1, cluster 2,
    merged id) in execution order, which lets a threshold sweep replay one
    unthresholded run instead of re-clustering per threshold.
    """
    ref_ids = [r.id if isinstance(r, Reference) else r for r in refs]
    if not ref_ids:
        raise ValueError("no references to cluster")
    if ctx is None:
        ctx = SimilarityContext(ds, cfg)
    initial = bootstrap(ds, ref_ids, mode=bootstrap_mode,
                        ambiguity=ambiguity, ambiguity_cutoff=ambiguity_cutoff)
    state = _State(ds, ctx, initial)
    initial_snapshot = [(cid, tuple(sorted(state.members[cid])))
                        for cid in sorted(state.members)]

    cand: dict[int, set[int]] = {cid: set() for cid in state.members}
    for pair in block_candidates(ds, ref_ids, ctx):
        a, b = tuple(pair)
        ca, cb = state.labels[a], state.labels[b]
        if ca != cb:
            cand[ca].add(cb)
            cand[cb].add(ca)

    heap: list[tuple] = []
    version: dict[tuple, int] = {}

    def push(c1: int, c2: int):
        a, b = (c1, c2) if c1 < c2 else (c2, c1)
        v = version.get((a, b), 0) + 1
        version[(a, b)] = v
        heapq.heappush(heap, (-state.combined(a, b), a, b, v))

    for c1 in sorted(cand):
        for c2 in cand[c1]:
            if c1 < c2:
                push(c1, c2)

    merge_log: list[tuple] = []
    stopped_reason = "exhausted"
    while heap:
        neg, a, b, v = heapq.heappop(heap)
        if (a not in state.members or b not in state.members
                or version.get((a, b)) != v):
            continue
        sim = -neg
        if sim < cfg.merge_threshold:
            stopped_reason = "threshold"
            break
        new = state.merge(a, b)
        merge_log.append((sim, a, b, new))
        partners = (cand.pop(a, set()) | cand.pop(b, set())) - {a, b}
        live_partners = {p for p in partners if p in state.members}
        cand[new] = live_partners
        for p in live_partners:
            cand[p].discard(a)
            cand[p].discard(b)
            cand[p].add(new)
            push(new, p)
        # the merge changed the neighborhood of every neighbor cluster, so
        # refresh their queued candidate similarities
        for ck in set(state.nbr[new]):
            if ck not in state.members:
                continue
            for cn in cand.get(ck, ()):
                if cn != new and cn in state.members:
                    push(ck, cn)

    clusters = [frozenset(state.members[cid]) for cid in sorted(state.members)]
    return RcerResult(
        clusters=clusters,
        labels=dict(state.labels),
        merge_log=merge_log,
        stopped_reason=stopped_reason,
        initial_clusters=initial_snapshot,
    )


def partition_at_threshold(result: RcerResult, threshold: float) -> list[set[str]]:
    """Replay a merge log recorded with merge_threshold = -inf, stopping at
    the first merge whose extraction similarity falls below ``threshold``.
    Equivalent to a fresh run at that threshold, since the threshold only
    controls when the loop stops."""
    members = {cid: set(m) for cid, m in result.initial_clusters}
    for sim, c1, c2, new in result.merge_log:
        if sim < threshold:
            break
        members[new] = members.pop(c1) | members.pop(c2)
    return list(members.values())
