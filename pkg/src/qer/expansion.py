"""Query expansion: building the set of references relevant to a query.

Level 0 retrieves references whose name matches the query value exactly or
liberally; odd levels add co-occurring references; even levels add
same-name references of the previous frontier.  Adaptive variants cap the
growth of each level using a cheap per-name ambiguity estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .corpus import Dataset, Query, Reference, first_initial, last_name, normalize_name
from .similarity import NUMERIC_RANGE, delta_similar_names


@dataclass
class ExpansionParams:
    d_star: int = 3
    delta: float = 0.0
    exact_beyond_level0: bool = True
    h_max: float | None = None
    a_max: float | None = None
    adaptive_depth: bool = False
    initials_cutoff: int = 10

    def __post_init__(self):
        if self.d_star < 0:
            raise ValueError("d_star must be non-negative")
        if self.h_max is not None and self.h_max < 1:
            raise ValueError("h_max must be at least 1")
        if self.a_max is not None and not 0 < self.a_max <= 1:
            raise ValueError("a_max must be in (0, 1]")


@dataclass
class RelevantSet:
    levels: list[set[str]]
    answerable: bool = True

    @property
    def union(self) -> set[str]:
        out: set[str] = set()
        for lv in self.levels:
            out |= lv
        return out

    def dump(self) -> str:
        lines = []
        for i, lv in enumerate(self.levels):
            lines.append(f"level {i} ({len(lv)}): " + " ".join(sorted(lv)))
        return "\n".join(lines)


def _ids(ds: Dataset, refs) -> set[str]:
    return {r.id if isinstance(r, Reference) else r for r in refs}


def x_a(ds: Dataset, value: str, delta: float = 0.0) -> set[str]:
    """References whose name matches ``value`` exactly or liberally."""
    numeric = ds.name_mode == "numeric"
    if numeric:
        v = float(value)
        max_gap = (1.0 - delta) * NUMERIC_RANGE
        out: set[str] = set()
        for x, name in ds.sorted_numeric:
            if x < v - max_gap:
                continue
            if x > v + max_gap:
                break
            out |= ds.name_index[name]
        return out
    value = normalize_name(value)
    out = set(ds.name_index.get(value, ()))
    for name, ids in ds.name_index.items():
        if name != value and delta_similar_names(value, name):
            out |= ids
    return out


def x_h(ds: Dataset, refs) -> set[str]:
    """References co-occurring with the input set, the input set excluded."""
    ids = _ids(ds, refs)
    out: set[str] = set()
    for rid in ids:
        for hid in ds.references[rid].hyperedges:
            out.update(ds.hyperedges[hid].refs)
    return out - ids


def x_a_exact(ds: Dataset, refs) -> set[str]:
    """All references sharing an exact normalized name with the input set."""
    out: set[str] = set()
    for rid in _ids(ds, refs):
        out |= ds.name_index[ds.references[rid].norm_name]
    return out


class AmbiguityEstimator:
    """Per-name ambiguity estimates from corpus counts.

    The naive estimate is the fraction of all references carrying the name;
    the conditional estimate (used when a secondary attribute is available,
    here the first initial given the last name) counts distinct secondary
    values instead.  mu_r is the average number of references per distinct
    name, used to forecast exact-expansion growth.
    """

    def __init__(self, ds: Dataset, use_secondary: bool | None = None):
        self.numeric = ds.name_mode == "numeric"
        self.total = len(ds.references)
        self.name_counts: dict[str, int] = {
            n: len(ids) for n, ids in ds.name_index.items()
        }
        self.initials_by_last: dict[str, set[str]] = {}
        if not self.numeric:
            for r in ds.references.values():
                ln = last_name(r.norm_name)
                fi = first_initial(r.norm_name)
                if ln and fi:
                    self.initials_by_last.setdefault(ln, set()).add(fi)
        if use_secondary is None:
            use_secondary = not self.numeric
        self.use_secondary = use_secondary and not self.numeric
        distinct = max(len(self.name_counts), 1)
        self.mu_r = self.total / distinct

    def estimate(self, value: str) -> float:
        if self.total == 0:
            return 0.0
        if self.numeric:
            return self.name_counts.get(value, 0) / self.total
        value = normalize_name(value)
        if self.use_secondary:
            initials = self.initials_by_last.get(last_name(value), set())
            return len(initials) / self.total
        return self.name_counts.get(value, 0) / self.total

    def distinct_initials(self, value: str) -> int:
        if self.numeric:
            return 0
        ln = last_name(normalize_name(value))
        return len(self.initials_by_last.get(ln, set()))


def estimate_ambiguity(est: AmbiguityEstimator, value: str) -> float:
    return est.estimate(value)


def adaptive_depth(est: AmbiguityEstimator, query: Query,
                   params: ExpansionParams) -> int:
    """Depth 1 suffices for query names whose last name shows few distinct
    first initials in the corpus (low-ambiguity names)."""
    if est.distinct_initials(query.value) < params.initials_cutoff:
        return 1
    return params.d_star


def _rank_key(ds: Dataset, est: AmbiguityEstimator, rid: str):
    return (est.estimate(ds.references[rid].norm_name),
            ds.references[rid].norm_name, rid)


def adaptive_x_h(ds: Dataset, frontier, h_max: float,
                 est: AmbiguityEstimator) -> set[str]:
    """The k least-ambiguous co-occurring references, k = floor(h_max *
    |frontier|); ties by name then id."""
    frontier = _ids(ds, frontier)
    k = int(h_max * len(frontier))
    full = x_h(ds, frontier)
    if len(full) <= k:
        return full
    ranked = sorted(full, key=lambda rid: _rank_key(ds, est, rid))
    return set(ranked[:k])


def adaptive_x_a(ds: Dataset, frontier, a_max: float,
                 est: AmbiguityEstimator) -> set[str]:
    """Exact-name expansion of only the k most-ambiguous frontier
    references, k = ceil(a_max * |frontier|)."""
    frontier = _ids(ds, frontier)
    if not frontier:
        return set()
    k = math.ceil(a_max * len(frontier))
    ranked = sorted(frontier, key=lambda rid: _rank_key(ds, est, rid),
                    reverse=True)
    return x_a_exact(ds, ranked[:k])


def build_relevant_set(ds: Dataset, q: Query,
                       params: ExpansionParams | None = None,
                       est: AmbiguityEstimator | None = None) -> RelevantSet:
    """Alternating breadth-limited expansion around the query value.

    Level 0 is the liberal name lookup; odd levels follow co-occurrences;
    even levels (2+) follow exact names (or the liberal lookup when
    ``exact_beyond_level0`` is off).  Each reference appears only at its
    first-discovered level.
    """
    if params is None:
        params = q.params if isinstance(q.params, ExpansionParams) else ExpansionParams()
    adaptive = params.h_max is not None or params.a_max is not None \
        or params.adaptive_depth
    if adaptive and est is None:
        est = AmbiguityEstimator(ds)
    depth = params.d_star
    if params.adaptive_depth and est is not None:
        depth = adaptive_depth(est, q, params)

    level0 = x_a(ds, q.value, params.delta)
    if not level0:
        return RelevantSet(levels=[set()], answerable=False)
    levels = [level0]
    seen = set(level0)
    frontier = level0
    for i in range(1, depth + 1):
        if i % 2 == 1:
            if params.h_max is not None and est is not None:
                nxt = adaptive_x_h(ds, frontier, params.h_max, est)
            else:
                nxt = x_h(ds, frontier)
        else:
            if params.a_max is not None and est is not None:
                nxt = adaptive_x_a(ds, frontier, params.a_max, est)
            elif params.exact_beyond_level0:
                nxt = x_a_exact(ds, frontier)
            else:
                nxt = set()
                for rid in frontier:
                    nxt |= x_a(ds, ds.references[rid].norm_name, params.delta)
        nxt -= seen
        levels.append(nxt)
        seen |= nxt
        frontier = nxt
        if not frontier:
            # remaining levels are necessarily empty
            levels.extend(set() for _ in range(i + 1, depth + 1))
            break
    return RelevantSet(levels=levels)
