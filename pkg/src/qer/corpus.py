"""Data model, ingestion and immutable lookup indexes for reference datasets.

A dataset holds author-name *references* grouped into co-occurrence
*hyper-edges* (one per publication record).  After ingest the dataset is
read-only; all query machinery works against its indexes.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field


class IngestError(ValueError):
    """Raised for malformed or duplicate input records."""


_WS = re.compile(r"\s+")


def normalize_name(name: str) -> str:
    """Case-fold, collapse whitespace and strip trailing periods of initials.

    "W. Wang" and "W Wang" normalize to the same string.
    """
    tokens = _WS.split(name.strip().lower())
    return " ".join(t.rstrip(".") for t in tokens if t.rstrip("."))


def name_tokens(norm_name: str) -> list[str]:
    return norm_name.split()


def last_name(norm_name: str) -> str:
    toks = name_tokens(norm_name)
    return toks[-1] if toks else ""


def first_initial(norm_name: str) -> str:
    toks = name_tokens(norm_name)
    return toks[0][0] if toks and toks[0] else ""


def blocking_key(norm_name: str) -> tuple[str, str]:
    """(first initial of first name, first character of last name)."""
    ln = last_name(norm_name)
    return (first_initial(norm_name), ln[0] if ln else "")


@dataclass(eq=False)  # identity comparison: each mention is unique
class Reference:
    id: str
    name: str
    extra_attrs: dict[str, str] = field(default_factory=dict)
    hyperedges: set[str] = field(default_factory=set)

    @property
    def norm_name(self) -> str:
        return normalize_name(self.name)


@dataclass
class HyperEdge:
    id: str
    refs: tuple[str, ...]
    extra_attrs: dict[str, str] = field(default_factory=dict)


@dataclass
class GoldLabeling:
    assignments: dict[str, str]

    def entity_of(self, ref_id: str) -> str:
        return self.assignments[ref_id]

    def covers(self, ref_ids) -> bool:
        return all(r in self.assignments for r in ref_ids)


class Dataset:
    """Immutable after construction; safe for concurrent readers.

    ``name_mode`` is "text" for author names (string similarity) or
    "numeric" for synthetic scalar attributes rendered as decimal text.
    """

    def __init__(self, references, hyperedges, name_mode: str = "text"):
        self.references: dict[str, Reference] = {r.id: r for r in references}
        self.hyperedges: dict[str, HyperEdge] = {h.id: h for h in hyperedges}
        self.name_mode = name_mode
        self.name_index: dict[str, set[str]] = {}
        self.block_index: dict[tuple[str, str], set[str]] = {}
        self._numeric_values: dict[str, float] = {}
        self._build_indexes()
        self._check_invariants()

    def _build_indexes(self):
        for r in self.references.values():
            norm = r.norm_name
            self.name_index.setdefault(norm, set()).add(r.id)
            if self.name_mode == "numeric":
                key = (norm, "")
                self._numeric_values[r.id] = float(norm)
            else:
                key = blocking_key(norm)
            self.block_index.setdefault(key, set()).add(r.id)
        if self.name_mode == "numeric":
            self.sorted_numeric = sorted(
                (float(n), n) for n in self.name_index
            )

    def _check_invariants(self):
        for r in self.references.values():
            for hid in r.hyperedges:
                h = self.hyperedges.get(hid)
                if h is None or r.id not in h.refs:
                    raise IngestError(
                        f"reference {r.id} lists hyper-edge {hid} "
                        "which does not list it back"
                    )
        for h in self.hyperedges.values():
            if not h.refs:
                raise IngestError(f"hyper-edge {h.id} is empty")
            if len(set(h.refs)) != len(h.refs):
                raise IngestError(f"hyper-edge {h.id} has duplicate references")
            for rid in h.refs:
                r = self.references.get(rid)
                if r is None or h.id not in r.hyperedges:
                    raise IngestError(
                        f"hyper-edge {h.id} lists unknown/inconsistent "
                        f"reference {rid}"
                    )

    def numeric_value(self, ref_id: str) -> float:
        return self._numeric_values[ref_id]

    def __len__(self):
        return len(self.references)


@dataclass
class Query:
    value: str
    attribute: str = "name"
    params: "object | None" = None  # ExpansionParams; kept loose to avoid cycle

    def __post_init__(self):
        if not self.value:
            raise ValueError("query value must be non-empty")


def _author_entry(entry, pub_id: str, slot: int):
    """Accept either a bare name string or {"id":..., "name":..., ...}."""
    if isinstance(entry, str):
        return Reference(id=f"{pub_id}:{slot}", name=entry)
    if isinstance(entry, dict):
        name = entry.get("name")
        if not name:
            raise IngestError(f"record {pub_id}: author {slot} has no name")
        extra = {
            k: str(v) for k, v in entry.items() if k not in ("id", "name")
        }
        return Reference(
            id=str(entry.get("id", f"{pub_id}:{slot}")),
            name=str(name),
            extra_attrs=extra,
        )
    raise IngestError(f"record {pub_id}: malformed author entry {entry!r}")


def ingest(records, name_mode: str = "text") -> Dataset:
    """Build a Dataset from an iterable of publication records.

    Each record is a mapping with ``pub_id`` and a non-empty ordered
    ``authors`` list; optional record-level fields (keywords, affiliation,
    title, ...) become extra attributes of every reference in the record.
    """
    refs: dict[str, Reference] = {}
    edges: list[HyperEdge] = []
    seen_pubs: set[str] = set()
    for i, rec in enumerate(records):
        where = f"record {i}"
        if not isinstance(rec, dict):
            raise IngestError(f"{where}: not a mapping")
        pub_id = rec.get("pub_id")
        if pub_id is None:
            raise IngestError(f"{where}: missing pub_id")
        pub_id = str(pub_id)
        if pub_id in seen_pubs:
            raise IngestError(f"{where}: duplicate pub_id {pub_id!r}")
        seen_pubs.add(pub_id)
        authors = rec.get("authors")
        if not authors:
            raise IngestError(f"{where} ({pub_id}): no authors")
        shared = {
            k: str(v)
            for k, v in rec.items()
            if k not in ("pub_id", "authors") and v is not None
        }
        edge_refs = []
        for slot, entry in enumerate(authors):
            r = _author_entry(entry, pub_id, slot)
            if not r.name.strip():
                raise IngestError(f"{where} ({pub_id}): empty author name")
            if r.id in refs:
                raise IngestError(f"{where} ({pub_id}): duplicate ref id {r.id}")
            for k, v in shared.items():
                r.extra_attrs.setdefault(k, v)
            r.hyperedges.add(pub_id)
            refs[r.id] = r
            edge_refs.append(r.id)
        edges.append(
            HyperEdge(id=pub_id, refs=tuple(edge_refs), extra_attrs=shared)
        )
    return Dataset(refs.values(), edges, name_mode=name_mode)


def ingest_file(path, name_mode: str = "text") -> Dataset:
    """Ingest a newline-delimited JSON record file."""

    def gen():
        with open(path) as f:
            for lineno, line in enumerate(f, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    yield json.loads(line)
                except json.JSONDecodeError as e:
                    raise IngestError(f"line {lineno}: invalid record: {e}")

    return ingest(gen(), name_mode=name_mode)


def lookup_name(ds: Dataset, name: str) -> set[Reference]:
    """All references whose normalized name equals the normalized input."""
    ids = ds.name_index.get(normalize_name(name), set())
    return {ds.references[i] for i in ids}


def cooccurring(ds: Dataset, ref: Reference) -> set[Reference]:
    """References sharing a hyper-edge with ``ref``, excluding ``ref``."""
    if ref.id not in ds.references:
        raise KeyError(f"unknown reference {ref.id}")
    out = set()
    for hid in ref.hyperedges:
        for rid in ds.hyperedges[hid].refs:
            if rid != ref.id:
                out.add(ds.references[rid])
    return out


SNAPSHOT_HEADER = "qer-dataset-v1"


def save_snapshot(ds: Dataset, path):
    payload = {
        "name_mode": ds.name_mode,
        "references": [
            {
                "id": r.id,
                "name": r.name,
                "extra_attrs": r.extra_attrs,
                "hyperedges": sorted(r.hyperedges),
            }
            for r in ds.references.values()
        ],
        "hyperedges": [
            {"id": h.id, "refs": list(h.refs), "extra_attrs": h.extra_attrs}
            for h in ds.hyperedges.values()
        ],
    }
    with open(path, "w") as f:
        f.write(SNAPSHOT_HEADER + "\n")
        json.dump(payload, f)


def load_snapshot(path) -> Dataset:
    with open(path) as f:
        header = f.readline().strip()
        if header != SNAPSHOT_HEADER:
            raise IngestError(f"unrecognized snapshot header {header!r}")
        payload = json.load(f)
    refs = [
        Reference(
            id=r["id"],
            name=r["name"],
            extra_attrs=r.get("extra_attrs", {}),
            hyperedges=set(r.get("hyperedges", [])),
        )
        for r in payload["references"]
    ]
    edges = [
        HyperEdge(
            id=h["id"],
            refs=tuple(h["refs"]),
            extra_attrs=h.get("extra_attrs", {}),
        )
        for h in payload["hyperedges"]
    ]
    return Dataset(refs, edges, name_mode=payload.get("name_mode", "text"))


def save_gold(gold: GoldLabeling, path):
    with open(path, "w") as f:
        for rid in sorted(gold.assignments):
            f.write(f"{rid} {gold.assignments[rid]}\n")


def load_gold(path) -> GoldLabeling:
    assignments = {}
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            rid, eid = line.split()
            assignments[rid] = eid
    return GoldLabeling(assignments)
