"""Synthetic co-occurrence data with known entity labels.

A world of N entities carries a scalar attribute x; an entity "occupies"
the range [x-3, x+3], and a new entity is made attribute-ambiguous with
probability p_a by sampling its x inside an already occupied range.  M
symmetric entity relationships are added, a fraction p_r_a of them
constructed so that two relationships connect pairwise look-alike entities
(ambiguous relationships).  Finally R co-occurrence records are emitted:
a uniform initiator entity, extended with further entities with
continuation probability p_c, each draw directed at one of the initiator's
remaining neighbors with probability p_r (an undirected draw ends the
edge), every member contributing one reference value from a unit-variance
Gaussian around its entity's x.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .corpus import Dataset, GoldLabeling, ingest

OCCUPIED_HALF_WIDTH = 3.0
FRESH_GRID_SPACING = 7.0
VALUE_DECIMALS = 1


@dataclass
class GenParams:
    n_entities: int = 100
    n_relationships: int = 200
    n_hyperedges: int = 500
    p_a: float = 0.3
    p_r_a: float = 0.0
    p_c: float = 0.5
    p_r: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if min(self.n_entities, self.n_relationships, self.n_hyperedges) < 0:
            raise ValueError("counts must be non-negative")
        for nm in ("p_a", "p_r_a", "p_r"):
            v = getattr(self, nm)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{nm} out of range: {v}")
        if not 0.0 <= self.p_c < 1.0:
            raise ValueError(f"p_c out of range: {self.p_c}")


@dataclass
class Entity:
    id: str
    x: float
    ambiguous: bool  # attribute placed inside another entity's range
    nbrs: set[str] = field(default_factory=set)

    @property
    def lo(self) -> float:
        return self.x - OCCUPIED_HALF_WIDTH

    @property
    def hi(self) -> float:
        return self.x + OCCUPIED_HALF_WIDTH


@dataclass
class SyntheticWorld:
    entities: list[Entity]
    relationships: list[tuple[str, str]] = field(default_factory=list)
    ambiguous_relationships: int = 0
    relationship_fallbacks: int = 0

    def entity(self, eid: str) -> Entity:
        return self.entities[int(eid[1:])]

    def ranges_intersect(self, e1: Entity, e2: Entity) -> bool:
        return abs(e1.x - e2.x) <= 2 * OCCUPIED_HALF_WIDTH


@dataclass
class SyntheticOutput:
    dataset: Dataset
    gold: GoldLabeling
    world: SyntheticWorld
    records: list[dict]


def create_entities(params: GenParams, rng: random.Random) -> SyntheticWorld:
    entities: list[Entity] = []
    used_slots: set[int] = set()
    slot_pool = max(4 * params.n_entities, 16)
    for i in range(params.n_entities):
        if entities and rng.random() < params.p_a:
            host = rng.choice(entities)
            x = rng.uniform(host.lo, host.hi)
            entities.append(Entity(id=f"e{i}", x=x, ambiguous=True))
            continue
        # fresh value: random grid slot whose occupied range is clear of
        # every existing range (ambiguous entities can spill past their
        # host's grid cell, so check explicitly)
        while True:
            slot = rng.randrange(slot_pool)
            if slot in used_slots:
                continue
            x = slot * FRESH_GRID_SPACING
            if all(abs(x - e.x) > 2 * OCCUPIED_HALF_WIDTH for e in entities):
                used_slots.add(slot)
                break
        entities.append(Entity(id=f"e{i}", x=x, ambiguous=False))
    return SyntheticWorld(entities=entities)


def _intersecting_others(world: SyntheticWorld, e: Entity,
                         _cache: dict | None = None) -> list[Entity]:
    if _cache is not None and e.id in _cache:
        return _cache[e.id]
    out = [o for o in world.entities
           if o.id != e.id and world.ranges_intersect(o, e)]
    if _cache is not None:
        _cache[e.id] = out
    return out


def add_relationships(world: SyntheticWorld, params: GenParams,
                      rng: random.Random) -> SyntheticWorld:
    if params.n_relationships and len(world.entities) < 2:
        raise ValueError("need at least 2 entities for relationships")
    existing: set[frozenset] = set()
    intersect_cache: dict[str, list[Entity]] = {}

    def add_edge(e1: Entity, e2: Entity):
        e1.nbrs.add(e2.id)
        e2.nbrs.add(e1.id)
        existing.add(frozenset((e1.id, e2.id)))
        world.relationships.append((e1.id, e2.id))

    def try_ambiguous() -> bool:
        # find an existing relationship (ek, el) and a fresh pair (ei, ej)
        # with ei a look-alike of ek and ej a look-alike of el
        feasible = []
        for pair in world.relationships:
            ek = world.entity(pair[0])
            el = world.entity(pair[1])
            for a, b in ((ek, el), (el, ek)):
                cand_i = _intersecting_others(world, a, intersect_cache)
                cand_j = _intersecting_others(world, b, intersect_cache)
                for ei in cand_i:
                    for ej in cand_j:
                        if ei.id == ej.id:
                            continue
                        if frozenset((ei.id, ej.id)) in existing:
                            continue
                        feasible.append((ei, ej))
        if not feasible:
            return False
        ei, ej = rng.choice(feasible)
        add_edge(ei, ej)
        world.ambiguous_relationships += 1
        return True

    for _ in range(params.n_relationships):
        if rng.random() < params.p_r_a:
            if try_ambiguous():
                continue
            world.relationship_fallbacks += 1
        for _ in range(1000):
            e1, e2 = rng.sample(world.entities, 2)
            if frozenset((e1.id, e2.id)) not in existing:
                add_edge(e1, e2)
                break
        else:
            raise ValueError("relationship graph saturated")
    return world


def generate_hyperedges(world: SyntheticWorld, params: GenParams,
                        rng: random.Random) -> SyntheticOutput:
    records: list[dict] = []
    gold: dict[str, str] = {}
    all_ids = [e.id for e in world.entities]
    for i in range(params.n_hyperedges):
        initiator = rng.choice(world.entities)
        members = [initiator.id]
        remaining_nbrs = sorted(initiator.nbrs)
        rng.shuffle(remaining_nbrs)
        while rng.random() < params.p_c:
            if not remaining_nbrs:
                break
            if params.p_r < 1.0 and rng.random() >= params.p_r:
                # extension draw not directed at a neighbor; the edge ends
                break
            members.append(remaining_nbrs.pop())
        pub_id = f"p{i}"
        authors = []
        for j, eid in enumerate(members):
            e = world.entity(eid)
            value = f"{rng.gauss(e.x, 1.0):.{VALUE_DECIMALS}f}"
            rid = f"{pub_id}:{j}"
            authors.append({"id": rid, "name": value})
            gold[rid] = eid
        records.append({"pub_id": pub_id, "authors": authors})
    ds = ingest(records, name_mode="numeric")
    return SyntheticOutput(dataset=ds, gold=GoldLabeling(gold),
                           world=world, records=records)


def generate(params: GenParams) -> SyntheticOutput:
    """End-to-end generation; identical params produce identical output."""
    rng = random.Random(params.seed)
    world = create_entities(params, rng)
    add_relationships(world, params, rng)
    return generate_hyperedges(world, params, rng)
