import random
import statistics

import pytest

from qer.analysis import estimate_relational_probs
from qer.similarity import SimilarityConfig
from qer.synthgen import (
    GenParams,
    OCCUPIED_HALF_WIDTH,
    SyntheticWorld,
    add_relationships,
    create_entities,
    generate,
    generate_hyperedges,
)


def test_params_validation():
    with pytest.raises(ValueError):
        GenParams(n_entities=-1)
    with pytest.raises(ValueError):
        GenParams(p_a=1.5)
    with pytest.raises(ValueError):
        GenParams(p_c=1.0)  # would never terminate


def test_determinism():
    params = GenParams(n_entities=40, n_relationships=80, n_hyperedges=120,
                       p_a=0.4, p_r_a=0.3, p_c=0.5, seed=99)
    a = generate(params)
    b = generate(params)
    assert a.records == b.records
    assert a.gold.assignments == b.gold.assignments


def test_p_a_zero_ranges_disjoint():
    world = create_entities(GenParams(n_entities=60, p_a=0.0, seed=1),
                            random.Random(1))
    xs = sorted(e.x for e in world.entities)
    for x1, x2 in zip(xs, xs[1:]):
        assert x2 - x1 > 2 * OCCUPIED_HALF_WIDTH
    assert not any(e.ambiguous for e in world.entities)


def test_p_a_one_second_entity_in_first_range():
    world = create_entities(GenParams(n_entities=2, p_a=1.0, seed=3),
                            random.Random(3))
    first, second = world.entities
    assert second.ambiguous
    assert first.lo <= second.x <= first.hi


def test_p_a_half_monte_carlo():
    fracs = []
    for seed in range(20):
        world = create_entities(GenParams(n_entities=1000, p_a=0.5, seed=seed),
                                random.Random(seed))
        fracs.append(sum(e.ambiguous for e in world.entities) / 1000)
    assert statistics.fmean(fracs) == pytest.approx(0.5, abs=0.05)


def test_no_relationships():
    params = GenParams(n_entities=10, n_relationships=0, n_hyperedges=5,
                       p_c=0.0, seed=2)
    out = generate(params)
    assert out.world.relationships == []
    assert all(not e.nbrs for e in out.world.entities)


def test_relationships_symmetric_and_counted():
    params = GenParams(n_entities=30, n_relationships=50, p_a=0.5,
                       p_r_a=0.5, seed=4)
    rng = random.Random(4)
    world = create_entities(params, rng)
    add_relationships(world, params, rng)
    assert len(world.relationships) == 50
    for a, b in world.relationships:
        assert b in world.entity(a).nbrs
        assert a in world.entity(b).nbrs


def test_p_r_a_zero_has_no_ambiguous_relationships():
    # with p_a = 0 no ranges intersect, so the witness scan finds nothing
    params = GenParams(n_entities=40, n_relationships=80, n_hyperedges=200,
                       p_a=0.0, p_r_a=0.0, p_c=0.5, seed=7)
    out = generate(params)
    assert out.world.ambiguous_relationships == 0
    cfg = SimilarityConfig(alpha=0.5, epsilon=0.8, delta=0.7,
                           merge_threshold=0.3)
    _, r_a = estimate_relational_probs(out.dataset, out.gold, cfg)
    assert all(v == 0.0 for v in r_a.values())


def test_p_r_a_monte_carlo():
    fracs = []
    for seed in range(20):
        out = generate(GenParams(n_entities=100, n_relationships=200,
                                 n_hyperedges=1, p_a=0.5, p_r_a=0.6,
                                 p_c=0.5, seed=seed))
        fracs.append(out.world.ambiguous_relationships / 200)
    assert statistics.fmean(fracs) == pytest.approx(0.6, abs=0.07)


def test_p_c_zero_singleton_edges():
    out = generate(GenParams(n_entities=20, n_relationships=40,
                             n_hyperedges=50, p_c=0.0, seed=5))
    assert all(len(h.refs) == 1 for h in out.dataset.hyperedges.values())


def test_isolated_initiator_singleton_edge():
    params = GenParams(n_entities=5, n_relationships=0, n_hyperedges=30,
                       p_c=0.9, seed=6)
    out = generate(params)
    assert all(len(h.refs) == 1 for h in out.dataset.hyperedges.values())


def test_mean_edge_size_dense_graph():
    means = []
    for seed in range(20):
        out = generate(GenParams(n_entities=40, n_relationships=400,
                                 n_hyperedges=300, p_a=0.0, p_c=0.5,
                                 seed=seed))
        sizes = [len(h.refs) for h in out.dataset.hyperedges.values()]
        means.append(statistics.fmean(sizes))
    assert statistics.fmean(means) == pytest.approx(2.0, abs=0.1)


def test_gold_labels_and_counts():
    out = generate(GenParams(n_entities=25, n_relationships=50,
                             n_hyperedges=80, p_a=0.4, p_c=0.6, seed=8))
    entity_ids = {e.id for e in out.world.entities}
    assert set(out.gold.assignments.values()) <= entity_ids
    assert set(out.gold.assignments) == set(out.dataset.references)
    assert len(out.dataset.references) == \
        sum(len(h.refs) for h in out.dataset.hyperedges.values())
    assert len(out.dataset.hyperedges) == 80


def test_values_track_entity_attribute():
    out = generate(GenParams(n_entities=10, n_relationships=20,
                             n_hyperedges=60, p_a=0.0, p_c=0.5, seed=9))
    for rid, eid in out.gold.assignments.items():
        x = out.world.entity(eid).x
        assert abs(out.dataset.numeric_value(rid) - x) < 6.0  # ~6 sigma
