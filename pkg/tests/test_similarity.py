import math
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from qer.corpus import ingest
from qer.similarity import (
    CorpusStats,
    SimilarityConfig,
    SimilarityContext,
    combine,
    delta_similar_names,
    jaccard,
    jaro_winkler,
    levenshtein,
    load_config,
    neighborhood,
    numeric_sim,
    relational_sim,
    representative,
    soft_tfidf,
)

from conftest import CORPUS_RECORDS

names = st.text(alphabet="abcdefgh .", min_size=0, max_size=12)


def test_levenshtein_basics():
    assert levenshtein("wang", "wang") == 0
    assert levenshtein("wang", "wong") == 1
    assert levenshtein("chen", "cheng") == 1
    assert levenshtein("", "abc") == 3


def test_jaro_winkler_known_value():
    # classic fixture: jaro("martha","marhta") = 0.9444..., 3-char prefix
    assert jaro_winkler("martha", "marhta") == pytest.approx(0.9611, abs=1e-4)
    assert jaro_winkler("wang", "wang") == 1.0
    assert jaro_winkler("wang", "li") == 0.0


@given(names, names)
def test_jaro_winkler_symmetric_bounded(a, b):
    s = jaro_winkler(a, b)
    assert 0.0 <= s <= 1.0
    assert s == pytest.approx(jaro_winkler(b, a), abs=1e-12)


def test_config_validation():
    with pytest.raises(ValueError, match="alpha"):
        SimilarityConfig(alpha=1.5, epsilon=0.9, delta=0.9, merge_threshold=0.5)
    with pytest.raises(ValueError, match="weights sum"):
        SimilarityConfig(alpha=0.5, epsilon=0.9, delta=0.9, merge_threshold=0.5,
                         attr_weights={"name": 0.5})
    cfg = SimilarityConfig(alpha=0.0, epsilon=1.0, delta=0.0, merge_threshold=1.0)
    assert cfg.attr_weights == {"name": 1.0}


def test_load_config(tmp_path):
    path = tmp_path / "sim.cfg"
    path.write_text(
        "# clustering parameters\n"
        "alpha = 0.5\n"
        "epsilon = 0.98\n"
        "delta = 0.9\n"
        "merge_threshold = 0.45\n"
        "attr_weights = name:0.8, title:0.2\n"
        "multiset_neighborhood = true\n"
    )
    cfg = load_config(path)
    assert cfg.alpha == 0.5
    assert cfg.attr_weights == {"name": 0.8, "title": 0.2}
    assert cfg.multiset_neighborhood

    bad = tmp_path / "bad.cfg"
    bad.write_text("alpha = 0.5\n")
    with pytest.raises(ValueError, match="missing config keys"):
        load_config(bad)


@pytest.fixture
def ctx(corpus_ds, text_cfg):
    return SimilarityContext(corpus_ds, text_cfg)


def test_name_sim_fixtures(ctx):
    assert ctx.name_sim("W. Wang", "W Wang") == 1.0
    # one shared exact token plus one 0.9+ fuzzy match
    assert ctx.name_sim("w wang", "w w wang") == pytest.approx(0.949, abs=2e-3)
    assert ctx.name_sim("w wang", "l li") == 0.0
    assert ctx.name_sim("a ansari", "a ansari") == 1.0


def test_name_sim_orders_competitors(ctx):
    close = ctx.name_sim("w wang", "w w wang")
    far = ctx.name_sim("w wang", "c chen")
    assert 0.0 <= far < close < 1.0


@given(names, names)
@settings(max_examples=50)
def test_soft_tfidf_symmetric_bounded(a, b):
    ds = ingest(CORPUS_RECORDS)
    stats = CorpusStats(ds)
    s1 = soft_tfidf(a.split(), b.split(), stats)
    s2 = soft_tfidf(b.split(), a.split(), stats)
    assert 0.0 <= s1 <= 1.0
    assert s1 == pytest.approx(s2, abs=1e-9)


def test_identical_token_multisets_score_one():
    ds = ingest(CORPUS_RECORDS)
    stats = CorpusStats(ds)
    assert soft_tfidf(["w", "wang"], ["w", "wang"], stats) == pytest.approx(1.0)


def test_numeric_sim():
    assert numeric_sim(3.0, 3.0) == 1.0
    assert numeric_sim(0.0, 6.0) == 0.0
    assert numeric_sim(0.0, 3.0) == 0.5
    assert numeric_sim(0.0, 100.0) == 0.0


def test_delta_rule_text():
    assert delta_similar_names("w wang", "w w wang")
    assert delta_similar_names("w wang", "w wong")
    assert not delta_similar_names("w wang", "l li")       # initials differ
    assert not delta_similar_names("w wang", "w chang")    # first char differs
    assert not delta_similar_names("w wang", "w wangstro")  # >2 edits


def test_delta_rule_numeric():
    assert delta_similar_names("1.0", "2.0", numeric=True, delta=0.7)
    assert not delta_similar_names("1.0", "4.0", numeric=True, delta=0.7)


def test_epsilon_similar(ctx):
    assert ctx.epsilon_similar("r1", "r4")       # identical names
    assert not ctx.epsilon_similar("r1", "r9")   # 0.949 < 0.98
    assert not ctx.epsilon_similar("r1", "r6")


def test_representative():
    assert representative(["w wang", "w wang", "w w wang"]) == "w wang"
    assert representative(["b", "a"]) == "a"                 # tie: lexicographic
    assert representative(["10.0", "9.0"], numeric=True) == "9.0"


def test_neighborhood_excludes_own_label(corpus_ds):
    # cluster {r1, r4, r9} labeled 0; co-occurring Ansari refs labeled 1,
    # Chen ref labeled 2
    labels = {"r1": 0, "r4": 0, "r9": 0, "r3": 1, "r5": 1, "r10": 1, "r2": 2}
    nbr = neighborhood(corpus_ds, {"r1", "r4", "r9"}, labels, own_label=0)
    assert nbr == {1, 2}
    multi = neighborhood(corpus_ds, {"r1", "r4", "r9"}, labels, own_label=0,
                         multiset=True)
    assert multi == Counter({1: 3, 2: 1})


def test_jaccard_conventions():
    assert jaccard(set(), set()) == 0.0
    assert jaccard({1, 2}, {2, 3}) == pytest.approx(1 / 3)
    assert jaccard(Counter(a=2), Counter(a=1, b=1)) == pytest.approx(1 / 3)


def test_relational_sim_running_example(corpus_ds):
    # after the two Chens merge, the Wang cluster and r8 share both
    # neighbor labels
    labels = {"r1": 0, "r4": 0, "r9": 0, "r8": 3,
              "r3": 1, "r5": 1, "r10": 1, "r2": 2, "r7": 2, "r6": 4}
    sim = relational_sim(corpus_ds, {"r1", "r4", "r9"}, {"r8"}, labels,
                         label1=0, label2=3)
    # Wang-cluster nbrs {1,2}; r8 nbrs {4,2,3->?}: {2,4}
    assert sim == pytest.approx(1 / 3)


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_combine_monotone(alpha, attr, r1, r2):
    lo, hi = sorted((r1, r2))
    assert combine(alpha, attr, hi) >= combine(alpha, attr, lo) - 1e-12


@given(st.data())
@settings(max_examples=40)
def test_merging_common_neighbors_never_decreases_relational_sim(data):
    """On a random co-occurrence graph, merging two clusters that are
    neighbors of both c1 and c2 cannot decrease relational similarity under
    set semantics."""
    n_refs = data.draw(st.integers(6, 12))
    records = []
    rng_pairs = data.draw(st.lists(
        st.tuples(st.integers(0, n_refs - 1), st.integers(0, n_refs - 1)),
        min_size=3, max_size=10))
    seen = set()
    for i, (a, b) in enumerate(rng_pairs):
        if a == b or (a, b) in seen:
            continue
        seen.add((a, b))
        records.append({"pub_id": f"p{i}", "authors": [
            {"id": f"x{a}", "name": f"N{a}"} if f"x{a}" not in
            {r["id"] for rec in records for r in rec["authors"]}
            else {"id": f"x{a}@{i}", "name": f"N{a}"},
            {"id": f"x{b}@{i}b", "name": f"N{b}"},
        ]})
    if not records:
        return
    ds = ingest(records)
    ref_ids = sorted(ds.references)
    # random labeling into 4 clusters
    labels = {rid: data.draw(st.integers(0, 3), label=rid) for rid in ref_ids}
    clusters = {}
    for rid, lab in labels.items():
        clusters.setdefault(lab, set()).add(rid)
    labs = sorted(clusters)
    if len(labs) < 4:
        return
    c1, c2, m1, m2 = labs[0], labs[1], labs[2], labs[3]
    before = relational_sim(ds, clusters[c1], clusters[c2], labels,
                            label1=c1, label2=c2)
    n1 = neighborhood(ds, clusters[c1], labels, own_label=c1)
    n2 = neighborhood(ds, clusters[c2], labels, own_label=c2)
    if not ({m1, m2} <= n1 and {m1, m2} <= n2):
        return
    merged = dict(labels)
    for rid in clusters[m2]:
        merged[rid] = m1
    after = relational_sim(ds, clusters[c1], clusters[c2], merged,
                           label1=c1, label2=c2)
    assert after >= before - 1e-12
