import json
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from commchar.characterize import (
    RankedPattern, build_report, characterize, detect_anomalies, dumps_reports, growth_rate, jaccard_distance,
    most_emerging, most_supported, render_table, select_representatives,
)
from commchar.community import CommunityStructure
from commchar.miner import MinedPattern, mine_closed, split_by_class
from commchar.sequences import Item, SequenceDatabase, support

from conftest import random_class_db


def ranked(supporters, out_count=0, in_size=None, out_size=10, size=1, tag="A"):
    supporters = frozenset(supporters)
    seq = tuple((Item.of(tag, i),) for i in range(size))
    in_size = in_size if in_size is not None else max(supporters | {0}) + 1
    return RankedPattern(MinedPattern(seq, len(supporters), 0), 0, len(supporters), in_size, out_count, out_size, supporters)


def test_growth_equal_supports_is_one():
    assert ranked({0, 1}, out_count=5, in_size=4, out_size=10).growth == pytest.approx(1.0)


def test_growth_two():
    assert ranked({0, 1}, out_count=1, in_size=2, out_size=2).growth == 2.0


def test_growth_infinite_ranks_first():
    finite = ranked({0, 1, 2}, out_count=1, in_size=3, out_size=100, tag="F")
    inf = ranked({0}, out_count=0, in_size=3, tag="I")
    assert math.isinf(inf.growth)
    assert most_emerging([finite, inf]) is inf


def test_two_infinite_ordered_by_support():
    a = ranked({0}, in_size=3, tag="A")
    b = ranked({0, 1}, in_size=3, tag="B")
    assert most_emerging([a, b]) is b


def test_most_supported_rules():
    one = ranked({0, 1}, in_size=2)
    assert most_supported([one]) is one
    low = ranked(set(range(97)), in_size=100, tag="L")
    high = ranked(set(range(100)), in_size=100, tag="H")
    assert most_supported([low, high]) is high
    short = ranked({0, 1}, in_size=2, size=3, tag="S")
    long = ranked({0, 1}, in_size=2, size=7, tag="T")
    assert most_supported([short, long]) is long


def test_empty_lists_rejected():
    for f in (most_supported, most_emerging):
        with pytest.raises(ValueError):
            f([])


def test_greedy_trace():
    s1 = ranked({1, 2, 3}, out_count=0, in_size=4, tag="S1")
    s2 = ranked({3, 4}, out_count=1, in_size=4, tag="S2")
    s3 = ranked({1, 2}, out_count=1, in_size=4, tag="S3")
    assert jaccard_distance(s2.supporters_in, s1.supporters_in) == Fraction(3, 4)
    assert jaccard_distance(s3.supporters_in, s1.supporters_in) == Fraction(1, 3)
    chosen = select_representatives([s1, s2, s3], frozenset({1, 2, 3, 4}))
    assert chosen == [s1, s2]


def test_single_covering_pattern():
    p = ranked({0, 1, 2}, in_size=3)
    assert select_representatives([p], frozenset({0, 1, 2})) == [p]


def test_identical_supporters_give_one():
    ps = [ranked({0, 1}, out_count=k, in_size=4, tag=f"T{k}") for k in range(3)]
    assert len(select_representatives(ps, frozenset(range(4)))) == 1


def test_non_emerging_candidates_skipped():
    seed = ranked({0}, out_count=0, in_size=3, tag="A")
    flat = ranked({1, 2}, out_count=20, in_size=3, out_size=30, tag="B")  # growth 1
    assert select_representatives([seed, flat], frozenset(range(3))) == [seed]


def test_max_patterns_cap():
    ps = [ranked({i}, in_size=6, tag=f"T{i}") for i in range(6)]
    assert len(select_representatives(ps, frozenset(range(6)), max_patterns=3)) == 3


def test_anomalies():
    members = frozenset(range(1, 6))
    p = ranked({1, 2, 3, 4}, in_size=5)
    assert detect_anomalies(members, [p]) == {5}
    assert detect_anomalies(members, [p, ranked({5}, in_size=5)]) == frozenset()


def _db_and_buckets(seed, min_sup=0.2):
    rng = random.Random(seed)
    seqs, comm = random_class_db(rng, n_communities=3)
    db = SequenceDatabase(tuple(enumerate(seqs)), max(len(s) for s in seqs) - 1, comm)
    return db, split_by_class(mine_closed(seqs, min_sup))


def test_growth_rate_counts_are_consistent():
    for seed in range(25):
        db, buckets = _db_and_buckets(seed)
        comm = db.communities
        for c in range(comm.count):
            for r in growth_rate(buckets, c, db):
                assert r.in_size == len(comm.members(c))
                assert r.in_count + r.out_count == len(support(db, r.pattern.sequence)[1])
                assert r.supporters_in == support(db, r.pattern.sequence, c)[1]


def test_growth_rate_rejects_inconsistent_support():
    db, buckets = _db_and_buckets(1)
    c = next(k for k in buckets if k is not None)
    p = buckets[c][0]
    bad = {c: [MinedPattern(p.sequence, p.support_count + 1, c)]}
    with pytest.raises(ValueError):
        growth_rate(bad, c, db)


def test_growth_ranking_scale_invariant():
    a = ranked({0, 1}, out_count=1, in_size=4, out_size=8, tag="A")
    b = ranked({0, 1, 2}, out_count=2, in_size=4, out_size=8, tag="B")
    a2 = ranked(set(range(4)), out_count=2, in_size=8, out_size=16, tag="A")
    b2 = ranked(set(range(6)), out_count=4, in_size=8, out_size=16, tag="B")
    assert most_emerging([a, b]).pattern.sequence == most_emerging([a2, b2]).pattern.sequence


def test_report_without_patterns():
    rep = build_report(0, [], frozenset({1, 2}))
    assert rep.note == "no characterization at this min_sup"
    assert rep.anomalies == {1, 2}


def test_report_single_pattern():
    p = ranked({0, 1}, in_size=3)
    rep = build_report(0, [p], frozenset({0, 1, 2}))
    assert rep.most_supported is rep.most_emerging is p
    assert rep.anomalies == {2} == rep.anomalies_supported


def test_reports_deterministic_and_threaded():
    db, buckets = _db_and_buckets(3)
    ids = list(range(db.communities.count))
    one = dumps_reports(characterize(db, buckets, ids))
    assert one == dumps_reports(characterize(db, buckets, ids))
    assert one == dumps_reports(characterize(db, buckets, ids, threads=4))
    doc = json.loads(one)
    assert [c["community"] for c in doc["communities"]] == ids
    assert render_table(characterize(db, buckets, ids))


def test_infinite_growth_serialized():
    rep = build_report(0, [ranked({0}, in_size=1)], frozenset({0}))
    assert '"growth": "inf"' in dumps_reports([rep])


supporter_sets = st.frozensets(st.integers(0, 9), min_size=1)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(supporter_sets, st.integers(0, 10)), min_size=1, max_size=8), st.integers(1, 10))
def test_selection_properties(specs, cap):
    members = frozenset(range(10))
    ps = [ranked(s, out_count=o, in_size=10, tag=f"T{i}") for i, (s, o) in enumerate(specs)]
    chosen = select_representatives(ps, members, cap)
    assert 1 <= len(chosen) <= min(cap, len(ps), len(members))
    covered = set()
    sizes = []
    for r in chosen:
        covered |= r.supporters_in
        sizes.append(len(covered))
    assert sizes == sorted(set(sizes))  # every step adds a node
    rep = build_report(0, ps, members, cap)
    assert rep.anomalies == members - rep.coverage
    assert rep.anomalies_combined <= rep.anomalies
