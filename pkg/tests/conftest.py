import random
from importlib.resources import files

import pytest

from commchar.community import CommunityStructure
from commchar.network import DynamicNetwork
from commchar.sequences import Item

DATA = files("commchar") / "data"


def random_db(rng: random.Random, max_entries=10, max_itemsets=4, max_alphabet=5, max_items=40):
    """Small random database of plain-string itemsets, redrawn until it fits
    the exhaustive oracle's size guard."""
    while True:
        db = _draw_db(rng, max_entries, max_itemsets, max_alphabet)
        if sum(len(h) for s in db for h in s) <= max_items:
            return db


def _draw_db(rng, max_entries, max_itemsets, max_alphabet):
    alphabet = "ABCDE"[: rng.randint(2, max_alphabet)]
    db = []
    for _ in range(rng.randint(1, max_entries)):
        seq = []
        for _ in range(rng.randint(1, max_itemsets)):
            k = rng.randint(1, min(3, len(alphabet)))
            seq.append(tuple(sorted(rng.sample(alphabet, k))))
        db.append(tuple(seq))
    return db


def random_class_db(rng: random.Random, n_communities=2, max_entries=10, max_itemsets=3):
    """Random database whose entries end in a class itemset, with its partition."""
    n = rng.randint(2, max_entries)
    labels = [rng.randrange(n_communities) for _ in range(n)]
    comm = CommunityStructure.from_labels(labels)
    alphabet = [Item.of(d, b) for d in "ab" for b in range(2)]
    seqs = []
    for v in range(n):
        body = tuple(
            tuple(sorted(rng.sample(alphabet, rng.randint(1, 2))))
            for _ in range(rng.randint(1, max_itemsets))
        )
        seqs.append(body + ((Item.community(comm(v)),),))
    return seqs, comm


def random_network(rng: random.Random, n=15, theta=3, p=0.3) -> DynamicNetwork:
    slices = [
        [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
        for _ in range(theta)
    ]
    return DynamicNetwork.from_edges(n, slices)


def two_cliques_bridge() -> DynamicNetwork:
    """Two K4 on {0..3} and {4..7} joined by the edge 3-4."""
    edges = [(u, v) for g in (range(4), range(4, 8)) for u in g for v in g if u < v]
    return DynamicNetwork.from_edges(8, [edges + [(3, 4)]])


@pytest.fixture
def rng():
    return random.Random(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
