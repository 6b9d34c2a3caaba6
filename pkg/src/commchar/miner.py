"""Closed frequent sequential pattern mining over itemset sequences.

:func:`mine_closed` grows a prefix lattice by projection. Every prefix is
described by its *state*: for each supporting entry, the set of positions at
which an embedding of the prefix can end, plus the largest item of its last
itemset. Two prefixes with equal states have identical extension subtrees.

Candidate enumeration skips the subtree of a prefix when an already visited
super-sequence has the same state and contains the prefix with last itemset
mapped onto last itemset: every extension of the prefix is then strictly
contained in the matching extension of the super-sequence, with the same
supporters, so none of them is closed. The registry of visited states is
keyed by the sum of the supporting entry ids (plus the projection size) and
every hit is verified exactly.

A prefix is emitted as a candidate only if no frequent one-item extension
keeps its support. Candidates then go through an explicit closedness pass:
they are grouped by support and by the sum of their supporter ids, and a
candidate is dropped when a longer member of its group with the same
supporter set contains it.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass

from .sequences import Item, Sequence, SequenceDatabase, format_sequence, parse_sequence

DEFAULT_MAX_CANDIDATES = 2_000_000


class MiningLimitExceeded(RuntimeError):
    """Candidate count passed the configured cap; raise min_sup and retry."""


@dataclass(frozen=True, order=True)
class MinedPattern:
    sequence: Sequence
    support_count: int
    class_tag: int | None = None

    @property
    def size(self) -> int:
        return len(self.sequence)

    @property
    def length(self) -> int:
        return sum(len(h) for h in self.sequence)


def min_count(min_sup: float, n: int) -> int:
    if not 0 < min_sup <= 1:
        raise ValueError(f"min_sup must lie in (0, 1], got {min_sup}")
    # rounding guards against 0.3 * 10 == 3.0000000000000004
    return max(1, math.ceil(round(min_sup * n, 9)))


def canonical_key(p: MinedPattern):
    return (p.size, p.sequence, p.class_tag is None, p.class_tag or 0)


def _encode(seqs: list[Sequence]):
    """Items become bit positions; an itemset becomes an int bitmask."""
    alphabet = sorted({i for s in seqs for h in s for i in h})
    code = {item: k for k, item in enumerate(alphabet)}
    encoded = [[sum(1 << code[i] for i in set(h)) for h in s] for s in seqs]
    return alphabet, encoded


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _n_items(prefix) -> int:
    return sum(h.bit_count() for h in prefix)


def _contains_with_last(big, small) -> bool:
    """``small`` embeds in ``big`` with last itemset mapped onto last itemset."""
    if small[-1] & big[-1] != small[-1]:
        return False
    j = 0
    rest = big[:-1]
    for h in small[:-1]:
        while j < len(rest) and h & rest[j] != h:
            j += 1
        if j == len(rest):
            return False
        j += 1
    return True


class _PrefixGrowth:
    """Depth-first prefix growth.

    A projection maps entry id -> bitmask of the positions where an embedding
    of the prefix can end.
    """

    def __init__(self, seqs, minc, max_candidates):
        self.seqs = seqs
        self.minc = minc
        self.max_candidates = max_candidates
        self.registry: dict[tuple[int, int], list] = defaultdict(list)
        self.candidates: list[tuple[tuple[int, ...], int, int, int]] = []
        self._items_of: dict[int, tuple[int, ...]] = {}
        # occ[e][x]: positions of item x in entry e; tail[e][q]: items at positions >= q
        self.occ = []
        self.tail = []
        for seq in seqs:
            occ: dict[int, int] = {}
            for p, h in enumerate(seq):
                for x in _bits(h):
                    occ[x] = occ.get(x, 0) | (1 << p)
            self.occ.append(occ)
            tail = [0] * (len(seq) + 1)
            for q in range(len(seq) - 1, -1, -1):
                tail[q] = tail[q + 1] | seq[q]
            self.tail.append(tail)

    def items(self, itemset: int) -> tuple[int, ...]:
        got = self._items_of.get(itemset)
        if got is None:
            got = self._items_of[itemset] = tuple(_bits(itemset))
        return got

    def run(self):
        first: dict[int, dict[int, int]] = defaultdict(dict)
        for e, occ in enumerate(self.occ):
            for x, mask in occ.items():
                first[x][e] = mask
        for x in sorted(first):
            proj = first[x]
            if len(proj) >= self.minc:
                self._visit((1 << x,), x, proj)
        return self.candidates

    # -- pruning ---------------------------------------------------------------

    def _registered(self, prefix, last_max, proj) -> bool:
        key = (sum(proj), sum(m.bit_count() for m in proj.values()))
        state = (last_max, tuple(proj.items()))
        bucket = self.registry[key]
        if bucket:
            n_items = _n_items(prefix)
            for other, other_state in bucket:
                if other_state == state and _n_items(other) > n_items and _contains_with_last(other, prefix):
                    return True
        bucket.append((prefix, state))
        return False

    # -- growth ----------------------------------------------------------------

    def _visit(self, prefix, last_max, proj):
        if self._registered(prefix, last_max, proj):
            return
        seqs, occ_all, tail_all, items = self.seqs, self.occ, self.tail, self.items
        above = ~((2 << last_max) - 1)
        iext: dict[int, dict[int, int]] = defaultdict(dict)
        sext: dict[int, dict[int, int]] = defaultdict(dict)
        for e, mask in proj.items():
            seq, occ = seqs[e], occ_all[e]
            low = mask & -mask
            first = low.bit_length() - 1
            if mask == low:
                present = seq[first]
            else:
                present = 0
                for p in _bits(mask):
                    present |= seq[p]
            present &= above
            if present:
                for x in items(present):
                    iext[x][e] = occ[x] & mask
            after = ~((low << 1) - 1)
            for x in items(tail_all[e][first + 1]):
                sext[x][e] = occ[x] & after
        count = len(proj)
        minc = self.minc
        children = []
        closed = True
        last = prefix[-1]
        for x in sorted(iext):
            child = iext[x]
            if len(child) >= minc:
                closed = closed and len(child) < count
                children.append((prefix[:-1] + (last | (1 << x),), x, child))
        for x in sorted(sext):
            child = sext[x]
            if len(child) >= minc:
                closed = closed and len(child) < count
                children.append((prefix + (1 << x,), x, child))
        if closed:
            mask = 0
            for e in proj:
                mask |= 1 << e
            self.candidates.append((prefix, count, sum(proj), mask))
            if len(self.candidates) > self.max_candidates:
                raise MiningLimitExceeded(
                    f"more than {self.max_candidates} candidate patterns; raise min_sup"
                )
        for child in children:
            self._visit(*child)


def _eliminate_non_closed(candidates):
    """Drop candidates that a same-support, same-supporter super-sequence contains."""
    groups: dict[tuple[int, int], dict[int, list]] = defaultdict(lambda: defaultdict(list))
    for prefix, count, id_sum, mask in candidates:
        groups[count, id_sum][mask].append(prefix)
    kept = []
    for by_mask in groups.values():
        for mask, members in by_mask.items():
            members.sort(key=lambda s: -_n_items(s))
            accepted: list = []
            for s in members:
                if not any(_is_subseq_sets(s, a) for a in accepted):
                    accepted.append(s)
            kept.extend((s, _popcount(mask)) for s in accepted)
    return kept


def _popcount(mask: int) -> int:
    return bin(mask).count("1")


def _is_subseq_sets(a, b) -> bool:
    if _n_items(a) >= _n_items(b):
        return a == b
    j = 0
    for h in a:
        while j < len(b) and h & b[j] != h:
            j += 1
        if j == len(b):
            return False
        j += 1
    return True


def _decode(prefix, alphabet) -> Sequence:
    return tuple(tuple(alphabet[x] for x in _bits(h)) for h in prefix)


def _class_tag(seq: Sequence) -> int | None:
    for pos, h in enumerate(seq):
        for item in h:
            if isinstance(item, Item) and item.is_class:
                if pos != len(seq) - 1:
                    raise ValueError(f"class item in non-final position of {seq}")
                return item.bin
    return None


def _db_sequences(db) -> list[Sequence]:
    return db.sequences() if isinstance(db, SequenceDatabase) else [tuple(s) for s in db]


def mine_closed(db, min_sup: float, max_candidates: int = DEFAULT_MAX_CANDIDATES) -> list[MinedPattern]:
    """All closed frequent sequences of ``db`` with exact support counts.

    ``db`` is a :class:`SequenceDatabase` or any list of sequences.
    Output is in canonical order (size, then items).
    """
    seqs = _db_sequences(db)
    minc = min_count(min_sup, len(seqs))
    if not seqs:
        return []
    alphabet, encoded = _encode(seqs)
    growth = _PrefixGrowth(encoded, minc, max_candidates)
    candidates = growth.run()
    out = []
    for prefix, count in _eliminate_non_closed(candidates):
        seq = _decode(prefix, alphabet)
        out.append(MinedPattern(seq, count, _class_tag(seq)))
    return sorted(out, key=canonical_key)


# -- exhaustive oracle ----------------------------------------------------------

BRUTE_FORCE_MAX_ITEMS = 40
BRUTE_FORCE_MAX_ALPHABET = 8


def _embeds(a, b, i=0, j=0) -> bool:
    # backtracking over every admissible position; deliberately not greedy
    if i == len(a):
        return True
    for k in range(j, len(b)):
        if set(a[i]) <= set(b[k]) and _embeds(a, b, i + 1, k + 1):
            return True
    return False


def _all_subsequences(seq: Sequence) -> set[Sequence]:
    choices = []
    for h in seq:
        choices.append([c for r in range(len(h) + 1) for c in itertools.combinations(h, r)])
    out = set()
    for pick in itertools.product(*choices):
        s = tuple(c for c in pick if c)
        if s:
            out.add(s)
    return out


def brute_force_closed(db, min_sup: float) -> list[MinedPattern]:
    """Closed frequent sequences by exhaustive enumeration (tiny inputs only)."""
    seqs = _db_sequences(db)
    minc = min_count(min_sup, len(seqs))
    total = sum(len(h) for s in seqs for h in s)
    alphabet = {i for s in seqs for h in s for i in h}
    if total > BRUTE_FORCE_MAX_ITEMS or len(alphabet) > BRUTE_FORCE_MAX_ALPHABET:
        raise ValueError(
            f"brute force limited to {BRUTE_FORCE_MAX_ITEMS} items and an alphabet of "
            f"{BRUTE_FORCE_MAX_ALPHABET}; got {total} and {len(alphabet)}"
        )
    universe = set()
    for s in seqs:
        universe |= _all_subsequences(tuple(tuple(sorted(h)) for h in s))
    frequent = {}
    for cand in universe:
        count = sum(1 for s in seqs if _embeds(cand, s))
        if count >= minc:
            frequent[cand] = count
    out = []
    for cand, count in frequent.items():
        n_items = sum(len(h) for h in cand)
        absorbed = any(
            other_count == count and sum(len(h) for h in other) > n_items and _embeds(cand, other)
            for other, other_count in frequent.items()
        )
        if not absorbed:
            out.append(MinedPattern(cand, count, _class_tag(cand)))
    return sorted(out, key=canonical_key)


# -- class buckets and dumps ------------------------------------------------------

def split_by_class(patterns) -> dict[int | None, list[MinedPattern]]:
    """Group by trailing class item; the class itemset is stripped from tagged patterns."""
    buckets: dict[int | None, list[MinedPattern]] = {}
    for p in patterns:
        tag = _class_tag(p.sequence)
        if tag is None:
            buckets.setdefault(None, []).append(MinedPattern(p.sequence, p.support_count, None))
            continue
        if len(p.sequence[-1]) != 1:
            raise ValueError(f"class item shares an itemset with descriptor items in {p.sequence}")
        stripped = p.sequence[:-1]
        if stripped:
            buckets.setdefault(tag, []).append(MinedPattern(stripped, p.support_count, tag))
    return buckets


def write_patterns(patterns, path, specs=None) -> None:
    specs = {s.id: s for s in specs} if specs else None
    with open(path, "w", encoding="utf-8") as fh:
        for p in patterns:
            tag = "-" if p.class_tag is None else str(p.class_tag)
            fh.write(f"{p.support_count}\t{tag}\t{format_sequence(p.sequence, specs)}\n")


def read_patterns(path, specs=None) -> list[MinedPattern]:
    specs = {s.id: s for s in specs} if specs else None
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected support<TAB>class<TAB>sequence")
            seq = parse_sequence(parts[2], specs)
            tag = None if parts[1] == "-" else int(parts[1])
            if tag != _class_tag(seq):
                raise ValueError(f"{path}:{lineno}: class column disagrees with the sequence")
            out.append(MinedPattern(seq, int(parts[0]), tag))
    return out


__all__ = [
    "Item",
    "MinedPattern",
    "MiningLimitExceeded",
    "brute_force_closed",
    "mine_closed",
    "split_by_class",
]
