"""Discretised node sequences and the class-concatenated sequence database.

A sequence is a tuple of itemsets; an itemset is a sorted tuple of
:class:`Item`. Node sequences may contain empty itemsets (no data at that
slice); mined patterns never do.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence as Seq

from .community import CommunityStructure
from .measures import MEASURES, MeasureTable
from .network import DynamicNetwork

CLASS = "class"


class Item(NamedTuple):
    """``kind`` is 0 for descriptor items and 1 for the class item, so class
    items sort after every descriptor item."""

    kind: int
    descriptor: str
    bin: int

    @classmethod
    def of(cls, descriptor: str, bin: int) -> "Item":
        return cls(0, descriptor, bin)

    @classmethod
    def community(cls, c: int) -> "Item":
        return cls(1, CLASS, c)

    @property
    def is_class(self) -> bool:
        return self.kind == 1


Itemset = tuple[Item, ...]
Sequence = tuple[Itemset, ...]


def _fmt(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


@dataclass(frozen=True)
class DescriptorSpec:
    """How one descriptor is cut into bins.

    Breakpoints ``b_1 < ... < b_p`` give ``p + 1`` left-closed, right-open
    bins: ``(-inf, b_1), [b_1, b_2), ..., [b_p, +inf)``.
    """

    id: str
    kind: str  # "measure" or "attribute"
    breakpoints: tuple[float, ...]
    emit_zero: bool = True

    def __post_init__(self):
        if self.kind not in ("measure", "attribute"):
            raise ValueError(f"descriptor {self.id!r}: kind must be 'measure' or 'attribute'")
        if self.kind == "measure" and self.id not in MEASURES:
            raise ValueError(f"descriptor {self.id!r}: unknown measure")
        if self.id == CLASS:
            raise ValueError(f"{CLASS!r} is reserved for the community item")
        if not self.breakpoints:
            raise ValueError(f"descriptor {self.id!r}: at least one breakpoint is required")
        if any(not math.isfinite(b) for b in self.breakpoints):
            raise ValueError(f"descriptor {self.id!r}: breakpoints must be finite")
        if any(a >= b for a, b in zip(self.breakpoints, self.breakpoints[1:])):
            raise ValueError(f"descriptor {self.id!r}: breakpoints must be strictly increasing")

    def bin_labels(self) -> list[str]:
        b = [_fmt(x) for x in self.breakpoints]
        return [f"<{b[0]}"] + [f"{lo}-{hi}" for lo, hi in zip(b, b[1:])] + [f">={b[-1]}"]


def default_specs(attributes: Seq[str] = (), aggregates: Seq[str] = ("total_conf", "total_journal")) -> list[DescriptorSpec]:
    """Descriptor set used on co-authorship data.

    Attributes named in ``aggregates`` get total-publication bins; every other
    attribute is treated as a per-venue publication count.
    """
    specs = [
        DescriptorSpec("degree", "measure", (3, 10, 30)),
        DescriptorSpec("transitivity", "measure", (0.35, 0.5, 0.7)),
        DescriptorSpec("embeddedness", "measure", (0.3, 0.7)),
        DescriptorSpec("z", "measure", (2.5,)),
        DescriptorSpec("participation", "measure", (0.05, 0.6, 0.8)),
    ]
    for name in sorted(attributes):
        if name in aggregates:
            specs.append(DescriptorSpec(name, "attribute", (5, 10, 20, 50), emit_zero=False))
        else:
            specs.append(DescriptorSpec(name, "attribute", (1, 2, 3, 4, 5), emit_zero=False))
    return specs


def discretize(spec: DescriptorSpec, value: float | None) -> Item | None:
    if value is None:
        return None
    if math.isnan(value):
        raise ValueError(f"descriptor {spec.id!r}: NaN value")
    if value == 0 and not spec.emit_zero:
        return None
    return Item.of(spec.id, bisect.bisect_right(spec.breakpoints, value))


def item_label(item: Item, specs: dict[str, DescriptorSpec] | None = None) -> str:
    if item.is_class:
        return f"{CLASS}={item.bin}"
    if specs and item.descriptor in specs:
        return f"{item.descriptor}={specs[item.descriptor].bin_labels()[item.bin]}"
    return f"{item.descriptor}#{item.bin}"


def format_sequence(seq: Sequence, specs: dict[str, DescriptorSpec] | None = None) -> str:
    return "".join("(" + ",".join(item_label(i, specs) for i in h) + ")" for h in seq)


def parse_sequence(text: str, specs: dict[str, DescriptorSpec] | None = None) -> Sequence:
    """Inverse of :func:`format_sequence`."""
    text = text.strip()
    if not text:
        return ()
    if not (text.startswith("(") and text.endswith(")")):
        raise ValueError(f"malformed sequence {text!r}")
    lookup = {(d, lab): b for d, s in (specs or {}).items() for b, lab in enumerate(s.bin_labels())}
    out = []
    for chunk in text[1:-1].split(")("):
        items = []
        for tok in filter(None, chunk.split(",")):
            if "=" in tok:
                name, lab = tok.split("=", 1)
                if name == CLASS:
                    items.append(Item.community(int(lab)))
                elif (name, lab) in lookup:
                    items.append(Item.of(name, lookup[name, lab]))
                else:
                    raise ValueError(f"unknown item {tok!r}")
            elif "#" in tok:
                name, b = tok.rsplit("#", 1)
                items.append(Item.of(name, int(b)))
            else:
                raise ValueError(f"malformed item {tok!r}")
        out.append(tuple(sorted(items)))
    return tuple(out)


def _raw_value(spec: DescriptorSpec, measures: MeasureTable | None, net: DynamicNetwork, t: int, v: int):
    if spec.kind == "measure":
        return float(getattr(measures, spec.id)[t - 1, v])
    per_slice = net.attributes.get(spec.id)
    return None if per_slice is None else per_slice[t - 1].get(v)


def node_sequence(v: int, measures: MeasureTable | None, net: DynamicNetwork, specs: Seq[DescriptorSpec]) -> Sequence:
    """u(v): one itemset per slice holding the items of every available descriptor."""
    seq = []
    for t in range(1, net.theta + 1):
        items = (discretize(s, _raw_value(s, measures, net, t, v)) for s in specs)
        seq.append(tuple(sorted(i for i in items if i is not None)))
    return tuple(seq)


@dataclass(frozen=True)
class SequenceDatabase:
    """Entries ``(v, u(v) . {C(v)})`` in node order."""

    entries: tuple[tuple[int, Sequence], ...]
    theta: int
    communities: CommunityStructure

    @property
    def n(self) -> int:
        return len(self.entries)

    def sequences(self) -> list[Sequence]:
        return [s for _, s in self.entries]

    def scope(self, scope) -> list[int]:
        """Entry indices for ``"whole"``, a community id, or ``("not", c)``."""
        if scope is None or scope == "whole":
            return list(range(self.n))
        if isinstance(scope, tuple) and scope[0] == "not":
            c = scope[1]
            return [i for i, (v, _) in enumerate(self.entries) if self.communities(v) != c]
        return [i for i, (v, _) in enumerate(self.entries) if self.communities(v) == scope]


def build_database(net: DynamicNetwork, measures: MeasureTable | None, comm: CommunityStructure,
                   specs: Seq[DescriptorSpec]) -> SequenceDatabase:
    if comm.n != net.n:
        raise ValueError(f"partition covers {comm.n} nodes, network has {net.n}")
    needs_measures = any(s.kind == "measure" for s in specs)
    if needs_measures and measures is None:
        raise ValueError("measure descriptors requested without a measure table")
    ids = [s.id for s in specs]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate descriptor ids")
    entries = tuple(
        (v, node_sequence(v, measures, net, specs) + ((Item.community(comm(v)),),))
        for v in range(net.n)
    )
    return SequenceDatabase(entries, net.theta, comm)


def is_subsequence(a: Sequence, b: Sequence) -> bool:
    """Leftmost greedy embedding of ``a`` into ``b`` with itemset containment."""
    j = 0
    for h in a:
        hs = set(h)
        while j < len(b) and not hs.issubset(b[j]):
            j += 1
        if j == len(b):
            return False
        j += 1
    return True


def support(db: SequenceDatabase, s: Sequence, scope="whole") -> tuple[float, frozenset[int]]:
    """Fraction of nodes in ``scope`` whose sequence contains ``s``, and those nodes."""
    if not s:
        raise ValueError("support of the empty sequence is not defined")
    idx = db.scope(scope)
    if not idx:
        raise ValueError(f"empty scope {scope!r}")
    nodes = frozenset(db.entries[i][0] for i in idx if is_subsequence(s, db.entries[i][1]))
    return len(nodes) / len(idx), nodes


def write_database(db: SequenceDatabase, path, specs=None, labels=None) -> None:
    specs = {s.id: s for s in specs} if specs else None
    with open(path, "w", encoding="utf-8") as fh:
        for v, seq in db.entries:
            fh.write(f"{labels[v] if labels is not None else v}\t{format_sequence(seq, specs)}\n")


def read_database(path, comm: CommunityStructure, specs=None, labels=None) -> SequenceDatabase:
    specs = {s.id: s for s in specs} if specs else None
    index = {lab: i for i, lab in enumerate(labels)} if labels is not None else None
    entries = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            node, _, text = line.partition("\t")
            v = index[node] if index is not None else int(node)
            seq = parse_sequence(text, specs)
            if not seq or seq[-1] != (Item.community(comm(v)),):
                raise ValueError(f"{path}:{lineno}: entry must end with its class itemset")
            entries.append((v, seq))
    entries.sort()
    theta = len(entries[0][1]) - 1 if entries else 0
    return SequenceDatabase(tuple(entries), theta, comm)
