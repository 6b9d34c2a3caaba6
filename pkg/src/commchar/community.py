"""Louvain community detection and weighted modularity on the global network."""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .network import GlobalWeightedNetwork


@dataclass(frozen=True)
class CommunityStructure:
    """A partition of ``range(n)``; ``assignment[v]`` is the community of ``v``."""

    assignment: tuple[int, ...]

    def __post_init__(self):
        ids = set(self.assignment)
        if ids != set(range(len(ids))):
            raise ValueError("community ids must be dense in [0, lambda)")

    @classmethod
    def from_labels(cls, labels) -> "CommunityStructure":
        """Relabel arbitrary hashable labels densely, largest community first."""
        labels = list(labels)
        sizes: dict = {}
        first: dict = {}
        for i, c in enumerate(labels):
            sizes[c] = sizes.get(c, 0) + 1
            first.setdefault(c, i)
        # decreasing size, ties by first member so the relabelling is deterministic
        order = sorted(sizes, key=lambda c: (-sizes[c], first[c]))
        remap = {c: i for i, c in enumerate(order)}
        return cls(tuple(remap[c] for c in labels))

    @property
    def n(self) -> int:
        return len(self.assignment)

    @property
    def count(self) -> int:
        return max(self.assignment) + 1 if self.assignment else 0

    @property
    def sizes(self) -> list[int]:
        sizes = [0] * self.count
        for c in self.assignment:
            sizes[c] += 1
        return sizes

    def members(self, c: int) -> frozenset[int]:
        return frozenset(v for v, cv in enumerate(self.assignment) if cv == c)

    def __call__(self, v: int) -> int:
        return self.assignment[v]


def modularity(gw: GlobalWeightedNetwork, comm: CommunityStructure) -> float:
    """Newman weighted modularity at resolution 1."""
    if comm.n != gw.n:
        raise ValueError(f"partition covers {comm.n} nodes, graph has {gw.n}")
    m = gw.total_weight
    if m == 0:
        raise ValueError("modularity is undefined on a graph without edges")
    internal = [0] * comm.count
    tot = [0] * comm.count
    for (u, v), w in gw.weighted_edges.items():
        cu, cv = comm(u), comm(v)
        tot[cu] += w
        tot[cv] += w
        if cu == cv:
            internal[cu] += w
    q = Fraction(0)
    for lc, kc in zip(internal, tot):
        q += Fraction(lc, m) - Fraction(kc, 2 * m) ** 2
    return float(q)


class _Level:
    """Weighted graph with self-loops used between Louvain aggregation passes."""

    def __init__(self, n, adj, loops):
        self.n = n
        self.adj = adj  # list of {neighbor: weight}, neighbor != node
        self.loops = loops  # self-loop weight per node
        self.k = [sum(a.values()) + 2 * s for a, s in zip(adj, loops)]

    def aggregate(self, part):
        size = max(part) + 1
        adj: list[dict[int, int]] = [{} for _ in range(size)]
        loops = [0] * size
        for u in range(self.n):
            cu = part[u]
            loops[cu] += self.loops[u]
            for v, w in self.adj[u].items():
                if v < u:
                    continue
                cv = part[v]
                if cu == cv:
                    loops[cu] += w
                else:
                    adj[cu][cv] = adj[cu].get(cv, 0) + w
                    adj[cv][cu] = adj[cv].get(cu, 0) + w
        return _Level(size, adj, loops)


def _local_moves(level: _Level, two_m: int, rng: random.Random) -> tuple[list[int], bool]:
    part = list(range(level.n))
    tot = list(level.k)
    order = list(range(level.n))
    rng.shuffle(order)
    moved_any = False
    improved = True
    while improved:
        improved = False
        for i in order:
            ci = part[i]
            ki = level.k[i]
            links: dict[int, int] = {}
            for j, w in level.adj[i].items():
                links[part[j]] = links.get(part[j], 0) + w
            tot[ci] -= ki
            # gains scaled by 2m stay integral, so ties are exact
            best, best_gain = ci, two_m * links.get(ci, 0) - tot[ci] * ki
            for c in sorted(links):
                if c == ci:
                    continue
                gain = two_m * links[c] - tot[c] * ki
                if gain > best_gain:
                    best, best_gain = c, gain
            tot[best] += ki
            if best != ci:
                part[i] = best
                improved = moved_any = True
    # dense relabel in order of first appearance
    remap: dict[int, int] = {}
    return [remap.setdefault(c, len(remap)) for c in part], moved_any


def louvain(gw: GlobalWeightedNetwork, seed: int = 42) -> CommunityStructure:
    """Two-phase Louvain: greedy local moves, then collapse communities into nodes.

    Visit order is a seeded shuffle per level; best-gain ties go to the lowest
    community id; a node moves only on a strict gain.
    """
    if gw.n == 0:
        raise ValueError("cannot detect communities on an empty graph")
    rng = random.Random(seed)
    two_m = 2 * gw.total_weight
    membership = list(range(gw.n))
    if two_m == 0:
        return CommunityStructure.from_labels(membership)
    level = _Level(gw.n, gw.adjacency(), [0] * gw.n)
    while True:
        part, moved = _local_moves(level, two_m, rng)
        if not moved:
            break
        membership = [part[c] for c in membership]
        level = level.aggregate(part)
    return CommunityStructure.from_labels(membership)


def filter_small(comm: CommunityStructure, min_size: int) -> list[int]:
    return [c for c, s in enumerate(comm.sizes) if s >= min_size]


def write_communities(comm: CommunityStructure, path, labels=None) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node", "community"])
        for v, c in enumerate(comm.assignment):
            w.writerow([labels[v] if labels is not None else v, c])


def read_communities(path, labels=None) -> CommunityStructure:
    """Read ``node,community``; every node named in ``labels`` must be assigned.

    Community labels in the file may be arbitrary; they are re-indexed by size.
    """
    index = {lab: i for i, lab in enumerate(labels)} if labels is not None else None
    found: dict[int, str] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["node", "community"]:
            raise ValueError(f"{path}:1: expected header node,community")
        for row in reader:
            if not row:
                continue
            if len(row) != 2:
                raise ValueError(f"{path}:{reader.line_num}: expected 2 fields")
            node, c = row[0].strip(), row[1].strip()
            if index is not None:
                if node not in index:
                    raise ValueError(f"{path}:{reader.line_num}: unknown node {node!r}")
                v = index[node]
            else:
                v = int(node)
            if v in found:
                raise ValueError(f"{path}:{reader.line_num}: node {node!r} assigned twice")
            found[v] = c
    n = len(labels) if labels is not None else len(found)
    missing = [v for v in range(n) if v not in found]
    if missing:
        raise ValueError(f"{path}: {len(missing)} nodes have no community (first: {missing[0]})")
    return CommunityStructure.from_labels(found[v] for v in range(n))
