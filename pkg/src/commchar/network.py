"""Dynamic attributed networks and their time-aggregated weighted graph."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

logger = logging.getLogger(__name__)


class NetworkFormatError(ValueError):
    """Raised when an edges or attributes file cannot be ingested."""


def _pair(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class DynamicNetwork:
    """Fixed node set observed over ``theta`` slices.

    ``edges[t - 1]`` holds the unordered pairs ``(u, v)`` with ``u < v``
    present at slice ``t``. ``attributes[name][t - 1]`` maps node id to value;
    missing keys are absent values.
    """

    n: int
    theta: int
    edges: tuple[frozenset[tuple[int, int]], ...]
    attributes: dict[str, tuple[dict[int, float], ...]] = field(default_factory=dict)
    node_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.theta < 1:
            raise ValueError("a dynamic network needs at least one slice")
        if len(self.edges) != self.theta:
            raise ValueError(f"expected {self.theta} edge sets, got {len(self.edges)}")
        for t, es in enumerate(self.edges, start=1):
            for u, v in es:
                if u == v:
                    raise ValueError(f"self-loop on node {u} at slice {t}")
                if not (0 <= u < v < self.n):
                    raise ValueError(f"edge {(u, v)} at slice {t} is not a canonical pair of ids < {self.n}")
        for name, per_slice in self.attributes.items():
            if len(per_slice) != self.theta:
                raise ValueError(f"attribute {name!r} has {len(per_slice)} slices, expected {self.theta}")
            for values in per_slice:
                for v in values:
                    if not 0 <= v < self.n:
                        raise ValueError(f"attribute {name!r} refers to node {v} outside [0, {self.n})")
        if self.node_labels is not None and len(self.node_labels) != self.n:
            raise ValueError("node_labels must name every node")
        # adjacency lists are derived once; the dataclass stays logically immutable
        adj = []
        for es in self.edges:
            nbrs: list[set[int]] = [set() for _ in range(self.n)]
            for u, v in es:
                nbrs[u].add(v)
                nbrs[v].add(u)
            adj.append(tuple(frozenset(s) for s in nbrs))
        object.__setattr__(self, "_adj", tuple(adj))

    @classmethod
    def from_edges(cls, n, slices, attributes=None, node_labels=None) -> "DynamicNetwork":
        """Build from an iterable of per-slice edge iterables (pairs in any order)."""
        edge_sets = tuple(frozenset(_pair(u, v) for u, v in es) for es in slices)
        attrs = {name: tuple(dict(d) for d in per) for name, per in (attributes or {}).items()}
        labels = tuple(node_labels) if node_labels is not None else None
        return cls(n=n, theta=len(edge_sets), edges=edge_sets, attributes=attrs, node_labels=labels)

    @property
    def attribute_names(self) -> list[str]:
        return sorted(self.attributes)

    def label(self, v: int) -> str:
        return self.node_labels[v] if self.node_labels is not None else str(v)

    def neighbors(self, t: int, v: int) -> frozenset[int]:
        # unchecked fast path used by the measure kernels
        return self._adj[t - 1][v]

    def _check(self, t: int, *nodes: int) -> None:
        if not 1 <= t <= self.theta:
            raise IndexError(f"slice {t} outside [1, {self.theta}]")
        for v in nodes:
            if not 0 <= v < self.n:
                raise IndexError(f"node {v} outside [0, {self.n})")

    def attribute(self, name: str, t: int, v: int) -> float | None:
        self._check(t, v)
        return self.attributes[name][t - 1].get(v)


@dataclass(frozen=True)
class GlobalWeightedNetwork:
    """Union of all slices; a pair's weight is the number of slices holding it."""

    n: int
    weighted_edges: dict[tuple[int, int], int]

    def __post_init__(self):
        for (u, v), w in self.weighted_edges.items():
            if not (0 <= u < v < self.n) or w < 1:
                raise ValueError(f"invalid weighted edge {(u, v)}: {w}")

    @property
    def total_weight(self) -> int:
        return sum(self.weighted_edges.values())

    def adjacency(self) -> list[dict[int, int]]:
        adj: list[dict[int, int]] = [{} for _ in range(self.n)]
        for (u, v), w in self.weighted_edges.items():
            adj[u][v] = w
            adj[v][u] = w
        return adj


def adjacency(net: DynamicNetwork, t: int, u: int, v: int) -> int:
    """1 when ``(u, v)`` is a link of slice ``t``, else 0."""
    net._check(t, u, v)
    if u == v:
        raise ValueError("adjacency is undefined for u == v")
    return int(v in net.neighbors(t, u))


def neighborhood(net: DynamicNetwork, t: int, v: int) -> frozenset[int]:
    net._check(t, v)
    return net.neighbors(t, v)


def aggregate(net: DynamicNetwork) -> GlobalWeightedNetwork:
    weights: dict[tuple[int, int], int] = {}
    for es in net.edges:
        for e in es:
            weights[e] = weights.get(e, 0) + 1
    return GlobalWeightedNetwork(n=net.n, weighted_edges=dict(sorted(weights.items())))


# -- file I/O -----------------------------------------------------------------

def _read_rows(path: Path, header: list[str]):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        first = next(reader, None)
        if first is None or [h.strip() for h in first] != header:
            raise NetworkFormatError(f"{path}:1: expected header {','.join(header)}")
        for row in reader:
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise NetworkFormatError(f"{path}:{reader.line_num}: expected {len(header)} fields, got {len(row)}")
            yield reader.line_num, [c.strip() for c in row]


def _slice_index(path, lineno, raw) -> int:
    try:
        t = int(raw)
    except ValueError:
        raise NetworkFormatError(f"{path}:{lineno}: slice index {raw!r} is not an integer") from None
    if t < 1:
        raise NetworkFormatError(f"{path}:{lineno}: slice index {t} < 1")
    return t


def load_network(edges_path, attrs_path=None) -> DynamicNetwork:
    """Read an edges CSV (``t,u,v``) and an optional attributes CSV (``t,node,attr,value``).

    Node labels from both files are mapped to dense ids in sorted label order.
    """
    edges_path = Path(edges_path)
    raw_edges: list[tuple[int, str, str, int]] = []
    labels: set[str] = set()
    for lineno, (t, u, v) in _read_rows(edges_path, ["t", "u", "v"]):
        t = _slice_index(edges_path, lineno, t)
        if not u or not v:
            raise NetworkFormatError(f"{edges_path}:{lineno}: empty node label")
        if u == v:
            raise NetworkFormatError(f"{edges_path}:{lineno}: self-loop on {u!r}")
        raw_edges.append((t, u, v, lineno))
        labels.update((u, v))

    raw_attrs: list[tuple[int, str, str, float]] = []
    if attrs_path is not None:
        attrs_path = Path(attrs_path)
        for lineno, (t, node, attr, value) in _read_rows(attrs_path, ["t", "node", "attr", "value"]):
            t = _slice_index(attrs_path, lineno, t)
            if not node or not attr:
                raise NetworkFormatError(f"{attrs_path}:{lineno}: empty node or attribute name")
            try:
                x = float(value)
            except ValueError:
                raise NetworkFormatError(f"{attrs_path}:{lineno}: value {value!r} is not a number") from None
            if math.isnan(x):
                raise NetworkFormatError(f"{attrs_path}:{lineno}: NaN value")
            raw_attrs.append((t, node, attr, x))
            labels.add(node)

    if not raw_edges and not raw_attrs:
        raise NetworkFormatError(f"{edges_path}: no rows")
    theta = max([t for t, *_ in raw_edges] + [t for t, *_ in raw_attrs])
    order = sorted(labels)
    index = {lab: i for i, lab in enumerate(order)}

    slices: list[set[tuple[int, int]]] = [set() for _ in range(theta)]
    for t, u, v, lineno in raw_edges:
        e = _pair(index[u], index[v])
        if e in slices[t - 1]:
            logger.warning("%s:%d: duplicate edge (%s, %s) at slice %d ignored", edges_path, lineno, u, v, t)
            continue
        slices[t - 1].add(e)

    names = sorted({a for _, _, a, _ in raw_attrs})
    attributes: dict[str, list[dict[int, float]]] = {a: [{} for _ in range(theta)] for a in names}
    for t, node, attr, x in raw_attrs:
        attributes[attr][t - 1][index[node]] = x

    return DynamicNetwork.from_edges(len(order), slices, attributes, order)


def save_network(net: DynamicNetwork, edges_path, attrs_path=None) -> None:
    """Inverse of :func:`load_network` (edges sorted by slice then pair)."""
    with open(edges_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "u", "v"])
        for t, es in enumerate(net.edges, start=1):
            for u, v in sorted(es):
                w.writerow([t, net.label(u), net.label(v)])
    if attrs_path is None:
        return
    with open(attrs_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "node", "attr", "value"])
        for t in range(1, net.theta + 1):
            for name in net.attribute_names:
                for v, x in sorted(net.attributes[name][t - 1].items()):
                    w.writerow([t, net.label(v), name, repr(float(x))])
