"""Per-node, per-slice topological measures relative to a static partition."""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .community import CommunityStructure
from .network import DynamicNetwork

HUB_THRESHOLD = 2.5

MEASURES = ("degree", "internal_degree", "transitivity", "z", "participation", "embeddedness")

_CSV_HEADER = ["t", "node", "degree", "int_degree", "transitivity", "z", "participation", "embeddedness"]


@dataclass(frozen=True)
class MeasureTable:
    """Arrays of shape ``(theta, n)``; row ``t - 1`` holds slice ``t``.

    ``community_degrees`` is only populated by :func:`compute_table`; tables
    read back from CSV leave it empty.
    """

    degree: np.ndarray
    internal_degree: np.ndarray
    transitivity: np.ndarray
    z: np.ndarray
    participation: np.ndarray
    embeddedness: np.ndarray
    community_degrees: tuple[tuple[dict[int, int], ...], ...] = ()

    @property
    def theta(self) -> int:
        return self.degree.shape[0]

    @property
    def n(self) -> int:
        return self.degree.shape[1]

    def value(self, measure: str, t: int, v: int) -> float:
        return float(getattr(self, measure)[t - 1, v])

    def is_hub(self, t: int, v: int) -> bool:
        return self.z[t - 1, v] >= HUB_THRESHOLD

    def __eq__(self, other):
        if not isinstance(other, MeasureTable):
            return NotImplemented
        return all(np.array_equal(getattr(self, m), getattr(other, m)) for m in MEASURES)


def internal_degree(net: DynamicNetwork, t: int, v: int, comm: CommunityStructure) -> int:
    c = comm(v)
    return sum(1 for w in net.neighbors(t, v) if comm(w) == c)


def community_degrees(net: DynamicNetwork, t: int, v: int, comm: CommunityStructure) -> dict[int, int]:
    return dict(Counter(comm(w) for w in net.neighbors(t, v)))


def local_transitivity(net: DynamicNetwork, t: int, v: int) -> float:
    """Fraction of neighbour pairs that are linked; 0 below degree 2."""
    nbrs = net.neighbors(t, v)
    d = len(nbrs)
    if d < 2:
        return 0.0
    links = sum(len(net.neighbors(t, w) & nbrs) for w in nbrs) // 2
    return links / (d * (d - 1) / 2)


def within_module_degree(table: MeasureTable, t: int, v: int, comm: CommunityStructure) -> float:
    """z-score of v's internal degree among its community at slice t (population std)."""
    internal = table.internal_degree[t - 1]
    members = sorted(comm.members(comm(v)))
    values = internal[members].astype(float)
    sigma = values.std()
    if sigma == 0:
        return 0.0
    return float((internal[v] - values.mean()) / sigma)


def participation(net: DynamicNetwork, t: int, v: int, comm: CommunityStructure) -> float:
    d = len(net.neighbors(t, v))
    if d == 0:
        return 0.0
    return 1.0 - sum((k / d) ** 2 for k in community_degrees(net, t, v, comm).values())


def embeddedness(table: MeasureTable, t: int, v: int) -> float:
    d = table.degree[t - 1, v]
    return float(table.internal_degree[t - 1, v] / d) if d else 0.0


def compute_table(net: DynamicNetwork, comm: CommunityStructure) -> MeasureTable:
    if comm.n != net.n:
        raise ValueError(f"partition covers {comm.n} nodes, network has {net.n}")
    shape = (net.theta, net.n)
    deg = np.zeros(shape, dtype=np.int64)
    dint = np.zeros(shape, dtype=np.int64)
    trans = np.zeros(shape)
    part = np.zeros(shape)
    emb = np.zeros(shape)
    z = np.zeros(shape)
    cdeg = []
    labels = np.asarray(comm.assignment)
    groups = [np.flatnonzero(labels == c) for c in range(comm.count)]
    for t in range(1, net.theta + 1):
        row = []
        for v in range(net.n):
            cd = community_degrees(net, t, v, comm)
            d = sum(cd.values())
            di = cd.get(comm(v), 0)
            deg[t - 1, v] = d
            dint[t - 1, v] = di
            trans[t - 1, v] = local_transitivity(net, t, v)
            part[t - 1, v] = 1.0 - sum((k / d) ** 2 for k in cd.values()) if d else 0.0
            emb[t - 1, v] = di / d if d else 0.0
            row.append(cd)
        cdeg.append(tuple(row))
        for idx in groups:
            vals = dint[t - 1, idx].astype(float)
            sigma = vals.std()
            if sigma > 0:
                z[t - 1, idx] = (vals - vals.mean()) / sigma
    return MeasureTable(deg, dint, trans, z, part, emb, tuple(cdeg))


def write_measures(table: MeasureTable, path, labels=None) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(_CSV_HEADER)
        for t in range(1, table.theta + 1):
            for v in range(table.n):
                w.writerow([
                    t,
                    labels[v] if labels is not None else v,
                    int(table.degree[t - 1, v]),
                    int(table.internal_degree[t - 1, v]),
                    repr(float(table.transitivity[t - 1, v])),
                    repr(float(table.z[t - 1, v])),
                    repr(float(table.participation[t - 1, v])),
                    repr(float(table.embeddedness[t - 1, v])),
                ])


def read_measures(path, n: int, theta: int, labels=None) -> MeasureTable:
    index = {lab: i for i, lab in enumerate(labels)} if labels is not None else None
    arrays = {m: np.zeros((theta, n), dtype=np.int64 if "degree" in m else float) for m in MEASURES}
    seen = np.zeros((theta, n), dtype=bool)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        if [h.strip() for h in next(reader, [])] != _CSV_HEADER:
            raise ValueError(f"{path}:1: expected header {','.join(_CSV_HEADER)}")
        for row in reader:
            if not row:
                continue
            t = int(row[0])
            v = index[row[1]] if index is not None else int(row[1])
            for m, raw in zip(MEASURES, row[2:]):
                arrays[m][t - 1, v] = int(raw) if "degree" in m else float(raw)
            seen[t - 1, v] = True
    if not seen.all():
        raise ValueError(f"{path}: {int((~seen).sum())} (slice, node) rows missing")
    return MeasureTable(**arrays)
