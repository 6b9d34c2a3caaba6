"""Emerging-pattern ranking, representative selection and anomaly nodes."""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .miner import MinedPattern, canonical_key
from .sequences import SequenceDatabase, format_sequence, is_subsequence

INF = math.inf


@dataclass(frozen=True)
class RankedPattern:
    """A class-stripped pattern with its supports inside and outside one community."""

    pattern: MinedPattern
    community: int
    in_count: int
    in_size: int
    out_count: int
    out_size: int
    supporters_in: frozenset[int]

    @property
    def sup_in(self) -> float:
        return self.in_count / self.in_size

    @property
    def sup_out(self) -> float:
        return self.out_count / self.out_size if self.out_size else 0.0

    @property
    def growth(self) -> float:
        if self.out_count == 0:
            return INF if self.in_count else 0.0
        return (self.in_count * self.out_size) / (self.out_count * self.in_size)

    def _growth_exact(self):
        # exact ratio for tie-breaking; None encodes +inf
        if self.out_count == 0:
            return None
        return Fraction(self.in_count * self.out_size, self.out_count * self.in_size)


def _growth_key(r: RankedPattern):
    g = r._growth_exact()
    return (1, Fraction(0)) if g is None else (0, g)


def _rank_key(r: RankedPattern):
    """Sort key: growth desc, +inf first; then sup_in desc; then canonical order."""
    inf, g = _growth_key(r)
    return (-inf, -g, -r.in_count, canonical_key(r.pattern))


def growth_rate(patterns_by_class, community: int, db: SequenceDatabase) -> list[RankedPattern]:
    """Rank the patterns tagged with ``community`` by growth rate.

    In-community supporters come from a scan of the community's entries; the
    scan must agree with the mined support count. Out-of-community support is
    recounted over the complement.
    """
    inside = [(v, s) for v, s in db.entries if db.communities(v) == community]
    outside = [s for v, s in db.entries if db.communities(v) != community]
    ranked = []
    for p in patterns_by_class.get(community, []):
        supporters = frozenset(v for v, s in inside if is_subsequence(p.sequence, s))
        if len(supporters) != p.support_count:
            raise ValueError(
                f"mined support {p.support_count} disagrees with scan {len(supporters)} "
                f"for {p.sequence} in community {community}"
            )
        out_count = sum(1 for s in outside if is_subsequence(p.sequence, s))
        ranked.append(RankedPattern(p, community, len(supporters), len(inside), out_count, len(outside), supporters))
    ranked.sort(key=_rank_key)
    return ranked


def most_emerging(ranked: list[RankedPattern]) -> RankedPattern:
    if not ranked:
        raise ValueError("no patterns to choose from")
    return min(ranked, key=_rank_key)


def most_supported(ranked: list[RankedPattern]) -> RankedPattern:
    """Highest in-community support; ties go to the longer sequence, then canonical order."""
    if not ranked:
        raise ValueError("no patterns to choose from")
    return min(ranked, key=lambda r: (-r.in_count, -r.pattern.size, canonical_key(r.pattern)))


def jaccard_distance(a: frozenset, b: frozenset) -> Fraction:
    union = len(a | b)
    if union == 0:
        return Fraction(0)
    return 1 - Fraction(len(a & b), union)


def select_representatives(ranked: list[RankedPattern], members: frozenset[int],
                           max_patterns: int = 10) -> list[RankedPattern]:
    """Greedy cover seeded with the most emerging pattern.

    Each step adds the emerging candidate (growth > 1) whose supporter set is
    farthest, in Jaccard distance, from the nodes covered so far; ties go to
    the higher growth. Stops when the community is covered, when no candidate
    brings a new node, or at ``max_patterns``.
    """
    if not ranked:
        raise ValueError("no patterns to choose from")
    if max_patterns < 1:
        raise ValueError("max_patterns must be >= 1")
    seed = most_emerging(ranked)
    chosen = [seed]
    covered = set(seed.supporters_in)
    pool = [r for r in ranked if r is not seed and _growth_key(r) > (0, Fraction(1))]
    while len(chosen) < max_patterns and not members <= covered:
        best, best_key = None, None
        cov = frozenset(covered)
        for r in pool:
            if r.supporters_in <= cov:
                continue
            key = (jaccard_distance(r.supporters_in, cov), _growth_key(r), r.in_count)
            # strict comparison keeps the earliest (canonical) candidate on full ties
            if best is None or key > best_key:
                best, best_key = r, key
        if best is None:
            break
        chosen.append(best)
        covered |= best.supporters_in
        pool.remove(best)
    return chosen


def detect_anomalies(members: frozenset[int], patterns) -> frozenset[int]:
    covered = set()
    for r in patterns:
        covered |= r.supporters_in
    return frozenset(members) - covered


@dataclass(frozen=True)
class CommunityReport:
    community: int
    members: frozenset[int]
    most_supported: RankedPattern | None = None
    most_emerging: RankedPattern | None = None
    supplementary: tuple[RankedPattern, ...] = ()
    n_patterns: int = 0
    note: str = ""
    coverage: frozenset[int] = field(default_factory=frozenset)
    anomalies: frozenset[int] = field(default_factory=frozenset)
    anomalies_supported: frozenset[int] = field(default_factory=frozenset)
    anomalies_combined: frozenset[int] = field(default_factory=frozenset)

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def representatives(self) -> tuple[RankedPattern, ...]:
        return ((self.most_emerging,) if self.most_emerging else ()) + self.supplementary


def build_report(community: int, ranked: list[RankedPattern], members: frozenset[int],
                 max_patterns: int = 10) -> CommunityReport:
    members = frozenset(members)
    if not ranked:
        return CommunityReport(
            community, members, note="no characterization at this min_sup",
            anomalies=members, anomalies_supported=members, anomalies_combined=members,
        )
    reps = select_representatives(ranked, members, max_patterns)
    ms = most_supported(ranked)
    coverage = frozenset().union(*(r.supporters_in for r in reps))
    return CommunityReport(
        community,
        members,
        most_supported=ms,
        most_emerging=reps[0],
        supplementary=tuple(reps[1:]),
        n_patterns=len(ranked),
        coverage=coverage,
        anomalies=detect_anomalies(members, reps),
        anomalies_supported=detect_anomalies(members, [ms]),
        anomalies_combined=detect_anomalies(members, reps + [ms]),
    )


def characterize(db: SequenceDatabase, patterns_by_class, communities, max_patterns: int = 10,
                 threads: int = 1) -> list[CommunityReport]:
    """One report per community id in ``communities`` (ordered as given)."""
    comm = db.communities

    def one(c):
        ranked = growth_rate(patterns_by_class, c, db)
        return build_report(c, ranked, comm.members(c), max_patterns)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, communities))
    return [one(c) for c in communities]


# -- rendering ------------------------------------------------------------------

def _growth_value(g: float):
    return "inf" if math.isinf(g) else round(g, 12)


def _pattern_dict(r: RankedPattern, specs, label) -> dict:
    return {
        "sequence": format_sequence(r.pattern.sequence, specs),
        "size": r.pattern.size,
        "support_count": r.in_count,
        "sup_in": round(r.sup_in, 12),
        "sup_out": round(r.sup_out, 12),
        "growth": _growth_value(r.growth),
        "supporters": sorted(label(v) for v in r.supporters_in),
    }


def report_to_dict(report: CommunityReport, specs=None, labels=None) -> dict:
    specs = {s.id: s for s in specs} if specs else None

    def label(v):
        return labels[v] if labels is not None else str(v)

    def anomalies(nodes):
        return sorted(label(v) for v in nodes)

    out = {
        "community": report.community,
        "size": report.size,
        "n_patterns": report.n_patterns,
        "note": report.note,
        "most_supported": _pattern_dict(report.most_supported, specs, label) if report.most_supported else None,
        "most_emerging": _pattern_dict(report.most_emerging, specs, label) if report.most_emerging else None,
        "supplementary": [_pattern_dict(r, specs, label) for r in report.supplementary],
        "coverage": round(len(report.coverage) / report.size, 12) if report.size else 0.0,
        "anomalies": {
            "emerging": anomalies(report.anomalies),
            "most_supported": anomalies(report.anomalies_supported),
            "combined": anomalies(report.anomalies_combined),
        },
    }
    return out


def dumps_reports(reports, specs=None, labels=None) -> str:
    doc = {"communities": [report_to_dict(r, specs, labels) for r in reports]}
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def render_table(reports, specs=None, labels=None) -> str:
    lines = []
    for r in reports:
        d = report_to_dict(r, specs, labels)
        lines.append(f"community {d['community']}  size {d['size']}  patterns {d['n_patterns']}")
        if d["note"]:
            lines.append(f"  {d['note']}")
            lines.append("")
            continue
        lines.append(f"  {'role':<14} {'sup_in':>7} {'sup_out':>7} {'growth':>8}  sequence")
        rows = [("most supported", d["most_supported"]), ("most emerging", d["most_emerging"])]
        rows += [("supplementary", p) for p in d["supplementary"]]
        for role, p in rows:
            g = p["growth"] if isinstance(p["growth"], str) else f"{p['growth']:.3f}"
            lines.append(f"  {role:<14} {p['sup_in']:>7.3f} {p['sup_out']:>7.3f} {g:>8}  {p['sequence']}")
        lines.append(f"  coverage {d['coverage']:.3f}")
        lines.append(f"  anomalies (emerging cover): {', '.join(d['anomalies']['emerging']) or '-'}")
        lines.append(f"  anomalies (most supported): {', '.join(d['anomalies']['most_supported']) or '-'}")
        lines.append("")
    return "\n".join(lines)
