"""Planted two-community network with an attribute signature.

Community A carries the signature attribute in a fixed fraction of its
members, community B in a much smaller one; a noise attribute is spread
uniformly. Used for the bundled sample and the end-to-end checks.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .network import DynamicNetwork


@dataclass(frozen=True)
class PlantedNetwork:
    network: DynamicNetwork
    groups: tuple[frozenset[int], frozenset[int]]
    carriers: frozenset[int]
    signature: str


def planted_network(
    n: int = 40,
    theta: int = 5,
    p_in: float = 0.35,
    p_out: float = 0.02,
    rate_a: float = 0.8,
    rate_b: float = 0.1,
    signature: str = "venue_x",
    noise: str = "venue_y",
    seed: int = 0,
) -> PlantedNetwork:
    rng = random.Random(seed)
    half = n // 2
    group_a = frozenset(range(half))
    group_b = frozenset(range(half, n))
    slices = []
    for _ in range(theta):
        es = []
        for u in range(n):
            for v in range(u + 1, n):
                same = (u in group_a) == (v in group_a)
                if rng.random() < (p_in if same else p_out):
                    es.append((u, v))
        slices.append(es)

    carriers = set(rng.sample(sorted(group_a), round(rate_a * len(group_a))))
    carriers |= set(rng.sample(sorted(group_b), round(rate_b * len(group_b))))
    sig = [dict() for _ in range(theta)]
    for v in sorted(carriers):
        sig[rng.randrange(theta)][v] = 1.0
    noisy = [dict() for _ in range(theta)]
    for t in range(theta):
        for v in range(n):
            if rng.random() < 0.3:
                noisy[t][v] = float(rng.choice((1, 2)))
    totals = [{v: sig[t].get(v, 0.0) + noisy[t].get(v, 0.0) for v in range(n)} for t in range(theta)]
    totals = [{v: x for v, x in d.items() if x} for d in totals]

    width = len(str(n - 1))
    labels = [f"n{v:0{width}d}" for v in range(n)]
    net = DynamicNetwork.from_edges(
        n, slices, {signature: sig, noise: noisy, "total_conf": totals}, labels
    )
    return PlantedNetwork(net, (group_a, group_b), frozenset(carriers), signature)
