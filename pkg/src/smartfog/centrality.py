"""Betweenness centrality of overlay devices (Brandes accumulation).

For a device n the score is ``sum over unordered pairs {s, d} (s != n != d)
of sigma_sd(n) / sigma_sd`` where ``sigma_sd`` counts shortest s-d paths and
``sigma_sd(n)`` those passing through n as an interior vertex.  Scores are
unnormalized; endpoints never count themselves.

The unweighted mode accumulates dependencies with exact rational arithmetic
(path counts are integers, so every score is a rational number) and converts
to float once at the end; this makes results independent of summation order.
The latency-weighted mode uses floats with an absolute tie tolerance when
deciding whether two path lengths are equal.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import count

from .errors import TopologyError
from .overlay import FogOverlay

#: Absolute tolerance for treating two weighted path lengths as equal.
WEIGHT_TIE_TOL = 1e-12


class CentralityMode(Enum):
    UNWEIGHTED = "unweighted"
    WEIGHTED_BY_LATENCY = "weighted_by_latency"


@dataclass(frozen=True)
class CentralityScores:
    """Per-device betweenness scores and the mode that produced them."""

    scores: dict[int, float]
    mode: CentralityMode

    def __getitem__(self, device_id: int) -> float:
        return self.scores[device_id]


def betweenness(
    overlay: FogOverlay, mode: CentralityMode = CentralityMode.WEIGHTED_BY_LATENCY
) -> CentralityScores:
    """Betweenness of every device; raises TopologyError if disconnected."""
    if not overlay.is_connected():
        raise TopologyError("betweenness requires a connected overlay")
    if mode is CentralityMode.UNWEIGHTED:
        scores = _brandes_unweighted(overlay)
    else:
        scores = _brandes_weighted(overlay)
    return CentralityScores(scores=scores, mode=mode)


def _brandes_unweighted(overlay: FogOverlay) -> dict[int, float]:
    ids = sorted(overlay.device_ids)
    acc = {v: Fraction(0) for v in ids}
    for s in ids:
        # BFS phase: distances, integer path counts, predecessor lists.
        dist = {s: 0}
        sigma = {v: 0 for v in ids}
        sigma[s] = 1
        preds: dict[int, list[int]] = {v: [] for v in ids}
        order = []
        queue = deque([s])
        while queue:
            v = queue.popleft()
            order.append(v)
            for w, _ in overlay.adjacency[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        # Dependency accumulation, exact rationals.
        delta = {v: Fraction(0) for v in ids}
        for w in reversed(order):
            for v in preds[w]:
                delta[v] += Fraction(sigma[v], sigma[w]) * (1 + delta[w])
            if w != s:
                acc[w] += delta[w]
    # Each unordered pair was counted from both endpoints.
    return {v: float(acc[v] / 2) for v in ids}


def _brandes_weighted(overlay: FogOverlay) -> dict[int, float]:
    ids = sorted(overlay.device_ids)
    acc = {v: 0.0 for v in ids}
    tiebreak = count()
    for s in ids:
        dist: dict[int, float] = {}
        seen = {s: 0.0}
        sigma = {v: 0 for v in ids}
        sigma[s] = 1
        preds: dict[int, list[int]] = {v: [] for v in ids}
        order = []
        heap = [(0.0, next(tiebreak), s)]
        while heap:
            d, _, v = heapq.heappop(heap)
            if v in dist:
                continue
            dist[v] = d
            order.append(v)
            for w, ms in overlay.adjacency[v]:
                if w in dist:
                    continue
                nd = d + ms
                if w not in seen or nd < seen[w] - WEIGHT_TIE_TOL:
                    seen[w] = nd
                    heapq.heappush(heap, (nd, next(tiebreak), w))
                    sigma[w] = sigma[v]
                    preds[w] = [v]
                elif abs(nd - seen[w]) <= WEIGHT_TIE_TOL:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = {v: 0.0 for v in ids}
        for w in reversed(order):
            coeff = (1 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                acc[w] += delta[w]
    return {v: acc[v] / 2 for v in ids}
