"""Independent reference implementations used to check the package.

Every oracle here recomputes its quantity by a different route than the
implementation under test: betweenness by exhaustive shortest-path
enumeration over Floyd-Warshall bounds, fronts by direct all-pairs peeling,
k-means by exhaustive bipartition search, eigenvalues by the
Faddeev-LeVerrier characteristic polynomial, gateway selection by a literal
replay of the ranking rules.  None of them import the corresponding package
module's internals.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from itertools import combinations

import numpy as np

from smartfog.overlay import Arch, FogDevice, FogOverlay, Link

# ---------------------------------------------------------------------------
# Betweenness centrality


def _adjacency(overlay: FogOverlay, weighted: bool) -> dict[int, list[tuple[int, float]]]:
    adj: dict[int, list[tuple[int, float]]] = {d.id: [] for d in overlay.devices}
    for link in overlay.links:
        w = link.latency_ms if weighted else 1.0
        adj[link.a].append((link.b, w))
        adj[link.b].append((link.a, w))
    return adj


def _floyd_warshall(ids: list[int], adj) -> dict[int, dict[int, float]]:
    dist = {u: {v: math.inf for v in ids} for u in ids}
    for u in ids:
        dist[u][u] = 0.0
    for u in ids:
        for v, w in adj[u]:
            if w < dist[u][v]:
                dist[u][v] = w
                dist[v][u] = w
    for k in ids:
        for i in ids:
            dik = dist[i][k]
            if dik == math.inf:
                continue
            for j in ids:
                alt = dik + dist[k][j]
                if alt < dist[i][j]:
                    dist[i][j] = alt
    return dist


def _all_shortest_paths(s, d, adj, dist, tol):
    """Every shortest s-d path, by DFS pruned with Floyd-Warshall distances."""
    target = dist[s][d]
    paths = []
    stack = [(s, [s], 0.0)]
    while stack:
        node, path, length = stack.pop()
        if node == d:
            if abs(length - target) <= tol:
                paths.append(path)
            continue
        for nbr, w in adj[node]:
            if nbr in path:
                continue
            nl = length + w
            if nl + dist[nbr][d] <= target + tol:
                stack.append((nbr, path + [nbr], nl))
    return paths


def oracle_betweenness(overlay: FogOverlay, weighted: bool) -> dict[int, float]:
    """Exhaustive ratio-sum betweenness over unordered device pairs."""
    ids = sorted(overlay.device_ids)
    adj = _adjacency(overlay, weighted)
    dist = _floyd_warshall(ids, adj)
    tol = 1e-9 if weighted else 0.0
    if weighted:
        acc = {v: 0.0 for v in ids}
    else:
        acc = {v: Fraction(0) for v in ids}
    for s, d in combinations(ids, 2):
        if dist[s][d] == math.inf:
            continue
        paths = _all_shortest_paths(s, d, adj, dist, tol)
        sigma = len(paths)
        interior: dict[int, int] = {}
        for path in paths:
            for v in path[1:-1]:
                interior[v] = interior.get(v, 0) + 1
        for v, cnt in interior.items():
            if weighted:
                acc[v] += cnt / sigma
            else:
                acc[v] += Fraction(cnt, sigma)
    return {v: float(acc[v]) for v in ids}


def oracle_pair_path_stats(overlay: FogOverlay, weighted: bool):
    """Per-pair (sigma, mean interior-vertex count) for the sum identity."""
    ids = sorted(overlay.device_ids)
    adj = _adjacency(overlay, weighted)
    dist = _floyd_warshall(ids, adj)
    tol = 1e-9 if weighted else 0.0
    stats = {}
    for s, d in combinations(ids, 2):
        if dist[s][d] == math.inf:
            continue
        paths = _all_shortest_paths(s, d, adj, dist, tol)
        mean_interior = sum(len(p) - 2 for p in paths) / len(paths)
        stats[(s, d)] = (len(paths), mean_interior)
    return stats


# ---------------------------------------------------------------------------
# Non-dominated sorting


def oracle_fronts(values: np.ndarray, senses_min_mask: np.ndarray) -> list[list[int]]:
    """Front peeling via an explicit all-pairs domination matrix.

    ``values`` is (n, m); ``senses_min_mask`` marks minimized columns (others
    are maximized and get negated here, independently of the implementation).
    """
    v = np.array(values, dtype=float)
    v[:, ~senses_min_mask] *= -1.0
    le = np.all(v[:, None, :] <= v[None, :, :], axis=-1)
    lt = np.any(v[:, None, :] < v[None, :, :], axis=-1)
    dominates = le & lt  # dominates[i, j]: i dominates j
    remaining = np.ones(len(v), dtype=bool)
    fronts = []
    while remaining.any():
        idx = np.flatnonzero(remaining)
        sub = dominates[np.ix_(idx, idx)]
        nondom = ~sub.any(axis=0)
        front = idx[nondom]
        fronts.append([int(i) for i in front])
        remaining[front] = False
    return fronts


# ---------------------------------------------------------------------------
# k-means

def bipartition_best_cost(points: np.ndarray) -> float:
    """Exhaustive best 2-cluster cost (both clusters non-empty)."""
    points = np.asarray(points, dtype=float)
    n = len(points)
    best = math.inf
    for mask in range(1, 2 ** (n - 1)):
        in_a = [(mask >> i) & 1 == 1 for i in range(n)]
        a = points[np.array(in_a)]
        b = points[~np.array(in_a)]
        if len(a) == 0 or len(b) == 0:
            continue
        cost = float(((a - a.mean(axis=0)) ** 2).sum() + ((b - b.mean(axis=0)) ** 2).sum())
        if cost < best:
            best = cost
    return best


# ---------------------------------------------------------------------------
# Eigenvalues via the characteristic polynomial


def charpoly_eigvals(matrix: np.ndarray) -> np.ndarray:
    """Eigenvalues from Faddeev-LeVerrier characteristic polynomial roots."""
    a = np.asarray(matrix, dtype=float)
    n = a.shape[0]
    coeffs = [1.0]
    m = np.zeros_like(a)
    for k in range(1, n + 1):
        m = a @ m + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(a @ m) / k)
    roots = np.roots(coeffs)
    return np.sort(roots.real)


# ---------------------------------------------------------------------------
# Adjusted Rand index


def adjusted_rand_index(labels_a, labels_b) -> float:
    """Standard pair-counting ARI from the contingency table."""
    a = list(labels_a)
    b = list(labels_b)
    assert len(a) == len(b)
    n = len(a)
    table: dict[tuple, int] = {}
    row: dict[object, int] = {}
    col: dict[object, int] = {}
    for x, y in zip(a, b):
        table[(x, y)] = table.get((x, y), 0) + 1
        row[x] = row.get(x, 0) + 1
        col[y] = col.get(y, 0) + 1
    comb2 = lambda m: m * (m - 1) // 2
    sum_ij = sum(comb2(v) for v in table.values())
    sum_i = sum(comb2(v) for v in row.values())
    sum_j = sum(comb2(v) for v in col.values())
    expected = sum_i * sum_j / comb2(n) if comb2(n) else 0.0
    max_index = (sum_i + sum_j) / 2
    if max_index == expected:
        return 1.0
    return (sum_ij - expected) / (max_index - expected)


# ---------------------------------------------------------------------------
# Gateway-selection replay


def oracle_select(evaluations, areas) -> list[tuple[int, str]]:
    """Independent replay of front-peeling selection.

    ``evaluations`` are (device_id, betweenness, mips, cloud_latency,
    memory_gb) tuples; ``areas`` are "compute" / "memory" strings.
    """
    values = np.array([[e[1], e[2], e[3]] for e in evaluations])
    fronts = oracle_fronts(values, np.array([False, False, True]))
    taken: set[int] = set()
    picks = []
    for area in areas:
        chosen = None
        for front in fronts:
            candidates = [evaluations[i] for i in front if evaluations[i][0] not in taken]
            if not candidates:
                continue
            if area == "compute":
                key = lambda e: (-e[2], e[3], -e[1], e[0])
            else:
                key = lambda e: (-e[4], e[3], -e[1], e[0])
            chosen = sorted(candidates, key=key)[0]
            break
        assert chosen is not None, "selection exhausted every front"
        taken.add(chosen[0])
        picks.append((chosen[0], area))
    return picks


# ---------------------------------------------------------------------------
# Shortest paths by brute force


def brute_force_min_latency(overlay: FogOverlay, src: int, dst: int) -> float:
    """Minimum path latency by enumerating every simple path."""
    if src == dst:
        return 0.0
    adj = _adjacency(overlay, weighted=True)
    best = math.inf
    stack = [(src, {src}, 0.0)]
    while stack:
        node, visited, length = stack.pop()
        if length >= best:
            continue
        for nbr, w in adj[node]:
            if nbr == dst:
                best = min(best, length + w)
            elif nbr not in visited:
                stack.append((nbr, visited | {nbr}, length + w))
    return best


def brute_force_latency_to_cloud(overlay: FogOverlay, device_id: int) -> float:
    return min(
        brute_force_min_latency(overlay, device_id, gw) + ms
        for gw, ms in overlay.cloud_latency_ms.items()
    )


# ---------------------------------------------------------------------------
# Test overlay builders


def planted_overlay(n_per_group: int, seed: int, noise: float = 0.05) -> tuple[FogOverlay, list[int]]:
    """Two-population overlay: high-MIPS/low-memory vs low-MIPS/high-memory.

    Features sit at (1200, 1) and (800, 4) with +-``noise`` multiplicative
    jitter; the chain topology is irrelevant to feature clustering.  Returns
    the overlay and the planted group label per device (id order).
    """
    rng = random.Random(seed)
    centers = [(1200.0, 1.0), (800.0, 4.0)]
    devices = []
    labels = []
    n = 2 * n_per_group
    for i in range(n):
        group = 0 if i < n_per_group else 1
        mips_c, mem_c = centers[group]
        jitter = lambda: 1.0 + rng.uniform(-noise, noise)
        devices.append(
            FogDevice(
                id=i,
                mips=mips_c * jitter(),
                memory_gb=mem_c * jitter(),
                storage_gb=16.0,
                arch=Arch.ARM,
            )
        )
        labels.append(group)
    links = tuple(Link(a=i, b=i + 1, latency_ms=1.0) for i in range(n - 1))
    overlay = FogOverlay(devices=tuple(devices), links=links, cloud_latency_ms={0: 60.0})
    return overlay, labels


def two_component_overlay() -> FogOverlay:
    """Deliberately disconnected overlay (two triangles), for error paths."""
    devices = tuple(
        FogDevice(id=i, mips=1000.0, memory_gb=2.0, storage_gb=16.0, arch=Arch.X86)
        for i in range(6)
    )
    links = tuple(
        Link(a=a, b=b, latency_ms=2.0)
        for a, b in [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]
    )
    return FogOverlay(devices=devices, links=links, cloud_latency_ms={0: 55.0, 3: 70.0})
