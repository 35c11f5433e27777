"""Fog overlay model: devices, latency-weighted links, cloud attachment, churn.

The overlay is a connected mesh of fog devices built from a uniformly random
spanning tree plus random chords up to a target mean degree.  Every quantity
that the generator draws (device resources, link latencies, cloud latencies)
comes from a single seeded stream in a fixed order, so the same seed always
yields the same overlay, byte for byte after serialization.
"""

from __future__ import annotations

import heapq
import json
import random
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, Mapping, Union

from .errors import (
    ChurnRejectedError,
    ConfigurationError,
    ConflictError,
    ContractError,
    TopologyError,
)


class Arch(str, Enum):
    """Instruction-set architecture of a fog device."""

    ARM = "arm"
    X86 = "x86"


@dataclass(frozen=True)
class FogDevice:
    """A single fog node with its compute resources."""

    id: int
    mips: float
    memory_gb: float
    storage_gb: float
    arch: Arch

    def __post_init__(self):
        if self.mips <= 0:
            raise ConfigurationError(f"device {self.id}: mips must be > 0, got {self.mips}")
        if self.memory_gb <= 0:
            raise ConfigurationError(
                f"device {self.id}: memory_gb must be > 0, got {self.memory_gb}"
            )
        if self.storage_gb < 0:
            raise ConfigurationError(
                f"device {self.id}: storage_gb must be >= 0, got {self.storage_gb}"
            )


@dataclass(frozen=True)
class Link:
    """Undirected overlay link; endpoints are stored with ``a < b``."""

    a: int
    b: int
    latency_ms: float

    def __post_init__(self):
        if self.a == self.b:
            raise ConfigurationError(f"link ({self.a}, {self.b}) is a self-loop")
        if self.a > self.b:
            raise ConfigurationError(f"link endpoints must satisfy a < b, got ({self.a}, {self.b})")
        if self.latency_ms <= 0:
            raise ConfigurationError(
                f"link ({self.a}, {self.b}): latency_ms must be > 0, got {self.latency_ms}"
            )


@dataclass(frozen=True)
class FogOverlay:
    """Immutable snapshot of the overlay network.

    ``cloud_latency_ms`` maps cloud-attached device ids to their direct
    device-to-cloud latency.  At least one device must be cloud-attached.
    Churn never mutates an overlay; :func:`apply_churn` returns a new one.
    """

    devices: tuple[FogDevice, ...]
    links: tuple[Link, ...]
    cloud_latency_ms: Mapping[int, float]

    def __post_init__(self):
        ids = [d.id for d in self.devices]
        if len(set(ids)) != len(ids):
            raise ConfigurationError("duplicate device ids in overlay")
        known = set(ids)
        seen_links = set()
        for link in self.links:
            if link.a not in known or link.b not in known:
                raise ConfigurationError(f"link ({link.a}, {link.b}) references unknown device")
            if (link.a, link.b) in seen_links:
                raise ConfigurationError(f"duplicate link ({link.a}, {link.b})")
            seen_links.add((link.a, link.b))
        if not self.cloud_latency_ms:
            raise ConfigurationError("overlay must have at least one cloud-attached device")
        for dev_id, ms in self.cloud_latency_ms.items():
            if dev_id not in known:
                raise ConfigurationError(f"cloud attachment references unknown device {dev_id}")
            if ms <= 0:
                raise ConfigurationError(f"cloud latency for device {dev_id} must be > 0")

    @cached_property
    def device_ids(self) -> tuple[int, ...]:
        return tuple(d.id for d in self.devices)

    @cached_property
    def _by_id(self) -> dict[int, FogDevice]:
        return {d.id: d for d in self.devices}

    def device(self, device_id: int) -> FogDevice:
        try:
            return self._by_id[device_id]
        except KeyError:
            raise ContractError(f"no device with id {device_id}") from None

    def __contains__(self, device_id: int) -> bool:
        return device_id in self._by_id

    @cached_property
    def adjacency(self) -> dict[int, tuple[tuple[int, float], ...]]:
        """Neighbour lists as ``id -> ((neighbour, latency_ms), ...)``."""
        adj: dict[int, list[tuple[int, float]]] = {d.id: [] for d in self.devices}
        for link in self.links:
            adj[link.a].append((link.b, link.latency_ms))
            adj[link.b].append((link.a, link.latency_ms))
        return {k: tuple(sorted(v)) for k, v in adj.items()}

    def is_connected(self) -> bool:
        if not self.devices:
            return False
        start = self.devices[0].id
        seen = {start}
        stack = [start]
        while stack:
            node = stack.pop()
            for nbr, _ in self.adjacency[node]:
                if nbr not in seen:
                    seen.add(nbr)
                    stack.append(nbr)
        return len(seen) == len(self.devices)

    def to_json(self) -> str:
        """Serialize deterministically; `from_json` round-trips exactly."""
        doc = {
            "devices": [
                {
                    "id": d.id,
                    "mips": d.mips,
                    "memory_gb": d.memory_gb,
                    "storage_gb": d.storage_gb,
                    "arch": d.arch.value,
                }
                for d in sorted(self.devices, key=lambda d: d.id)
            ],
            "links": [
                {"a": l.a, "b": l.b, "latency_ms": l.latency_ms}
                for l in sorted(self.links, key=lambda l: (l.a, l.b))
            ],
            "cloud": [
                {"id": dev_id, "latency_ms": ms}
                for dev_id, ms in sorted(self.cloud_latency_ms.items())
            ],
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "FogOverlay":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"malformed overlay document: {exc}") from exc
        try:
            devices = tuple(
                FogDevice(
                    id=d["id"],
                    mips=d["mips"],
                    memory_gb=d["memory_gb"],
                    storage_gb=d["storage_gb"],
                    arch=Arch(d["arch"]),
                )
                for d in doc["devices"]
            )
            links = tuple(
                Link(a=l["a"], b=l["b"], latency_ms=l["latency_ms"]) for l in doc["links"]
            )
            cloud = {c["id"]: c["latency_ms"] for c in doc["cloud"]}
        except (KeyError, TypeError) as exc:
            raise ConfigurationError(f"overlay document missing field: {exc}") from exc
        return cls(devices=devices, links=links, cloud_latency_ms=cloud)


@dataclass
class OverlayParams:
    """Generator knobs; defaults mirror the reference evaluation setup."""

    mips_range: tuple[float, float] = (800.0, 1200.0)
    memory_choices_gb: tuple[float, ...] = (1.0, 2.0, 3.0, 4.0)
    storage_gb: float = 16.0
    mean_degree: float = 3.0
    link_latency_ms: tuple[float, float] = (1.0, 10.0)
    cloud_latency_ms: tuple[float, float] = (50.0, 100.0)

    def validate(self) -> None:
        lo, hi = self.mips_range
        if not (0 < lo <= hi):
            raise ConfigurationError(f"mips_range invalid: {self.mips_range}")
        if not self.memory_choices_gb or any(m <= 0 for m in self.memory_choices_gb):
            raise ConfigurationError(f"memory_choices_gb invalid: {self.memory_choices_gb}")
        if self.storage_gb < 0:
            raise ConfigurationError(f"storage_gb invalid: {self.storage_gb}")
        if self.mean_degree < 1:
            raise ConfigurationError(f"mean_degree must be >= 1, got {self.mean_degree}")
        lo, hi = self.link_latency_ms
        if not (0 < lo <= hi):
            raise ConfigurationError(f"link_latency_ms invalid: {self.link_latency_ms}")
        lo, hi = self.cloud_latency_ms
        if not (0 < lo <= hi):
            raise ConfigurationError(f"cloud_latency_ms invalid: {self.cloud_latency_ms}")


def _random_tree_edges(n: int, rng: random.Random) -> list[tuple[int, int]]:
    """Uniform random labelled tree on ``n`` nodes via Pruefer decoding."""
    if n == 2:
        return [(0, 1)]
    seq = [rng.randrange(n) for _ in range(n - 2)]
    degree = [1] * n
    for v in seq:
        degree[v] += 1
    leaves = [i for i in range(n) if degree[i] == 1]
    heapq.heapify(leaves)
    edges = []
    for v in seq:
        leaf = heapq.heappop(leaves)
        edges.append((min(leaf, v), max(leaf, v)))
        degree[v] -= 1
        if degree[v] == 1:
            heapq.heappush(leaves, v)
    u = heapq.heappop(leaves)
    w = heapq.heappop(leaves)
    edges.append((min(u, w), max(u, w)))
    return edges


def build_overlay(n_devices: int, seed: int, params: OverlayParams | None = None) -> FogOverlay:
    """Generate a connected overlay of ``n_devices`` fog devices.

    Structure: uniform spanning tree plus random chords until the link count
    reaches ``round(mean_degree * n / 2)`` (capped at the complete graph).
    All randomness comes from ``random.Random(seed)`` in a fixed draw order.
    """
    if n_devices < 2:
        raise ConfigurationError(f"n_devices must be >= 2, got {n_devices}")
    params = params or OverlayParams()
    params.validate()
    rng = random.Random(seed)

    devices = []
    for i in range(n_devices):
        mips = rng.uniform(*params.mips_range)
        memory = rng.choice(params.memory_choices_gb)
        arch = rng.choice((Arch.ARM, Arch.X86))
        devices.append(
            FogDevice(id=i, mips=mips, memory_gb=memory, storage_gb=params.storage_gb, arch=arch)
        )

    edge_set = set(_random_tree_edges(n_devices, rng))
    max_links = n_devices * (n_devices - 1) // 2
    target = min(max(round(params.mean_degree * n_devices / 2), n_devices - 1), max_links)
    while len(edge_set) < target:
        a = rng.randrange(n_devices)
        b = rng.randrange(n_devices)
        if a == b:
            continue
        edge = (min(a, b), max(a, b))
        if edge not in edge_set:
            edge_set.add(edge)

    links = tuple(
        Link(a=a, b=b, latency_ms=rng.uniform(*params.link_latency_ms))
        for a, b in sorted(edge_set)
    )
    cloud = {i: rng.uniform(*params.cloud_latency_ms) for i in range(n_devices)}
    return FogOverlay(devices=tuple(devices), links=links, cloud_latency_ms=cloud)


@dataclass(frozen=True)
class Join:
    """A device joining the overlay with its attachment links.

    ``links`` holds ``(existing_device_id, latency_ms)`` pairs; the joining
    device may optionally be cloud-attached.
    """

    device: FogDevice
    links: tuple[tuple[int, float], ...]
    cloud_latency_ms: float | None = None
    time_s: float = 0.0


@dataclass(frozen=True)
class Leave:
    """A device leaving the overlay together with all of its links."""

    device_id: int
    time_s: float = 0.0


ChurnEvent = Union[Join, Leave]


def apply_churn(overlay: FogOverlay, event: ChurnEvent) -> FogOverlay:
    """Apply one churn event, returning a new overlay.

    A ``Leave`` that would disconnect the residual overlay or remove its last
    cloud attachment is rejected with :class:`ChurnRejectedError`; the input
    overlay is never modified.
    """
    if isinstance(event, Join):
        return _apply_join(overlay, event)
    if isinstance(event, Leave):
        return _apply_leave(overlay, event)
    raise ContractError(f"unknown churn event {event!r}")


def _apply_join(overlay: FogOverlay, event: Join) -> FogOverlay:
    dev = event.device
    if dev.id in overlay:
        raise ConflictError(f"device id {dev.id} already present")
    if not event.links:
        raise ChurnRejectedError(f"join of device {dev.id} has no attachment links")
    targets = set()
    for target, _ in event.links:
        if target not in overlay:
            raise ContractError(f"join of device {dev.id} references unknown device {target}")
        if target in targets:
            raise ContractError(f"join of device {dev.id} repeats attachment to {target}")
        targets.add(target)
    new_links = overlay.links + tuple(
        Link(a=min(dev.id, t), b=max(dev.id, t), latency_ms=ms) for t, ms in event.links
    )
    cloud = dict(overlay.cloud_latency_ms)
    if event.cloud_latency_ms is not None:
        cloud[dev.id] = event.cloud_latency_ms
    return FogOverlay(devices=overlay.devices + (dev,), links=new_links, cloud_latency_ms=cloud)


def _apply_leave(overlay: FogOverlay, event: Leave) -> FogOverlay:
    if event.device_id not in overlay:
        raise ContractError(f"no device with id {event.device_id} to remove")
    if len(overlay.devices) == 1:
        raise ChurnRejectedError("cannot remove the last device")
    devices = tuple(d for d in overlay.devices if d.id != event.device_id)
    links = tuple(l for l in overlay.links if event.device_id not in (l.a, l.b))
    cloud = {k: v for k, v in overlay.cloud_latency_ms.items() if k != event.device_id}
    if not cloud:
        raise ChurnRejectedError(
            f"removing device {event.device_id} would detach the overlay from the cloud"
        )
    candidate = FogOverlay(devices=devices, links=links, cloud_latency_ms=cloud)
    if not candidate.is_connected():
        raise ChurnRejectedError(f"removing device {event.device_id} would disconnect the overlay")
    return candidate


def shortest_paths(overlay: FogOverlay, source: int) -> dict[int, tuple[float, int]]:
    """Dijkstra over link latencies from ``source``.

    Returns ``id -> (latency_ms, hops)`` where ``hops`` is the hop count of
    the minimum-latency path (fewest hops among latency ties), which keeps the
    chosen route deterministic.  Unreachable devices are absent from the map.
    """
    if source not in overlay:
        raise ContractError(f"no device with id {source}")
    best: dict[int, tuple[float, int]] = {}
    heap: list[tuple[float, int, int]] = [(0.0, 0, source)]
    while heap:
        dist, hops, node = heapq.heappop(heap)
        if node in best:
            continue
        best[node] = (dist, hops)
        for nbr, ms in overlay.adjacency[node]:
            if nbr not in best:
                heapq.heappush(heap, (dist + ms, hops + 1, nbr))
    return best


def latency_to_cloud(overlay: FogOverlay, device_id: int) -> float:
    """Lowest total latency from ``device_id`` to the cloud.

    Minimum over cloud-attached devices ``g`` of (shortest-path latency to
    ``g``) + (``g``'s cloud latency); a device that is itself cloud-attached
    may still be better served through a neighbour.
    """
    dists = shortest_paths(overlay, device_id)
    best = None
    for gw, cloud_ms in overlay.cloud_latency_ms.items():
        if gw in dists:
            total = dists[gw][0] + cloud_ms
            if best is None or total < best:
                best = total
    if best is None:
        raise TopologyError(f"device {device_id} cannot reach any cloud-attached device")
    return best


def all_pairs_paths(overlay: FogOverlay) -> dict[int, dict[int, tuple[float, int]]]:
    """Shortest-path table for every device (see :func:`shortest_paths`)."""
    return {dev.id: shortest_paths(overlay, dev.id) for dev in overlay.devices}
