"""Counter-based iid label field.

Every vertex carries an unbounded supply of independent uniform labels, one per
integer channel.  A label is a pure function of ``(seed, graph id, vertex,
channel)`` computed with the splitmix64 finaliser, so labels can be evaluated in
any order and in parallel.  Comparisons use the raw 64-bit words; the float view
keeps the top 53 bits.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field as dc_field
from typing import Iterable

import numpy as np

from .errors import EmptySet, ZeroAlternatives

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_JOINT_SALT = np.uint64(0xD1B54A32D192ED03)
RETRY_STRIDE = 1 << 20

# namespace -> (first channel, number of channels)
CHANNEL_REGISTRY: dict[str, tuple[int, int]] = {}
_NAMESPACE_WIDTH = 256


def register_channels(namespace: str, count: int = _NAMESPACE_WIDTH) -> int:
    """Reserve a block of channel ids for ``namespace`` and return its base.

    Re-registering the same namespace returns the same block; overlapping
    blocks are rejected.
    """
    if namespace in CHANNEL_REGISTRY:
        base, width = CHANNEL_REGISTRY[namespace]
        if count > width:
            raise ValueError(f"namespace {namespace!r} already registered with {width} channels")
        return base
    if count > _NAMESPACE_WIDTH:
        raise ValueError("channel block too large")
    base = (len(CHANNEL_REGISTRY) + 1) * _NAMESPACE_WIDTH
    CHANNEL_REGISTRY[namespace] = (base, count)
    return base


def _mix_int(z: int) -> int:
    z = (z + _GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def _mix(z: np.ndarray) -> np.ndarray:
    z = z + np.uint64(_GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def to_unit(bits) -> np.ndarray | float:
    """Map 64-bit words to floats in [0, 1)."""
    out = (np.asarray(bits, dtype=np.uint64) >> np.uint64(11)).astype(np.float64) * 2.0**-53
    return out if out.ndim else float(out)


def descriptor_id(descriptor: str) -> int:
    return int.from_bytes(hashlib.sha256(descriptor.encode()).digest()[:8], "little")


@dataclass(frozen=True)
class LabelField:
    seed: int
    graph_id: int = 0
    base: int = 0
    # vertices outside ``keep`` draw from ``alt_seed`` instead (locality probes)
    keep: np.ndarray | None = dc_field(default=None, compare=False, repr=False)
    alt_seed: int = 0

    def _key(self, seed: int, channel: int) -> int:
        k = _mix_int((seed & MASK64) ^ _mix_int(self.graph_id & MASK64))
        return _mix_int(k ^ (((channel + self.base) * _GOLDEN) & MASK64))

    def bits(self, vertices, channel: int) -> np.ndarray:
        v = np.asarray(vertices, dtype=np.int64).astype(np.uint64)
        out = _mix(v ^ np.uint64(self._key(self.seed, channel)))
        if self.keep is not None:
            vi = np.asarray(vertices, dtype=np.int64)
            outside = ~self.keep[vi]
            if np.any(outside):
                alt = _mix(v ^ np.uint64(self._key(self.alt_seed, channel)))
                out = np.where(outside, alt, out)
        return out

    def label(self, v: int, channel: int) -> float:
        return float(to_unit(self.bits(np.array([v]), channel))[0])

    def labels(self, n: int, channel: int) -> np.ndarray:
        return to_unit(self.bits(np.arange(n), channel))

    # -- sets -------------------------------------------------------------
    def joint_bits(self, vertices: Iterable[int], channel: int) -> int:
        vs = np.unique(np.fromiter(vertices, dtype=np.int64))
        if vs.size == 0:
            raise EmptySet("joint label of an empty set")
        acc = np.sum(_mix(self.bits(vs, channel) ^ _JOINT_SALT), dtype=np.uint64)
        return int(_mix(np.array([acc], dtype=np.uint64))[0])

    def joint_label(self, vertices: Iterable[int], channel: int) -> float:
        return float(to_unit(np.uint64(self.joint_bits(vertices, channel))))

    def choose(self, vertices: Iterable[int], channel: int, alternatives: int) -> int:
        if alternatives < 1:
            raise ZeroAlternatives("need at least one alternative")
        return int(self.joint_bits(vertices, channel) % alternatives)

    def group_bits(self, groups: np.ndarray, channel: int, n_groups: int | None = None) -> np.ndarray:
        """Joint bits for every part of a partition given as a per-vertex group id.

        Vertices with a negative group id are ignored.  Groups with no members
        get 0.
        """
        groups = np.asarray(groups, dtype=np.int64)
        if n_groups is None:
            n_groups = int(groups.max()) + 1 if groups.size else 0
        sel = np.flatnonzero(groups >= 0)
        acc = np.zeros(n_groups, dtype=np.uint64)
        np.add.at(acc, groups[sel], _mix(self.bits(sel, channel) ^ _JOINT_SALT))
        return _mix(acc)

    def grouped_bits(self, vertices: np.ndarray, groups: np.ndarray, channel: int,
                     n_groups: int) -> np.ndarray:
        """Joint bits of possibly overlapping sets given as (member, group) pairs."""
        vertices = np.asarray(vertices, dtype=np.int64)
        acc = np.zeros(n_groups, dtype=np.uint64)
        np.add.at(acc, np.asarray(groups, dtype=np.int64),
                  _mix(self.bits(vertices, channel) ^ _JOINT_SALT))
        return _mix(acc)

    def group_choose(self, groups: np.ndarray, channel: int, alternatives: int,
                     n_groups: int | None = None) -> np.ndarray:
        if alternatives < 1:
            raise ZeroAlternatives("need at least one alternative")
        return (self.group_bits(groups, channel, n_groups) % np.uint64(alternatives)).astype(np.int64)

    # -- derived fields ----------------------------------------------------
    def retry(self, attempt: int) -> "LabelField":
        """Field whose channels are disjoint from every other attempt's."""
        return LabelField(self.seed, self.graph_id, self.base + attempt * RETRY_STRIDE,
                          self.keep, self.alt_seed)

    def resampled_outside(self, keep: np.ndarray, alt_seed: int) -> "LabelField":
        return LabelField(self.seed, self.graph_id, self.base, np.asarray(keep, dtype=bool), alt_seed)


def joint_label(field: LabelField, vertices: Iterable[int], channel: int) -> float:
    return field.joint_label(vertices, channel)


def choose(field: LabelField, vertices: Iterable[int], channel: int, alternatives: int) -> int:
    return field.choose(vertices, channel, alternatives)
