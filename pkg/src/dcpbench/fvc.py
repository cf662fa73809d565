"""The frequent-values collector: a bounded associative color counter.

The collector tracks (color, frequency) pairs for the most common pixel
values seen during a frame. Capacity is bounded, so a replacement policy
picks a victim when a new color arrives and its set is full. Everything is
deterministic: iteration is canonical raster order, frequency ties break on
ascending packed color value, and the RANDOM policy draws from a seeded
splitmix64 stream.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .rng import SplitMix64
from .surface import Frame

POLICIES = ("LFC", "2LFC", "LRU", "RANDOM")
MAX_PIXEL_SAMPLING = 16384


class UndefinedCoverageError(ValueError):
    """Coverage is undefined before any sample has been observed."""


def is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass
class FvcConfig:
    entry_count: int = 64
    ways: int | None = None      # None = fully associative, 1 = direct-mapped
    policy: str = "LFC"
    pixel_sampling: int = 1      # observe one pixel in every n, raster order
    rng_seed: int = 0

    def __post_init__(self):
        if not is_pow2(self.entry_count):
            raise ValueError(f"entry_count must be a power of two, got {self.entry_count}")
        if self.ways is not None:
            if not is_pow2(self.ways) or self.ways > self.entry_count:
                raise ValueError(f"ways must be a power of two <= entry_count, got {self.ways}")
        if self.policy not in POLICIES:
            raise ValueError(f"policy must be one of {POLICIES}, got {self.policy!r}")
        if not is_pow2(self.pixel_sampling) or self.pixel_sampling > MAX_PIXEL_SAMPLING:
            raise ValueError(
                f"pixel_sampling must be a power of two in 1..{MAX_PIXEL_SAMPLING}")

    @property
    def num_sets(self) -> int:
        return 1 if self.ways is None else self.entry_count // self.ways

    @property
    def ways_effective(self) -> int:
        return self.entry_count if self.ways is None else self.ways


class Fvc:
    """Bounded color -> frequency tracker with eviction.

    Set index for associative configurations is the low log2(num_sets) bits
    of the packed 32-bit value.
    """

    def __init__(self, config: FvcConfig | None = None):
        self.config = config or FvcConfig()
        nsets = self.config.num_sets
        self._nsets = nsets
        self._set_mask = nsets - 1
        self._ways = self.config.ways_effective
        self._rng = SplitMix64(self.config.rng_seed)
        self._sets: list[dict[int, list[int]]] = [dict() for _ in range(nsets)]
        self._samples = 0
        self._tick = 0

    @property
    def entry_count(self) -> int:
        return self.config.entry_count

    @property
    def samples_observed(self) -> int:
        return self._samples

    def __len__(self) -> int:
        return sum(len(s) for s in self._sets)

    def reset(self) -> None:
        """Invalidate all entries and zero the sample counter.

        The replacement RNG keeps its stream position so RANDOM stays
        deterministic across a whole run.
        """
        for s in self._sets:
            s.clear()
        self._samples = 0
        self._tick = 0

    def observe(self, color: int) -> None:
        self.observe_run(color, 1)

    def observe_run(self, color: int, count: int) -> None:
        """Observe `count` consecutive occurrences of one color.

        Equivalent to count calls to observe(): after the first occurrence
        the color is resident, so the remainder are guaranteed hits.
        """
        if count <= 0:
            return
        color = int(color)
        self._samples += count
        self._tick += count
        s = self._sets[color & self._set_mask] if self._nsets > 1 else self._sets[0]
        entry = s.get(color)
        if entry is not None:
            entry[0] += count
            entry[1] = self._tick
            return
        if len(s) >= self._ways:
            del s[self._pick_victim(s)]
        s[color] = [count, self._tick]

    def _pick_victim(self, s: dict[int, list[int]]) -> int:
        policy = self.config.policy
        if policy == "LFC":
            return min(s.items(), key=lambda kv: (kv[1][0], kv[0]))[0]
        if policy == "2LFC":
            # Second-smallest frequency; the smallest survives so a freshly
            # inserted color is not immediately thrashed out.
            two = heapq.nsmallest(2, s.items(), key=lambda kv: (kv[1][0], kv[0]))
            return two[-1][0]
        if policy == "LRU":
            return min(s.items(), key=lambda kv: kv[1][1])[0]
        # RANDOM: uniform over the set's entries in ascending color order.
        keys = sorted(s)
        return keys[self._rng.next_below(len(keys))]

    def observe_frame(self, frame: Frame) -> None:
        """Feed a frame through pixel sampling in canonical raster order.

        Position p of the non-padded raster stream is sampled when
        p % pixel_sampling == 0. Runs of equal sampled values collapse into
        observe_run calls, which is exact for every policy.
        """
        flat = frame.pixels.reshape(-1)
        n = self.config.pixel_sampling
        if n > 1:
            flat = flat[::n]
        if flat.size == 0:
            return
        change = np.flatnonzero(flat[:-1] != flat[1:]) + 1
        starts = np.concatenate(([0], change))
        ends = np.concatenate((change, [flat.size]))
        values = flat[starts].tolist()
        for value, a, b in zip(values, starts.tolist(), ends.tolist()):
            self.observe_run(value, b - a)

    def coverage(self) -> float:
        """Fraction of observed samples whose colors are still resident."""
        if self._samples == 0:
            raise UndefinedCoverageError("no samples observed")
        kept = sum(e[0] for s in self._sets for e in s.values())
        return kept / self._samples

    def ranked_values(self) -> list[tuple[int, int]]:
        """(color, frequency) pairs, descending frequency, ties on color."""
        items = [(c, e[0]) for s in self._sets for c, e in s.items()]
        items.sort(key=lambda cf: (-cf[1], cf[0]))
        return items


def relative_coverage(ranked: list[tuple[int, int]], frame: Frame,
                      top_n: int | None = None) -> float:
    """Pixel mass of the collector's top-N colors over the true top-N mass.

    `ranked` is a ranked_values() result; N defaults to its length and
    should normally be the collector's entry count.
    """
    if frame.pixels.size == 0:
        raise ValueError("empty frame")
    if top_n is None:
        top_n = len(ranked)
    if top_n == 0:
        raise ValueError("top_n must be positive")
    colors, counts = np.unique(frame.pixels, return_counts=True)
    chosen = np.array([c for c, _ in ranked[:top_n]], dtype=np.uint32)
    if chosen.size:
        pos = np.searchsorted(colors, chosen)
        pos = np.minimum(pos, len(colors) - 1)
        hit = colors[pos] == chosen
        fvc_mass = int(counts[pos[hit]].sum())
    else:
        fvc_mass = 0
    k = min(top_n, len(counts))
    true_mass = int(np.sort(counts)[::-1][:k].sum())
    return fvc_mass / true_mass
