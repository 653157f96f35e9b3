"""Finite multivalued maps: the return lemma, its exhaustive check, and
the cover-to-multimap construction.

Every multivalued map G on {1..M} with nonempty images admits an element
returning to itself: some w and n >= 1 with w in G^n({w}), and n never
needs to exceed M+1.  Images are bitmask rows so the exhaustive sweep over
all (2^M - 1)^M instances stays fast.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

from .errors import CoverageError
from .geometry import DEFAULT_BIT_CAP, IntervalSet
from .markov import MarkovChain

__all__ = ["MultivaluedMap", "l1_search", "l1_exhaustive", "cover_multimap"]


@dataclass(frozen=True)
class MultivaluedMap:
    """G: {1..M} -> nonempty subsets of {1..M}; images[i] is a bitmask."""

    size: int
    images: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError("the ground set must be nonempty")
        if len(self.images) != self.size:
            raise ValueError("need one image per element")
        full = (1 << self.size) - 1
        for i, mask in enumerate(self.images):
            if mask == 0:
                raise ValueError("image of element %d is empty" % (i + 1))
            if mask & ~full:
                raise ValueError("image of element %d leaves the ground set" % (i + 1))

    @staticmethod
    def from_sets(size: int, sets: Sequence[Sequence[int]]) -> "MultivaluedMap":
        masks = []
        for s in sets:
            mask = 0
            for e in s:
                if not 1 <= e <= size:
                    raise ValueError("element %d outside 1..%d" % (e, size))
                mask |= 1 << (e - 1)
            masks.append(mask)
        return MultivaluedMap(size, tuple(masks))

    def step(self, mask: int) -> int:
        out = 0
        i = 0
        while mask:
            if mask & 1:
                out |= self.images[i]
            mask >>= 1
            i += 1
        return out

    def image_set(self, element: int) -> frozenset[int]:
        mask = self.images[element - 1]
        return frozenset(i + 1 for i in range(self.size) if mask >> i & 1)


def l1_search(G: MultivaluedMap) -> tuple[int, int]:
    """An element w and the minimal n >= 1 with w in G^n({w}).

    Existence is guaranteed with n <= M+1; ties in n resolve to the smallest
    element.  Raises only if that guarantee were ever violated, which would
    mean a broken instance.
    """
    best: tuple[int, int] | None = None
    for w in range(1, G.size + 1):
        bit = 1 << (w - 1)
        mask = bit
        for n in range(1, G.size + 2):
            mask = G.step(mask)
            if mask & bit:
                if best is None or n < best[1]:
                    best = (w, n)
                break
        if best is not None and best[1] == 1:
            break
    if best is None:
        raise RuntimeError("no returning element found; the bound n <= M+1 failed")
    return best


def _verify_witness(G: MultivaluedMap, w: int, n: int) -> bool:
    # independent replay: iterate the set map from {w} exactly n times
    current = {w}
    for _ in range(n):
        moved: set[int] = set()
        for e in current:
            moved |= G.image_set(e)
        current = moved
    return w in current


def l1_exhaustive(M: int) -> dict:
    """Check the return lemma on every multivalued map of size M.

    Enumerates all (2^M - 1)^M instances, replays every witness through an
    independent set iteration, and reports the largest minimal n observed.
    """
    if not 1 <= M <= 4:
        raise ValueError("exhaustive verification is limited to M <= 4")
    masks = range(1, 1 << M)
    instances = 0
    failures = 0
    max_n = 0
    for images in product(masks, repeat=M):
        instances += 1
        G = MultivaluedMap(M, images)
        w, n = l1_search(G)
        if n > M + 1 or not _verify_witness(G, w, n):
            failures += 1
        elif n > max_n:
            max_n = n
    return {"instances": instances, "failures": failures, "max_n": max_n}


def cover_multimap(
    Q: MarkovChain,
    cover: Sequence[IntervalSet],
    bit_cap: int = DEFAULT_BIT_CAP,
) -> MultivaluedMap:
    """Project the chain onto a finite cover.

    Cell j belongs to the image of cell i exactly when some generator's
    exact image of cell i meets cell j; combined with l1_search this yields
    a cover element with n-step reachability back to itself, a weak
    recurrence witness at the cover's resolution.
    """
    cells = list(cover)
    if not cells:
        raise CoverageError("the cover is empty")
    if any(not c.intervals for c in cells):
        raise CoverageError("cover cells must be nonempty")
    union = IntervalSet.empty()
    for c in cells:
        union = union.union(c)
    if union != IntervalSet.full():
        raise CoverageError("the cover does not cover [0,1]")
    images = []
    for cell in cells:
        moved = IntervalSet.empty()
        for T in Q.generators:
            moved = moved.union(T.image(cell, bit_cap=bit_cap))
        mask = 0
        for j, other in enumerate(cells):
            if moved.intersect(other).intervals:
                mask |= 1 << j
        images.append(mask)
    return MultivaluedMap(len(cells), tuple(images))
