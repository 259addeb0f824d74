"""Bitmask and count-grid iterators used throughout the package.

Subsets of ``{0, ..., n-1}`` are encoded as integers whose bit ``i`` is set
when component ``i`` belongs to the subset.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterator, Sequence

MAX_COMPONENTS = 24


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def full_mask(n: int) -> int:
    return (1 << n) - 1


def mask_of(indices) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def members(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def masks_of_size(n: int, k: int) -> Iterator[int]:
    """Yield every k-element subset of ``range(n)`` as a bitmask, in order."""
    if k < 0 or k > n:
        return
    for combo in combinations(range(n), k):
        mask = 0
        for i in combo:
            mask |= 1 << i
        yield mask


def level_grid(sizes: Sequence[int], k: int) -> Iterator[tuple[int, ...]]:
    """Yield the count vectors ``a`` with ``0 <= a_j <= sizes[j]`` and ``sum(a) == k``.

    Order is lexicographic in ``(a_1, ..., a_r)``.
    """
    r = len(sizes)
    if r == 0:
        if k == 0:
            yield ()
        return
    # tail_cap[j] = largest total reachable by a_j..a_r
    tail_cap = [0] * (r + 1)
    for j in range(r - 1, -1, -1):
        tail_cap[j] = tail_cap[j + 1] + sizes[j]

    prefix: list[int] = []

    def rec(j: int, remaining: int) -> Iterator[tuple[int, ...]]:
        if j == r - 1:
            if remaining <= sizes[j]:
                yield (*prefix, remaining)
            return
        lo = max(0, remaining - tail_cap[j + 1])
        hi = min(sizes[j], remaining)
        for a in range(lo, hi + 1):
            prefix.append(a)
            yield from rec(j + 1, remaining - a)
            prefix.pop()

    if 0 <= k <= tail_cap[0]:
        yield from rec(0, k)


def full_grid(sizes: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Yield every count vector of the grid, level by level."""
    for k in range(sum(sizes) + 1):
        yield from level_grid(sizes, k)


def hypergeometric_weight(sizes: Sequence[int], a: Sequence[int]) -> Fraction:
    """Multivariate hypergeometric mass ``prod C(n_j, a_j) / C(n, sum a)``."""
    num = 1
    for n_j, a_j in zip(sizes, a):
        num *= comb(n_j, a_j)
    return Fraction(num, comb(sum(sizes), sum(a)))


def as_exact(value):
    """Promote ints to Fraction; leave Fractions and floats alone."""
    if isinstance(value, bool):
        return Fraction(int(value))
    if isinstance(value, int):
        return Fraction(value)
    return value
