"""Structure functions, partitions and modular systems.

A structure function on ``n`` components is stored as a truth table packed
into a Python ``int``: bit ``A`` of the table holds ``phi(A)``, where the
subset ``A`` is itself a bitmask (bit ``i`` set when component ``i`` works).
Components are 0-based here; the DSL and file formats are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product
from typing import Callable, Iterable, Sequence

from ._combinatorics import (
    MAX_COMPONENTS,
    as_exact,
    full_mask,
    mask_of,
    masks_of_size,
    members,
    popcount,
)
from .errors import InvalidParameterError, InvalidSizeError, InvalidSystemError


def _check_size(n: int) -> None:
    if not isinstance(n, int) or n < 1:
        raise InvalidSizeError(f"component count must be a positive integer, got {n!r}")
    if n > MAX_COMPONENTS:
        raise InvalidSizeError(f"at most {MAX_COMPONENTS} components are supported, got {n}")


@lru_cache(maxsize=None)
def _lower_masks(n: int) -> tuple[int, ...]:
    """For each variable i, the table positions A with bit i clear."""
    size = 1 << n
    out = []
    for i in range(n):
        half = 1 << i
        pattern = (1 << half) - 1
        length = half << 1
        while length < size:
            pattern |= pattern << length
            length <<= 1
        out.append(pattern)
    return tuple(out)


def _up_closure(n: int, table: int) -> int:
    for i, lower in enumerate(_lower_masks(n)):
        table |= (table & lower) << (1 << i)
    return table


@dataclass(frozen=True)
class StructureFunction:
    """Boolean function on the subsets of ``n`` components."""

    n: int
    table: int

    def __post_init__(self):
        _check_size(self.n)
        if not 0 <= self.table < (1 << (1 << self.n)):
            raise InvalidParameterError("truth table does not fit 2**n entries")

    @classmethod
    def from_function(cls, n: int, fn: Callable[[frozenset], object]) -> "StructureFunction":
        """Tabulate ``fn`` on every subset (given as a frozenset of 0-based indices)."""
        _check_size(n)
        table = 0
        for mask in range(1 << n):
            if fn(frozenset(members(mask))):
                table |= 1 << mask
        return cls(n, table)

    @classmethod
    def from_values(cls, n: int, values: Sequence[object]) -> "StructureFunction":
        _check_size(n)
        if len(values) != 1 << n:
            raise InvalidParameterError(f"expected {1 << n} truth values, got {len(values)}")
        table = 0
        for mask, v in enumerate(values):
            if v:
                table |= 1 << mask
        return cls(n, table)

    @classmethod
    def from_path_sets(cls, n: int, paths: Iterable[Iterable[int]]) -> "StructureFunction":
        """Up-closure of the given path sets (0-based component indices)."""
        _check_size(n)
        table = 0
        for path in paths:
            idx = list(path)
            if any(not 0 <= i < n for i in idx):
                raise InvalidParameterError(f"path set {idx} outside range(0, {n})")
            table |= 1 << mask_of(idx)
        return cls(n, _up_closure(n, table))

    @cached_property
    def bitstring(self) -> str:
        """``bitstring[A] == "1"`` iff phi(A) == 1; O(1) lookups even for n = 24."""
        return format(self.table, f"0{1 << self.n}b")[::-1]

    def __getitem__(self, mask: int) -> int:
        return 1 if self.bitstring[mask] == "1" else 0

    def __call__(self, subset: Iterable[int]) -> int:
        return self[mask_of(subset)]

    def values(self) -> list[int]:
        return [1 if c == "1" else 0 for c in self.bitstring]

    def __le__(self, other: "StructureFunction") -> bool:
        """Pointwise order: ``self(A) <= other(A)`` for every A."""
        if not isinstance(other, StructureFunction):
            return NotImplemented
        if self.n != other.n:
            raise InvalidParameterError("cannot compare structures of different sizes")
        return self.table & ~other.table == 0

    def is_monotone(self) -> bool:
        t = self.table
        for i, lower in enumerate(_lower_masks(self.n)):
            if ((t & lower) << (1 << i)) & ~t:
                return False
        return True

    def is_semicoherent(self) -> bool:
        return self[0] == 0 and self[full_mask(self.n)] == 1 and self.is_monotone()

    def count_true(self, k: int) -> int:
        """Number of working sets of size ``k``."""
        bits = self.bitstring
        return sum(1 for m in masks_of_size(self.n, k) if bits[m] == "1")


def projection(n: int, i: int) -> StructureFunction:
    """The structure that works iff component ``i`` works."""
    _check_size(n)
    if not 0 <= i < n:
        raise InvalidParameterError(f"component {i} outside range(0, {n})")
    return StructureFunction(n, ((1 << (1 << n)) - 1) & ~_lower_masks(n)[i])


def is_semicoherent(phi: StructureFunction) -> bool:
    return phi.is_semicoherent()


def make_series(n: int) -> StructureFunction:
    _check_size(n)
    return StructureFunction(n, 1 << full_mask(n))


def make_parallel(n: int) -> StructureFunction:
    _check_size(n)
    return StructureFunction(n, ((1 << (1 << n)) - 1) & ~1)


def make_k_out_of_n(k: int, n: int) -> StructureFunction:
    """Works iff at least ``k`` of the ``n`` components work."""
    _check_size(n)
    if not isinstance(k, int) or not 1 <= k <= n:
        raise InvalidParameterError(f"threshold k must satisfy 1 <= k <= {n}, got {k!r}")
    table = 0
    for mask in range(1 << n):
        if popcount(mask) >= k:
            table |= 1 << mask
    return StructureFunction(n, table)


def identity() -> StructureFunction:
    return make_series(1)


def conjunction_structure(b: Iterable[int], n: int) -> StructureFunction:
    """Indicator that every component of ``b`` works (0-based indices)."""
    idx = set(b)
    if not idx:
        raise InvalidParameterError("conjunction set must be nonempty")
    return StructureFunction.from_path_sets(n, [sorted(idx)])


def dual(chi: StructureFunction) -> StructureFunction:
    """``chi_d(A) = 1 - chi(complement of A)``."""
    size = 1 << chi.n
    # Reading the table backwards maps position A to its complement.
    reversed_table = int(chi.bitstring, 2)
    return StructureFunction(chi.n, ~reversed_table & ((1 << size) - 1))


def multilinear_extension(chi: StructureFunction, z: Sequence) -> object:
    """Evaluate the multilinear extension of ``chi`` at ``z``.

    Exact (``Fraction``) when every coordinate is an int or Fraction, float
    otherwise.
    """
    m = chi.n
    if len(z) != m:
        raise InvalidParameterError(f"expected {m} coordinates, got {len(z)}")
    zs = [as_exact(v) for v in z]
    for v in zs:
        if not 0 <= v <= 1:
            raise InvalidParameterError(f"coordinate {v} outside [0, 1]")
    ones = [1 - v for v in zs]
    total = Fraction(0) if all(isinstance(v, Fraction) for v in zs) else 0.0
    for mask, bit in enumerate(chi.bitstring):
        if bit == "1":
            term = 1
            for j in range(m):
                term *= zs[j] if (mask >> j) & 1 else ones[j]
            total += term
    return total


@dataclass(frozen=True)
class Partition:
    """Ordered blocks ``C_1, ..., C_r`` covering ``range(n)``.

    Each block is kept sorted; local index ``t`` of block ``j`` refers to the
    ``t``-th smallest component of that block.
    """

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(tuple(sorted(b)) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if not blocks:
            raise InvalidParameterError("a partition needs at least one block")
        seen: set[int] = set()
        for b in blocks:
            if not b:
                raise InvalidParameterError("partition blocks must be nonempty")
            if len(set(b)) != len(b) or seen & set(b):
                raise InvalidParameterError("partition blocks must be disjoint")
            seen |= set(b)
        if seen != set(range(len(seen))):
            raise InvalidParameterError("partition blocks must cover 0..n-1 exactly")
        _check_size(len(seen))

    @classmethod
    def of(cls, *blocks: Iterable[int]) -> "Partition":
        return cls(tuple(tuple(b) for b in blocks))

    @classmethod
    def trivial(cls, n: int) -> "Partition":
        return cls((tuple(range(n)),))

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(tuple((i,) for i in range(n)))

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)

    @property
    def r(self) -> int:
        return len(self.blocks)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    @property
    def block_masks(self) -> tuple[int, ...]:
        return tuple(mask_of(b) for b in self.blocks)

    def split(self, mask: int) -> tuple[int, ...]:
        """Local bitmasks of ``A & C_j`` for every block."""
        out = []
        for b in self.blocks:
            local = 0
            for t, i in enumerate(b):
                if (mask >> i) & 1:
                    local |= 1 << t
            out.append(local)
        return tuple(out)

    def join(self, locals_: Sequence[int]) -> int:
        mask = 0
        for b, local in zip(self.blocks, locals_):
            for t, i in enumerate(b):
                if (local >> t) & 1:
                    mask |= 1 << i
        return mask

    def counts(self, mask: int) -> tuple[int, ...]:
        """``(|A & C_1|, ..., |A & C_r|)``."""
        return tuple(popcount(mask & bm) for bm in self.block_masks)


@dataclass(frozen=True)
class ModularSystem:
    """Modules ``chi_j`` on the blocks of a partition, joined by an organizer ``psi``."""

    partition: Partition
    modules: tuple[StructureFunction, ...]
    organizer: StructureFunction

    def __post_init__(self):
        object.__setattr__(self, "modules", tuple(self.modules))
        p = self.partition
        if len(self.modules) != p.r:
            raise InvalidSystemError(f"{p.r} blocks but {len(self.modules)} modules")
        if self.organizer.n != p.r:
            raise InvalidSystemError(f"organizer has arity {self.organizer.n}, expected {p.r}")
        for j, (chi, size) in enumerate(zip(self.modules, p.sizes)):
            if chi.n != size:
                raise InvalidSystemError(f"module {j + 1} has {chi.n} components, block has {size}")
            if not chi.is_semicoherent():
                raise InvalidSystemError(f"module {j + 1} is not semicoherent")
        if not self.organizer.is_semicoherent():
            raise InvalidSystemError("organizer is not semicoherent")

    @property
    def n(self) -> int:
        return self.partition.n


def compose(system: ModularSystem) -> StructureFunction:
    """Tabulate ``phi(A) = psi(chi_1(A & C_1), ..., chi_r(A & C_r))``."""
    p = system.partition
    # per block: (global mask, module bit) for every local subset
    per_block = []
    for j, (chi, block) in enumerate(zip(system.modules, p.blocks)):
        entries = []
        for local in range(1 << len(block)):
            g = 0
            for t, i in enumerate(block):
                if (local >> t) & 1:
                    g |= 1 << i
            entries.append((g, chi[local] << j))
        per_block.append(entries)
    psi = system.organizer
    table = 0
    for combo in product(*per_block):
        g = 0
        z = 0
        for gm, zb in combo:
            g |= gm
            z |= zb
        if psi[z]:
            table |= 1 << g
    return StructureFunction(p.n, table)


def monotone_functions(n: int) -> list[StructureFunction]:
    """Every monotone Boolean function on ``n`` variables, constants included.

    Built recursively: a monotone f splits on its top variable into
    monotone cofactors ``f0 <= f1``.
    """
    _check_size(n)

    def tables(m: int) -> list[int]:
        if m == 0:
            return [0, 1]
        lower = tables(m - 1)
        shift = 1 << (m - 1)
        return [f0 | (f1 << shift) for f0 in lower for f1 in lower if f0 & ~f1 == 0]

    return [StructureFunction(n, t) for t in tables(n)]


def semicoherent_structures(n: int) -> list[StructureFunction]:
    """Monotone functions on ``n`` variables minus the two constants."""
    top = (1 << (1 << n)) - 1
    return [f for f in monotone_functions(n) if f.table not in (0, top)]
