"""Order distributions, relative quality functions and decomposability.

An order distribution assigns a probability to each failure order of the
``n`` components. Orders are tuples of 0-based component indices listed by
increasing lifetime, so ``order[0]`` fails first and ``order[-1]`` is the
best component. Under the no-ties assumption this is all the information
about the joint lifetime law that the quality function depends on.

All probabilities are ``fractions.Fraction``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import permutations, product
from math import comb, factorial, lcm
from typing import Callable, Iterable, Mapping, Sequence

from ._combinatorics import full_grid, full_mask, hypergeometric_weight, level_grid, masks_of_size, popcount
from .errors import InvalidParameterError, InvalidSizeError
from .structure import Partition

MAX_ORDER_COMPONENTS = 8


@dataclass(frozen=True, eq=False)
class OrderDistribution:
    """Probability mass over the ``n!`` failure orders.

    Only orders with positive mass are stored; missing orders have mass 0.
    """

    n: int
    masses: Mapping[tuple[int, ...], Fraction]

    def __post_init__(self):
        n = self.n
        if not isinstance(n, int) or n < 1:
            raise InvalidSizeError(f"component count must be a positive integer, got {n!r}")
        if n > MAX_ORDER_COMPONENTS:
            raise InvalidSizeError(
                f"order distributions may need all n! orders; at most {MAX_ORDER_COMPONENTS} "
                f"components are supported, got {n}"
            )
        clean: dict[tuple[int, ...], Fraction] = {}
        expected = set(range(n))
        for order, mass in self.masses.items():
            order = tuple(order)
            if len(order) != n or set(order) != expected:
                raise InvalidParameterError(f"{order} is not an ordering of {n} components")
            mass = Fraction(mass)
            if mass < 0:
                raise InvalidParameterError(f"negative mass {mass} on {order}")
            if mass:
                clean[order] = clean.get(order, Fraction(0)) + mass
        total = sum(clean.values(), Fraction(0))
        if total != 1:
            raise InvalidParameterError(f"masses sum to {total}, not 1")
        object.__setattr__(self, "masses", clean)

    def __eq__(self, other):
        if not isinstance(other, OrderDistribution):
            return NotImplemented
        return self.n == other.n and self.masses == other.masses

    def mass(self, order: Sequence[int]) -> Fraction:
        return self.masses.get(tuple(order), Fraction(0))

    def support(self) -> list[tuple[int, ...]]:
        return list(self.masses)

    @cached_property
    def integer_weights(self) -> tuple[int, dict[tuple[int, ...], int]]:
        """``(D, w)`` with ``mass(order) == Fraction(w[order], D)``; for fast exact sums."""
        den = lcm(*(m.denominator for m in self.masses.values()))
        return den, {o: m.numerator * (den // m.denominator) for o, m in self.masses.items()}

    @classmethod
    def uniform(cls, n: int) -> "OrderDistribution":
        mass = Fraction(1, factorial(n))
        return cls(n, {order: mass for order in permutations(range(n))})

    @classmethod
    def point_mass(cls, order: Sequence[int]) -> "OrderDistribution":
        return cls(len(order), {tuple(order): Fraction(1)})

    @classmethod
    def from_function(cls, n: int, fn: Callable[[tuple[int, ...]], object]) -> "OrderDistribution":
        return cls(n, {order: Fraction(fn(order)) for order in permutations(range(n))})

    @classmethod
    def from_weights(cls, n: int, weights: Mapping[tuple[int, ...], int]) -> "OrderDistribution":
        """Normalize nonnegative integer (or rational) weights into a distribution."""
        total = sum(weights.values())
        if total <= 0:
            raise InvalidParameterError("weights must have a positive total")
        return cls(n, {o: Fraction(w) / total for o, w in weights.items()})


def block_product(
    partition: Partition, interval_weights: Sequence[Sequence[object]]
) -> OrderDistribution:
    """Failure-order law of independent blocks with i.i.d. components inside each block.

    Block ``j`` draws its lifetimes i.i.d. from a density that is uniform on
    each unit interval ``[l, l+1)`` with probability ``interval_weights[j][l]``.
    All blocks share the same intervals. Components landing in a common
    interval are uniformly ordered among themselves, which makes the order
    law computable exactly.
    """
    n = partition.n
    if len(interval_weights) != partition.r:
        raise InvalidParameterError(f"need {partition.r} weight vectors, got {len(interval_weights)}")
    m = len(interval_weights[0])
    weights = []
    for w in interval_weights:
        if len(w) != m:
            raise InvalidParameterError("all blocks must use the same number of intervals")
        w = [Fraction(x) for x in w]
        if any(x < 0 for x in w) or sum(w) != 1:
            raise InvalidParameterError(f"interval weights {w} are not a probability vector")
        weights.append(w)
    block_of = [0] * n
    for j, b in enumerate(partition.blocks):
        for i in b:
            block_of[i] = j

    # integer arithmetic over a common denominator
    dens = [lcm(*(x.denominator for x in w)) for w in weights]
    nums = [[int(x * d) for x in w] for w, d in zip(weights, dens)]
    total_den = factorial(n)
    for j, d in enumerate(dens):
        total_den *= d ** partition.sizes[j]

    acc: dict[tuple[int, ...], int] = defaultdict(int)
    for assignment in product(range(m), repeat=n):
        weight = 1
        for i, interval in enumerate(assignment):
            weight *= nums[block_of[i]][interval]
            if not weight:
                break
        if not weight:
            continue
        groups = [[i for i in range(n) if assignment[i] == interval] for interval in range(m)]
        # each consistent order has conditional probability 1 / prod(|group|!)
        share = factorial(n)
        for g in groups:
            share //= factorial(len(g))
        contrib = weight * share
        for parts in product(*(permutations(g) for g in groups)):
            order = tuple(i for part in parts for i in part)
            acc[order] += contrib
    return OrderDistribution(n, {o: Fraction(w, total_den) for o, w in acc.items()})


def interleave(partition: Partition, block_laws: Sequence[OrderDistribution]) -> OrderDistribution:
    """Independent block orders merged by a uniformly random interleaving.

    ``block_laws[j]`` is a law on the local orders of block ``j``. Every
    sequence of block labels with the right counts is equally likely, so the
    block counts among the best ``k`` components are hypergeometric while the
    orders inside each block keep their own (possibly asymmetric) law.
    """
    if len(block_laws) != partition.r:
        raise InvalidParameterError(f"need {partition.r} block laws, got {len(block_laws)}")
    for law, size in zip(block_laws, partition.sizes):
        if law.n != size:
            raise InvalidParameterError(f"block law on {law.n} components for a block of size {size}")
    n = partition.n
    if n > MAX_ORDER_COMPONENTS:
        raise InvalidSizeError(f"at most {MAX_ORDER_COMPONENTS} components for order distributions")
    labels = [j for j, size in enumerate(partition.sizes) for _ in range(size)]
    patterns = sorted(set(permutations(labels)))
    share = Fraction(1, len(patterns))
    out: dict[tuple[int, ...], Fraction] = defaultdict(Fraction)
    for locals_ in product(*(law.masses.items() for law in block_laws)):
        weight = share
        for _, m in locals_:
            weight *= m
        globals_ = [[block[t] for t in order] for block, (order, _) in zip(partition.blocks, locals_)]
        for pattern in patterns:
            cursor = [0] * partition.r
            order = []
            for j in pattern:
                order.append(globals_[j][cursor[j]])
                cursor[j] += 1
            out[tuple(order)] += weight
    return OrderDistribution(n, dict(out))


def symmetrize(dist: OrderDistribution, partition: Partition) -> OrderDistribution:
    """Average ``dist`` over the permutations that preserve every block.

    The orbit of an order under that group is the set of orders sharing its
    sequence of block labels, so averaging reduces to spreading each label
    pattern's total mass evenly.
    """
    if partition.n != dist.n:
        raise InvalidParameterError("partition and distribution sizes differ")
    label = [0] * dist.n
    for j, b in enumerate(partition.blocks):
        for i in b:
            label[i] = j
    pattern_mass: dict[tuple[int, ...], Fraction] = defaultdict(Fraction)
    for order, mass in dist.masses.items():
        pattern_mass[tuple(label[i] for i in order)] += mass
    orbit = 1
    for size in partition.sizes:
        orbit *= factorial(size)
    out = {}
    for order in permutations(range(dist.n)):
        pattern = tuple(label[i] for i in order)
        if pattern in pattern_mass:
            out[order] = pattern_mass[pattern] / orbit
    return OrderDistribution(dist.n, out)


@dataclass(frozen=True)
class RelativeQualityFunction:
    """``q(A)``: probability that the components in ``A`` are exactly the ``|A|`` best."""

    n: int
    values: tuple[Fraction, ...]

    def __post_init__(self):
        n = self.n
        if not isinstance(n, int) or n < 1:
            raise InvalidSizeError(f"component count must be a positive integer, got {n!r}")
        values = tuple(Fraction(v) for v in self.values)
        object.__setattr__(self, "values", values)
        if len(values) != 1 << n:
            raise InvalidParameterError(f"expected {1 << n} values, got {len(values)}")
        if values[0] != 1 or values[full_mask(n)] != 1:
            raise InvalidParameterError("q(empty set) and q(all components) must equal 1")
        if any(not 0 <= v <= 1 for v in values):
            raise InvalidParameterError("quality values must lie in [0, 1]")
        for k in range(n + 1):
            s = sum((values[m] for m in masks_of_size(n, k)), Fraction(0))
            if s != 1:
                raise InvalidParameterError(f"level {k} sums to {s}, not 1")

    def __getitem__(self, mask: int) -> Fraction:
        return self.values[mask]

    def __call__(self, subset: Iterable[int]) -> Fraction:
        mask = 0
        for i in subset:
            mask |= 1 << i
        return self.values[mask]


def q_from_order_distribution(dist: OrderDistribution) -> RelativeQualityFunction:
    """Mass of the orders whose last ``|A|`` entries are exactly ``A``."""
    n = dist.n
    den, weights = dist.integer_weights
    acc = [0] * (1 << n)
    for order, w in weights.items():
        mask = 0
        acc[0] += w
        for i in reversed(order):
            mask |= 1 << i
            acc[mask] += w
    return RelativeQualityFunction(n, tuple(Fraction(a, den) for a in acc))


def q_symmetric(n: int) -> RelativeQualityFunction:
    """The quality function of any exchangeable law: ``1 / C(n, |A|)``."""
    if not isinstance(n, int) or n < 1:
        raise InvalidSizeError(f"component count must be a positive integer, got {n!r}")
    return RelativeQualityFunction(
        n, tuple(Fraction(1, comb(n, popcount(m))) for m in range(1 << n))
    )


def marginal_quality(dist: OrderDistribution, block: Iterable[int]) -> RelativeQualityFunction:
    """Quality function of the sub-vector ``(T_i)_{i in block}``.

    The result is indexed locally: local component ``t`` is the ``t``-th
    smallest member of ``block``.
    """
    members = sorted(set(block))
    if not members:
        raise InvalidParameterError("block must be nonempty")
    if members[0] < 0 or members[-1] >= dist.n:
        raise InvalidParameterError(f"block {members} outside range(0, {dist.n})")
    local = {i: t for t, i in enumerate(members)}
    size = len(members)
    den, weights = dist.integer_weights
    acc = [0] * (1 << size)
    for order, w in weights.items():
        mask = 0
        acc[0] += w
        for i in reversed(order):
            t = local.get(i)
            if t is not None:
                mask |= 1 << t
                acc[mask] += w
    return RelativeQualityFunction(size, tuple(Fraction(a, den) for a in acc))


def marginals(dist: OrderDistribution, partition: Partition) -> list[RelativeQualityFunction]:
    if partition.n != dist.n:
        raise InvalidParameterError("partition and distribution sizes differ")
    return [marginal_quality(dist, b) for b in partition.blocks]


def is_symmetric(q: RelativeQualityFunction) -> bool:
    n = q.n
    return all(q[m] == Fraction(1, comb(n, popcount(m))) for m in range(1 << n))


def is_partition_symmetric(q: RelativeQualityFunction, partition: Partition) -> bool:
    """True iff ``q(A)`` depends only on the block counts ``|A & C_j|``."""
    if partition.n != q.n:
        raise InvalidParameterError("partition and quality function sizes differ")
    seen: dict[tuple[int, ...], Fraction] = {}
    for mask in range(1 << q.n):
        a = partition.counts(mask)
        if seen.setdefault(a, q[mask]) != q[mask]:
            return False
    return True


@dataclass(frozen=True, eq=False)
class DecompositionCoefficients:
    """The coefficient function ``c~`` on the grid ``prod_j {0..n_j}``.

    Restricted to any level ``T_k = {a : sum(a) == k}`` it is a probability
    distribution; construction enforces this.
    """

    partition: Partition
    values: Mapping[tuple[int, ...], Fraction]

    def __post_init__(self):
        sizes = self.partition.sizes
        values = {tuple(a): Fraction(v) for a, v in self.values.items()}
        grid = set(full_grid(sizes))
        if set(values) != grid:
            raise InvalidParameterError("coefficients must be given on exactly the full count grid")
        if any(v < 0 for v in values.values()):
            raise InvalidParameterError("coefficients must be nonnegative")
        for k in range(sum(sizes) + 1):
            s = sum((values[a] for a in level_grid(sizes, k)), Fraction(0))
            if s != 1:
                raise InvalidParameterError(f"coefficients on level {k} sum to {s}, not 1")
        object.__setattr__(self, "values", values)

    def __getitem__(self, a: Sequence[int]) -> Fraction:
        return self.values[tuple(a)]

    def __eq__(self, other):
        if not isinstance(other, DecompositionCoefficients):
            return NotImplemented
        return self.partition == other.partition and self.values == other.values

    def level(self, k: int) -> list[tuple[tuple[int, ...], Fraction]]:
        return [(a, self.values[a]) for a in level_grid(self.partition.sizes, k)]


@dataclass(frozen=True)
class NotDecomposable:
    """Verdict carrying the subset at which the product form breaks."""

    subset: int
    counts: tuple[int, ...]
    reason: str

    def __bool__(self):
        return False


def check_decomposable(
    q: RelativeQualityFunction,
    block_qualities: Sequence[RelativeQualityFunction],
    partition: Partition,
) -> DecompositionCoefficients | NotDecomposable:
    """Extract ``c~`` from ``q(A) = c~(|A_1|, ..., |A_r|) * prod_j q_j(A_j)``.

    The first subset (ascending bitmask) of each grid cell with a nonzero
    marginal product fixes ``c~`` for that cell; every other subset must then
    agree. Where the product vanishes, ``q(A)`` must vanish too.
    """
    if q.n != partition.n:
        raise InvalidParameterError("partition and quality function sizes differ")
    if len(block_qualities) != partition.r:
        raise InvalidParameterError(f"expected {partition.r} block quality functions")
    for j, (qj, size) in enumerate(zip(block_qualities, partition.sizes)):
        if qj.n != size:
            raise InvalidParameterError(f"block {j + 1} has {size} components, marginal has {qj.n}")

    coeffs: dict[tuple[int, ...], Fraction] = {}
    for mask in range(1 << q.n):
        locals_ = partition.split(mask)
        a = tuple(popcount(x) for x in locals_)
        prod = Fraction(1)
        for qj, x in zip(block_qualities, locals_):
            prod *= qj[x]
        if prod == 0:
            if q[mask] != 0:
                return NotDecomposable(mask, a, "positive quality where the marginal product vanishes")
            continue
        c = q[mask] / prod
        if coeffs.setdefault(a, c) != c:
            return NotDecomposable(mask, a, "coefficient disagrees with an earlier subset of the same counts")
    missing = [a for a in full_grid(partition.sizes) if a not in coeffs]
    if missing:
        raise InvalidParameterError(f"block quality functions admit no witness for counts {missing[0]}")
    try:
        return DecompositionCoefficients(partition, coeffs)
    except InvalidParameterError as exc:
        # only reachable when the marginals do not belong to q's law
        raise InvalidParameterError(f"marginals inconsistent with q: {exc}") from exc


def is_decomposable(q, block_qualities, partition) -> bool:
    return isinstance(check_decomposable(q, block_qualities, partition), DecompositionCoefficients)


def _cell_masks(partition: Partition, a: Sequence[int]) -> Iterable[int]:
    per_block = [_spread(block, a_j) for block, a_j in zip(partition.blocks, a)]
    for combo in product(*per_block):
        mask = 0
        for m in combo:
            mask |= m
        yield mask


def _spread(block: Sequence[int], k: int) -> list[int]:
    out = []
    for local in masks_of_size(len(block), k):
        g = 0
        for t, i in enumerate(block):
            if (local >> t) & 1:
                g |= 1 << i
        out.append(g)
    return out


def event_probability(q: RelativeQualityFunction, partition: Partition, a: Sequence[int]) -> Fraction:
    """Probability that the ``sum(a)`` best components hold exactly ``a_j`` from each block."""
    if q.n != partition.n:
        raise InvalidParameterError("partition and quality function sizes differ")
    a = tuple(a)
    if len(a) != partition.r or any(not 0 <= x <= s for x, s in zip(a, partition.sizes)):
        raise InvalidParameterError(f"{a} is outside the count grid {partition.sizes}")
    return sum((q[m] for m in _cell_masks(partition, a)), Fraction(0))


def hypergeometric_coefficients(partition: Partition) -> DecompositionCoefficients:
    sizes = partition.sizes
    return DecompositionCoefficients(
        partition, {a: hypergeometric_weight(sizes, a) for a in full_grid(sizes)}
    )


def is_partition_exchangeable(dist: OrderDistribution, partition: Partition) -> bool:
    """True iff relabelling components within blocks leaves the order law unchanged.

    Swaps of consecutive members of a block generate every block-preserving
    permutation, so checking those swaps suffices.
    """
    if partition.n != dist.n:
        raise InvalidParameterError("partition and distribution sizes differ")
    for block in partition.blocks:
        for x, y in zip(block, block[1:]):
            swap = {x: y, y: x}
            for order, mass in dist.masses.items():
                image = tuple(swap.get(i, i) for i in order)
                if dist.mass(image) != mass:
                    return False
    return True
