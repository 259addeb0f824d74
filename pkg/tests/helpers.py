"""Random generators shared by the test modules."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import permutations

from modsig import (
    ModularSystem,
    OrderDistribution,
    Partition,
    StructureFunction,
    block_product,
)


def random_semicoherent(rng: random.Random, n: int) -> StructureFunction:
    """Up-closure of a few random nonempty path sets."""
    paths = []
    for _ in range(rng.randint(1, 4)):
        size = rng.randint(1, n)
        paths.append(rng.sample(range(n), size))
    return StructureFunction.from_path_sets(n, paths)


def random_partition(rng: random.Random, n: int, r: int) -> Partition:
    """Random partition of range(n) into exactly r nonempty blocks."""
    items = list(range(n))
    rng.shuffle(items)
    cuts = sorted(rng.sample(range(1, n), r - 1))
    bounds = [0, *cuts, n]
    return Partition(tuple(tuple(items[a:b]) for a, b in zip(bounds, bounds[1:])))


def random_system(rng: random.Random, n: int, r: int) -> ModularSystem:
    partition = random_partition(rng, n, r)
    modules = tuple(random_semicoherent(rng, size) for size in partition.sizes)
    return ModularSystem(partition, modules, random_semicoherent(rng, r))


def random_distribution(rng: random.Random, n: int, support: float = 1.0) -> OrderDistribution:
    """Random integer weights on a random share of the n! orders."""
    orders = list(permutations(range(n)))
    weights = {o: rng.randint(1, 9) for o in orders if rng.random() < support}
    if not weights:
        weights = {rng.choice(orders): 1}
    return OrderDistribution.from_weights(n, weights)


def random_block_product(rng: random.Random, partition: Partition, intervals: int = 3) -> OrderDistribution:
    weights = []
    for _ in partition.blocks:
        raw = [rng.randint(0, 4) for _ in range(intervals)]
        if not any(raw):
            raw[rng.randrange(intervals)] = 1
        total = sum(raw)
        weights.append([Fraction(x, total) for x in raw])
    return block_product(partition, weights)


def perturbed_uniform(n: int, first: tuple[int, ...], second: tuple[int, ...], delta: Fraction) -> OrderDistribution:
    """Uniform law with ``delta`` of mass moved from order ``first`` to order ``second``."""
    base = Fraction(1, len(list(permutations(range(n)))))
    masses = {o: base for o in permutations(range(n))}
    masses[first] -= delta
    masses[second] += delta
    return OrderDistribution(n, masses)


def skewed_pair_distribution() -> OrderDistribution:
    """1/18 on orders where component 0 fails before component 1, 1/36 otherwise."""
    return OrderDistribution.from_function(
        4, lambda o: Fraction(1, 18) if o.index(0) < o.index(1) else Fraction(1, 36)
    )
