"""Ground-truth engines that never touch the level-sum formulas.

``brute_force_signature`` walks every failure order of an order
distribution and records which failure kills the system.
``monte_carlo_signature`` does the same on simulated continuous lifetimes.

Random numbers come from numpy's Philox counter-based generator. Trials are
processed in fixed-size chunks; chunk ``i`` draws from the substream seeded
by ``SeedSequence([seed, i])``, so results depend only on ``(seed, trials)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Sequence

import numpy as np

from ._combinatorics import full_mask
from .errors import InvalidParameterError, InvalidSizeError
from .quality import MAX_ORDER_COMPONENTS, OrderDistribution
from .signatures import PROBABILITY, SignatureVector
from .structure import StructureFunction

CHUNK = 1 << 16


def failure_index(phi: StructureFunction, order: Sequence[int]) -> int:
    """1-based index of the failure in ``order`` that brings ``phi`` down."""
    alive = full_mask(phi.n)
    for k, i in enumerate(order, start=1):
        alive &= ~(1 << i)
        if not phi[alive]:
            return k
    raise InvalidParameterError("structure still works with every component failed")


def brute_force_signature(phi: StructureFunction, dist: OrderDistribution) -> SignatureVector:
    if phi.n != dist.n:
        raise InvalidParameterError(f"structure has {phi.n} components, distribution {dist.n}")
    if not phi.is_semicoherent():
        raise InvalidParameterError("the permutation oracle needs a semicoherent structure")
    den, weights = dist.integer_weights
    acc = [0] * phi.n
    for order, w in weights.items():
        acc[failure_index(phi, order) - 1] += w
    return SignatureVector(PROBABILITY, tuple(Fraction(a, den) for a in acc))


# -- samplers ---------------------------------------------------------------

IID = "iid-continuous"
PAIRS = "exchangeable-pairs"
BLOCKS = "block-product"


@dataclass(frozen=True)
class LifetimeSampler:
    """Continuous lifetime model; every kind is tie-free almost surely.

    ``iid-continuous``: i.i.d. exponential lifetimes with ``rates[0]``.
    ``exchangeable-pairs``: components ``(1,2), (3,4), ...`` form independent
    pairs sharing one common-shock law ``T_i = Z + E_i``.
    ``block-product``: independent blocks, block ``j`` being common-shock
    with shock rate ``shock_rates[j]`` and individual rate ``rates[j]``.
    """

    kind: str
    n: int
    blocks: tuple[tuple[int, ...], ...] = ()
    rates: tuple[float, ...] = (1.0,)
    shock_rates: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in (IID, PAIRS, BLOCKS):
            raise InvalidParameterError(f"unknown sampler kind {self.kind!r}")
        if self.n < 1:
            raise InvalidSizeError("sampler needs at least one component")
        if any(r <= 0 for r in (*self.rates, *self.shock_rates)):
            raise InvalidParameterError("rates must be positive")
        if self.kind != IID:
            covered = sorted(i for b in self.blocks for i in b)
            if covered != list(range(self.n)):
                raise InvalidParameterError("sampler blocks must partition the components")
            if len(self.rates) != len(self.blocks) or len(self.shock_rates) != len(self.blocks):
                raise InvalidParameterError("need one rate and one shock rate per block")

    @classmethod
    def iid(cls, n: int, rate: float = 1.0) -> "LifetimeSampler":
        return cls(IID, n, rates=(rate,))

    @classmethod
    def exchangeable_pairs(cls, n: int, shock_rate: float = 1.0, rate: float = 1.0) -> "LifetimeSampler":
        if n % 2:
            raise InvalidParameterError("exchangeable pairs need an even component count")
        blocks = tuple((i, i + 1) for i in range(0, n, 2))
        m = len(blocks)
        return cls(PAIRS, n, blocks, (rate,) * m, (shock_rate,) * m)

    @classmethod
    def block_product(
        cls,
        blocks: Sequence[Sequence[int]],
        shock_rates: Sequence[float],
        rates: Sequence[float],
    ) -> "LifetimeSampler":
        blocks = tuple(tuple(b) for b in blocks)
        n = sum(len(b) for b in blocks)
        return cls(BLOCKS, n, blocks, tuple(rates), tuple(shock_rates))

    @property
    def exchangeable(self) -> bool:
        """Whether the whole lifetime vector is exchangeable."""
        return self.kind == IID or len(self.blocks) == 1

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Array of shape ``(size, n)``."""
        if self.kind == IID:
            return rng.exponential(1.0 / self.rates[0], size=(size, self.n))
        out = np.empty((size, self.n))
        for block, rate, shock in zip(self.blocks, self.rates, self.shock_rates):
            z = rng.exponential(1.0 / shock, size=(size, 1))
            e = rng.exponential(1.0 / rate, size=(size, len(block)))
            out[:, list(block)] = z + e
        return out


def _chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))


def _sample_orders(sampler: LifetimeSampler, rng: np.random.Generator, size: int):
    """Failure orders (argsort rows) with exact ties resampled; returns (orders, resamples)."""
    t = sampler.sample(rng, size)
    resamples = 0
    while True:
        st = np.sort(t, axis=1)
        tied = np.any(st[:, 1:] == st[:, :-1], axis=1)
        count = int(tied.sum())
        if not count:
            break
        resamples += count
        t[tied] = sampler.sample(rng, count)
    return np.argsort(t, axis=1), resamples


def _failure_indices(phi: StructureFunction, orders: np.ndarray) -> np.ndarray:
    table = np.frombuffer(phi.bitstring.encode(), dtype=np.uint8) == ord("1")
    size, n = orders.shape
    alive = np.full(size, full_mask(n), dtype=np.int64)
    index = np.zeros(size, dtype=np.int64)
    for k in range(n):
        alive &= ~(np.int64(1) << orders[:, k].astype(np.int64))
        dead = (index == 0) & ~table[alive]
        index[dead] = k + 1
    return index


@dataclass(frozen=True)
class MonteCarloSignature:
    estimates: tuple[float, ...]
    std_errors: tuple[float, ...]
    trials: int
    resamples: int

    def within(self, reference: Sequence, sigmas: float = 4.0) -> bool:
        return all(
            abs(est - float(ref)) <= sigmas * se
            for est, se, ref in zip(self.estimates, self.std_errors, reference)
        )


def monte_carlo_signature(
    phi: StructureFunction, sampler: LifetimeSampler, trials: int, seed: int
) -> MonteCarloSignature:
    """Estimate ``Pr(system dies at the k-th failure)`` with binomial standard errors."""
    if trials < 1:
        raise InvalidParameterError("trials must be positive")
    if phi.n != sampler.n:
        raise InvalidParameterError(f"structure has {phi.n} components, sampler {sampler.n}")
    if not phi.is_semicoherent():
        raise InvalidParameterError("Monte Carlo signatures need a semicoherent structure")
    counts = np.zeros(phi.n + 1, dtype=np.int64)
    resamples = 0
    done = 0
    chunk = 0
    while done < trials:
        size = min(CHUNK, trials - done)
        orders, extra = _sample_orders(sampler, _chunk_rng(seed, chunk), size)
        counts += np.bincount(_failure_indices(phi, orders), minlength=phi.n + 1)
        resamples += extra
        done += size
        chunk += 1
    p = counts[1:] / trials
    se = np.sqrt(p * (1 - p) / trials)
    return MonteCarloSignature(tuple(p.tolist()), tuple(se.tolist()), trials, resamples)


def order_distribution_of(sampler: LifetimeSampler, trials: int, seed: int) -> OrderDistribution:
    """Empirical failure-order frequencies as an exact distribution."""
    if sampler.n > MAX_ORDER_COMPONENTS:
        raise InvalidSizeError(f"at most {MAX_ORDER_COMPONENTS} components for order distributions")
    if trials < 1:
        raise InvalidParameterError("trials must be positive")
    n = sampler.n
    index = {order: i for i, order in enumerate(permutations(range(n)))}
    keys = list(index)
    counts = np.zeros(len(keys), dtype=np.int64)
    # encode each order row as a base-n integer for fast counting
    lookup = {sum(o[k] * n ** (n - 1 - k) for k in range(n)): i for o, i in index.items()}
    powers = n ** np.arange(n - 1, -1, -1, dtype=np.int64)
    done = chunk = 0
    while done < trials:
        size = min(CHUNK, trials - done)
        orders, _ = _sample_orders(sampler, _chunk_rng(seed, chunk), size)
        codes, freq = np.unique(orders.astype(np.int64) @ powers, return_counts=True)
        for code, f in zip(codes.tolist(), freq.tolist()):
            counts[lookup[code]] += f
        done += size
        chunk += 1
    return OrderDistribution(
        n, {keys[i]: Fraction(int(c), trials) for i, c in enumerate(counts) if c}
    )
