import random
from fractions import Fraction
from itertools import permutations
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modsig import (
    DecompositionCoefficients,
    InvalidParameterError,
    InvalidSizeError,
    NotDecomposable,
    OrderDistribution,
    Partition,
    RelativeQualityFunction,
    block_product,
    check_decomposable,
    event_probability,
    hypergeometric_coefficients,
    interleave,
    is_decomposable,
    is_partition_exchangeable,
    is_partition_symmetric,
    is_symmetric,
    marginal_quality,
    marginals,
    q_from_order_distribution,
    q_symmetric,
    symmetrize,
)
from modsig._combinatorics import full_grid, level_grid, popcount
from helpers import (
    perturbed_uniform,
    random_block_product,
    random_distribution,
    random_partition,
    skewed_pair_distribution,
)

PAIRS = Partition.of((0, 1), (2, 3))


def naive_q(dist, block=None):
    """Quality function straight from the definition, over ``block`` (default: all)."""
    block = list(range(dist.n)) if block is None else sorted(block)
    out = {}
    for local in range(1 << len(block)):
        a = {block[t] for t in range(len(block)) if (local >> t) & 1}
        total = Fraction(0)
        for order in permutations(range(dist.n)):
            induced = [i for i in order if i in block]
            if set(induced[len(block) - len(a):]) == a:
                total += dist.mass(order)
        out[local] = total
    return out


class TestOrderDistribution:
    def test_rejects_bad_total(self):
        with pytest.raises(InvalidParameterError):
            OrderDistribution(2, {(0, 1): Fraction(1, 2)})

    def test_rejects_negative(self):
        with pytest.raises(InvalidParameterError):
            OrderDistribution(2, {(0, 1): Fraction(3, 2), (1, 0): Fraction(-1, 2)})

    def test_rejects_non_permutation(self):
        with pytest.raises(InvalidParameterError):
            OrderDistribution(2, {(0, 0): Fraction(1)})

    def test_size_cap(self):
        with pytest.raises(InvalidSizeError):
            OrderDistribution.point_mass(tuple(range(9)))

    def test_zero_masses_dropped(self):
        d = OrderDistribution(2, {(0, 1): Fraction(1), (1, 0): Fraction(0)})
        assert d.support() == [(0, 1)]
        assert d.mass((1, 0)) == 0


class TestQualityFromOrders:
    def test_worked_example(self):
        q = q_from_order_distribution(skewed_pair_distribution())
        assert q[0b0001] == Fraction(1, 6)
        assert q[0b0010] == Fraction(1, 3)

    @pytest.mark.parametrize("n", range(1, 6))
    def test_uniform_is_symmetric(self, n):
        q = q_from_order_distribution(OrderDistribution.uniform(n))
        assert all(q[a] == Fraction(1, comb(n, popcount(a))) for a in range(1 << n))
        assert q == q_symmetric(n)

    def test_point_mass(self):
        q = q_from_order_distribution(OrderDistribution.point_mass((0, 1)))
        assert q[0b10] == 1 and q[0b01] == 0

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 10**9), n=st.integers(1, 7))
    def test_invariants_random(self, seed, n):
        dist = random_distribution(random.Random(seed), n, support=0.3 if n > 5 else 1.0)
        q = q_from_order_distribution(dist)
        assert q[0] == 1 and q[(1 << n) - 1] == 1
        for k in range(n + 1):
            assert sum(q[a] for a in range(1 << n) if popcount(a) == k) == 1

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_naive(self, seed):
        dist = random_distribution(random.Random(seed), 4)
        q = q_from_order_distribution(dist)
        assert [q[a] for a in range(16)] == [naive_q(dist)[a] for a in range(16)]

    def test_rejects_bad_quality(self):
        with pytest.raises(InvalidParameterError):
            RelativeQualityFunction(2, (Fraction(1), Fraction(1, 2), Fraction(1, 3), Fraction(1)))


class TestSymmetric:
    def test_values(self):
        q = q_symmetric(4)
        assert q[0b0011] == Fraction(1, 6)
        assert q_symmetric(1)[0] == q_symmetric(1)[1] == 1
        for n in range(1, 7):
            qs = q_symmetric(n)
            for k in range(n + 1):
                assert sum(qs[a] for a in range(1 << n) if popcount(a) == k) == 1

    def test_is_symmetric(self):
        assert is_symmetric(q_symmetric(4))
        assert not is_symmetric(q_from_order_distribution(skewed_pair_distribution()))
        assert is_symmetric(q_from_order_distribution(OrderDistribution.point_mass((0,))))


class TestMarginals:
    def test_uniform_blocks(self):
        dist = OrderDistribution.uniform(5)
        for block in [(0,), (1, 3), (0, 2, 4)]:
            assert is_symmetric(marginal_quality(dist, block))

    def test_worked_example_blocks(self):
        dist = skewed_pair_distribution()
        right = marginal_quality(dist, (2, 3))
        left = marginal_quality(dist, (0, 1))
        # frozen from naive_q over the 24 orders
        assert naive_q(dist, (2, 3))[0b01] == naive_q(dist, (2, 3))[0b10] == Fraction(1, 2)
        assert (right[0b01], right[0b10]) == (Fraction(1, 2), Fraction(1, 2))
        assert naive_q(dist, (0, 1))[0b10] == Fraction(2, 3)
        assert (left[0b01], left[0b10]) == (Fraction(1, 3), Fraction(2, 3))

    def test_empty_block(self):
        with pytest.raises(InvalidParameterError):
            marginal_quality(OrderDistribution.uniform(3), ())

    @pytest.mark.parametrize("seed", range(4))
    def test_match_naive(self, seed):
        rng = random.Random(seed)
        dist = random_distribution(rng, 5, support=0.5)
        block = sorted(rng.sample(range(5), 3))
        m = marginal_quality(dist, block)
        assert [m[a] for a in range(8)] == [naive_q(dist, block)[a] for a in range(8)]


class TestPartitionSymmetry:
    def test_examples(self):
        assert is_partition_symmetric(q_symmetric(4), PAIRS)
        q = q_from_order_distribution(skewed_pair_distribution())
        assert not is_partition_symmetric(q, PAIRS)
        assert is_partition_symmetric(q, Partition.singletons(4))


class TestDecomposability:
    def test_symmetric_gives_hypergeometric(self):
        rng = random.Random(1)
        for _ in range(5):
            n = rng.randint(2, 6)
            p = random_partition(rng, n, rng.randint(1, n))
            q = q_symmetric(n)
            verdict = check_decomposable(q, [q_symmetric(s) for s in p.sizes], p)
            assert verdict == hypergeometric_coefficients(p)

    def test_worked_example(self):
        dist = skewed_pair_distribution()
        q = q_from_order_distribution(dist)
        verdict = check_decomposable(q, marginals(dist, PAIRS), PAIRS)
        assert isinstance(verdict, DecompositionCoefficients)
        assert verdict == hypergeometric_coefficients(PAIRS)

    @pytest.mark.parametrize("seed", range(6))
    def test_trivial_partitions(self, seed):
        dist = random_distribution(random.Random(seed), 4)
        q = q_from_order_distribution(dist)
        for p in (Partition.trivial(4), Partition.singletons(4)):
            assert is_decomposable(q, marginals(dist, p), p)

    def test_perturbed_not_decomposable(self):
        dist = perturbed_uniform(4, (0, 1, 2, 3), (0, 2, 1, 3), Fraction(1, 48))
        q = q_from_order_distribution(dist)
        block_q = marginals(dist, PAIRS)
        verdict = check_decomposable(q, block_q, PAIRS)
        assert isinstance(verdict, NotDecomposable) and not verdict
        # independent confirmation: ratios within one count cell disagree
        ratios = {}
        for a in range(16):
            counts = PAIRS.counts(a)
            local = PAIRS.split(a)
            denom = block_q[0][local[0]] * block_q[1][local[1]]
            ratios.setdefault(counts, set()).add(q[a] / denom)
        assert any(len(v) > 1 for v in ratios.values())

    def test_zero_denominator_rule(self):
        # component 0 always fails first, but q mixes blocks so q(A) > 0 where a marginal is 0
        dist = OrderDistribution(2, {(0, 1): Fraction(1)})
        p = Partition.singletons(2)
        assert is_decomposable(q_from_order_distribution(dist), marginals(dist, p), p)
        q = RelativeQualityFunction(2, (Fraction(1), Fraction(1, 2), Fraction(1, 2), Fraction(1)))
        point = OrderDistribution.point_mass((0, 1))
        bad = check_decomposable(q, marginals(point, Partition.trivial(2)), Partition.trivial(2))
        assert isinstance(bad, NotDecomposable)

    def test_size_mismatch(self):
        with pytest.raises(InvalidParameterError):
            check_decomposable(q_symmetric(4), [q_symmetric(3), q_symmetric(1)], PAIRS)


class TestCoefficients:
    def test_event_probability(self):
        q = q_symmetric(4)
        assert event_probability(q, PAIRS, (1, 1)) == Fraction(comb(2, 1) * comb(2, 1), comb(4, 2))
        assert event_probability(q, PAIRS, (1, 1)) == Fraction(2, 3)
        assert event_probability(q, PAIRS, (0, 0)) == 1
        assert event_probability(q, PAIRS, (2, 2)) == 1
        with pytest.raises(InvalidParameterError):
            event_probability(q, PAIRS, (3, 0))

    def test_hypergeometric(self):
        c = hypergeometric_coefficients(PAIRS)
        assert c[(2, 0)] == Fraction(comb(2, 2) * comb(2, 0), comb(4, 2)) == Fraction(1, 6)
        single = hypergeometric_coefficients(Partition.trivial(5))
        assert all(single[(k,)] == 1 for k in range(6))

    @settings(max_examples=30, deadline=None)
    @given(sizes=st.lists(st.integers(1, 4), min_size=1, max_size=4))
    def test_grid_and_level_sums(self, sizes):
        blocks, start = [], 0
        for s in sizes:
            blocks.append(tuple(range(start, start + s)))
            start += s
        p = Partition(tuple(blocks))
        cells = list(full_grid(sizes))
        expected = 1
        for s in sizes:
            expected *= s + 1
        assert len(cells) == len(set(cells)) == expected
        c = hypergeometric_coefficients(p)
        for k in range(sum(sizes) + 1):
            level = list(level_grid(sizes, k))
            assert all(sum(a) == k and all(0 <= x <= s for x, s in zip(a, sizes)) for a in level)
            assert level == sorted(level)
            assert sum(c[a] for a in level) == 1
        assert sum(len(list(level_grid(sizes, k))) for k in range(sum(sizes) + 1)) == expected

    def test_invalid_coefficients_rejected(self):
        values = dict(hypergeometric_coefficients(PAIRS).values)
        values[(1, 0)] += Fraction(1, 10)
        with pytest.raises(InvalidParameterError):
            DecompositionCoefficients(PAIRS, values)


class TestExchangeability:
    def test_examples(self):
        assert is_partition_exchangeable(OrderDistribution.uniform(4), PAIRS)
        assert not is_partition_exchangeable(skewed_pair_distribution(), PAIRS)
        assert is_partition_exchangeable(OrderDistribution.point_mass((2, 0, 1)), Partition.singletons(3))

    def test_worked_example_swaps(self):
        dist = skewed_pair_distribution()
        swap34 = {0: 0, 1: 1, 2: 3, 3: 2}
        swap12 = {0: 1, 1: 0, 2: 2, 3: 3}
        assert all(dist.mass(o) == dist.mass(tuple(swap34[i] for i in o)) for o in permutations(range(4)))
        assert not all(dist.mass(o) == dist.mass(tuple(swap12[i] for i in o)) for o in permutations(range(4)))

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 10**9), n=st.integers(2, 7))
    def test_exchangeable_implies_decomposable(self, seed, n):
        rng = random.Random(seed)
        p = random_partition(rng, n, rng.randint(1, n))
        dist = symmetrize(random_distribution(rng, n, support=0.2 if n > 5 else 1.0), p)
        assert is_partition_exchangeable(dist, p)
        q = q_from_order_distribution(dist)
        block_q = marginals(dist, p)
        assert all(is_symmetric(m) for m in block_q)
        assert is_partition_symmetric(q, p)
        assert is_decomposable(q, block_q, p)

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 10**9), n=st.integers(2, 6))
    def test_independent_exchangeable_blocks_decomposable(self, seed, n):
        rng = random.Random(seed)
        p = random_partition(rng, n, rng.randint(1, n))
        dist = random_block_product(rng, p)
        assert is_partition_exchangeable(dist, p)
        q = q_from_order_distribution(dist)
        assert isinstance(check_decomposable(q, marginals(dist, p), p), DecompositionCoefficients)

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 10**9), n=st.integers(2, 6))
    def test_uniform_interleaving_gives_hypergeometric(self, seed, n):
        rng = random.Random(seed)
        p = random_partition(rng, n, rng.randint(1, n))
        laws = [random_distribution(rng, size) for size in p.sizes]
        dist = interleave(p, laws)
        q = q_from_order_distribution(dist)
        block_q = marginals(dist, p)
        for law, m in zip(laws, block_q):
            assert m == q_from_order_distribution(law)
        assert check_decomposable(q, block_q, p) == hypergeometric_coefficients(p)

    def test_interleave_reproduces_worked_example(self):
        left = OrderDistribution(2, {(0, 1): Fraction(2, 3), (1, 0): Fraction(1, 3)})
        assert interleave(PAIRS, [left, OrderDistribution.uniform(2)]) == skewed_pair_distribution()

    def test_block_product_weights_validated(self):
        with pytest.raises(InvalidParameterError):
            block_product(PAIRS, [[Fraction(1, 2), Fraction(1, 2)], [Fraction(1)]])
        with pytest.raises(InvalidParameterError):
            block_product(PAIRS, [[Fraction(1, 2), Fraction(1, 3)], [Fraction(1), 0]])


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**9), n=st.integers(2, 6))
def test_coefficients_are_event_probabilities(seed, n):
    rng = random.Random(seed)
    p = random_partition(rng, n, rng.randint(1, n))
    if rng.random() < 0.5:
        dist = random_block_product(rng, p)
    else:
        dist = symmetrize(random_distribution(rng, n, support=0.3), p)
    q = q_from_order_distribution(dist)
    block_q = marginals(dist, p)
    c = check_decomposable(q, block_q, p)
    assert isinstance(c, DecompositionCoefficients)
    for a in full_grid(p.sizes):
        assert c[a] == event_probability(q, p, a)
    for k in range(n + 1):
        assert sum(v for _, v in c.level(k)) == 1
    # conditional factorization given the block counts
    for mask in range(1 << n):
        e = event_probability(q, p, p.counts(mask))
        if e:
            prod = Fraction(1)
            for qj, local in zip(block_q, p.split(mask)):
                prod *= qj[local]
            assert q[mask] / e == prod
