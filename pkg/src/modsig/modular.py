"""Composition of module signatures into the system signature.

If the quality function factors over a partition as
``q(A) = c~(|A_1|, ..., |A_r|) * prod_j q_j(A_j)``, the system tail
signature is an average, weighted by ``c~`` on each level, of the
organizer's multilinear extension evaluated at the module tails:

    tail[n - k] = sum over a in T_k of c~(a) * psi^(tail_1[n_1 - a_1], ..., tail_r[n_r - a_r])

The cumulative version uses the dual organizer instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from ._combinatorics import hypergeometric_weight, level_grid, members, popcount
from .errors import InvalidParameterError
from .oracle import brute_force_signature
from .quality import (
    DecompositionCoefficients,
    NotDecomposable,
    OrderDistribution,
    RelativeQualityFunction,
    check_decomposable,
    hypergeometric_coefficients,
    marginals,
    q_from_order_distribution,
)
from .signatures import (
    PROBABILITY,
    STRUCTURAL,
    TailSignatureVector,
    cumulative,
    signature_to_tail,
    structural_tail_signature,
    tail_probability_signature,
)
from .structure import (
    ModularSystem,
    Partition,
    StructureFunction,
    compose,
    conjunction_structure,
    dual,
    make_parallel,
    multilinear_extension,
)

TailLike = Union[TailSignatureVector, Sequence[Fraction]]


def _entries(vec) -> tuple[Fraction, ...]:
    if isinstance(vec, TailSignatureVector):
        return vec.entries
    return tuple(Fraction(v) for v in vec)


def _check_setup(psi: StructureFunction, vectors: Sequence, coeffs: DecompositionCoefficients):
    sizes = coeffs.partition.sizes
    if not psi.is_semicoherent():
        raise InvalidParameterError("organizer must be semicoherent")
    if psi.n != len(sizes):
        raise InvalidParameterError(f"organizer arity {psi.n} does not match {len(sizes)} blocks")
    if len(vectors) != len(sizes):
        raise InvalidParameterError(f"expected {len(sizes)} module vectors, got {len(vectors)}")
    entries = [_entries(v) for v in vectors]
    for j, (e, size) in enumerate(zip(entries, sizes)):
        if len(e) != size + 1:
            raise InvalidParameterError(f"module {j + 1} vector has {len(e)} entries, expected {size + 1}")
    return sizes, entries


def _level_sums(psi, entries, coeffs, sizes) -> list[Fraction]:
    n = sum(sizes)
    out = [Fraction(0)] * (n + 1)
    for k in range(n + 1):
        total = Fraction(0)
        for a in level_grid(sizes, k):
            c = coeffs[a]
            if c:
                z = [e[size - a_j] for e, size, a_j in zip(entries, sizes, a)]
                total += c * multilinear_extension(psi, z)
        out[n - k] = total
    return out


def compose_tail(
    psi: StructureFunction,
    module_tails: Sequence[TailLike],
    coeffs: DecompositionCoefficients,
) -> TailSignatureVector:
    """System tail signature from the module tails, the organizer and ``c~``."""
    sizes, entries = _check_setup(psi, module_tails, coeffs)
    structural = all(getattr(t, "kind", None) == STRUCTURAL for t in module_tails)
    kind = STRUCTURAL if structural else PROBABILITY
    return TailSignatureVector(kind, tuple(_level_sums(psi, entries, coeffs, sizes)))


def compose_cumulative(
    psi: StructureFunction,
    module_cumulatives: Sequence[Sequence[Fraction]],
    coeffs: DecompositionCoefficients,
) -> tuple[Fraction, ...]:
    """System cumulative signature, evaluated through the dual organizer."""
    sizes, entries = _check_setup(psi, module_cumulatives, coeffs)
    return tuple(_level_sums(dual(psi), entries, coeffs, sizes))


def _consecutive_partition(sizes: Sequence[int]) -> Partition:
    blocks, start = [], 0
    for s in sizes:
        blocks.append(tuple(range(start, start + s)))
        start += s
    return Partition(tuple(blocks))


def series_convolution(module_tails: Sequence[TailLike], sizes: Sequence[int]) -> TailSignatureVector:
    """Modules in series under exchangeable lifetimes: hypergeometric convolution of tails."""
    sizes = tuple(sizes)
    if len(module_tails) != len(sizes):
        raise InvalidParameterError(f"{len(module_tails)} tails for {len(sizes)} sizes")
    entries = [_entries(t) for t in module_tails]
    for e, size in zip(entries, sizes):
        if len(e) != size + 1:
            raise InvalidParameterError(f"tail of length {len(e)} for a module of size {size}")
    n = sum(sizes)
    out = [Fraction(0)] * (n + 1)
    for k in range(n + 1):
        total = Fraction(0)
        for a in level_grid(sizes, k):
            term = hypergeometric_weight(sizes, a)
            for e, size, a_j in zip(entries, sizes, a):
                term *= e[size - a_j]
                if not term:
                    break
            total += term
        out[n - k] = total
    kind = STRUCTURAL if all(getattr(t, "kind", None) == STRUCTURAL for t in module_tails) else PROBABILITY
    return TailSignatureVector(kind, tuple(out))


def _threshold_coeffs(thresholds, sizes, coeffs):
    sizes = tuple(sizes)
    if len(thresholds) != len(sizes):
        raise InvalidParameterError(f"{len(thresholds)} thresholds for {len(sizes)} modules")
    for k_j, n_j in zip(thresholds, sizes):
        if not 1 <= k_j <= n_j:
            raise InvalidParameterError(f"threshold {k_j} outside 1..{n_j}")
    if coeffs is None:
        coeffs = hypergeometric_coefficients(_consecutive_partition(sizes))
    elif coeffs.partition.sizes != sizes:
        raise InvalidParameterError("coefficient grid does not match module sizes")
    return sizes, coeffs


def boolean_tail_shortcut(
    psi: StructureFunction,
    thresholds: Sequence[int],
    sizes: Sequence[int],
    coeffs: DecompositionCoefficients | None = None,
) -> TailSignatureVector:
    """Tail signature when module ``j`` is ``k_j``-out-of-``n_j``.

    Module ``j`` (working iff at least ``k_j`` of its components work) has a
    0/1 tail, so the organizer itself replaces its multilinear extension:
    module ``j`` is up exactly when ``a_j >= k_j`` of its components are
    among the best ``k``. Defaults to hypergeometric coefficients.
    """
    sizes, coeffs = _threshold_coeffs(thresholds, sizes, coeffs)
    if psi.n != len(sizes) or not psi.is_semicoherent():
        raise InvalidParameterError("organizer must be semicoherent with one input per module")
    n = sum(sizes)
    out = [Fraction(0)] * (n + 1)
    for k in range(n + 1):
        total = Fraction(0)
        for a, c in coeffs.level(k):
            z = 0
            for j, (a_j, k_j) in enumerate(zip(a, thresholds)):
                if a_j >= k_j:
                    z |= 1 << j
            if psi[z]:
                total += c
        out[n - k] = total
    return TailSignatureVector(PROBABILITY, tuple(out))


def parallel_threshold_tail(
    thresholds: Sequence[int],
    sizes: Sequence[int],
    coeffs: DecompositionCoefficients | None = None,
) -> TailSignatureVector:
    """Threshold modules in parallel: total ``c~`` mass of the cells where some module is up."""
    sizes, coeffs = _threshold_coeffs(thresholds, sizes, coeffs)
    n = sum(sizes)
    out = [Fraction(0)] * (n + 1)
    for k in range(n + 1):
        out[n - k] = sum(
            (c for a, c in coeffs.level(k) if any(a_j >= k_j for a_j, k_j in zip(a, thresholds))),
            Fraction(0),
        )
    return TailSignatureVector(PROBABILITY, tuple(out))


# -- redundancy -------------------------------------------------------------


def system_level_system(chi: StructureFunction) -> ModularSystem:
    """Two copies of ``chi`` (components ``0..n-1`` and ``n..2n-1``) in parallel."""
    n = chi.n
    partition = Partition((tuple(range(n)), tuple(range(n, 2 * n))))
    return ModularSystem(partition, (chi, chi), make_parallel(2))


def component_level_system(chi: StructureFunction) -> ModularSystem:
    """``chi`` applied to the parallel pairs ``{i, n + i}``."""
    n = chi.n
    partition = Partition(tuple((i, n + i) for i in range(n)))
    return ModularSystem(partition, tuple(make_parallel(2) for _ in range(n)), chi)


def system_level_redundancy(cum: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Cumulative structural signature of ``max(chi(x), chi(y))`` from that of ``chi``."""
    cum = tuple(Fraction(c) for c in cum)
    n = len(cum) - 1
    out = [Fraction(0)] * (2 * n + 1)
    for k in range(2 * n + 1):
        total = Fraction(0)
        for a in range(max(0, n - k), min(n, 2 * n - k) + 1):
            b = 2 * n - k - a
            total += hypergeometric_weight((n, n), (n - a, n - b)) * cum[a] * cum[b]
        out[2 * n - k] = total
    return tuple(out)


def component_level_redundancy(chi: StructureFunction) -> tuple[Fraction, ...]:
    """Cumulative structural signature of ``chi(max(x_1, y_1), ..., max(x_n, y_n))``."""
    n = chi.n
    chi_d = dual(chi)
    sizes = (2,) * n
    out = [Fraction(0)] * (2 * n + 1)
    for k in range(2 * n + 1):
        total = Fraction(0)
        for a in level_grid(sizes, k):
            z = 0
            for j, a_j in enumerate(a):
                if a_j == 0:
                    z |= 1 << j
            if chi_d[z]:
                total += hypergeometric_weight(sizes, a)
        out[2 * n - k] = total
    return tuple(out)


@dataclass(frozen=True)
class RedundancyReport:
    base: tuple[Fraction, ...]
    system_level: tuple[Fraction, ...]
    component_level: tuple[Fraction, ...]
    system_level_generic: tuple[Fraction, ...]
    component_level_generic: tuple[Fraction, ...]

    @property
    def closed_forms_match(self) -> bool:
        return (
            self.system_level == self.system_level_generic
            and self.component_level == self.component_level_generic
        )

    @property
    def component_level_dominates(self) -> bool:
        """Component-level redundancy is never worse: ``S2_k <= S1_k`` for every k."""
        return all(b <= a for a, b in zip(self.system_level, self.component_level))


def redundancy_report(chi: StructureFunction) -> RedundancyReport:
    """Closed-form redundancy signatures next to the generic 2n-component computation."""
    base = cumulative(structural_tail_signature(chi))
    generic = []
    for system in (system_level_system(chi), component_level_system(chi)):
        generic.append(cumulative(structural_tail_signature(compose(system))))
    return RedundancyReport(
        base=base,
        system_level=system_level_redundancy(base),
        component_level=component_level_redundancy(chi),
        system_level_generic=generic[0],
        component_level_generic=generic[1],
    )


# -- recovering q from signatures ------------------------------------------


def conjunction_system(b: int, partition: Partition) -> ModularSystem:
    """Series connection of the modules ``prod_{k in B_j} y_k``; composes to ``phi_B``.

    Blocks that ``B`` misses get a parallel module, which the organizer ignores.
    """
    locals_ = partition.split(b)
    modules = []
    active = []
    for j, (local, size) in enumerate(zip(locals_, partition.sizes)):
        if local:
            modules.append(conjunction_structure(members(local), size))
            active.append(j)
        else:
            modules.append(make_parallel(size))
    organizer = conjunction_structure(active, partition.r)
    return ModularSystem(partition, tuple(modules), organizer)


def recover_q_via_conjunctions(
    source: OrderDistribution | RelativeQualityFunction, partition: Partition
) -> RelativeQualityFunction:
    """Rebuild ``q`` from tail signatures of the conjunction systems.

    ``q(B)`` is read off as entry ``n - |B|`` of the tail signature of
    ``phi_B``. For an order distribution the tails come from the
    permutation oracle; for a quality function from the level sums.
    """
    n = partition.n
    if source.n != n:
        raise InvalidParameterError("partition and source sizes differ")
    values = [Fraction(1)] * (1 << n)
    for b in range(1, 1 << n):
        phi = compose(conjunction_system(b, partition))
        if isinstance(source, OrderDistribution):
            tail = signature_to_tail(brute_force_signature(phi, source))
        else:
            tail = tail_probability_signature(phi, source)
        values[b] = tail[n - popcount(b)]
    return RelativeQualityFunction(n, tuple(values))


# -- end-to-end check -------------------------------------------------------


@dataclass(frozen=True)
class CompositionReport:
    decomposable: bool
    coefficients: DecompositionCoefficients | None
    counterexample: NotDecomposable | None
    composed: TailSignatureVector | None
    direct: TailSignatureVector

    @property
    def match(self) -> bool | None:
        """``None`` when the product form fails and no equality is claimed."""
        if not self.decomposable:
            return None
        return self.composed == self.direct


def module_tails(
    system: ModularSystem, block_qualities: Sequence[RelativeQualityFunction]
) -> list[TailSignatureVector]:
    return [tail_probability_signature(chi, qj) for chi, qj in zip(system.modules, block_qualities)]


def verify_composition_theorem(system: ModularSystem, dist: OrderDistribution) -> CompositionReport:
    """Compare the composed tail against the direct one under ``dist``."""
    if system.n != dist.n:
        raise InvalidParameterError("system and distribution sizes differ")
    q = q_from_order_distribution(dist)
    block_q = marginals(dist, system.partition)
    direct = tail_probability_signature(compose(system), q)
    verdict = check_decomposable(q, block_q, system.partition)
    if isinstance(verdict, NotDecomposable):
        return CompositionReport(False, None, verdict, None, direct)
    composed = compose_tail(system.organizer, module_tails(system, block_q), verdict)
    return CompositionReport(True, verdict, None, composed, direct)
