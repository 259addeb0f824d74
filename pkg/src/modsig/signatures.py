"""Structural and probability signatures in plain, tail and cumulative form.

For a semicoherent structure ``phi`` and quality function ``q`` the tail
probability signature is the weighted level sum

    tail[k] = sum over |A| = n - k of q(A) * phi(A),

and the signature is its sequence of differences. With the symmetric
quality function ``q(A) = 1 / C(n, |A|)`` both reduce to their structural
counterparts.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence

from ._combinatorics import masks_of_size
from .errors import DomainError, InvalidParameterError
from .quality import RelativeQualityFunction
from .structure import StructureFunction

STRUCTURAL = "structural"
PROBABILITY = "probability"


def _check_kind(kind: str) -> None:
    if kind not in (STRUCTURAL, PROBABILITY):
        raise InvalidParameterError(f"unknown signature kind {kind!r}")


@dataclass(frozen=True)
class SignatureVector:
    """``(p_1, ..., p_n)``: ``p_k`` is the probability that the k-th failure kills the system."""

    kind: str
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        _check_kind(self.kind)
        entries = tuple(Fraction(e) for e in self.entries)
        object.__setattr__(self, "entries", entries)
        if not entries:
            raise InvalidParameterError("a signature needs at least one entry")
        if any(e < 0 for e in entries) or sum(entries) != 1:
            raise InvalidParameterError(f"signature {entries} is not a probability vector")

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, k: int) -> Fraction:
        """1-based access, ``sig[k] == p_k``."""
        if not 1 <= k <= self.n:
            raise IndexError(k)
        return self.entries[k - 1]

    def __iter__(self):
        return iter(self.entries)


@dataclass(frozen=True)
class TailSignatureVector:
    """``(tail_0, ..., tail_n)`` with ``tail_k`` the probability of surviving the first k failures."""

    kind: str
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        _check_kind(self.kind)
        entries = tuple(Fraction(e) for e in self.entries)
        object.__setattr__(self, "entries", entries)
        if len(entries) < 2:
            raise InvalidParameterError("a tail signature has n + 1 >= 2 entries")
        if entries[0] != 1 or entries[-1] != 0:
            raise InvalidParameterError("a tail signature starts at 1 and ends at 0")
        if any(b > a for a, b in zip(entries, entries[1:])):
            raise InvalidParameterError(f"tail signature {entries} is not nonincreasing")

    @property
    def n(self) -> int:
        return len(self.entries) - 1

    def __getitem__(self, k: int) -> Fraction:
        return self.entries[k]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)


def _require_semicoherent(phi: StructureFunction) -> None:
    if not phi.is_semicoherent():
        raise DomainError("signatures are defined for semicoherent structures only")


def _level_tail(phi: StructureFunction, q: RelativeQualityFunction) -> list[Fraction]:
    n = phi.n
    bits = phi.bitstring
    out = []
    for k in range(n + 1):
        total = Fraction(0)
        for m in masks_of_size(n, n - k):
            if bits[m] == "1":
                total += q[m]
        out.append(total)
    return out


def _structural_tail(phi: StructureFunction) -> list[Fraction]:
    n = phi.n
    return [Fraction(phi.count_true(n - k), comb(n, n - k)) for k in range(n + 1)]


def _differences(tail: Sequence[Fraction]) -> tuple[Fraction, ...]:
    return tuple(tail[k - 1] - tail[k] for k in range(1, len(tail)))


def structural_signature(phi: StructureFunction) -> SignatureVector:
    """``s_k`` from the counts of working sets at consecutive levels."""
    _require_semicoherent(phi)
    return SignatureVector(STRUCTURAL, _differences(_structural_tail(phi)))


def structural_tail_signature(phi: StructureFunction) -> TailSignatureVector:
    _require_semicoherent(phi)
    return TailSignatureVector(STRUCTURAL, tuple(_structural_tail(phi)))


def _check_sizes(phi: StructureFunction, q: RelativeQualityFunction) -> None:
    if phi.n != q.n:
        raise InvalidParameterError(f"structure has {phi.n} components, quality function {q.n}")


def probability_signature(phi: StructureFunction, q: RelativeQualityFunction) -> SignatureVector:
    _check_sizes(phi, q)
    _require_semicoherent(phi)
    return SignatureVector(PROBABILITY, _differences(_level_tail(phi, q)))


def tail_probability_signature(
    phi: StructureFunction, q: RelativeQualityFunction
) -> TailSignatureVector:
    _check_sizes(phi, q)
    _require_semicoherent(phi)
    return TailSignatureVector(PROBABILITY, tuple(_level_tail(phi, q)))


def tail_to_signature(tail: TailSignatureVector) -> SignatureVector:
    return SignatureVector(tail.kind, _differences(tail.entries))


def signature_to_tail(sig: SignatureVector) -> TailSignatureVector:
    entries = list(sig.entries)
    tail = [Fraction(0)] * (len(entries) + 1)
    for k in range(len(entries) - 1, -1, -1):
        tail[k] = tail[k + 1] + entries[k]
    return TailSignatureVector(sig.kind, tuple(tail))


def cumulative(tail: TailSignatureVector) -> tuple[Fraction, ...]:
    """``P_k = 1 - tail_k``: probability that the system is dead by the k-th failure."""
    return tuple(1 - t for t in tail.entries)


def tail_from_cumulative(cum: Sequence[Fraction], kind: str = PROBABILITY) -> TailSignatureVector:
    return TailSignatureVector(kind, tuple(1 - Fraction(c) for c in cum))
