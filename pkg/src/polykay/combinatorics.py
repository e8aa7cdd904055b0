"""Integer partitions, multisets, and multiset subdivisions.

Every estimator this package generates is indexed either by integer
partitions or by *subdivisions*.  A subdivision is the multiset analogue of a
set partition: a multiset of non-empty submultisets (blocks) whose union
restores the source multiset.  Distinct set partitions of the labelled
elements can collapse to the same subdivision once labels are erased, so each
subdivision carries the count of labelled set partitions behind it.  Working
with subdivisions and their counts instead of raw set partitions is what
keeps generation loops partition-sized rather than Bell-number-sized.

All objects are immutable values and all functions are pure.  The memoised
tables behind them are append-only, so concurrent readers are safe; worker
processes simply build their own copies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import product
from typing import Hashable, Iterator, Sequence

__all__ = [
    "IntegerPartition",
    "Multiset",
    "Subdivision",
    "enumerate_partitions",
    "d_coefficient",
    "stirling2",
    "enumerate_subdivisions",
    "merge_subdivisions",
    "partition_pairs",
    "set_partitions",
]


# ---------------------------------------------------------------------------
# integer partitions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntegerPartition:
    """A partition of a non-negative integer into weakly decreasing parts.

    The empty partition (of 0) acts as the identity for :meth:`merge`.
    """

    parts: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(p < 1 for p in self.parts):
            raise ValueError("partition parts must be positive integers")
        if any(a < b for a, b in zip(self.parts, self.parts[1:])):
            raise ValueError("partition parts must be weakly decreasing")

    @property
    def total(self) -> int:
        """The partitioned integer."""
        return sum(self.parts)

    @property
    def length(self) -> int:
        """Number of parts."""
        return len(self.parts)

    def multiplicities(self) -> dict[int, int]:
        """Map part value j -> number of parts equal to j."""
        mult: dict[int, int] = {}
        for p in self.parts:
            mult[p] = mult.get(p, 0) + 1
        return mult

    def merge(self, other: "IntegerPartition") -> "IntegerPartition":
        """Partition whose part multiplicities are the componentwise sums."""
        return IntegerPartition(tuple(sorted(self.parts + other.parts, reverse=True)))

    def __str__(self) -> str:
        return "(" + ",".join(str(p) for p in self.parts) + ")"


@lru_cache(maxsize=None)
def enumerate_partitions(i: int) -> tuple[IntegerPartition, ...]:
    """All partitions of ``i`` in reverse-lexicographic order.

    The order starts at the one-part partition ``(i)`` and ends at
    ``(1, 1, ..., 1)``; for i = 0 the single empty partition is returned.
    Negative input is a usage error.
    """
    if i < 0:
        raise ValueError("cannot partition a negative integer")
    if i == 0:
        return (IntegerPartition(()),)
    out: list[IntegerPartition] = []
    parts = [i]
    while True:
        out.append(IntegerPartition(tuple(parts)))
        # decrement the rightmost part > 1, then redistribute the freed units
        k = len(parts) - 1
        while k >= 0 and parts[k] == 1:
            k -= 1
        if k < 0:
            break
        new = parts[k] - 1
        rem = len(parts) - k  # trailing ones plus the unit just removed
        parts = parts[:k] + [new]
        while rem > 0:
            take = min(new, rem)
            parts.append(take)
            rem -= take
    return tuple(out)


def d_coefficient(partition: IntegerPartition) -> int:
    """Number of set partitions of a labelled set whose block sizes realise
    ``partition``.

    For a partition of i with r_j parts equal to j this is
    ``i! / (r_1! r_2! ... (1!)^r_1 (2!)^r_2 ...)``, always an exact integer.
    """
    num = math.factorial(partition.total)
    den = 1
    for j, r in partition.multiplicities().items():
        den *= math.factorial(r) * math.factorial(j) ** r
    return num // den


@lru_cache(maxsize=None)
def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind: partitions of an n-set into k blocks.

    Returns 0 when k > n (and for k = 0 with n > 0).
    """
    if n < 0 or k < 0:
        raise ValueError("stirling2 requires non-negative arguments")
    if n == 0 and k == 0:
        return 1
    if n == 0 or k == 0 or k > n:
        return 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


# ---------------------------------------------------------------------------
# multisets
# ---------------------------------------------------------------------------


def _identifier_key(ident):
    """Sort key usable for plain identifiers and for nested multisets."""
    return ident.sort_key() if isinstance(ident, Multiset) else ident


@dataclass(frozen=True)
class Multiset:
    """An immutable multiset of hashable identifiers.

    ``items`` holds (identifier, count) pairs with counts >= 1, sorted by
    identifier so that equal multisets compare and hash equal.  Identifiers
    within one multiset must be mutually comparable; nested multisets (used
    for blocks of merged subdivisions) compare through :meth:`sort_key`.
    """

    items: tuple[tuple[Hashable, int], ...]

    def __post_init__(self) -> None:
        keys = [_identifier_key(ident) for ident, count in self.items]
        if any(count < 1 for _, count in self.items):
            raise ValueError("multiset counts must be >= 1")
        if any(not a < b for a, b in zip(keys, keys[1:])):
            raise ValueError("multiset items must be sorted with distinct identifiers")

    @classmethod
    def from_pairs(cls, pairs) -> "Multiset":
        acc: dict = {}
        for ident, count in pairs:
            acc[ident] = acc.get(ident, 0) + count
        items = tuple(
            (ident, count)
            for ident, count in sorted(acc.items(), key=lambda kv: _identifier_key(kv[0]))
            if count
        )
        return cls(items)

    @classmethod
    def from_iterable(cls, iterable) -> "Multiset":
        return cls.from_pairs((ident, 1) for ident in iterable)

    @classmethod
    def from_exponents(cls, exponents: Sequence[int]) -> "Multiset":
        """Multiset over variable positions 0..d-1 with the given counts."""
        if any(e < 0 for e in exponents):
            raise ValueError("exponents must be non-negative")
        return cls(tuple((j, e) for j, e in enumerate(exponents) if e > 0))

    @cached_property
    def length(self) -> int:
        return sum(count for _, count in self.items)

    @property
    def support(self) -> tuple:
        return tuple(ident for ident, _ in self.items)

    def counts(self) -> tuple[int, ...]:
        return tuple(count for _, count in self.items)

    def multiplicity(self, ident) -> int:
        for i, count in self.items:
            if i == ident:
                return count
        return 0

    def is_empty(self) -> bool:
        return not self.items

    def add(self, other: "Multiset") -> "Multiset":
        """Disjoint union: multiplicities add."""
        return Multiset.from_pairs(self.items + other.items)

    def to_exponents(self, dimension: int) -> tuple[int, ...]:
        """Count vector over variable positions 0..dimension-1."""
        vec = [0] * dimension
        for ident, count in self.items:
            if not isinstance(ident, int) or ident >= dimension:
                raise ValueError(f"identifier {ident!r} is not a variable position < {dimension}")
            vec[ident] = count
        return tuple(vec)

    @cached_property
    def _sort_key(self):
        return (self.length, tuple((_identifier_key(i), c) for i, c in self.items))

    def sort_key(self):
        """Canonical (length, content) key; shorter blocks sort first."""
        return self._sort_key

    def __str__(self) -> str:
        inner = ", ".join(f"{i}:{c}" for i, c in self.items)
        return "{" + inner + "}"


# ---------------------------------------------------------------------------
# subdivisions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Subdivision:
    """A multiset of blocks covering ``source``, with its multiplicity.

    ``count`` is the number of set partitions of the labelled elements of the
    source that collapse onto these blocks (for merged subdivisions it is the
    merged multiplicity produced by :func:`merge_subdivisions`).
    """

    source: Multiset
    blocks: tuple[tuple[Multiset, int], ...]
    count: int

    def __post_init__(self) -> None:
        total: dict = {}
        for block, mult in self.blocks:
            if mult < 1 or block.is_empty():
                raise ValueError("blocks must be non-empty with multiplicity >= 1")
            for ident, c in block.items:
                total[ident] = total.get(ident, 0) + c * mult
        if total != {i: c for i, c in self.source.items}:
            raise ValueError("blocks do not reconstruct the source multiset")
        keys = [b.sort_key() for b, _ in self.blocks]
        if any(not a < b for a, b in zip(keys, keys[1:])):
            raise ValueError("blocks must be sorted canonically and distinct")
        if self.count < 1:
            raise ValueError("subdivision multiplicity must be >= 1")

    @property
    def size(self) -> int:
        """Number of blocks, counted with multiplicity."""
        return sum(mult for _, mult in self.blocks)

    def block_multiset(self) -> Multiset:
        """The blocks themselves as a multiset (identifiers are multisets)."""
        return Multiset(self.blocks)

    def size_profile(self) -> dict[int, int]:
        """Map block cardinality j -> number of blocks of that cardinality."""
        prof: dict[int, int] = {}
        for block, mult in self.blocks:
            j = block.length
            prof[j] = prof.get(j, 0) + mult
        return prof

    def __str__(self) -> str:
        inner = ", ".join(f"{b}^{g}" if g > 1 else str(b) for b, g in self.blocks)
        return "[" + inner + f"] x{self.count}"


@lru_cache(maxsize=None)
def _block_candidates(counts: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    """All non-zero vectors 0 <= b <= counts, ascending lexicographically."""
    return tuple(v for v in product(*(range(c + 1) for c in counts)) if any(v))


@lru_cache(maxsize=None)
def _shapes_bounded(
    remaining: tuple[int, ...], bound: tuple[int, ...]
) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """Multiset partitions of the count vector ``remaining``.

    Each shape is a weakly decreasing (lexicographically) tuple of block
    vectors, the first no larger than ``bound``; this makes every multiset
    partition appear exactly once.
    """
    if not any(remaining):
        return ((),)
    shapes = []
    for b in _block_candidates(remaining):
        if b > bound:
            break  # candidates are ascending
        rest = tuple(r - x for r, x in zip(remaining, b))
        for tail in _shapes_bounded(rest, b):
            shapes.append((b,) + tail)
    return tuple(shapes)


def _shape_multiplicity(counts: tuple[int, ...], shape) -> int:
    """Number of set partitions of the labelled elements collapsing to ``shape``.

    Distributing the labelled copies over an ordered list of block instances
    is a product of multinomials; dividing by the permutations of identical
    block instances leaves the set-partition count.
    """
    num = 1
    for c in counts:
        num *= math.factorial(c)
    den = 1
    grouped: dict[tuple[int, ...], int] = {}
    for vec in shape:
        grouped[vec] = grouped.get(vec, 0) + 1
    for vec, g in grouped.items():
        den *= math.factorial(g)
        for b in vec:
            den *= math.factorial(b) ** g
    return num // den


@lru_cache(maxsize=None)
def _interned_block(support: tuple, vec: tuple[int, ...]) -> Multiset:
    return Multiset(tuple((support[j], b) for j, b in enumerate(vec) if b))


@lru_cache(maxsize=None)
def enumerate_subdivisions(m: Multiset) -> tuple[Subdivision, ...]:
    """All distinct subdivisions of ``m``, each with its multiplicity.

    The multiplicities sum to the Bell number of ``m.length``.  Ordering is
    deterministic, finest subdivisions first.  The empty multiset yields the
    single empty subdivision (the identity for merging).
    """
    support = m.support
    counts = m.counts()
    out = []
    for shape in _shapes_bounded(counts, counts):
        grouped: dict[tuple[int, ...], int] = {}
        for vec in shape:
            grouped[vec] = grouped.get(vec, 0) + 1
        blocks = tuple(
            sorted(
                ((_interned_block(support, vec), g) for vec, g in grouped.items()),
                key=lambda bg: bg[0].sort_key(),
            )
        )
        out.append(Subdivision(m, blocks, _shape_multiplicity(counts, shape)))
    return tuple(out)


def merge_subdivisions(a: Subdivision, b: Subdivision) -> Subdivision:
    """Disjoint union of two subdivisions with merged multiplicity data.

    The merged multiplicity is ``count(a) * count(b)`` times the product over
    distinct block contents of the number of ways to choose which merged
    block instances came from ``a`` (binomial in the instance counts).
    Merging with the empty subdivision returns the other operand unchanged.
    """
    if a.source.is_empty():
        return b
    if b.source.is_empty():
        return a
    source = a.source.add(b.source)
    from_a: dict[Multiset, int] = {block: g for block, g in a.blocks}
    merged: dict[Multiset, int] = dict(from_a)
    for block, g in b.blocks:
        merged[block] = merged.get(block, 0) + g
    assignments = 1
    for block, g in merged.items():
        assignments *= math.comb(g, from_a.get(block, 0))
    blocks = tuple(sorted(merged.items(), key=lambda bg: bg[0].sort_key()))
    return Subdivision(source, blocks, a.count * b.count * assignments)


def partition_pairs(
    r: int, t: int
) -> tuple[tuple[IntegerPartition, IntegerPartition, IntegerPartition], ...]:
    """All pairs (partition of r, partition of t) with their merge.

    The merge sums part multiplicities; distinct pairs may share a merge,
    which is exactly why product coefficients are accumulated pairwise.
    """
    return tuple(
        (lam, eta, lam.merge(eta))
        for lam in enumerate_partitions(r)
        for eta in enumerate_partitions(t)
    )


def set_partitions(n: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    """All set partitions of range(n), blocks ordered by least element.

    Brute-force companion to :func:`enumerate_subdivisions`: collapsing its
    output and counting duplicates must reproduce the subdivision
    multiplicities.  Only intended for small n.
    """
    if n == 0:
        yield ()
        return

    def extend(i: int, blocks: list[list[int]]):
        if i == n:
            yield tuple(tuple(b) for b in blocks)
            return
        for b in blocks:
            b.append(i)
            yield from extend(i + 1, blocks)
            b.pop()
        blocks.append([i])
        yield from extend(i + 1, blocks)
        blocks.pop()

    yield from extend(1, [[0]])
