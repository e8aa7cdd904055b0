from itertools import combinations

import pytest

from polykay.combinatorics import (
    IntegerPartition,
    Multiset,
    d_coefficient,
    enumerate_partitions,
    enumerate_subdivisions,
    merge_subdivisions,
    partition_pairs,
    set_partitions,
    stirling2,
)


def partition_count(n):
    """Independent partition function via Euler's pentagonal recurrence."""
    p = [1] + [0] * n
    for m in range(1, n + 1):
        total, k = 0, 1
        while True:
            g1 = k * (3 * k - 1) // 2
            g2 = k * (3 * k + 1) // 2
            if g1 > m and g2 > m:
                break
            sign = -1 if k % 2 == 0 else 1
            if g1 <= m:
                total += sign * p[m - g1]
            if g2 <= m:
                total += sign * p[m - g2]
            k += 1
        p[m] = total
    return p[n]


def bell_number(n):
    """Independent Bell numbers via the Bell triangle."""
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
    return row[0]


def brute_subdivision_counts(m: Multiset):
    """Collapse every labelled set partition and count duplicates."""
    labels = [ident for ident, c in m.items for _ in range(c)]
    counts = {}
    for sp in set_partitions(len(labels)):
        blocks = Multiset.from_iterable(
            Multiset.from_iterable(labels[i] for i in block) for block in sp
        )
        counts[blocks] = counts.get(blocks, 0) + 1
    return counts


# ---------------------------------------------------------------------------
# partitions


def test_single_partition_of_one():
    assert enumerate_partitions(1) == (IntegerPartition((1,)),)


def test_partitions_of_four_in_reverse_lex_order():
    got = [p.parts for p in enumerate_partitions(4)]
    assert got == [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]


def test_partitions_of_seven_has_fifteen_entries():
    assert len(enumerate_partitions(7)) == 15


def test_partition_counts_match_pentagonal_recurrence():
    for i in range(11):
        assert len(enumerate_partitions(i)) == partition_count(i)


def test_partitions_of_zero_and_negative():
    assert enumerate_partitions(0) == (IntegerPartition(()),)
    with pytest.raises(ValueError):
        enumerate_partitions(-1)


def test_partitions_are_unique_and_sum_correctly():
    for i in range(1, 11):
        seen = set()
        for lam in enumerate_partitions(i):
            assert lam.total == i
            assert lam.length == len(lam.parts)
            assert lam.parts not in seen
            seen.add(lam.parts)


def test_invalid_partitions_rejected():
    with pytest.raises(ValueError):
        IntegerPartition((1, 2))
    with pytest.raises(ValueError):
        IntegerPartition((2, 0))


# ---------------------------------------------------------------------------
# d coefficient and stirling numbers


def test_d_coefficient_single_part_and_all_ones():
    for i in range(1, 9):
        assert d_coefficient(IntegerPartition((i,))) == 1
        assert d_coefficient(IntegerPartition((1,) * i)) == 1


def test_d_coefficient_2_1_1():
    assert d_coefficient(IntegerPartition((2, 1, 1))) == 6


def test_d_coefficient_counts_set_partitions_by_type():
    # collapse set partitions of a plain set by block-size type
    for n in range(1, 8):
        by_type: dict[tuple[int, ...], int] = {}
        for sp in set_partitions(n):
            sizes = tuple(sorted((len(b) for b in sp), reverse=True))
            by_type[sizes] = by_type.get(sizes, 0) + 1
        for lam in enumerate_partitions(n):
            assert d_coefficient(lam) == by_type[lam.parts]


def test_stirling_one_block():
    for n in range(1, 10):
        assert stirling2(n, 1) == 1


def test_stirling_small_values():
    assert stirling2(3, 2) == 3
    assert stirling2(4, 2) == 7
    assert stirling2(0, 0) == 1


def test_stirling_k_above_n_is_zero():
    assert stirling2(3, 5) == 0


def test_stirling_row_sums_are_bell_numbers():
    for n in range(9):
        assert sum(stirling2(n, k) for k in range(n + 1)) == bell_number(n)


# ---------------------------------------------------------------------------
# multisets


def test_multiset_canonical_and_equal():
    a = Multiset.from_pairs([("b", 1), ("a", 2)])
    b = Multiset.from_iterable(["a", "b", "a"])
    assert a == b
    assert a.length == 3
    assert a.support == ("a", "b")


def test_multiset_from_exponents_roundtrip():
    m = Multiset.from_exponents((2, 0, 1))
    assert m.support == (0, 2)
    assert m.to_exponents(3) == (2, 0, 1)


def test_multiset_rejects_bad_counts():
    with pytest.raises(ValueError):
        Multiset((("a", 0),))


# ---------------------------------------------------------------------------
# subdivisions


def test_singleton_multiset_has_one_subdivision():
    (sub,) = enumerate_subdivisions(Multiset.from_iterable(["m1"]))
    assert sub.count == 1
    assert sub.size == 1


def test_subdivisions_of_aab():
    m = Multiset.from_pairs([("m1", 2), ("m2", 1)])
    subs = enumerate_subdivisions(m)
    assert len(subs) == 4
    by_blocks = {s.block_multiset(): s.count for s in subs}
    split = Multiset.from_iterable(
        [Multiset.from_iterable(["m1"]), Multiset.from_iterable(["m1", "m2"])]
    )
    assert by_blocks[split] == 2
    assert sum(by_blocks.values()) == bell_number(3)


def test_five_element_multiset_contains_named_subdivision():
    m = Multiset.from_pairs([("a", 2), ("c", 1), ("d", 2)])
    wanted = Multiset.from_iterable(
        [
            Multiset.from_iterable(["a", "c"]),
            Multiset.from_iterable(["a"]),
            Multiset.from_pairs([("d", 2)]),
        ]
    )
    assert wanted in {s.block_multiset() for s in enumerate_subdivisions(m)}


@pytest.mark.parametrize(
    "counts",
    [(1,), (2,), (3,), (2, 1), (2, 2), (3, 2), (1, 1, 1), (2, 2, 1), (4, 2), (2, 2, 2)],
)
def test_subdivision_counts_match_brute_force(counts):
    m = Multiset(tuple((f"v{i}", c) for i, c in enumerate(counts)))
    fast = {s.block_multiset(): s.count for s in enumerate_subdivisions(m)}
    assert fast == brute_subdivision_counts(m)


def test_multiplicities_sum_to_bell_number():
    for counts in [(1,), (3,), (2, 2), (3, 3), (2, 2, 2), (1, 1, 1, 1)]:
        m = Multiset(tuple((i, c) for i, c in enumerate(counts)))
        assert sum(s.count for s in enumerate_subdivisions(m)) == bell_number(m.length)


def test_all_distinct_elements_give_plain_set_partitions():
    for n in range(1, 7):
        m = Multiset.from_iterable(range(n))
        subs = enumerate_subdivisions(m)
        assert len(subs) == bell_number(n)
        assert all(s.count == 1 for s in subs)


def test_single_symbol_subdivisions_are_partitions_with_d_multiplicity():
    for i in range(1, 7):
        m = Multiset.from_pairs([("a", i)])
        subs = enumerate_subdivisions(m)
        assert len(subs) == len(enumerate_partitions(i))
        for s in subs:
            parts = sorted(
                (block.length for block, g in s.blocks for _ in range(g)), reverse=True
            )
            assert s.count == d_coefficient(IntegerPartition(tuple(parts)))


# ---------------------------------------------------------------------------
# merging


def _only_subdivision(m):
    (sub,) = enumerate_subdivisions(m)
    return sub


def test_merge_two_singletons():
    t = _only_subdivision(Multiset.from_iterable(["m1"]))
    merged = merge_subdivisions(t, t)
    assert merged.size == 2
    assert merged.count == 2  # two ways to assign the identical block instances


def test_merge_with_empty_is_identity():
    empty = _only_subdivision(Multiset(()))
    m = Multiset.from_pairs([("m1", 2), ("m2", 1)])
    for sub in enumerate_subdivisions(m):
        assert merge_subdivisions(sub, empty) == sub
        assert merge_subdivisions(empty, sub) == sub


def test_merge_pair_block_with_singleton():
    t = Multiset.from_iterable(["m1", "m2"])
    pair_block = next(
        s for s in enumerate_subdivisions(t) if s.size == 1
    )
    single = _only_subdivision(Multiset.from_iterable(["m1"]))
    merged = merge_subdivisions(pair_block, single)
    assert merged.size == 2
    assert merged.count == 1


def test_merge_commutative_and_associative():
    a = enumerate_subdivisions(Multiset.from_pairs([("m1", 2)]))
    b = enumerate_subdivisions(Multiset.from_pairs([("m1", 1), ("m2", 1)]))
    c = enumerate_subdivisions(Multiset.from_pairs([("m2", 2)]))
    for sa in a:
        for sb in b:
            assert merge_subdivisions(sa, sb) == merge_subdivisions(sb, sa)
            for sc in c:
                left = merge_subdivisions(merge_subdivisions(sa, sb), sc)
                right = merge_subdivisions(sa, merge_subdivisions(sb, sc))
                assert left == right


def test_merge_assignment_factor_against_instance_enumeration():
    # independently count the ways to colour merged block instances
    cases = [
        (Multiset.from_pairs([("m1", 2)]), Multiset.from_pairs([("m1", 1)])),
        (Multiset.from_pairs([("m1", 2), ("m2", 1)]), Multiset.from_pairs([("m1", 2)])),
        (Multiset.from_pairs([("m1", 1), ("m2", 1)]), Multiset.from_pairs([("m2", 2)])),
    ]
    for t, l in cases:
        for sa in enumerate_subdivisions(t):
            for sb in enumerate_subdivisions(l):
                merged = merge_subdivisions(sa, sb)
                ga = {block: g for block, g in sa.blocks}
                colourings = 1
                for block, g in merged.blocks:
                    a_count = ga.get(block, 0)
                    colourings *= len(list(combinations(range(g), a_count)))
                assert merged.count == sa.count * sb.count * colourings


# ---------------------------------------------------------------------------
# partition pairs


def test_partition_pairs_trivial():
    pairs = partition_pairs(1, 1)
    assert len(pairs) == 1
    lam, eta, merged = pairs[0]
    assert merged.parts == (1, 1)


def test_partition_pairs_three_two_collision():
    pairs = partition_pairs(3, 2)
    assert len(pairs) == 6
    target = (2, 1, 1, 1)
    colliders = [
        (lam.parts, eta.parts) for lam, eta, merged in pairs if merged.parts == target
    ]
    assert sorted(colliders) == [((1, 1, 1), (2,)), ((2, 1), (1, 1))]


def test_partition_pairs_count_is_product():
    assert len(partition_pairs(2, 2)) == 4
    for r, t in [(3, 4), (5, 2)]:
        assert len(partition_pairs(r, t)) == partition_count(r) * partition_count(t)
