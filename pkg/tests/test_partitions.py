import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from schurlab.partitions import (
    Partition,
    SchurParams,
    count_congruence_classes,
    count_distinct_congruent,
    count_distinct_parts,
    count_gap_partitions,
    count_schur,
    count_schur_by_parts,
    enumerate_schur,
    is_schur_admissible,
    table,
)

VALID = [SchurParams(d, r) for d in range(3, 9) for r in range(1, d) if 2 * r < d]


def brute_partitions(n, max_part=None):
    """Every partition of n as a weakly decreasing tuple; used only for small n."""
    max_part = n if max_part is None else max_part
    if n == 0:
        yield ()
        return
    for lam in range(min(n, max_part), 0, -1):
        for rest in brute_partitions(n - lam, lam):
            yield (lam,) + rest


# -- examples -------------------------------------------------------------------------


def test_admissibility_examples():
    p31 = SchurParams(3, 1)
    assert is_schur_admissible([], SchurParams(7, 3), 5)
    assert is_schur_admissible([4, 1], p31)
    assert not is_schur_admissible([6, 3], p31)
    assert is_schur_admissible(Partition((7, 3)), p31)
    assert not is_schur_admissible([4, 1], p31, min_exclusive=3)


def test_count_schur_examples():
    p31 = SchurParams(3, 1)
    assert count_schur(p31, 0, 6) == 2
    assert count_schur(p31, 3, 11) == 2
    assert sorted(enumerate_schur(p31, 3, 11)) == [(7, 4), (11,)]
    for p in VALID[:4]:
        assert count_schur(p, 0, 0) == count_schur(p, p.d, 0) == 1


def test_by_parts_examples():
    p31 = SchurParams(3, 1)
    assert count_schur_by_parts(p31, 0, 6, 1) == 1
    assert count_schur_by_parts(p31, 0, 6, 2) == 1
    assert count_schur_by_parts(SchurParams(5, 2), 0, 0, 0) == 1
    assert count_schur_by_parts(p31, 0, 5, 0) == 0


def test_distinct_congruent_examples():
    p31 = SchurParams(3, 1)
    assert count_distinct_congruent(p31, 5) == 2
    assert count_distinct_congruent(p31, 6) == 2
    assert count_distinct_congruent(SchurParams(7, 2), 0) == 1


def test_congruence_class_examples():
    assert count_congruence_classes(5, {1, 4}, 4) == 2
    assert count_congruence_classes(5, {2, 3}, 4) == 1
    assert count_congruence_classes(11, {3}, 0) == 1
    with pytest.raises(ValueError, match="non-empty"):
        count_congruence_classes(5, set(), 3)
    with pytest.raises(ValueError, match="residue 0"):
        count_congruence_classes(5, {5}, 3)


def test_gap_examples():
    assert count_gap_partitions(2, 1, 4) == 2
    assert count_gap_partitions(2, 2, 4) == 1
    assert count_gap_partitions(6, 3, 0) == 1


def test_params_validation():
    for bad in [(2, 1), (4, 2), (5, 3), (5, 0), (3, -1)]:
        with pytest.raises(ValueError):
            SchurParams(*bad)
    with pytest.raises(TypeError):
        SchurParams(3.0, 1)
    # non-coprime pairs are accepted as given
    assert SchurParams(8, 2).residues == frozenset({0, 2, 6})


def test_partition_validation():
    with pytest.raises(ValueError):
        Partition((1, 2))
    with pytest.raises(ValueError):
        Partition((3, 0))
    assert Partition((5, 5, 1)).weight == 11


# -- classical identities ------------------------------------------------------------------


def test_rogers_ramanujan():
    assert table(lambda n: count_gap_partitions(2, 1, n), 80) == table(
        lambda n: count_congruence_classes(5, {1, 4}, n), 80
    )
    assert table(lambda n: count_gap_partitions(2, 2, n), 80) == table(
        lambda n: count_congruence_classes(5, {2, 3}, n), 80
    )


@pytest.mark.parametrize("p", VALID, ids=str)
def test_schur_gleissberg(p):
    assert table(lambda n: count_schur(p, 0, n), 60) == table(lambda n: count_distinct_congruent(p, n), 60)


def test_mod6_equivalence_and_euler():
    p31 = SchurParams(3, 1)
    assert table(lambda n: count_distinct_congruent(p31, n), 80) == table(
        lambda n: count_congruence_classes(6, {1, 5}, n), 80
    )
    assert table(count_distinct_parts, 80) == table(lambda n: count_congruence_classes(2, {1}, n), 80)


@pytest.mark.parametrize("p", VALID, ids=str)
def test_refinement_and_small_C(p):
    for n in range(60):
        c, b = count_schur(p, p.d, n), count_schur(p, 0, n)
        assert c <= b
        uses_small = any(min(x) <= p.d for x in enumerate_schur(p, 0, n) if x)
        assert (c == b) == (not uses_small)
    assert all(count_schur(p, p.d, n) == 0 for n in range(1, p.d + 1))


# -- enumeration against brute force --------------------------------------------------------


@given(st.sampled_from(VALID), st.integers(0, 6), st.integers(0, 22))
def test_enumeration_matches_filter(p, j, n):
    brute = {x for x in brute_partitions(n) if is_schur_admissible(x, p, j)}
    listed = list(enumerate_schur(p, j, n))
    assert len(listed) == len(set(listed))
    assert set(listed) == brute
    assert count_schur(p, j, n) == len(brute)


@given(st.sampled_from(VALID), st.integers(0, 25))
def test_by_parts_sums_to_total(p, n):
    assert sum(count_schur_by_parts(p, 0, n, m) for m in range(n + 1)) == count_schur(p, 0, n)


@given(st.integers(1, 9), st.integers(1, 4), st.integers(0, 24))
def test_gap_counter_matches_filter(gap, j, n):
    brute = [x for x in brute_partitions(n) if all(x[i] - x[i + 1] >= gap for i in range(len(x) - 1))]
    brute = [x for x in brute if not x or x[-1] >= j]
    assert count_gap_partitions(gap, j, n) == len(brute)


def test_distinct_congruent_by_subsets():
    # independent route: sum over subsets of the admissible parts
    p = SchurParams(7, 3)
    parts = [k for k in range(1, 31) if k % 7 in (3, 4)]
    counts = [0] * 31
    for size in range(len(parts) + 1):
        for combo in itertools.combinations(parts, size):
            w = sum(combo)
            if w <= 30:
                counts[w] += 1
    assert counts == table(lambda n: count_distinct_congruent(p, n), 30)
