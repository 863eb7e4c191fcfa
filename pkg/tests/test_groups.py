from itertools import permutations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polyzero.errors import IncompatibleStatistic, InvalidRank
from polyzero.groups import (
    SignedPermutation,
    batch_statistic,
    count_statistic,
    enumerate_group,
    group_order,
    inversions_merge,
)


@pytest.mark.parametrize("kind", ["A", "B", "D"])
def test_identity_has_no_inversions(kind):
    e = SignedPermutation.identity(kind, 4)
    assert count_statistic(e, "inversions") == 0
    assert count_statistic(e, "descents") == 0


def test_hand_examples():
    assert count_statistic(SignedPermutation((2, 1), "A"), "inversions") == 1
    assert count_statistic(SignedPermutation((-2, 1), "B"), "inversions") == 2


def test_group_orders_and_enumeration():
    assert group_order("A", 3) == 24
    assert group_order("B", 3) == 48
    assert group_order("D", 3) == 24
    for kind, N in [("A", 3), ("B", 3), ("D", 4)]:
        elems = enumerate_group(kind, N)
        assert len(elems) == group_order(kind, N)
        assert len({tuple(r) for r in elems}) == len(elems)
    assert ((enumerate_group("D", 4) < 0).sum(axis=1) % 2 == 0).all()
    with pytest.raises(InvalidRank):
        group_order("D", 1)


def test_signed_permutation_validation():
    with pytest.raises(ValueError):
        SignedPermutation((1, 1), "A")
    with pytest.raises(ValueError):
        SignedPermutation((-1, 2), "D")
    with pytest.raises(IncompatibleStatistic):
        count_statistic(SignedPermutation((-1, 2), "B"), "alternating_descents")


def test_alternating_descents_s3():
    counts = [count_statistic(SignedPermutation(p, "A"), "alternating_descents") for p in permutations((1, 2, 3))]
    assert sorted(counts) == [0, 0, 1, 1, 2, 2]


@given(st.permutations(list(range(1, 9))))
def test_merge_count_matches_pairs(perm):
    brute = sum(1 for i in range(8) for j in range(i + 1, 8) if perm[i] > perm[j])
    assert inversions_merge(perm) == brute


@pytest.mark.parametrize("kind,N", [("A", 4), ("B", 4), ("D", 4)])
@pytest.mark.parametrize("stat", ["inversions", "descents"])
def test_batch_matches_scalar(kind, N, stat):
    elems = enumerate_group(kind, N)
    batch = batch_statistic(elems, stat, kind)
    scalar = np.array([count_statistic(SignedPermutation(tuple(r), kind), stat) for r in elems])
    assert (batch == scalar).all()
