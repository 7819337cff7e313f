import numpy as np
import pytest

from hypothesis import given, settings, strategies as st

from poscone import TruncatedPositiveOperator
from poscone import supportDigraph, rtCriterion, hasDisjointColumnSupports
from . import cyclicPermutation, backwardShift, strictUpperTriangular


def _bruteForceIrreducible(pattern: np.ndarray) -> bool:
    """Every i != j joined by some power of the 0/1 pattern"""
    n = pattern.shape[0]
    reach = np.zeros((n, n), dtype=bool)
    power = np.eye(n, dtype=int)
    for _ in range(n):
        power = np.minimum(power @ pattern, 1)
        reach |= power.astype(bool)
    off_diagonal = ~np.eye(n, dtype=bool)
    return bool(np.all(reach[off_diagonal]))


def test_support_digraph():
    graph = supportDigraph(backwardShift(3))
    assert graph.arcs == frozenset({(1, 0), (2, 1)})
    assert graph.successors(2) == [1]
    assert graph.reachable(2) == [0, 1, 2]
    assert graph.reachable(0) == [0]
    assert graph.to_dict()["arcs"] == [[1, 0], [2, 1]]


def test_cyclic_permutation_irreducible():
    report = rtCriterion(cyclicPermutation(4))

    assert report.irreducible
    assert report.failing_pair is None
    assert report.invariant_ideal_support is None
    for (i, j), n in report.witness_powers.items():
        assert n == (j - i) % 4

    assert report.to_dict()["witness_powers"]["0,3"] == 3


def test_backward_shift_reducible():
    report = rtCriterion(backwardShift(4))

    assert not report.irreducible
    assert report.failing_pair == (0, 1)
    assert report.invariant_ideal_support == [0]
    assert report.to_dict()["truncation_dim"] == 4


@pytest.mark.parametrize(
    "fixture, T, exp_irreducible, exp_support",
    [
        ("identity",     TruncatedPositiveOperator.identity(3), False, [0]),
        ("zero",         TruncatedPositiveOperator.zeros(2),    False, [0]),
        ("strict upper", strictUpperTriangular(4),              False, [0]),
        ("dim 1",        TruncatedPositiveOperator([[0.0]]),    True,  None),
        ("positive",     TruncatedPositiveOperator(np.full((3, 3), 0.1)), True, None),
    ]
)
def test_rt_criterion(fixture: str, T: TruncatedPositiveOperator, exp_irreducible: bool, exp_support):
    report = rtCriterion(T)
    assert report.irreducible == exp_irreducible
    assert report.invariant_ideal_support == exp_support


def test_invariant_ideal_is_invariant():
    # two blocks joined one way only: 0,1 -> 2,3
    entries = np.zeros((4, 4))
    entries[1, 0] = entries[0, 1] = 0.5
    entries[3, 2] = entries[2, 3] = 0.5
    entries[2, 0] = 0.5
    report = rtCriterion(TruncatedPositiveOperator(entries))

    assert not report.irreducible
    support = report.invariant_ideal_support
    outside = [k for k in range(4) if k not in support]
    assert outside
    # T maps span{e_s : s in support} into itself
    assert np.all(entries[np.ix_(outside, support)] == 0.0)


@settings(max_examples=60, deadline=None)
@given(
    st.integers(min_value=2, max_value=6).flatmap(
        lambda n: st.lists(st.booleans(), min_size=n * n, max_size=n * n)
    )
)
def test_rt_criterion_brute_force(flags: list[bool]):
    n = int(round(len(flags) ** 0.5))
    pattern = np.array(flags, dtype=int).reshape(n, n)
    T = TruncatedPositiveOperator(0.5 * pattern)
    report = rtCriterion(T)

    assert report.irreducible == _bruteForceIrreducible(pattern)

    # each witness power is the first power reaching e_j from e_i
    powers = [np.linalg.matrix_power(T.entries, m) for m in range(n + 1)]
    for (i, j), m in report.witness_powers.items():
        assert 1 <= m <= n
        assert powers[m][j, i] > 0
        assert all(powers[k][j, i] == 0 for k in range(1, m))

    for i in range(n):
        for j in range(n):
            if i != j and (i, j) not in report.witness_powers:
                assert all(powers[k][j, i] == 0 for k in range(1, n + 1))


def test_below_threshold_is_no_arc():
    T = TruncatedPositiveOperator([[0.0, 1e-12], [1e-12, 0.0]])
    assert not rtCriterion(T).irreducible


@pytest.mark.parametrize(
    "fixture, T, exp_disjoint",
    [
        ("permutation",   cyclicPermutation(5),                  True),
        ("identity",      TruncatedPositiveOperator.identity(3), True),
        ("backward",      backwardShift(4),                      True),
        ("strict upper",  strictUpperTriangular(3),              False),
        ("positive",      TruncatedPositiveOperator(np.full((2, 2), 0.3)), False),
    ]
)
def test_disjoint_column_supports(fixture: str, T: TruncatedPositiveOperator, exp_disjoint: bool):
    assert hasDisjointColumnSupports(T) == exp_disjoint
