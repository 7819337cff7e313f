import numpy as np
import pytest

from hypothesis import given, settings, strategies as st

from poscone import SpaceConfig, PositiveVector, TruncatedPositiveOperator, NORMALIZATION
from poscone import CommutantConstraint, CommutantSolverHighs
from poscone import commutantBasis, coneMaximize, fSetMembership, aabWitnessSearch, operatorNorm
from poscone import ContractionError, DegenerateInputError, DimensionError, UnsupportedError
from poscone.poscone_commutant import commutationResidual
from . import cyclicPermutation, randomContraction, randomNonnegative


@pytest.mark.parametrize(
    "fixture, T, exp_rank",
    [
        ("identity",          TruncatedPositiveOperator.identity(3),              9),
        ("distinct diagonal", TruncatedPositiveOperator(np.diag([0.1, 0.2, 0.3])), 3),
        ("cyclic",            cyclicPermutation(4),                               4),
        ("zero",              TruncatedPositiveOperator.zeros(2),                 4),
    ]
)
def test_commutant_rank(fixture: str, T: TruncatedPositiveOperator, exp_rank: int):
    basis = commutantBasis(T)

    assert basis.rank == exp_rank
    assert basis.stacked().shape == (T.dim * T.dim, exp_rank)
    for B in basis.basis:
        assert commutationResidual(B, T.entries) < 1e-10


def test_commutant_orthonormal():
    T = randomContraction(np.random.default_rng(4), 4)
    S = commutantBasis(T).stacked()
    assert S.T @ S == pytest.approx(np.eye(S.shape[1]), abs=1e-10)


def test_commutant_limit():
    with pytest.raises(UnsupportedError):
        commutantBasis(TruncatedPositiveOperator.identity(65))


def test_cone_maximize():
    T = TruncatedPositiveOperator.identity(2)
    result = coneMaximize(T, np.ones((2, 2)), normalization=NORMALIZATION.BOTH)

    assert result.status.optimal
    assert result.value == pytest.approx(2.0)
    assert result.matrix.sum(axis=0) == pytest.approx([1.0, 1.0])
    assert result.status.gap == pytest.approx(0.0, abs=1e-7)


@pytest.mark.parametrize(
    "fixture, eta, exp_feasible",
    [
        ("small eta", 0.1, True),
        ("half",      0.5, True),
        ("one",       1.0, True),
        ("too large", 1.5, False),
    ]
)
def test_f_set_identity(fixture: str, eta: float, exp_feasible: bool):
    T = TruncatedPositiveOperator.identity(2)
    result = fSetMembership(T, CommutantConstraint(i=0, j=1, eta=eta, p=0))

    assert result.feasible == exp_feasible
    assert result.value == pytest.approx(1.0, abs=1e-7)
    if exp_feasible:
        W = result.witness.entries
        assert W[1, 0] == pytest.approx(1.0, abs=1e-7)
        assert W[0, 0] == pytest.approx(0.0, abs=1e-7)
        assert commutationResidual(W, T.entries) < 1e-7
    else:
        assert result.witness is None


@pytest.mark.parametrize(
    "fixture, eta, exp_feasible",
    [
        ("below lp optimum", 0.4,  True),
        ("above lp optimum", 0.6,  True),
        ("above unit ball",  0.75, False),
    ]
)
def test_f_set_rescales_to_unit_norm(fixture: str, eta: float, exp_feasible: bool):
    # commutant is span{I, T}; the normalized LP optimum is A = T with ||A||_2 = 1/sqrt(2)
    T = TruncatedPositiveOperator([[0.0, 0.0], [0.5, 0.5]], SpaceConfig(q=2.0))
    result = fSetMembership(T, CommutantConstraint(i=0, j=1, eta=eta, p=0))

    assert result.feasible == exp_feasible
    assert result.value == pytest.approx(1.0 / np.sqrt(2.0), rel=1e-6)
    if exp_feasible:
        W = result.witness
        assert operatorNorm(W).value == pytest.approx(1.0, rel=1e-6)
        assert W.entries[0, 0] == pytest.approx(0.0, abs=1e-7)
        assert commutationResidual(W.entries, T.entries) < 1e-7


@pytest.mark.parametrize(
    "fixture, seed",
    [
        ("seed 1", 1),
        ("seed 2", 2),
        ("seed 3", 3),
        ("seed 4", 4),
    ]
)
def test_f_set_witness_unit_norm(fixture: str, seed: int):
    T = randomContraction(np.random.default_rng(seed), 3, q=2.0, density=0.6)
    basis = commutantBasis(T)

    for i, j, p in [(0, 1, 2), (1, 0, 2), (2, 0, 1), (0, 0, 1)]:
        result = fSetMembership(T, CommutantConstraint(i, j, 1e-3, p), basis)
        if not result.feasible:
            continue
        assert operatorNorm(result.witness).value == pytest.approx(1.0, rel=1e-6)

        # the reported value is attained
        again = fSetMembership(T, CommutantConstraint(i, j, min(result.value, 1.0), p), basis)
        assert again.feasible


def test_f_set_diagonal_infeasible():
    T = TruncatedPositiveOperator(np.diag([0.1, 0.2, 0.3]))
    result = fSetMembership(T, CommutantConstraint(i=0, j=2, eta=0.01, p=1))

    assert not result.feasible
    assert result.value == pytest.approx(0.0, abs=1e-7)
    assert result.to_dict()["truncation_dim"] == 3


def test_f_set_monotone_in_eta():
    T = randomContraction(np.random.default_rng(8), 3, q=1.0)
    basis = commutantBasis(T)

    feasible = [fSetMembership(T, CommutantConstraint(0, 1, eta, 2), basis).feasible for eta in (0.01, 0.1, 0.3, 0.6, 0.9)]
    assert feasible == sorted(feasible, reverse=True)


@pytest.mark.parametrize(
    "fixture, T, constraint, exp_except",
    [
        ("no contraction", TruncatedPositiveOperator.identity(2).scale(1.5), CommutantConstraint(0, 1, 0.5, 0), ContractionError),
        ("index",          TruncatedPositiveOperator.identity(2),            CommutantConstraint(0, 5, 0.5, 0), DimensionError),
        ("eta",            TruncatedPositiveOperator.identity(2),            CommutantConstraint(0, 1, 0.0, 0), DimensionError),
    ]
)
def test_f_set_errors(fixture: str, T, constraint, exp_except):
    with pytest.raises(exp_except):
        fSetMembership(T, constraint)


def test_constraint_dict():
    c = CommutantConstraint.from_dict({"i": 0, "j": 2, "eta": 0.25, "p": 1})
    assert c == CommutantConstraint(0, 2, 0.25, 1)
    assert c.to_dict() == {"i": 0, "j": 2, "eta": 0.25, "p": 1}


def test_aab_witness_identity():
    A = aabWitnessSearch(TruncatedPositiveOperator.identity(2), PositiveVector.basis(2, 0), K=20)

    assert A is not None
    assert np.diag(A.entries) == pytest.approx([0.0, 0.0], abs=1e-7)
    assert A.entries.sum() == pytest.approx(1.0)
    assert A.power(2).isZero()


def test_aab_witness_none():
    T = TruncatedPositiveOperator([[0.2, 0.1], [0.3, 0.4]])
    assert aabWitnessSearch(T, PositiveVector.basis(2, 0), K=40) is None


def test_aab_witness_errors():
    T = TruncatedPositiveOperator.identity(2)
    with pytest.raises(DegenerateInputError):
        aabWitnessSearch(T, PositiveVector([0.0, 0.0]))
    with pytest.raises(DimensionError):
        aabWitnessSearch(T, PositiveVector([1.0, 0.0, 0.0]))


def test_solver_diagnostics():
    solver = CommutantSolverHighs()
    T = TruncatedPositiveOperator.identity(2, SpaceConfig(q=1.0))
    solver.fSetMembership(T, CommutantConstraint(0, 1, 0.5, 0))
    solver.fSetMembership(T, CommutantConstraint(1, 0, 0.5, 1))

    statistics = solver.getDiagnostics()["statistics"]
    assert statistics["status"] == {0: 2}
    assert sum(statistics["iterations"].values()) == 2


@settings(max_examples=30, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=2**32 - 1),
    dim=st.integers(min_value=1, max_value=8),
    density=st.sampled_from([0.2, 0.5, 1.0]),
)
def test_commutant_random(seed: int, dim: int, density: float):
    rng = np.random.default_rng(seed)
    T = TruncatedPositiveOperator(randomNonnegative(rng, dim, density))
    basis = commutantBasis(T)

    assert 1 <= basis.rank <= dim * dim
    for B in basis.basis:
        assert commutationResidual(B, T.entries) <= 1e-8

    # conjugating by a permutation maps the commutant onto the commutant
    perm = rng.permutation(dim)
    P = np.eye(dim)[perm]
    assert commutantBasis(TruncatedPositiveOperator(P @ T.entries @ P.T)).rank == basis.rank


@pytest.mark.parametrize(
    "fixture, dim",
    [
        ("dim 2", 2),
        ("dim 5", 5),
        ("dim 8", 8),
    ]
)
def test_commutant_rank_extremes(fixture: str, dim: int):
    diagonal = TruncatedPositiveOperator(np.diag(np.linspace(0.1, 0.9, dim)))
    assert commutantBasis(diagonal).rank == dim
    assert commutantBasis(TruncatedPositiveOperator.identity(dim)).rank == dim * dim
