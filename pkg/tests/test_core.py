import math
import numpy as np
import pytest

from hypothesis import given, settings, strategies as st

from poscone import SpaceConfig, GeneralVector, PositiveVector, TruncatedPositiveOperator
from poscone import ConfigError, DimensionError, PositivityError
from . import cyclicPermutation, randomNonnegative


@pytest.mark.parametrize(
    "fixture, kwargs, exp_except",
    [
        ("default",      {},                    None),
        ("q=1",          {"q": 1.0},            None),
        ("q=inf",        {"q": math.inf},       None),
        ("q<1",          {"q": 0.5},            ConfigError),
        ("q nan",        {"q": math.nan},       ConfigError),
        ("tol_abs zero", {"tol_abs": 0.0},      ConfigError),
        ("tol_rel neg",  {"tol_rel": -1e-8},    ConfigError),
        ("max_iter",     {"max_iter": 0},       ConfigError),
    ]
)
def test_space_config(fixture: str, kwargs: dict, exp_except):
    if exp_except is None:
        space = SpaceConfig(**kwargs)
        assert space.dual().dual().q == pytest.approx(space.q)
    else:
        with pytest.raises(exp_except):
            SpaceConfig(**kwargs)


def test_space_config_dict():
    space = SpaceConfig.from_dict({"q": "inf", "seed": 7})
    assert space.is_sup_norm
    assert space.seed == 7
    assert space.to_dict()["q"] == "inf"

    assert SpaceConfig.from_dict(space.to_dict()) == space
    assert SpaceConfig.from_dict(None, space) is space
    assert SpaceConfig(q=1.0).q_dual == math.inf


def test_vectors():
    x = GeneralVector([1.0, -2.0, 0.0])
    assert x.dim == 3
    assert x.support() == [0, 1]
    assert x.pair(GeneralVector.ones(3)) == pytest.approx(-1.0)

    with pytest.raises(DimensionError):
        x.pair(GeneralVector.ones(2))
    with pytest.raises(DimensionError):
        GeneralVector([])

    e2 = PositiveVector.basis(4, 2)
    assert isinstance(e2, PositiveVector)
    assert e2.support() == [2]
    with pytest.raises(DimensionError):
        PositiveVector.basis(4, 4)

    # round-off negatives are clamped, real negatives are rejected
    assert PositiveVector([1.0, -1e-14]).coords[1] == 0.0
    with pytest.raises(PositivityError):
        PositiveVector([1.0, -0.1])


@pytest.mark.parametrize(
    "fixture, entries, exp_except",
    [
        ("square",       [[0.0, 1.0], [1.0, 0.0]],    None),
        ("roundoff",     [[1.0, -1e-13], [0.0, 1.0]], None),
        ("negative",     [[1.0, -0.5], [0.0, 1.0]],   PositivityError),
        ("not square",   [[1.0, 0.0, 0.0]],           DimensionError),
        ("empty",        np.zeros((0, 0)),            DimensionError),
        ("nan",          [[math.nan]],                ValueError),
    ]
)
def test_operator_entries(fixture: str, entries, exp_except):
    if exp_except is None:
        T = TruncatedPositiveOperator(entries)
        assert T.entries.min() >= 0
        assert not T.entries.flags.writeable
    else:
        with pytest.raises(exp_except):
            TruncatedPositiveOperator(entries)


def test_operator_algebra():
    P = cyclicPermutation(3)
    I = TruncatedPositiveOperator.identity(3)

    assert P.power(3) == I
    assert P.compose(P.adjoint().withSpace(P.space)) == I
    assert P.add(I).entries[1, 0] == 1.0
    assert P.scale(0.5).entries.max() == 0.5
    assert TruncatedPositiveOperator.zeros(3).isZero()

    with pytest.raises(PositivityError):
        P.scale(-1.0)
    with pytest.raises(DimensionError):
        P.compose(TruncatedPositiveOperator.identity(2))

    x = P.apply(PositiveVector.basis(3, 0))
    assert isinstance(x, PositiveVector)
    assert x.support() == [1]
    assert P.column(2).support() == [0]
    assert P.row(0).support() == [2]


def test_operator_adjoint_space():
    T = TruncatedPositiveOperator([[1.0, 2.0], [0.0, 3.0]], SpaceConfig(q=1.0))
    A = T.adjoint()
    assert A.space.is_sup_norm
    assert A.entries[1, 0] == 2.0


def test_operator_blocks():
    T = TruncatedPositiveOperator([[0.1, 0.2], [0.3, 0.4]])

    E = T.extendWithScalarTail(4, 0.5)
    assert E.dim == 4
    assert E.compress(2) == T
    assert np.allclose(np.diag(E.entries)[2:], 0.5)
    assert E.entries[0, 3] == 0.0

    assert T.pad(3).entries[2, 2] == 0.0

    with pytest.raises(DimensionError):
        T.extendWithScalarTail(1, 0.5)
    with pytest.raises(PositivityError):
        T.extendWithScalarTail(3, -0.1)
    with pytest.raises(DimensionError):
        T.compress(3)


def test_operator_coo():
    T = TruncatedPositiveOperator.fromCoo(3, [(0, 1, 0.5), (0, 1, 0.25), (2, 0, 1.0)])
    assert T.entries[0, 1] == 0.75
    assert sorted(T.toCoo()) == [(0, 1, 0.75), (2, 0, 1.0)]

    assert TruncatedPositiveOperator.fromCoo(2, []).isZero()
    with pytest.raises(DimensionError):
        TruncatedPositiveOperator.fromCoo(2, [(2, 0, 1.0)])


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=2**32 - 1),
    dim=st.integers(min_value=1, max_value=8),
    a=st.floats(min_value=-3.0, max_value=3.0),
    b=st.floats(min_value=-3.0, max_value=3.0),
)
def test_apply_linear_and_adjoint_pairing(seed: int, dim: int, a: float, b: float):
    rng = np.random.default_rng(seed)
    T = TruncatedPositiveOperator(randomNonnegative(rng, dim, density=0.5))
    x = GeneralVector(rng.standard_normal(dim))
    y = GeneralVector(rng.standard_normal(dim))

    combined = T.apply(GeneralVector(a * x.coords + b * y.coords))
    assert combined.coords == pytest.approx(a * T.apply(x).coords + b * T.apply(y).coords, abs=1e-9)

    # <T* y*, x> = <y*, T x>
    assert T.adjoint().apply(y).pair(x) == pytest.approx(y.pair(T.apply(x)), abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=2**32 - 1),
    dim=st.integers(min_value=1, max_value=6),
    c=st.floats(min_value=0.0, max_value=10.0),
)
def test_algebra_stays_positive(seed: int, dim: int, c: float):
    rng = np.random.default_rng(seed)
    S = TruncatedPositiveOperator(randomNonnegative(rng, dim, density=0.6))
    T = TruncatedPositiveOperator(randomNonnegative(rng, dim, density=0.6))

    for R, expected in [
        (S.compose(T), S.entries @ T.entries),
        (S.add(T),     S.entries + T.entries),
        (S.scale(c),   c * S.entries),
    ]:
        assert np.all(R.entries >= 0.0)
        assert R.entries == pytest.approx(expected)
        assert isinstance(R.apply(PositiveVector.ones(dim)), PositiveVector)
