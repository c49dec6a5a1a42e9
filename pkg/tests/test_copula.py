from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import copulas, points, symmetries
from mvconcord.copula import (
    MAX_DIMENSION,
    ContractViolation,
    DimensionCapError,
    Empirical,
    En,
    M,
    MarginalOf,
    Mixture,
    Pi,
    Product,
    SymmetryApplied,
    apply_symmetry,
    canonical,
    dominates_on_grid,
    enumerate_marginals,
    evaluate,
    grid,
    marginal,
    product,
    rectangle_volume,
    reflect,
    survival,
    survival_copula,
)
from mvconcord.estimation import pseudo_observations
from mvconcord.symmetry import Symmetry


def _constructors(n: int):
    out = [Pi(n), M(n), En(n, 0.7), En(n, -1.0), Mixture(0.4, Pi(n), M(n)), reflect(M(n), 1)]
    if n >= 3:
        out.append(Product(Pi(1), En(n - 1, 0.5)))
    rng = np.random.default_rng(n)
    out.append(Empirical(pseudo_observations(rng.random((40, n)))))
    return out


# --- worked examples


def test_point_values():
    assert Pi(2)(0.5, 0.5) == pytest.approx(0.25)
    assert M(3)(0.2, 0.7, 0.5) == pytest.approx(0.2)
    assert En(2, 1.0)(0.5, 0.5) == pytest.approx(0.25 + 0.25 * 0.25)


def test_reflected_comonotone_is_lower_frechet_bound():
    W = reflect(M(2), 1)
    g = grid(2, 5)
    assert np.allclose(W(g), np.maximum(g.sum(axis=1) - 1.0, 0.0), atol=1e-12)


def test_independence_reflection_invariant():
    g = grid(3, 5)
    for i in (1, 2, 3):
        assert np.allclose(reflect(Pi(3), i)(g), Pi(3)(g), atol=1e-12)


def test_identity_symmetry_leaves_values():
    x = points(3, 10)
    C = En(3, 0.5)
    assert np.allclose(apply_symmetry(Symmetry.identity(3), C)(x), C(x), atol=1e-15)


def test_marginal_examples():
    x = points(3, 50)
    assert np.allclose(marginal(M(5), (2, 4))(x), x.min(axis=1))
    g = grid(2, 7)
    assert np.allclose(marginal(En(3, 0.8), (1,))(g), Pi(2)(g), atol=1e-12)
    assert np.allclose(marginal(Product(Pi(1), M(2)), (1,))(g), M(2)(g))
    assert marginal(M(3), ()) == M(3)


def test_enumerate_marginals_order_and_count():
    C = En(5, 0.3)
    ms = enumerate_marginals(C, 3)
    assert len(ms) == 10
    assert [r for r, _ in ms] == sorted(r for r, _ in ms)
    three = enumerate_marginals(En(3, 0.1), 2)
    assert [r for r, _ in three] == [(1, 2), (1, 3), (2, 3)]
    assert isinstance(three[0][1], MarginalOf) and three[0][1].dropped == (3,)
    (only,) = enumerate_marginals(C, 5)
    assert only[1] is C
    with pytest.raises(ContractViolation):
        enumerate_marginals(C, 1)


def test_survival_examples():
    a, b = 0.3, 0.8
    assert survival(Pi(2), (a, b)) == pytest.approx((1 - a) * (1 - b))
    assert survival(M(2), (0.5, 0.5)) == pytest.approx(0.5)
    for C in (En(2, 0.6), reflect(M(2), 2), Mixture(0.2, Pi(2), M(2))):
        assert survival(C, (0.5, 0.5)) == pytest.approx(C(0.5, 0.5), abs=1e-12)


def test_product_examples():
    x = points(3, 30)
    assert np.allclose(product(Pi(1), M(2))(x), x[:, 0] * np.minimum(x[:, 1], x[:, 2]))
    y = points(5, 30)
    assert np.allclose(product(Pi(2), Pi(3))(y), Pi(5)(y))
    g = grid(3, 5)
    A = En(2, 0.9)
    assert np.allclose(reflect(Product(Pi(1), A), 1)(g), Product(Pi(1), A)(g), atol=1e-12)


def test_dominates_on_grid_examples():
    assert dominates_on_grid(Pi(2), M(2), 11)
    assert dominates_on_grid(En(2, 0.2), En(2, 0.8), 11)
    assert not dominates_on_grid(M(2), Pi(2), 11)


# --- construction contracts


def test_construction_errors():
    with pytest.raises(ContractViolation):
        M(1)
    with pytest.raises(ContractViolation):
        En(2, 1.5)
    with pytest.raises(DimensionCapError):
        Pi(MAX_DIMENSION + 1)
    with pytest.raises(ContractViolation):
        Mixture(0.5, Pi(2), Pi(3))
    with pytest.raises(ContractViolation):
        marginal(M(3), (1, 2))
    with pytest.raises(ContractViolation):
        SymmetryApplied(Symmetry.identity(2), M(3))
    with pytest.raises(ContractViolation):
        M(3)(0.1, 0.2)
    with pytest.raises(ContractViolation):
        M(2)(0.1, 1.2)


# --- invariants


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_boundary_conditions(n):
    x = points(n, 100, seed=n)
    for C in _constructors(n):
        for j in range(n):
            z = x.copy()
            z[:, j] = 0.0
            assert np.all(np.abs(C(z)) <= 1e-12), C
            ones = np.ones_like(x)
            ones[:, j] = x[:, j]
            if isinstance(C, Empirical):
                # margins are the discrete uniform on k/(rows+1)
                expected = np.floor(x[:, j] * (C.size + 1)).clip(max=C.size) / C.size
                assert np.array_equal(C(ones), expected)
            else:
                assert np.allclose(C(ones), x[:, j], atol=1e-12), C


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_values_in_unit_interval(n):
    x = points(n, 200, seed=10 + n)
    for C in _constructors(n):
        v = C(x)
        assert np.all((v >= 0.0) & (v <= 1.0))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_n_increasing(n):
    rng = np.random.default_rng(100 + n)
    a, b = rng.random((200, n)), rng.random((200, n))
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    for C in (Pi(n), En(n, 1.0), En(n, -1.0), Mixture(0.3, Pi(n), En(n, 0.9))):
        assert np.all(rectangle_volume(C, lo, hi) >= -1e-12), C


def test_rectangle_volume_of_independence():
    lo = np.array([[0.1, 0.2, 0.3]])
    hi = np.array([[0.4, 0.9, 0.5]])
    assert rectangle_volume(Pi(3), lo, hi)[0] == pytest.approx(0.3 * 0.7 * 0.2)


@pytest.mark.parametrize("C", [M(3), En(3, 0.7)], ids=str)
def test_contravariance(C):
    rng = np.random.default_rng(7)
    g = grid(3, 4)
    for _ in range(50):
        xi = Symmetry(tuple(rng.permutation(3) + 1), frozenset(np.flatnonzero(rng.random(3) < 0.5) + 1))
        eta = Symmetry(tuple(rng.permutation(3) + 1), frozenset(np.flatnonzero(rng.random(3) < 0.5) + 1))
        lhs = apply_symmetry(xi @ eta, C)(g)
        rhs = apply_symmetry(eta, apply_symmetry(xi, C))(g)
        assert np.allclose(lhs, rhs, atol=1e-12)


@given(st.data())
def test_contravariance_property(data):
    n = data.draw(st.integers(2, 4))
    C = data.draw(copulas(n))
    xi, eta = data.draw(symmetries(n)), data.draw(symmetries(n))
    x = points(n, 64)
    assert np.allclose(apply_symmetry(xi @ eta, C)(x), apply_symmetry(eta, apply_symmetry(xi, C))(x), atol=1e-12)


@given(st.data())
def test_reflection_involution(data):
    n = data.draw(st.integers(2, 4))
    C = data.draw(copulas(n))
    i = data.draw(st.integers(1, n))
    g = grid(n, 4)
    assert np.allclose(reflect(reflect(C, i), i)(g), C(g), atol=1e-12)


def _survival_by_events(C, x):
    # P(all U_i > x_i) = sum over T of (-1)^|T| C(x on T, 1 elsewhere)
    n = C.dim
    total = np.zeros(x.shape[0])
    for size in range(n + 1):
        for T in itertools.combinations(range(n), size):
            z = np.ones_like(x)
            z[:, list(T)] = x[:, list(T)]
            total += (-1) ** size * C(z)
    return total


@pytest.mark.parametrize("n", [2, 3])
def test_survival_inclusion_exclusion(n):
    x = points(n, 100, seed=3)
    for C in (Pi(n), M(n), En(n, 0.6), reflect(M(n), 1), Mixture(0.5, En(n, -0.4), M(n))):
        assert np.allclose(survival(C, x), _survival_by_events(C, x), atol=1e-12), C


@given(st.data())
def test_marginal_commutes_with_earlier_reflection(data):
    n = data.draw(st.integers(3, 4))
    C = data.draw(copulas(n))
    j = data.draw(st.integers(2, n))
    i = data.draw(st.integers(1, j - 1))
    x = points(n - 1, 64)
    assert np.allclose(marginal(reflect(C, i), (j,))(x), reflect(marginal(C, (j,)), i)(x), atol=1e-12)


@given(st.data())
def test_canonical_preserves_values(data):
    n = data.draw(st.integers(2, 4))
    C = data.draw(copulas(n))
    x = points(n, 64)
    assert np.allclose(canonical(C)(x), C(x), atol=1e-12)


@given(symmetries(3), st.floats(0.0, 1.0))
def test_comonotone_shortcut_matches_inclusion_exclusion(xi, w):
    # a zero-weight mixture is M pointwise but takes the generic inclusion-exclusion route
    fast = apply_symmetry(xi, M(3))
    slow = apply_symmetry(xi, Mixture(0.0, M(3), En(3, w)))
    g = grid(3, 6)
    assert np.allclose(fast(g), slow(g), atol=1e-12)


def test_survival_copula_is_full_reflection():
    assert survival_copula(M(3)).symmetry == Symmetry.full_reflection(3)


def test_empirical_dominated_count():
    pts = np.array([[0.25, 0.5], [0.5, 0.25], [0.75, 0.75]])
    C = Empirical(pts)
    assert C(0.5, 0.5) == pytest.approx(2 / 3)
    assert C(0.3, 0.6) == pytest.approx(1 / 3)
    assert C(1.0, 1.0) == 1.0
    assert C == C and C != Empirical(pts)  # identity semantics
    assert not C.points.flags.writeable


def test_evaluate_shapes():
    g = grid(2, 3).reshape(3, 3, 2)
    assert evaluate(M(2), g).shape == (3, 3)
    assert isinstance(M(2)(0.1, 0.2), float)
