from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import copulas, points
from mvconcord.copula import DimensionCapError, En, M, MarginalOf, Mixture, Pi, Product, SymmetryApplied
from mvconcord.grammar import CopulaSpecError, parse_copula
from mvconcord.symmetry import Symmetry


def test_atoms():
    assert parse_copula("Pi(3)") == Pi(3)
    assert parse_copula(" M ( 4 ) ") == M(4)
    assert parse_copula("En(2,-0.5)") == En(2, -0.5)
    assert parse_copula("En(2,1e-1)") == En(2, 0.1)


def test_compound_forms():
    assert parse_copula("prod(Pi(1),M(2))") == Product(Pi(1), M(2))
    assert parse_copula("mix(0.3,Pi(3),M(3))") == Mixture(0.3, Pi(3), M(3))
    assert parse_copula("marg(M(5); drop=2,4)") == MarginalOf(M(5), (2, 4))
    assert parse_copula("(M(2))") == M(2)


def test_symmetry_prefixes():
    C = parse_copula("refl(1,3)*M(4)")
    assert C == SymmetryApplied(Symmetry.reflection(4, 1, 3), M(4))
    D = parse_copula("perm(2,1,3)*refl(1)*M(3)")
    assert D.symmetry == Symmetry.permutation((2, 1, 3))
    assert D.base.symmetry == Symmetry.reflection(3, 1)


def test_permutation_prefix_semantics():
    C = parse_copula("perm(2,1,3)*prod(Pi(1),M(2))")
    x = np.array([0.2, 0.5, 0.9])
    assert C(x) == pytest.approx(0.5 * min(0.2, 0.9))


@pytest.mark.parametrize(
    "text, position",
    [
        ("M(3", 3),
        ("Q(3)", 0),
        ("M(3) M(3)", 5),
        ("En(2,2.0)", 0),
        ("refl(4)*M(3)", 0),
        ("M(1.5)", 2),
        ("mix(0.5,Pi(2),Pi(3))", 0),
        ("M(3) $", 5),
        ("Pi(1)", 0),
    ],
)
def test_errors_carry_position(text, position):
    with pytest.raises(CopulaSpecError) as info:
        parse_copula(text)
    assert info.value.position == position
    assert "^" in str(info.value)


def test_dimension_cap_is_not_a_syntax_error():
    with pytest.raises(DimensionCapError):
        parse_copula("M(40)")


@given(copulas())
def test_printed_form_roundtrips(C):
    D = parse_copula(str(C))
    x = points(C.dim, 32)
    assert np.allclose(D(x), C(x), atol=1e-12)
