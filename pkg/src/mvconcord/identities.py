"""Identities linking a copula's concordance to that of its marginals.

Coefficient arithmetic (``gamma*``, ``R_{n,k}``, Ubeda coefficients) is exact
over ``Fraction``; floats appear only where a coefficient multiplies an
evaluated concordance.  ``kappa_0`` and ``kappa_1`` are the zero functions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Mapping

from .copula import Copula, ContractViolation, Pi, Product, enumerate_marginals, marginal, reflect
from .estimation import EstimatorConfig, EvalResult, linear_combination
from .measures import MeasureFamily, big_r, kappa, limit_transition_constant


def _kappa_any(family: MeasureFamily, C: Copula | None, config: EstimatorConfig) -> EvalResult:
    # kappa_0 and kappa_1 vanish
    if C is None or C.dim < 2:
        return EvalResult(0.0)
    return kappa(family, C, config)


def _drop(C: Copula, dropped: tuple[int, ...]) -> Copula | None:
    return None if C.dim - len(dropped) < 2 else marginal(C, dropped)


@dataclass(frozen=True)
class GammaStarTable:
    """Integers ``gamma*_1, gamma*_3, ...`` keyed by their odd index."""

    values: Mapping[int, int]

    def __getitem__(self, k: int) -> int:
        return self.values[k]

    def __iter__(self):
        return iter(sorted(self.values))

    def as_list(self) -> list[int]:
        return [self.values[k] for k in sorted(self.values)]


def gamma_star(upto_k: int) -> GammaStarTable:
    """Solve ``sum_j binom(2p+1, 2p-2j) gamma*_{2j+1} = 1`` for odd indices up to ``upto_k``."""
    if upto_k < 1:
        raise ContractViolation(f"upto_k must be >= 1, got {upto_k}")
    values: dict[int, int] = {}
    for p in range((upto_k - 1) // 2 + 1):
        rest = sum(comb(2 * p + 1, 2 * p - 2 * j) * values[2 * j + 1] for j in range(p))
        values[2 * p + 1] = 1 - rest
    return GammaStarTable(values)


def reflection_reduction_rhs(
    family: MeasureFamily, C: Copula, k: int, config: EstimatorConfig = EstimatorConfig()
) -> EvalResult:
    """Marginal expansion of ``kappa_n(sigma_k^* ... sigma_1^* C)``.

    ``sum_{j=0}^{k} (-1)^{k-j} R_{n-1,j} sum_{D subset of {1..k}, |D| = j} kappa_{n-j}(C_D)``.
    """
    n = C.dim
    if not 1 <= k <= n:
        raise ContractViolation(f"k must lie in 1..{n}, got {k}")
    terms = []
    for j in range(k + 1):
        coef = (-1) ** (k - j) * big_r(family, n - 1, j)
        if coef == 0:
            continue
        for dropped in itertools.combinations(range(1, k + 1), j):
            terms.append((float(coef), _kappa_any(family, _drop(C, dropped), config)))
    return linear_combination(terms)


def reflected_first(C: Copula, k: int) -> Copula:
    """``sigma_k^* ... sigma_1^* C``."""
    return reflect(C, *range(1, k + 1))


def extended_transition_check(
    family: MeasureFamily, C: Copula, k: int, config: EstimatorConfig = EstimatorConfig()
) -> tuple[EvalResult, EvalResult]:
    """Both sides of ``sum_{S subset of {1..k}} kappa_n(sigma_S^* C) = R_{n-1,k} kappa_{n-k}(C_{1..k})``."""
    n = C.dim
    if not 1 <= k <= n:
        raise ContractViolation(f"k must lie in 1..{n}, got {k}")
    lhs_terms = []
    for size in range(k + 1):
        for subset in itertools.combinations(range(1, k + 1), size):
            D = reflect(C, *subset) if subset else C
            lhs_terms.append((1.0, kappa(family, D, config)))
    lhs = linear_combination(lhs_terms)
    coef = big_r(family, n - 1, k)
    rhs = float(coef) * _kappa_any(family, _drop(C, tuple(range(1, k + 1))), config) if coef else EvalResult(0.0)
    return lhs, rhs


def stepdown_value(
    family: MeasureFamily, k: int, A: Copula, config: EstimatorConfig = EstimatorConfig()
) -> EvalResult:
    """Predicted ``kappa_{n+k}(Pi^k (x) A) = R_{n+k-1,k} kappa_n(A) / 2^k``."""
    n = A.dim
    if n < 2 or k < 1:
        raise ContractViolation(f"need dim(A) >= 2 and k >= 1, got {n}, {k}")
    coef = big_r(family, n + k - 1, k) / 2**k
    return float(coef) * kappa(family, A, config)


def independent_extension(k: int, A: Copula) -> Product:
    """``Pi^k (x) A``."""
    return Product(Pi(k), A)


@dataclass(frozen=True)
class UbedaCoefficients:
    """``a_{2m+1,2}, a_{2m+1,4}, ..., a_{2m+1,2m}``; ``coefficients[k]`` multiplies the ``2k``-marginal sum."""

    family: MeasureFamily
    m: int
    coefficients: Mapping[int, Fraction]

    def __getitem__(self, k: int) -> Fraction:
        return self.coefficients[k]

    def as_list(self) -> list[Fraction]:
        return [self.coefficients[k] for k in range(1, self.m + 1)]


def ubeda_coefficients_solve(family: MeasureFamily, m: int) -> UbedaCoefficients:
    """Forward substitution in the triangular system fixing the coefficients.

    Row ``p`` (``p = 0..m-1``):
    ``R_{2m,2p+1} / 2^(2p+1) = sum_{k+j=p} binom(2p+1,2k) R_{2m-1-2j,2k} a_{2m+1,2m-2j} / 2^(2k)``;
    its ``j = p`` term is ``a_{2m+1,2m-2p}`` with unit coefficient.
    """
    if m < 1:
        raise ContractViolation(f"m must be >= 1, got {m}")
    a: dict[int, Fraction] = {}  # keyed by 2m-2j
    for p in range(m):
        lhs = big_r(family, 2 * m, 2 * p + 1) / 2 ** (2 * p + 1)
        known = Fraction(0)
        for j in range(p):
            kk = p - j
            known += (
                Fraction(comb(2 * p + 1, 2 * kk), 2 ** (2 * kk))
                * big_r(family, 2 * m - 1 - 2 * j, 2 * kk)
                * a[2 * m - 2 * j]
            )
        a[2 * m - 2 * p] = lhs - known
    return UbedaCoefficients(family, m, {k: a[2 * k] for k in range(1, m + 1)})


def ubeda_coefficients_closed_form(family: MeasureFamily, m: int) -> UbedaCoefficients:
    """``a_{2m+1,2k} = gamma*_{2m+1-2k} R_{2m,2m+1-2k} / 2^(2m+1-2k)``."""
    if m < 1:
        raise ContractViolation(f"m must be >= 1, got {m}")
    g = gamma_star(2 * m - 1)
    coeffs = {}
    for k in range(1, m + 1):
        odd = 2 * m + 1 - 2 * k
        coeffs[k] = Fraction(g[odd], 2**odd) * big_r(family, 2 * m, odd)
    return UbedaCoefficients(family, m, coeffs)


def ubeda_coefficients_pairwise(family: MeasureFamily, m: int) -> UbedaCoefficients:
    """Alternative coefficients valid for a pairwise-average extension: ``1/binom(2m+1,2)`` on the 2-marginals, 0 elsewhere."""
    coeffs = {k: Fraction(0) for k in range(1, m + 1)}
    coeffs[1] = Fraction(1, comb(2 * m + 1, 2))
    return UbedaCoefficients(family, m, coeffs)


def marginal_concordance_sum(
    family: MeasureFamily, C: Copula, k: int, config: EstimatorConfig = EstimatorConfig()
) -> EvalResult:
    """``sum of kappa_k(A)`` over all ``k``-marginals ``A`` of ``C``."""
    return linear_combination((1.0, kappa(family, A, config)) for _, A in enumerate_marginals(C, k))


def ubeda_identity_rhs(
    family: MeasureFamily,
    C: Copula,
    config: EstimatorConfig = EstimatorConfig(),
    coefficients: UbedaCoefficients | None = None,
) -> EvalResult:
    """``sum_k a_{2m+1,2k} K_{2k}(C)`` for an odd-dimensional ``C``; compare with ``kappa(family, C)``."""
    n = C.dim
    if n < 3 or n % 2 == 0:
        raise ContractViolation(f"the identity needs an odd dimension >= 3, got {n}")
    m = (n - 1) // 2
    coeffs = coefficients or ubeda_coefficients_closed_form(family, m)
    terms = [
        (float(coeffs[k]), marginal_concordance_sum(family, C, 2 * k, config))
        for k in range(1, m + 1)
        if coeffs[k] != 0
    ]
    return linear_combination(terms)


def reflected_comonotone_value(family: MeasureFamily, n: int, s: int) -> Fraction:
    """``kappa_n(sigma_1^* ... sigma_s^* M^n)`` from the transition constants alone, ``n > s``.

    ``sum_{j=0}^{s} (-1)^(s-j) binom(s, j) R_{n-1,j}``.
    """
    if not 0 <= s < n:
        raise ContractViolation(f"need 0 <= s < n, got s={s}, n={n}")
    return sum(
        ((-1) ** (s - j) * comb(s, j) * big_r(family, n - 1, j) for j in range(s + 1)),
        Fraction(0),
    )


def asymptotic_limit(family: MeasureFamily, s: int) -> Fraction:
    """``lim_n kappa_n(C_n) = (r - 1)^s`` where ``r = lim r_n`` and ``s`` variables are reversed."""
    if s < 0:
        raise ContractViolation(f"s must be >= 0, got {s}")
    return (limit_transition_constant(family) - 1) ** s
