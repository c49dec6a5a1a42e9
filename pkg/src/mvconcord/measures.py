"""Multivariate measures of concordance: Spearman's rho, Gini's coefficient,
Blomqvist's beta, Kendall's tau, and the pairwise-average extension of a
bivariate measure.

The first three share the form ``alpha_n (int (C + sigma^*C) d mu_n - 1/2^(n-1))``
with ``mu_n`` Lebesgue measure, the uniform measure on the main diagonals,
and the unit mass at the centre respectively; Kendall's tau is
``alpha_n (int C dC - 1/2^n)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Optional

from .copula import MAX_DIMENSION, Copula, ContractViolation, canonical, enumerate_marginals
from .estimation import (
    EstimatorConfig,
    EvalResult,
    center_mass,
    integrate_diagonals,
    integrate_lebesgue,
    integrate_self,
    linear_combination,
)


class Kind(enum.Enum):
    SPEARMAN = "spearman"
    GINI = "gini"
    BLOMQVIST = "blomqvist"
    KENDALL = "kendall"
    SCARSINI = "scarsini"


_TABLE_KINDS = (Kind.SPEARMAN, Kind.GINI, Kind.BLOMQVIST, Kind.KENDALL)


@dataclass(frozen=True)
class MeasureFamily:
    """A measure of concordance ``{kappa_n}``.

    ``base`` is only used by ``Kind.SCARSINI``: the bivariate measure averaged
    over all 2-marginals (Blomqvist's beta unless given).
    """

    kind: Kind
    base: Optional[Kind] = None

    def __post_init__(self) -> None:
        if self.kind is Kind.SCARSINI:
            base = self.base or Kind.BLOMQVIST
            if base not in _TABLE_KINDS:
                raise ValueError(f"extension seed must be one of the four table measures, got {base}")
            object.__setattr__(self, "base", base)
        elif self.base is not None:
            raise ValueError("only the pairwise extension takes a base measure")

    @property
    def name(self) -> str:
        if self.kind is Kind.SCARSINI:
            return f"scarsini[{self.base.value}]"
        return self.kind.value

    @property
    def is_table_family(self) -> bool:
        return self.kind in _TABLE_KINDS

    @property
    def seed_family(self) -> "MeasureFamily":
        return MeasureFamily(self.base)

    def __str__(self) -> str:
        return self.name


SPEARMAN = MeasureFamily(Kind.SPEARMAN)
GINI = MeasureFamily(Kind.GINI)
BLOMQVIST = MeasureFamily(Kind.BLOMQVIST)
KENDALL = MeasureFamily(Kind.KENDALL)
TABLE_FAMILIES = (SPEARMAN, GINI, BLOMQVIST, KENDALL)


def scarsini(base: Kind | MeasureFamily = Kind.BLOMQVIST) -> MeasureFamily:
    if isinstance(base, MeasureFamily):
        base = base.kind
    return MeasureFamily(Kind.SCARSINI, base)


def parse_family(name: str) -> MeasureFamily:
    """``spearman``, ``gini``, ``blomqvist``, ``kendall`` or ``scarsini[:<base>]``."""
    key = name.strip().lower()
    if key.startswith("scarsini"):
        rest = key[len("scarsini"):].strip(":[]")
        return scarsini(Kind(rest) if rest else Kind.BLOMQVIST)
    try:
        return MeasureFamily(Kind(key))
    except ValueError:
        raise ValueError(f"unknown measure family {name!r}") from None


def alpha(family: MeasureFamily, n: int) -> Fraction:
    """Normalizing constant ``alpha_n``."""
    if n < 2:
        raise ContractViolation(f"alpha_n needs n >= 2, got {n}")
    kind = family.kind
    if kind is Kind.SPEARMAN:
        return Fraction((n + 1) * 2 ** (n - 1), 2**n - (n + 1))
    if kind in (Kind.GINI, Kind.KENDALL):
        return Fraction(2**n, 2 ** (n - 1) - 1)
    if kind is Kind.BLOMQVIST:
        return Fraction(2 ** (n - 1), 2 ** (n - 1) - 1)
    raise ContractViolation(f"{family.name} has no normalizing constant alpha_n")


def transition_constant(family: MeasureFamily, n: int) -> Fraction:
    """``r_n``, with ``r_0 = r_1 = 0``."""
    if n < 0:
        raise ContractViolation(f"r_n needs n >= 0, got {n}")
    if n < 2:
        return Fraction(0)
    kind = family.kind
    if kind is Kind.SPEARMAN:
        return 2 * Fraction(n + 2, n + 1) * Fraction(2**n - (n + 1), 2 ** (n + 1) - (n + 2))
    if kind is Kind.SCARSINI:
        return Fraction(2 * (n - 1), n + 1)
    return 2 * Fraction(2 ** (n - 1) - 1, 2**n - 1)


def limit_transition_constant(family: MeasureFamily) -> Fraction:
    """``lim r_n``: 1 for the four table measures, 2 for the pairwise extension."""
    return Fraction(2) if family.kind is Kind.SCARSINI else Fraction(1)


@dataclass(frozen=True)
class TransitionTable:
    """``r_n`` and ``R_{n,k}`` for ``n`` up to ``upto``, built eagerly."""

    family: MeasureFamily
    upto: int = MAX_DIMENSION
    r: tuple[Fraction, ...] = field(init=False, repr=False)
    R: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        r = tuple(transition_constant(self.family, n) for n in range(self.upto + 1))
        table = {}
        for n in range(1, self.upto + 1):
            for k in range(n + 2):
                if k == 0:
                    value = Fraction(1)
                elif k <= n - 1:
                    value = Fraction(1)
                    for j in range(n - k + 1, n + 1):
                        value *= r[j]
                else:
                    value = Fraction(0)
                table[n, k] = value
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "R", table)

    def big_r(self, n: int, k: int) -> Fraction:
        if n < 1 or not 0 <= k <= n + 1:
            raise ContractViolation(f"R_(n,k) needs n >= 1 and 0 <= k <= n+1, got ({n}, {k})")
        if n > self.upto:
            return big_r(self.family, n, k)
        return self.R[n, k]


@lru_cache(maxsize=None)
def transition_table(family: MeasureFamily, upto: int = MAX_DIMENSION) -> TransitionTable:
    return TransitionTable(family, upto)


def big_r(family: MeasureFamily, n: int, k: int) -> Fraction:
    """``R_{n,k} = r_n r_{n-1} ... r_{n-k+1}`` for ``1 <= k <= n-1``; 1 at ``k = 0``; 0 at ``k = n, n+1``."""
    if n < 1 or not 0 <= k <= n + 1:
        raise ContractViolation(f"R_(n,k) needs n >= 1 and 0 <= k <= n+1, got ({n}, {k})")
    if n <= MAX_DIMENSION:
        return transition_table(family).R[n, k]
    if k == 0:
        return Fraction(1)
    if k >= n:
        return Fraction(0)
    value = Fraction(1)
    for j in range(n - k + 1, n + 1):
        value *= transition_constant(family, j)
    return value


def kappa(family: MeasureFamily, C: Copula, config: EstimatorConfig = EstimatorConfig()) -> EvalResult:
    """``kappa_n(C)`` for an ``n``-copula, ``n >= 2``."""
    if C.dim < 2:
        raise ContractViolation(f"concordance needs a copula of dimension >= 2, got {C.dim}")
    return _kappa(family, canonical(C), config)


@lru_cache(maxsize=8192)
def _kappa(family: MeasureFamily, C: Copula, config: EstimatorConfig) -> EvalResult:
    n = C.dim
    kind = family.kind
    if kind is Kind.SCARSINI:
        seed = family.seed_family
        pairs = [_kappa(seed, canonical(A), config) for _, A in enumerate_marginals(C, 2)]
        return linear_combination((1.0 / comb(n, 2), k) for k in pairs)
    a = float(alpha(family, n))
    if kind is Kind.KENDALL:
        return a * (integrate_self(C, config) - 0.5**n)
    if kind is Kind.SPEARMAN:
        integral = integrate_lebesgue(C, config)
    elif kind is Kind.GINI:
        integral = integrate_diagonals(C, config)
    else:
        integral = center_mass(C)
    return a * (integral - 0.5 ** (n - 1))


def kappa_exact_en(family: MeasureFamily, n: int, theta: float) -> Optional[float]:
    """Closed-form ``kappa_n(En(n, theta))``; ``None`` where no closed form is provided."""
    if n < 2:
        raise ContractViolation(f"n must be >= 2, got {n}")
    even = 1 + (-1) ** n
    kind = family.kind
    if kind is Kind.SPEARMAN:
        return float(alpha(family, n)) * theta * even / 6**n
    if kind is Kind.KENDALL:
        return float(alpha(family, n)) * theta * ((1 / 6) ** n + (-1 / 6) ** n)
    if kind is Kind.BLOMQVIST:
        return float(alpha(family, n)) * theta * even / 4**n
    return None
