"""Integration and sampling for copula expressions.

Three evaluation routes are used, recorded in ``EvalResult.method``:

* ``exact``: closed forms built from a small calculus of expectations
  ``E_C[prod_i p_i(U_i)]`` for univariate polynomials ``p_i`` (available for
  every node) and of polynomial expansions of ``C`` itself (available when no
  ``M`` or ``Empirical`` node occurs).
* ``quadrature``: composite Simpson along the main diagonals of I^n.
* ``monte_carlo``: seeded, chunked sampling with a reported standard error.
"""

from __future__ import annotations

import csv
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from functools import reduce, singledispatch
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from numpy.polynomial import Polynomial
from scipy.integrate import simpson
from scipy.stats import rankdata

from .copula import (
    Copula,
    ContractViolation,
    Empirical,
    En,
    M,
    MarginalOf,
    Mixture,
    Pi,
    Product,
    SymmetryApplied,
    survival_copula,
)

EXACT = "exact"
QUADRATURE = "quadrature"
MONTE_CARLO = "monte_carlo"
_METHOD_RANK = {EXACT: 0, QUADRATURE: 1, MONTE_CARLO: 2}

_ONE = Polynomial([1.0])
_X = Polynomial([0.0, 1.0])
_ONE_MINUS_X = Polynomial([1.0, -1.0])


class InputError(ValueError):
    """Malformed user data (CSV contents, matrix shape, non-finite values)."""


class NoSamplerError(TypeError):
    """The expression contains a node that cannot be sampled."""


@dataclass(frozen=True)
class EstimatorConfig:
    """Budgets and seed for every stochastic or numerical evaluation.

    Monte Carlo draws are split into chunks of ``chunk_size``; chunk ``i`` uses
    the stream ``SeedSequence(seed, spawn_key=(i,))``, so results do not depend
    on ``workers``.
    """

    mc_samples: int = 1_000_000
    grid_resolution: int = 64
    diag_quadrature_points: int = 2049
    seed: int = 42
    exact_preferred: bool = True
    workers: int = 1
    chunk_size: int = 1 << 16

    def __post_init__(self) -> None:
        for name in ("mc_samples", "grid_resolution", "diag_quadrature_points", "workers", "chunk_size"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or isinstance(value, bool) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if self.diag_quadrature_points < 3 or self.diag_quadrature_points % 2 == 0:
            raise ValueError(
                f"diag_quadrature_points must be odd and >= 3, got {self.diag_quadrature_points}"
            )
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class EvalResult:
    """A value, the route that produced it, and a standard error for Monte Carlo."""

    value: float
    method: str = EXACT
    std_error: Optional[float] = None

    def __post_init__(self) -> None:
        if self.method not in _METHOD_RANK:
            raise ValueError(f"unknown method {self.method!r}")
        if (self.method == MONTE_CARLO) != (self.std_error is not None):
            raise ValueError("std_error must be given exactly when method is monte_carlo")
        if self.std_error is not None and self.std_error < 0:
            raise ValueError("std_error must be nonnegative")
        object.__setattr__(self, "value", float(self.value))

    def __float__(self) -> float:
        return self.value

    def _combine(self, other: "EvalResult | float", sign: float) -> "EvalResult":
        if not isinstance(other, EvalResult):
            return EvalResult(self.value + sign * float(other), self.method, self.std_error)
        method = max(self.method, other.method, key=_METHOD_RANK.__getitem__)
        se = None
        if method == MONTE_CARLO:
            se = math.hypot(self.std_error or 0.0, other.std_error or 0.0)
        return EvalResult(self.value + sign * other.value, method, se)

    def __add__(self, other):
        return self._combine(other, 1.0)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __rsub__(self, other):
        return (-self)._combine(other, 1.0)

    def __neg__(self):
        return self * -1.0

    def __mul__(self, c):
        c = float(c)
        se = None if self.std_error is None else abs(c) * self.std_error
        return EvalResult(c * self.value, self.method, se)

    __rmul__ = __mul__


def linear_combination(terms: Iterable[tuple[float, EvalResult]], constant: float = 0.0) -> EvalResult:
    """``constant + sum c_i * r_i`` with standard errors added in quadrature."""
    return reduce(lambda acc, t: acc + float(t[0]) * t[1], terms, EvalResult(constant))


# ---------------------------------------------------------------------------
# exact calculus: E_C[prod p_i(U_i)]


def _integral01(p: Polynomial) -> float:
    q = p.integ()
    return float(q(1.0) - q(0.0))


def _reflect_poly(p: Polynomial) -> Polynomial:
    return p(_ONE_MINUS_X)


@singledispatch
def expect_product(C: Copula, polys: Sequence[Polynomial]) -> float:
    """``E[prod_i polys[i](U_i)]`` for ``U`` distributed by the measure of ``C``."""
    raise TypeError(f"no moment rule for {type(C).__name__}")


@expect_product.register
def _(C: Pi, polys):
    return math.prod(_integral01(p) for p in polys)


@expect_product.register
def _(C: M, polys):
    return _integral01(reduce(lambda a, b: a * b, polys, _ONE))


@expect_product.register
def _(C: En, polys):
    base = math.prod(_integral01(p) for p in polys)
    tilt = math.prod(_integral01(p * Polynomial([1.0, -2.0])) for p in polys)
    return base + C.theta * tilt


@expect_product.register
def _(C: Product, polys):
    p = C.left.dim
    return expect_product(C.left, polys[:p]) * expect_product(C.right, polys[p:])


@expect_product.register
def _(C: Mixture, polys):
    w = C.weight
    return (1.0 - w) * expect_product(C.first, polys) + w * expect_product(C.second, polys)


@expect_product.register
def _(C: MarginalOf, polys):
    full = [_ONE] * C.base.dim
    for p, i in zip(polys, C.retained):
        full[i - 1] = p
    return expect_product(C.base, full)


@expect_product.register
def _(C: SymmetryApplied, polys):
    # samples of xi^*C are xi^{-1}(U) with U ~ C: coordinate k_i is U_i, reflected when flipped
    inner = []
    for k, f in zip(C.symmetry.perm, C.symmetry.flips):
        p = polys[k - 1]
        inner.append(_reflect_poly(p) if f else p)
    return expect_product(C.base, inner)


@expect_product.register
def _(C: Empirical, polys):
    vals = np.ones(C.size)
    for j, p in enumerate(polys):
        vals = vals * p(C.points[:, j])
    return float(vals.mean())


# polynomial expansion of C as sum_t c_t prod_i p_{t,i}(x_i); None when not polynomial

Terms = list[tuple[float, tuple[Polynomial, ...]]]


@singledispatch
def polynomial_terms(C: Copula) -> Optional[Terms]:
    return None


@polynomial_terms.register
def _(C: Pi):
    return [(1.0, (_X,) * C.dim)]


@polynomial_terms.register
def _(C: En):
    return [(1.0, (_X,) * C.dim), (C.theta, (_X * _ONE_MINUS_X,) * C.dim)]


@polynomial_terms.register
def _(C: Product):
    a, b = polynomial_terms(C.left), polynomial_terms(C.right)
    if a is None or b is None:
        return None
    return [(ca * cb, pa + pb) for (ca, pa), (cb, pb) in itertools.product(a, b)]


@polynomial_terms.register
def _(C: Mixture):
    a, b = polynomial_terms(C.first), polynomial_terms(C.second)
    if a is None or b is None:
        return None
    w = C.weight
    return [((1.0 - w) * c, p) for c, p in a] + [(w * c, p) for c, p in b]


@polynomial_terms.register
def _(C: MarginalOf):
    terms = polynomial_terms(C.base)
    if terms is None:
        return None
    keep = [i - 1 for i in C.retained]
    out = []
    for c, polys in terms:
        scale = math.prod(float(polys[i - 1](1.0)) for i in C.dropped)
        out.append((c * scale, tuple(polys[j] for j in keep)))
    return out


@polynomial_terms.register
def _(C: SymmetryApplied):
    terms = polynomial_terms(C.base)
    if terms is None:
        return None
    out = []
    for c, polys in terms:
        mapped = [_ONE] * C.dim
        for p, k, f in zip(polys, C.symmetry.perm, C.symmetry.flips):
            # a flipped box side [1 - x, 1] integrates to p(1) - p(1 - x)
            mapped[k - 1] = (float(p(1.0)) - _reflect_poly(p)) if f else p
        out.append((c, tuple(mapped)))
    return out


def is_polynomial(C: Copula) -> bool:
    return polynomial_terms(C) is not None


# ---------------------------------------------------------------------------
# sampling


@singledispatch
def _draw(C: Copula, count: int, rng: np.random.Generator) -> np.ndarray:
    raise NoSamplerError(f"no sampler for node {type(C).__name__}")


@_draw.register
def _(C: Pi, count, rng):
    return rng.random((count, C.dim))


@_draw.register
def _(C: M, count, rng):
    return np.repeat(rng.random((count, 1)), C.dim, axis=1)


@_draw.register
def _(C: En, count, rng):
    # rejection against the constant envelope 1 + |theta|
    bound = 1.0 + abs(C.theta)
    out = np.empty((count, C.dim))
    filled = 0
    while filled < count:
        need = count - filled
        batch = int(need * bound) + 16
        cand = rng.random((batch, C.dim))
        accept = rng.random(batch) * bound <= C.density(cand)
        got = cand[accept][:need]
        out[filled:filled + got.shape[0]] = got
        filled += got.shape[0]
    return out


@_draw.register
def _(C: Product, count, rng):
    return np.concatenate([_draw(C.left, count, rng), _draw(C.right, count, rng)], axis=1)


@_draw.register
def _(C: Mixture, count, rng):
    pick = rng.random(count) < C.weight
    a = _draw(C.first, count, rng)
    b = _draw(C.second, count, rng)
    return np.where(pick[:, None], b, a)


@_draw.register
def _(C: MarginalOf, count, rng):
    return _draw(C.base, count, rng)[:, np.asarray(C.retained) - 1]


@_draw.register
def _(C: SymmetryApplied, count, rng):
    return C.symmetry.inverse().apply(_draw(C.base, count, rng))


@_draw.register
def _(C: Empirical, count, rng):
    return C.points[rng.integers(0, C.size, size=count)]


def _chunks(total: int, chunk_size: int) -> list[int]:
    sizes = [chunk_size] * (total // chunk_size)
    if total % chunk_size:
        sizes.append(total % chunk_size)
    return sizes


def _stream(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def sample(C: Copula, count: int, seed: int, chunk_size: int = 1 << 16) -> np.ndarray:
    """``count`` i.i.d. draws from the measure of ``C``, shape ``(count, dim)``."""
    if count < 0:
        raise ContractViolation(f"sample count must be nonnegative, got {count}")
    parts = [_draw(C, size, _stream(seed, i)) for i, size in enumerate(_chunks(count, chunk_size))]
    return np.concatenate(parts) if parts else np.empty((0, C.dim))


def _mc_mean(values_for: Callable[[np.random.Generator, int], np.ndarray], config: EstimatorConfig) -> EvalResult:
    sizes = _chunks(config.mc_samples, config.chunk_size)

    def run(i: int) -> tuple[int, float, float]:
        v = np.asarray(values_for(_stream(config.seed, i), sizes[i]), dtype=float)
        mean = float(v.mean())
        return v.size, mean, float(((v - mean) ** 2).sum())

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            stats = list(pool.map(run, range(len(sizes))))
    else:
        stats = [run(i) for i in range(len(sizes))]
    # Chan et al. pairwise update, folded in chunk order
    n, mean, m2 = stats[0]
    for nb, mb, m2b in stats[1:]:
        delta = mb - mean
        tot = n + nb
        mean += delta * nb / tot
        m2 += m2b + delta * delta * n * nb / tot
        n = tot
    var = m2 / (n - 1) if n > 1 else 0.0
    return EvalResult(mean, MONTE_CARLO, math.sqrt(var / n))


# ---------------------------------------------------------------------------
# integrals used by the concordance families


def integrate_lebesgue(C: Copula, config: EstimatorConfig = EstimatorConfig()) -> EvalResult:
    """``int_{I^n} (C + sigma^*C) d lambda^n``.

    Exact route: ``int C d lambda = E_C[prod (1 - U_i)]`` and
    ``int sigma^*C d lambda = E_C[prod U_i]``.
    """
    n = C.dim
    if config.exact_preferred:
        value = expect_product(C, [_ONE_MINUS_X] * n) + expect_product(C, [_X] * n)
        return EvalResult(value, EXACT)
    S = survival_copula(C)

    def values(rng, k):
        u = rng.random((k, n))
        return C._eval(u) + S._eval(u)

    return _mc_mean(values, config)


def main_diagonals(n: int) -> list[tuple[int, ...]]:
    """One vertex ``v`` per pair ``{v, 1 - v}``, canonicalized by ``v_1 = 0``; 2^(n-1) entries."""
    return [(0,) + tail for tail in itertools.product((0, 1), repeat=n - 1)]


def _diagonal_points(vertex: Sequence[int], t: np.ndarray) -> np.ndarray:
    v = np.asarray(vertex, dtype=bool)
    return np.where(v, 1.0 - t[:, None], t[:, None])


def integrate_diagonals(C: Copula, config: EstimatorConfig = EstimatorConfig()) -> EvalResult:
    """``int (C + sigma^*C) d mu_n`` for the uniform measure on the main diagonals of I^n."""
    n = C.dim
    S = survival_copula(C)
    diagonals = main_diagonals(n)
    if config.exact_preferred:
        terms = polynomial_terms(C)
        if terms is not None:
            terms = terms + polynomial_terms(S)
            total = 0.0
            for v in diagonals:
                for c, polys in terms:
                    along = reduce(
                        lambda a, b: a * b,
                        (p(_ONE_MINUS_X) if vi else p for p, vi in zip(polys, v)),
                        _ONE,
                    )
                    total += c * _integral01(along)
            return EvalResult(total / len(diagonals), EXACT)
    t = np.linspace(0.0, 1.0, config.diag_quadrature_points)
    pts = np.concatenate([_diagonal_points(v, t) for v in diagonals])
    vals = (C._eval(pts) + S._eval(pts)).reshape(len(diagonals), t.size)
    return EvalResult(float(np.mean(simpson(vals, x=t, axis=-1))), QUADRATURE)


def integrate_self(C: Copula, config: EstimatorConfig = EstimatorConfig()) -> EvalResult:
    """``int_{I^n} C dC``, i.e. ``E[C(U)]`` for ``U ~ C``.

    Exact when ``C`` is polynomial (expansion plus moments) or an empirical
    copula (finite mean over its atoms); otherwise the Monte Carlo plug-in mean.
    """
    if config.exact_preferred:
        terms = polynomial_terms(C)
        if terms is not None:
            return EvalResult(sum(c * expect_product(C, polys) for c, polys in terms), EXACT)
        if isinstance(C, Empirical):
            return EvalResult(float(C._eval(C.points).mean()), EXACT)
    return _mc_mean(lambda rng, k: C._eval(_draw(C, k, rng)), config)


def center_mass(C: Copula) -> EvalResult:
    """``C(1/2, ..., 1/2) + (sigma^*C)(1/2, ..., 1/2)``."""
    half = np.full(C.dim, 0.5)
    return EvalResult(float(C._eval(half) + survival_copula(C)._eval(half)), EXACT)


# ---------------------------------------------------------------------------
# data


def pseudo_observations(data) -> np.ndarray:
    """Column ranks (average on ties) divided by ``rows + 1``."""
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 2:
        raise InputError(f"data must be a 2-d matrix, got {arr.ndim} dimensions")
    rows, cols = arr.shape
    if rows < 2 or cols < 2:
        raise InputError(f"need at least 2 rows and 2 columns, got {rows}x{cols}")
    bad = np.argwhere(~np.isfinite(arr))
    if bad.size:
        r, c = bad[0]
        raise InputError(f"non-finite value {arr[r, c]} at row {r + 1}, column {c + 1}")
    return rankdata(arr, method="average", axis=0) / (rows + 1)


def empirical_copula(data, config: EstimatorConfig | None = None) -> Empirical:
    """Empirical copula of a data matrix (rows are observations)."""
    return Empirical(pseudo_observations(data))


def read_csv(path: str | Path) -> np.ndarray:
    """Read a numeric CSV (``,`` delimiter, ``.`` decimals); a non-numeric first row is a header."""
    rows: list[list[float]] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        width = None
        for lineno, record in enumerate(reader, start=1):
            if not record or all(not cell.strip() for cell in record):
                continue
            try:
                values = [float(cell) for cell in record]
            except ValueError:
                if not rows and lineno == 1:
                    continue
                for col, cell in enumerate(record, start=1):
                    try:
                        float(cell)
                    except ValueError:
                        raise InputError(
                            f"{path}: non-numeric value {cell.strip()!r} at line {lineno}, column {col}"
                        ) from None
                raise
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise InputError(
                    f"{path}: line {lineno} has {len(values)} fields, expected {width}"
                )
            for col, v in enumerate(values, start=1):
                if not math.isfinite(v):
                    raise InputError(f"{path}: non-finite value {v} at line {lineno}, column {col}")
            rows.append(values)
    if not rows:
        raise InputError(f"{path}: no numeric rows")
    return np.asarray(rows, dtype=float)
