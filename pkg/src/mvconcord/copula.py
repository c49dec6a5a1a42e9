"""Copula expressions: constructors, pointwise evaluation, symmetry action, marginals.

Every node is an immutable dataclass.  Evaluation is vectorized: ``evaluate``
accepts an array of shape ``(..., n)`` and returns an array of shape ``(...)``.
Calling a node on a single point returns a float.

Marginal indices follow the convention ``C_{i_1...i_k}``: they name the
coordinates that are DROPPED (set to 1), 1-based.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Sequence, Union

import numpy as np

from .symmetry import Symmetry

MAX_DIMENSION = int(os.environ.get("MVCONCORD_MAX_DIM", "12"))

# rows of query points per block when evaluating an Empirical copula
_EMPIRICAL_BLOCK = 1 << 22


class ContractViolation(ValueError):
    """An operation was called outside its documented preconditions."""


class DimensionCapError(ContractViolation):
    """A copula dimension exceeds ``MAX_DIMENSION``."""


def _check_dim(n: int, minimum: int = 1) -> int:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise ContractViolation(f"dimension must be an integer, got {n!r}")
    n = int(n)
    if n < minimum:
        raise ContractViolation(f"dimension must be >= {minimum}, got {n}")
    if n > MAX_DIMENSION:
        raise DimensionCapError(f"dimension {n} exceeds the cap of {MAX_DIMENSION}")
    return n


class Copula:
    """Base class for copula expression nodes."""

    dim: int

    def _eval(self, x: np.ndarray) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError

    def __call__(self, *coords):
        if len(coords) == 1 and np.ndim(coords[0]) >= 1:
            x = np.asarray(coords[0], dtype=float)
        else:
            x = np.asarray(coords, dtype=float)
        out = evaluate(self, x)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Pi(Copula):
    """Independence copula ``x_1 * ... * x_n``; ``Pi(1)`` is the identity on I."""

    dim: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "dim", _check_dim(self.dim, 1))

    def _eval(self, x):
        return np.prod(x, axis=-1)

    def __str__(self) -> str:
        return f"Pi({self.dim})"


@dataclass(frozen=True)
class M(Copula):
    """Comonotone copula ``min(x_1, ..., x_n)`` (upper Frechet bound)."""

    dim: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "dim", _check_dim(self.dim, 2))

    def _eval(self, x):
        return np.min(x, axis=-1)

    def __str__(self) -> str:
        return f"M({self.dim})"


@dataclass(frozen=True)
class En(Copula):
    """Perturbation of independence with independent (n-1)-marginals.

    ``En(x) = prod x_i + theta * prod x_i (1 - x_i)``, density
    ``1 + theta * prod (1 - 2 x_i)``, ``-1 <= theta <= 1``.
    """

    dim: int
    theta: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "dim", _check_dim(self.dim, 2))
        theta = float(self.theta)
        if not -1.0 <= theta <= 1.0:
            raise ContractViolation(f"theta must lie in [-1, 1], got {theta}")
        object.__setattr__(self, "theta", theta)

    def _eval(self, x):
        p = np.prod(x, axis=-1)
        return p + self.theta * p * np.prod(1.0 - x, axis=-1)

    def density(self, x: np.ndarray) -> np.ndarray:
        return 1.0 + self.theta * np.prod(1.0 - 2.0 * np.asarray(x, dtype=float), axis=-1)

    def __str__(self) -> str:
        return f"En({self.dim},{self.theta!r})"


@dataclass(frozen=True)
class Product(Copula):
    """``(A (x) B)(x, y) = A(x) B(y)`` of dimension ``dim(A) + dim(B)``."""

    left: Copula
    right: Copula
    dim: int = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "dim", _check_dim(self.left.dim + self.right.dim, 2))

    def _eval(self, x):
        p = self.left.dim
        return self.left._eval(x[..., :p]) * self.right._eval(x[..., p:])

    def __str__(self) -> str:
        return f"prod({self.left},{self.right})"


@dataclass(frozen=True)
class SymmetryApplied(Copula):
    """``xi^* C``: the copula of the measure pulled back along the symmetry ``xi``.

    ``(xi^* C)(x) = mu(xi([0, x]))``.  The image box has coordinate ``i`` equal
    to ``[0, x_{k_i}]`` or, when flipped, ``[1 - x_{k_i}, 1]``; its measure is
    the inclusion-exclusion sum over the flipped coordinates.
    """

    symmetry: Symmetry
    base: Copula
    dim: int = field(init=False)

    def __post_init__(self) -> None:
        if self.symmetry.dim != self.base.dim:
            raise ContractViolation(
                f"symmetry of dimension {self.symmetry.dim} applied to a {self.base.dim}-copula"
            )
        object.__setattr__(self, "dim", self.base.dim)

    def _eval(self, x):
        idx = np.asarray(self.symmetry.perm) - 1
        z = x[..., idx]
        flipped = [i for i, f in enumerate(self.symmetry.flips) if f]
        if not flipped:
            return self.base._eval(z)
        if isinstance(self.base, M):
            # comonotone mass of a box is the length of the intersection of its sides
            flips = np.asarray(self.symmetry.flips)
            lower = np.where(flips, 1.0 - z, 0.0).max(axis=-1)
            upper = np.where(flips, 1.0, z).min(axis=-1)
            return np.maximum(upper - lower, 0.0)
        total = np.zeros(z.shape[:-1])
        for size in range(len(flipped) + 1):
            sign = -1.0 if size % 2 else 1.0
            for subset in itertools.combinations(flipped, size):
                w = z.copy()
                w[..., flipped] = 1.0
                w[..., list(subset)] = 1.0 - z[..., list(subset)]
                total = total + sign * self.base._eval(w)
        return np.clip(total, 0.0, 1.0)

    def __str__(self) -> str:
        # (tau o sigma_S)^* = sigma_S^* tau^*, so the reflection prefix goes outside
        s = self.symmetry
        out = str(self.base)
        if not s.is_reflection:
            out = "perm(" + ",".join(map(str, s.perm)) + ")*" + out
        if s.reflected:
            out = "refl(" + ",".join(map(str, sorted(s.reflected))) + ")*" + out
        return out


@dataclass(frozen=True)
class MarginalOf(Copula):
    """``C_{i_1...i_k}``: ``C`` with the (1-based) coordinates in ``dropped`` set to 1."""

    base: Copula
    dropped: tuple[int, ...]
    dim: int = field(init=False)

    def __post_init__(self) -> None:
        dropped = tuple(sorted({int(i) for i in self.dropped}))
        n = self.base.dim
        if any(i < 1 or i > n for i in dropped):
            raise ContractViolation(f"dropped indices {dropped} out of range 1..{n}")
        if n - len(dropped) < 2:
            raise ContractViolation(
                f"dropping {len(dropped)} of {n} coordinates leaves fewer than 2"
            )
        object.__setattr__(self, "dropped", dropped)
        object.__setattr__(self, "dim", n - len(dropped))

    @property
    def retained(self) -> tuple[int, ...]:
        return tuple(i for i in range(1, self.base.dim + 1) if i not in self.dropped)

    def _eval(self, x):
        full = np.ones(x.shape[:-1] + (self.base.dim,))
        full[..., np.asarray(self.retained) - 1] = x
        return self.base._eval(full)

    def __str__(self) -> str:
        return f"marg({self.base}; drop={','.join(map(str, self.dropped))})"


@dataclass(frozen=True)
class Mixture(Copula):
    """Convex combination ``(1 - weight) * first + weight * second``."""

    weight: float
    first: Copula
    second: Copula
    dim: int = field(init=False)

    def __post_init__(self) -> None:
        w = float(self.weight)
        if not 0.0 <= w <= 1.0:
            raise ContractViolation(f"mixture weight must lie in [0, 1], got {w}")
        if self.first.dim != self.second.dim:
            raise ContractViolation(
                f"cannot mix copulas of dimension {self.first.dim} and {self.second.dim}"
            )
        object.__setattr__(self, "weight", w)
        object.__setattr__(self, "dim", self.first.dim)

    def _eval(self, x):
        w = self.weight
        return (1.0 - w) * self.first._eval(x) + w * self.second._eval(x)

    def __str__(self) -> str:
        return f"mix({self.weight!r},{self.first},{self.second})"


@dataclass(frozen=True, eq=False)
class Empirical(Copula):
    """Empirical copula of pseudo-observations ``points`` (rows in (0, 1)^n).

    ``C(x)`` is the fraction of rows dominated componentwise by ``x``.
    Hashing and equality are by identity.
    """

    points: np.ndarray
    dim: int = field(init=False)

    def __post_init__(self) -> None:
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ContractViolation("empirical points must be a non-empty 2-d array")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "dim", _check_dim(pts.shape[1], 2))

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def _eval(self, x):
        flat = x.reshape(-1, self.dim)
        out = np.empty(flat.shape[0])
        block = max(1, _EMPIRICAL_BLOCK // (self.size * self.dim))
        for start in range(0, flat.shape[0], block):
            q = flat[start:start + block]
            dominated = np.all(self.points[None, :, :] <= q[:, None, :], axis=-1)
            out[start:start + block] = dominated.mean(axis=1)
        return out.reshape(x.shape[:-1])

    def __str__(self) -> str:
        return f"Empirical(rows={self.size},dim={self.dim})"


CopulaExpr = Union[Pi, M, En, Product, SymmetryApplied, MarginalOf, Mixture, Empirical]


def as_points(x, dim: int) -> np.ndarray:
    """Validate query points against a dimension: last axis ``dim``, values in [0, 1]."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0 or arr.shape[-1] != dim:
        raise ContractViolation(f"expected points of dimension {dim}, got shape {arr.shape}")
    if not np.all((arr >= 0.0) & (arr <= 1.0)):
        raise ContractViolation("every coordinate must lie in [0, 1]")
    return arr


def evaluate(C: Copula, x) -> np.ndarray:
    """``C(x)`` for one point or an array of points along the last axis."""
    return np.asarray(C._eval(as_points(x, C.dim)))


def apply_symmetry(xi: Symmetry, C: Copula) -> SymmetryApplied:
    """Return the expression ``xi^* C`` (no algebraic folding of nested symmetries)."""
    if xi.dim != C.dim:
        raise ContractViolation(f"symmetry of dimension {xi.dim} applied to a {C.dim}-copula")
    return SymmetryApplied(xi, C)


def canonical(C: Copula) -> Copula:
    """Equivalent expression with nested symmetry nodes folded, ``xi^*(eta^*D) = (eta xi)^*D``.

    Identity symmetries are removed.  Pointwise values are unchanged.
    """
    if isinstance(C, SymmetryApplied):
        inner = canonical(C.base)
        xi = C.symmetry
        if isinstance(inner, SymmetryApplied):
            xi = inner.symmetry.compose(xi)
            inner = inner.base
        if xi == Symmetry.identity(xi.dim):
            return inner
        return SymmetryApplied(xi, inner)
    if isinstance(C, Product):
        return Product(canonical(C.left), canonical(C.right))
    if isinstance(C, Mixture):
        return Mixture(C.weight, canonical(C.first), canonical(C.second))
    if isinstance(C, MarginalOf):
        return MarginalOf(canonical(C.base), C.dropped)
    return C


def reflect(C: Copula, *indices: int) -> SymmetryApplied:
    """``sigma_{i_1}^* ... sigma_{i_k}^* C``."""
    return apply_symmetry(Symmetry.reflection(C.dim, *indices), C)


def permute(C: Copula, perm: Sequence[int]) -> SymmetryApplied:
    return apply_symmetry(Symmetry.permutation(perm), C)


def marginal(C: Copula, dropped: Iterable[int]) -> Copula:
    """``C_{dropped}``; an empty drop set returns ``C`` itself."""
    dropped = tuple(dropped)
    if not dropped:
        return C
    return MarginalOf(C, dropped)


def enumerate_marginals(C: Copula, k: int) -> list[tuple[tuple[int, ...], Copula]]:
    """All ``k``-dimensional marginals as ``(retained, marginal)``, lexicographic in ``retained``."""
    n = C.dim
    if not 2 <= k <= n:
        raise ContractViolation(f"marginal dimension must lie in 2..{n}, got {k}")
    out = []
    for retained in itertools.combinations(range(1, n + 1), k):
        dropped = tuple(i for i in range(1, n + 1) if i not in retained)
        out.append((retained, marginal(C, dropped)))
    assert len(out) == comb(n, k)
    return out


def survival_copula(C: Copula) -> SymmetryApplied:
    """``sigma^* C``, which satisfies ``survival(C, x) = (sigma^* C)(1 - x)``."""
    return apply_symmetry(Symmetry.full_reflection(C.dim), C)


def survival(C: Copula, x) -> np.ndarray:
    """``P(X_1 > x_1, ..., X_n > x_n)``."""
    pts = as_points(x, C.dim)
    return np.asarray(survival_copula(C)._eval(1.0 - pts))


def product(A: Copula, B: Copula) -> Product:
    return Product(A, B)


def grid(dim: int, resolution: int) -> np.ndarray:
    """Uniform grid with ``resolution`` points per axis including 0 and 1, shape ``(resolution**dim, dim)``."""
    if resolution < 2:
        raise ContractViolation(f"grid resolution must be >= 2, got {resolution}")
    axis = np.linspace(0.0, 1.0, resolution)
    mesh = np.meshgrid(*([axis] * dim), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def dominates_on_grid(A: Copula, B: Copula, resolution: int, atol: float = 1e-12) -> bool:
    """Grid-level check of ``A < B`` in concordance order: ``A <= B`` and ``sigma^*A <= sigma^*B``.

    Only a necessary condition: points off the grid are not inspected.
    """
    if A.dim != B.dim:
        raise ContractViolation(f"dimension mismatch: {A.dim} vs {B.dim}")
    pts = grid(A.dim, resolution)
    if np.any(A._eval(pts) > B._eval(pts) + atol):
        return False
    sa, sb = survival_copula(A), survival_copula(B)
    return bool(np.all(sa._eval(pts) <= sb._eval(pts) + atol))


def rectangle_volume(C: Copula, lower, upper) -> np.ndarray:
    """``mu_C([lower, upper])`` by the 2^n-corner inclusion-exclusion of ``C``."""
    lo = np.asarray(lower, dtype=float)
    hi = np.asarray(upper, dtype=float)
    n = C.dim
    total = 0.0
    for corner in itertools.product((0, 1), repeat=n):
        pick = np.asarray(corner, dtype=bool)
        pt = np.where(pick, lo, hi)
        sign = -1.0 if pick.sum() % 2 else 1.0
        total = total + sign * C._eval(pt)
    return np.asarray(total)
